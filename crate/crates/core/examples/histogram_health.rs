//! Camera sanity checks from image histograms, reading PGM frames.
//!
//! cargo run --example histogram_health [frame.pgm]

use std::path::PathBuf;

use psafe::runtime::{evaluate, lower, MonitorConfig};
use psafe::sensors::{compute_histogram, pgm, Image, SensorSnapshot};

fn describe(name: &str, image: Image, table: &psafe::runtime::RuleTable) {
    let hist = compute_histogram(&image, 10).unwrap();
    let bars: Vec<String> = hist
        .normalized_view()
        .iter()
        .map(|f| format!("{:.2}", f))
        .collect();
    let snap = SensorSnapshot::builder(0.0)
        .no_camera_detections()
        .camera_image(image)
        .no_lidar_objects()
        .lasers_alive(32)
        .build()
        .unwrap();
    let cmd = evaluate(table, &snap);
    let fired: Vec<String> = cmd.fired.iter().map(|c| c.to_string()).collect();
    println!("{name}");
    println!("  bins   [{}]", bars.join(" "));
    println!(
        "  speed={} stop={} fired=[{}]",
        cmd.speed,
        cmd.stop,
        fired.join(",")
    );
}

fn main() {
    let typed = psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM).unwrap();
    let table = lower(&typed, &MonitorConfig::default()).unwrap();

    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/healthy.pgm"));
    match pgm::read(&path) {
        Ok(image) => describe(&path.display().to_string(), image, &table),
        Err(e) => eprintln!("{e}"),
    }

    describe(
        "covered lens (all black)",
        Image::filled(320, 240, 0).unwrap(),
        &table,
    );
    describe(
        "stuck at mid-grey",
        Image::filled(100, 100, 128).unwrap(),
        &table,
    );

    // an exactly even ramp also trips the spread check: every bin within 300 px
    let ramp: Vec<u8> = (0..320u32 * 240).map(|i| (i % 256) as u8).collect();
    describe(
        "synthetic flat ramp",
        Image::new(320, 240, ramp).unwrap(),
        &table,
    );

    // two intensities in a 70/30 split: 20% of bins populated, so only the cap fires
    let two_tone: Vec<u8> = (0..200u32 * 100)
        .map(|i| if i % 10 < 7 { 30 } else { 200 })
        .collect();
    describe("two-tone", Image::new(200, 100, two_tone).unwrap(), &table);
}
