//! Speed and warnings as a pedestrian walks toward the robot.
//!
//! cargo run --example pedestrian_bands

use std::path::Path;

use psafe::runtime::{evaluate, lower, MonitorConfig};
use psafe::sensors::{pgm, Image, SensorSnapshot};

/// Ten populated bins with uneven counts, as a working camera produces.
fn healthy_frame() -> Image {
    pgm::read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/healthy.pgm"))
        .expect("bundled frame")
}

fn main() {
    let config = MonitorConfig::default().with_cap(0, 1, 0.5);
    let typed = psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM).unwrap();
    let table = lower(&typed, &config).unwrap();

    let frame = healthy_frame();

    println!("{:>8}  {:>5}  {:>4}  sounds", "distance", "speed", "stop");
    for d in [7.0, 5.0, 4.99, 3.5, 2.99, 1.5, 0.99, 0.2] {
        let snap = SensorSnapshot::builder(0.0)
            .camera_detection("pedestrian", d)
            .camera_image(frame.clone())
            .no_lidar_objects()
            .lasers_alive(32)
            .build()
            .unwrap();
        let cmd = evaluate(&table, &snap);
        println!(
            "{d:>7}m  {:>5}  {:>4}  {}",
            cmd.speed,
            cmd.stop,
            cmd.sound_labels().join(", ")
        );
    }
}
