//! Alive laser channels versus commanded speed.
//!
//! cargo run --example laser_degradation

use std::path::Path;

use psafe::runtime::{evaluate, lower, MonitorConfig};
use psafe::sensors::{pgm, Image, SensorSnapshot, LASER_CHANNELS};

/// Ten populated bins with uneven counts, as a working camera produces.
fn healthy_frame() -> Image {
    pgm::read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/healthy.pgm"))
        .expect("bundled frame")
}

fn main() {
    let typed = psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM).unwrap();
    let table = lower(&typed, &MonitorConfig::default()).unwrap();
    let frame = healthy_frame();

    for alive in (20..=LASER_CHANNELS).rev() {
        let snap = SensorSnapshot::builder(0.0)
            .no_camera_detections()
            .camera_image(frame.clone())
            .no_lidar_objects()
            .lasers_alive(alive)
            .build()
            .unwrap();
        let cmd = evaluate(&table, &snap);
        let state = if cmd.stop {
            "stop"
        } else if cmd.speed < table.nominal_speed() {
            "capped"
        } else {
            "nominal"
        };
        println!(
            "{alive:>2}/{LASER_CHANNELS} alive  speed={:<4} {state}",
            cmd.speed
        );
    }

    // which channels are down does not matter, only how many
    let scattered: u32 = !((1 << 3) | (1 << 17) | (1 << 30));
    println!(
        "mask {scattered:#010x} has {} alive",
        scattered.count_ones()
    );
}
