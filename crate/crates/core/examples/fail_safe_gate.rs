//! A missing sensor stream forces a stop before any rule is looked at.
//!
//! cargo run --example fail_safe_gate

use std::time::Instant;

use psafe::runtime::{evaluate, lower, MonitorConfig};
use psafe::sensors::{pgm, SensorSnapshot};

fn main() {
    let typed = psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM).unwrap();
    let table = lower(&typed, &MonitorConfig::default()).unwrap();
    let frame =
        pgm::read(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/healthy.pgm"))
            .unwrap();

    let cases = [
        (
            "everything present",
            SensorSnapshot::builder(0.0)
                .camera_detection("pedestrian", 8.0)
                .camera_image(frame.clone())
                .no_lidar_objects()
                .lasers_alive(32),
        ),
        (
            "lidar dropped out",
            SensorSnapshot::builder(0.1)
                .camera_detection("pedestrian", 8.0)
                .camera_image(frame.clone())
                .lasers_alive(32),
        ),
        (
            "camera and lasers dropped out",
            SensorSnapshot::builder(0.2).no_lidar_objects(),
        ),
    ];
    for (name, builder) in cases {
        let snap = builder.build().unwrap();
        let start = Instant::now();
        let cmd = evaluate(&table, &snap);
        let faults: Vec<String> = cmd.faults.iter().map(|f| f.to_string()).collect();
        println!(
            "{name:<30} stop={:<5} speed={:<4} faults=[{}] ({:?})",
            cmd.stop,
            cmd.speed,
            faults.join(","),
            start.elapsed()
        );
    }
}
