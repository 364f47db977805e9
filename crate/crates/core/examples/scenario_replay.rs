//! Replays a scenario file and checks it against its expected commands.
//!
//! cargo run --example scenario_replay [scenario.json]

use std::path::PathBuf;

use psafe::cli::trace_line;
use psafe::runtime::{lower, Monitor, MonitorConfig};
use psafe::sensors::load_scenario;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/pedestrian_approach.json")
        });
    let scenario = match load_scenario(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let typed = psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM).unwrap();
    let monitor = Monitor::new(lower(&typed, &MonitorConfig::default()).unwrap());

    println!("# {}", scenario.name);
    let mut mismatches = 0;
    for (i, tick) in scenario.ticks.iter().enumerate() {
        let cmd = monitor.step(tick);
        println!("{}", trace_line(tick.timestamp(), &cmd));
        if let Some(want) = scenario.expected.as_ref().map(|e| &e[i]) {
            let ok = want.stop == cmd.stop
                && (want.speed - cmd.speed).abs() <= 1e-9
                && want
                    .sounds
                    .iter()
                    .map(String::as_str)
                    .eq(cmd.sound_labels());
            if !ok {
                mismatches += 1;
                println!(
                    "  expected stop={} speed={} sounds={:?}",
                    want.stop, want.speed, want.sounds
                );
            }
        }
    }
    println!("{mismatches} mismatch(es)");
}
