//! Lowers the perception program with per-clause speed caps and dumps the
//! rule table.
//!
//! cargo run --example rule_table

use psafe::runtime::{lower, MonitorConfig};

fn main() {
    // slower as the pedestrian gets closer, gentler for distant lidar objects
    let config =
        MonitorConfig::from_json(r#"{"nominal_speed": 1.2, "caps": {"0.1": 0.4, "2.0": 0.8}}"#)
            .expect("valid config");
    let typed = psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM).unwrap();
    let table = lower(&typed, &config).unwrap();
    print!("{}", table.dump());

    let too_fast = config.clone().with_cap(3, 0, 2.0);
    match lower(&typed, &too_fast) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
