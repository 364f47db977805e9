//! Lint warnings for overlapping, dead and constant guards.
//!
//! cargo run --example lint_thresholds

use psafe::diagnostic::render_all;
use psafe::sema::lint;

const PROGRAM: &str = "\
exists p in camera.all(pedestrian):
    distance(p) < 2m { cap_speed; }
    distance(p) < 2m { sound beep; }
    distance(p) < 0m { stop; }
lasers a in lasers(alive):
    count(a) >= 0 { sound ok; }
";

fn main() {
    for (name, source) in [
        ("perception.psafe", psafe::REFERENCE_PROGRAM),
        ("overlap.psafe", PROGRAM),
    ] {
        let typed = psafe::compile(name, source).expect("program typechecks");
        let report = lint(&typed);
        println!("{name}: {} warning(s)", report.len());
        print!("{}", render_all(&report.warnings, name));
    }
}
