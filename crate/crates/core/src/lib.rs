//! Compiler and runtime monitor for a small perception-safety rule language.
//!
//! Programs bind camera detections, image histograms and laser liveness, then
//! guard actions (`stop`, `cap_speed`, `sound x`) on unit-checked comparisons:
//!
//! ```
//! use psafe::runtime::{lower, evaluate, MonitorConfig};
//! use psafe::sensors::SensorSnapshot;
//!
//! let typed = psafe::compile("demo", "exists p in camera.all(pedestrian):\n  distance(p) < 1m { stop; }\n").unwrap();
//! let table = lower(&typed, &MonitorConfig::default()).unwrap();
//! let tick = SensorSnapshot::builder(0.0).camera_detection("pedestrian", 0.4).build().unwrap();
//! assert!(evaluate(&table, &tick).stop);
//! ```

pub mod ast;
pub mod cli;
pub mod diagnostic;
pub mod frontend;
pub mod runtime;
pub mod sema;
pub mod sensors;

use diagnostic::Diagnostic;
use sema::TypedProgram;

/// The fourteen-line perception program: pedestrian distance bands, camera
/// histogram health, lidar proximity and laser liveness.
pub const REFERENCE_PROGRAM: &str = include_str!("../programs/perception.psafe");

/// Tokenizes, parses and typechecks `source`.
pub fn compile(source_name: &str, source: &str) -> Result<TypedProgram, Vec<Diagnostic>> {
    sema::typecheck(frontend::parse_source(source_name, source)?)
}
