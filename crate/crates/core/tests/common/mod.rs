#![allow(dead_code)]

pub mod gen;
pub mod oracle;
pub mod suites;

use std::path::PathBuf;

use psafe::runtime::{lower, MonitorConfig, RuleTable};
use psafe::sensors::Image;

pub fn manifest_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

pub fn reference_table(config: &MonitorConfig) -> RuleTable {
    let typed = psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM).unwrap();
    lower(&typed, config).unwrap()
}

/// 500x290 image whose ten 10-bin buckets hold 10000, 11000, .., 19000 pixels.
pub fn healthy_image() -> Image {
    let mut pixels = Vec::with_capacity(145_000);
    for k in 0..10u8 {
        pixels.extend(std::iter::repeat_n(k * 26, 10_000 + 1_000 * usize::from(k)));
    }
    Image::new(500, 290, pixels).unwrap()
}
