//! Sensor data: validated snapshots, grayscale images and histograms, PGM
//! files, and scenario traces for replay.

mod image;
pub mod pgm;
mod scenario;
mod snapshot;

use std::fmt;
use std::path::PathBuf;

pub use image::{compute_histogram, Histogram, Image};
pub use scenario::{load_scenario, parse_scenario, ExpectedCommand, Scenario};
pub use snapshot::{
    validate_snapshot, CameraFrame, Detection, RawDetection, RawFrame, RawSnapshot, SensorSnapshot,
    SnapshotBuilder,
};

/// Number of laser channels in the liveness mask.
pub const LASER_CHANNELS: u32 = 32;

/// A sensor stream a program can depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SensorSource {
    CameraDetections,
    CameraImage,
    LidarObjects,
    LaserLiveness,
}

impl SensorSource {
    pub fn name(self) -> &'static str {
        match self {
            SensorSource::CameraDetections => "camera_detections",
            SensorSource::CameraImage => "camera_image",
            SensorSource::LidarObjects => "lidar_objects",
            SensorSource::LaserLiveness => "laser_liveness",
        }
    }
}

impl fmt::Display for SensorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SensorError {
    #[error("E-IO: {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("E-FORMAT: {context}: {message}")]
    Format { context: String, message: String },
    #[error("E-SNAPSHOT: {path}: {message}")]
    Snapshot { path: String, message: String },
    #[error("E-BINS: bin count {0} outside 1..=256")]
    Bins(usize),
}

impl SensorError {
    pub fn code(&self) -> &'static str {
        match self {
            SensorError::Io { .. } => "E-IO",
            SensorError::Format { .. } => "E-FORMAT",
            SensorError::Snapshot { .. } => "E-SNAPSHOT",
            SensorError::Bins(_) => "E-BINS",
        }
    }

    pub(crate) fn snapshot(path: impl Into<String>, message: impl Into<String>) -> Self {
        SensorError::Snapshot {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn format(context: impl Into<String>, message: impl Into<String>) -> Self {
        SensorError::Format {
            context: context.into(),
            message: message.into(),
        }
    }
}
