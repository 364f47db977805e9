//! Scenario trace files.
//!
//! ```json
//! {
//!   "name": "pedestrian approach",
//!   "ticks": [
//!     { "t": 0.0,
//!       "camera": { "detections": [{"class": "pedestrian", "distance_m": 6.0}],
//!                   "image": {"pgm": "frames/healthy.pgm"} },
//!       "lidar": { "objects": [] },
//!       "laser": { "alive_mask": "0xFFFFFFFF" } }
//!   ],
//!   "expected": [ {"stop": false, "speed": 1.0, "sounds": []} ]
//! }
//! ```
//!
//! An image is one of `{"pgm": path}` (relative to the scenario file),
//! `{"width", "height", "pixels"}`, or `{"histogram": {"bins": [...]}}`.
//! A missing key means the sensor delivered nothing on that tick.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::snapshot::{RawDetection, RawFrame, RawSnapshot};
use super::{pgm, validate_snapshot, CameraFrame, Detection, SensorError, SensorSnapshot};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub ticks: Vec<SensorSnapshot>,
    pub expected: Option<Vec<ExpectedCommand>>,
}

/// Golden summary of one tick's command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedCommand {
    pub stop: bool,
    pub speed: f64,
    pub sounds: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    ticks: Vec<TickFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected: Option<Vec<ExpectedCommand>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TickFile {
    t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    camera: Option<CameraFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lidar: Option<LidarFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    laser: Option<LaserFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detections: Option<Vec<DetectionFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    image: Option<ImageFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LidarFile {
    objects: Vec<DetectionFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaserFile {
    alive_mask: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionFile {
    class: String,
    distance_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ImageFile {
    Pgm {
        pgm: String,
    },
    Inline {
        width: u64,
        height: u64,
        pixels: Vec<i64>,
    },
    Histogram {
        histogram: HistogramFile,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistogramFile {
    bins: Vec<i64>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, SensorError> {
    let text = std::fs::read_to_string(path).map_err(|source| SensorError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base, &path.display().to_string())
}

/// Parses scenario JSON; PGM references resolve against `base_dir`.
pub fn parse_scenario(text: &str, base_dir: &Path, origin: &str) -> Result<Scenario, SensorError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        SensorError::format(
            format!("{origin}:{}:{}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if file.ticks.is_empty() {
        return Err(SensorError::format(
            origin,
            "scenario requires at least one tick",
        ));
    }
    if let Some(expected) = &file.expected {
        if expected.len() != file.ticks.len() {
            return Err(SensorError::format(
                origin,
                format!(
                    "`expected` has {} entries for {} ticks",
                    expected.len(),
                    file.ticks.len()
                ),
            ));
        }
    }

    let mut ticks: Vec<SensorSnapshot> = Vec::with_capacity(file.ticks.len());
    for (i, tick) in file.ticks.into_iter().enumerate() {
        if let Some(prev) = ticks.last() {
            if tick.t.partial_cmp(&prev.timestamp()) != Some(std::cmp::Ordering::Greater) {
                return Err(SensorError::format(
                    format!("{origin}: ticks[{i}].t"),
                    format!(
                        "timestamps must be strictly increasing ({} after {})",
                        tick.t,
                        prev.timestamp()
                    ),
                ));
            }
        }
        let raw = tick_to_raw(tick, base_dir, origin, i)?;
        let snapshot = validate_snapshot(raw).map_err(|e| match e {
            SensorError::Snapshot { path, message } => SensorError::Snapshot {
                path: format!("ticks[{i}].{path}"),
                message,
            },
            other => other,
        })?;
        ticks.push(snapshot);
    }
    Ok(Scenario {
        name: file.name,
        ticks,
        expected: file.expected,
    })
}

fn detections_to_raw(ds: Vec<DetectionFile>) -> Vec<RawDetection> {
    ds.into_iter()
        .map(|d| RawDetection {
            class_label: d.class,
            distance: d.distance_m,
        })
        .collect()
}

fn tick_to_raw(
    tick: TickFile,
    base_dir: &Path,
    origin: &str,
    i: usize,
) -> Result<RawSnapshot, SensorError> {
    let mut raw = RawSnapshot {
        timestamp: tick.t,
        ..RawSnapshot::default()
    };
    if let Some(camera) = tick.camera {
        raw.camera_detections = camera.detections.map(detections_to_raw);
        raw.camera_image = match camera.image {
            None => None,
            Some(ImageFile::Pgm { pgm: rel }) => {
                Some(RawFrame::Image(pgm::read(&base_dir.join(rel))?))
            }
            Some(ImageFile::Inline {
                width,
                height,
                pixels,
            }) => Some(RawFrame::Pixels {
                width,
                height,
                pixels,
            }),
            Some(ImageFile::Histogram { histogram }) => Some(RawFrame::Histogram(histogram.bins)),
        };
    }
    if let Some(lidar) = tick.lidar {
        raw.lidar_objects = Some(detections_to_raw(lidar.objects));
    }
    if let Some(laser) = tick.laser {
        raw.laser_alive_mask = Some(parse_mask(&laser.alive_mask).map_err(|message| {
            SensorError::format(format!("{origin}: ticks[{i}].laser.alive_mask"), message)
        })?);
    }
    Ok(raw)
}

fn parse_mask(text: &str) -> Result<u64, String> {
    let digits = text
        .strip_prefix("0x")
        .or_else(|| text.strip_prefix("0X"))
        .unwrap_or(text);
    if digits.is_empty() || digits.len() > 8 {
        return Err(format!(
            "expected 1 to 8 hex digits for a 32-channel mask, found `{text}`"
        ));
    }
    u64::from_str_radix(digits, 16).map_err(|_| format!("invalid hex mask `{text}`"))
}

impl Scenario {
    /// Serializes to the scenario file format. Images are written inline.
    pub fn to_json(&self) -> String {
        let detections = |ds: &[Detection]| {
            ds.iter()
                .map(|d| DetectionFile {
                    class: d.class_label.clone(),
                    distance_m: d.distance,
                })
                .collect::<Vec<_>>()
        };
        let ticks = self
            .ticks
            .iter()
            .map(|s| {
                let image = s.camera_frame().map(|f| match f {
                    CameraFrame::Image(img) => ImageFile::Inline {
                        width: img.width().into(),
                        height: img.height().into(),
                        pixels: img.pixels().iter().map(|&p| p.into()).collect(),
                    },
                    CameraFrame::Histogram(h) => ImageFile::Histogram {
                        histogram: HistogramFile {
                            bins: h.bin_counts().iter().map(|&c| c as i64).collect(),
                        },
                    },
                });
                let detections_present = s.camera_detections().is_some();
                TickFile {
                    t: s.timestamp(),
                    camera: (detections_present || image.is_some()).then(|| CameraFile {
                        detections: s.camera_detections().map(detections),
                        image,
                    }),
                    lidar: s.lidar_objects().map(|o| LidarFile {
                        objects: detections(o),
                    }),
                    laser: s.laser_alive_mask().map(|m| LaserFile {
                        alive_mask: format!("0x{m:08X}"),
                    }),
                }
            })
            .collect();
        let file = ScenarioFile {
            name: self.name.clone(),
            ticks,
            expected: self.expected.clone(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }
}
