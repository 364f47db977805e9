use super::{Histogram, Image, SensorError, SensorSource};

/// One detected object with its distance from the robot.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub class_label: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CameraFrame {
    Image(Image),
    /// A histogram computed upstream, used in place of the raw image.
    Histogram(Histogram),
}

/// One tick of validated sensor input.
///
/// Built only through [`validate_snapshot`] (or [`SnapshotBuilder`]), so every
/// distance is finite and nonnegative and every image is well formed. An
/// absent field means the stream delivered nothing this tick.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSnapshot {
    timestamp: f64,
    camera_detections: Option<Vec<Detection>>,
    camera_frame: Option<CameraFrame>,
    lidar_objects: Option<Vec<Detection>>,
    laser_alive_mask: Option<u32>,
}

impl SensorSnapshot {
    pub fn builder(timestamp: f64) -> SnapshotBuilder {
        SnapshotBuilder {
            raw: RawSnapshot {
                timestamp,
                ..RawSnapshot::default()
            },
        }
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn camera_detections(&self) -> Option<&[Detection]> {
        self.camera_detections.as_deref()
    }

    pub fn camera_frame(&self) -> Option<&CameraFrame> {
        self.camera_frame.as_ref()
    }

    pub fn lidar_objects(&self) -> Option<&[Detection]> {
        self.lidar_objects.as_deref()
    }

    pub fn laser_alive_mask(&self) -> Option<u32> {
        self.laser_alive_mask
    }

    /// Detections delivered by `source`, for the two detection streams.
    pub fn detections(&self, source: SensorSource) -> Option<&[Detection]> {
        match source {
            SensorSource::CameraDetections => self.camera_detections(),
            SensorSource::LidarObjects => self.lidar_objects(),
            SensorSource::CameraImage | SensorSource::LaserLiveness => None,
        }
    }

    pub fn has(&self, source: SensorSource) -> bool {
        match source {
            SensorSource::CameraDetections => self.camera_detections.is_some(),
            SensorSource::CameraImage => self.camera_frame.is_some(),
            SensorSource::LidarObjects => self.lidar_objects.is_some(),
            SensorSource::LaserLiveness => self.laser_alive_mask.is_some(),
        }
    }

    /// Unvalidated copy, for editing and re-validation.
    pub fn to_raw(&self) -> RawSnapshot {
        let detections = |ds: &Option<Vec<Detection>>| {
            ds.as_ref().map(|ds| {
                ds.iter()
                    .map(|d| RawDetection {
                        class_label: d.class_label.clone(),
                        distance: d.distance,
                    })
                    .collect()
            })
        };
        RawSnapshot {
            timestamp: self.timestamp,
            camera_detections: detections(&self.camera_detections),
            camera_image: self.camera_frame.as_ref().map(|f| match f {
                CameraFrame::Image(img) => RawFrame::Image(img.clone()),
                CameraFrame::Histogram(h) => {
                    RawFrame::Histogram(h.bin_counts().iter().map(|&c| c as i64).collect())
                }
            }),
            lidar_objects: detections(&self.lidar_objects),
            laser_alive_mask: self.laser_alive_mask.map(u64::from),
        }
    }
}

/// Unchecked snapshot data as it arrives from a file or a caller.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawSnapshot {
    pub timestamp: f64,
    pub camera_detections: Option<Vec<RawDetection>>,
    pub camera_image: Option<RawFrame>,
    pub lidar_objects: Option<Vec<RawDetection>>,
    pub laser_alive_mask: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDetection {
    pub class_label: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawFrame {
    Pixels {
        width: u64,
        height: u64,
        pixels: Vec<i64>,
    },
    Image(Image),
    Histogram(Vec<i64>),
}

fn validate_detections(
    raw: Option<Vec<RawDetection>>,
    field: &str,
) -> Result<Option<Vec<Detection>>, SensorError> {
    let Some(raw) = raw else {
        return Ok(None);
    };
    raw.into_iter()
        .enumerate()
        .map(|(i, d)| {
            if d.distance.is_finite() && d.distance >= 0.0 {
                Ok(Detection {
                    class_label: d.class_label,
                    distance: d.distance,
                })
            } else {
                Err(SensorError::snapshot(
                    format!("{field}[{i}].distance"),
                    format!(
                        "distance must be finite and nonnegative, found {}",
                        d.distance
                    ),
                ))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn validate_frame(raw: RawFrame) -> Result<CameraFrame, SensorError> {
    match raw {
        RawFrame::Image(img) => Ok(CameraFrame::Image(img)),
        RawFrame::Pixels {
            width,
            height,
            pixels,
        } => {
            let (Ok(w), Ok(h)) = (u32::try_from(width), u32::try_from(height)) else {
                return Err(SensorError::snapshot("image", "dimensions out of range"));
            };
            if let Some((i, v)) = pixels
                .iter()
                .enumerate()
                .find(|(_, v)| !(0..=255).contains(*v))
            {
                return Err(SensorError::snapshot(
                    format!("image.pixels[{i}]"),
                    format!("intensity {v} outside 0..=255"),
                ));
            }
            let bytes = pixels.into_iter().map(|v| v as u8).collect();
            Image::new(w, h, bytes).map(CameraFrame::Image)
        }
        RawFrame::Histogram(bins) => {
            if let Some((i, v)) = bins.iter().enumerate().find(|(_, v)| **v < 0) {
                return Err(SensorError::snapshot(
                    format!("histogram.bins[{i}]"),
                    format!("bin count {v} is negative"),
                ));
            }
            Histogram::from_counts(bins.into_iter().map(|v| v as u64).collect())
                .map(CameraFrame::Histogram)
        }
    }
}

/// Checks every snapshot invariant, reporting the first violated field.
pub fn validate_snapshot(raw: RawSnapshot) -> Result<SensorSnapshot, SensorError> {
    if !(raw.timestamp.is_finite() && raw.timestamp >= 0.0) {
        return Err(SensorError::snapshot(
            "timestamp",
            format!(
                "timestamp must be finite and nonnegative, found {}",
                raw.timestamp
            ),
        ));
    }
    let camera_detections = validate_detections(raw.camera_detections, "camera_detections")?;
    let camera_frame = raw.camera_image.map(validate_frame).transpose()?;
    let lidar_objects = validate_detections(raw.lidar_objects, "lidar_objects")?;
    let laser_alive_mask = match raw.laser_alive_mask {
        None => None,
        Some(m) => Some(u32::try_from(m).map_err(|_| {
            SensorError::snapshot(
                "laser_alive_mask",
                format!(
                    "mask {m:#x} is wider than {} channels",
                    super::LASER_CHANNELS
                ),
            )
        })?),
    };
    Ok(SensorSnapshot {
        timestamp: raw.timestamp,
        camera_detections,
        camera_frame,
        lidar_objects,
        laser_alive_mask,
    })
}

/// Convenience construction of a [`SensorSnapshot`].
///
/// ```
/// use psafe::sensors::{Image, SensorSnapshot};
///
/// let snap = SensorSnapshot::builder(0.0)
///     .camera_detection("pedestrian", 2.5)
///     .camera_image(Image::filled(4, 4, 128).unwrap())
///     .no_lidar_objects()
///     .laser_alive_mask(0xFFFF_FFFF)
///     .build()
///     .unwrap();
/// assert_eq!(snap.camera_detections().unwrap().len(), 1);
/// ```
#[derive(Debug, Clone)]
pub struct SnapshotBuilder {
    raw: RawSnapshot,
}

impl SnapshotBuilder {
    /// Marks camera detections as delivered, even if empty.
    pub fn no_camera_detections(mut self) -> Self {
        self.raw.camera_detections.get_or_insert_with(Vec::new);
        self
    }

    pub fn camera_detection(mut self, class_label: &str, distance: f64) -> Self {
        self.raw
            .camera_detections
            .get_or_insert_with(Vec::new)
            .push(RawDetection {
                class_label: class_label.to_string(),
                distance,
            });
        self
    }

    pub fn no_lidar_objects(mut self) -> Self {
        self.raw.lidar_objects.get_or_insert_with(Vec::new);
        self
    }

    pub fn lidar_object(mut self, class_label: &str, distance: f64) -> Self {
        self.raw
            .lidar_objects
            .get_or_insert_with(Vec::new)
            .push(RawDetection {
                class_label: class_label.to_string(),
                distance,
            });
        self
    }

    pub fn camera_image(mut self, image: Image) -> Self {
        self.raw.camera_image = Some(RawFrame::Image(image));
        self
    }

    pub fn camera_histogram(mut self, bins: Vec<u64>) -> Self {
        self.raw.camera_image = Some(RawFrame::Histogram(
            bins.into_iter()
                .map(|b| b.min(i64::MAX as u64) as i64)
                .collect(),
        ));
        self
    }

    pub fn laser_alive_mask(mut self, mask: u32) -> Self {
        self.raw.laser_alive_mask = Some(mask.into());
        self
    }

    /// Mask with the lowest `alive` channels set.
    pub fn lasers_alive(self, alive: u32) -> Self {
        let mask = if alive >= 32 {
            u32::MAX
        } else {
            (1u32 << alive) - 1
        };
        self.laser_alive_mask(mask)
    }

    pub fn build(self) -> Result<SensorSnapshot, SensorError> {
        validate_snapshot(self.raw)
    }
}
