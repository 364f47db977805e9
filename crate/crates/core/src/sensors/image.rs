use super::SensorError;

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Image, SensorError> {
        if width == 0 || height == 0 {
            return Err(SensorError::snapshot(
                "image",
                format!("dimensions must be positive, found {width}x{height}"),
            ));
        }
        let expected = width as u64 * height as u64;
        if pixels.len() as u64 != expected {
            return Err(SensorError::snapshot(
                "image.pixels",
                format!(
                    "length {} does not match {width}x{height} = {expected}",
                    pixels.len()
                ),
            ));
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    /// An image where every pixel has intensity `value`.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Image, SensorError> {
        Image::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel_count(&self) -> u64 {
        self.pixels.len() as u64
    }
}

/// Pixel counts per intensity bin, with a normalized view.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bin_counts: Vec<u64>,
    total_pixels: u64,
    normalized: Vec<f64>,
}

impl Histogram {
    /// Builds a histogram from raw bin counts. Needs at least one bin and at
    /// least one pixel.
    pub fn from_counts(bin_counts: Vec<u64>) -> Result<Histogram, SensorError> {
        if bin_counts.is_empty() || bin_counts.len() > 256 {
            return Err(SensorError::snapshot(
                "histogram.bins",
                format!("bin count {} outside 1..=256", bin_counts.len()),
            ));
        }
        let total_pixels = bin_counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| SensorError::snapshot("histogram.bins", "pixel total overflows"))?;
        if total_pixels == 0 {
            return Err(SensorError::snapshot(
                "histogram.bins",
                "histogram must count at least one pixel",
            ));
        }
        let normalized = bin_counts
            .iter()
            .map(|&c| c as f64 / total_pixels as f64)
            .collect();
        Ok(Histogram {
            bin_counts,
            total_pixels,
            normalized,
        })
    }

    pub fn bin_counts(&self) -> &[u64] {
        &self.bin_counts
    }

    pub fn bins(&self) -> usize {
        self.bin_counts.len()
    }

    pub fn total_pixels(&self) -> u64 {
        self.total_pixels
    }

    /// Each bin's share of the total pixel count.
    pub fn normalized_view(&self) -> &[f64] {
        &self.normalized
    }
}

/// Equal-width intensity histogram: intensity `v` lands in bin
/// `floor(v * bins / 256)`.
pub fn compute_histogram(image: &Image, bins: usize) -> Result<Histogram, SensorError> {
    if !(1..=256).contains(&bins) {
        return Err(SensorError::Bins(bins));
    }
    // count per intensity first, then fold into bins
    let mut per_value = [0u64; 256];
    for &v in image.pixels() {
        per_value[v as usize] += 1;
    }
    let mut counts = vec![0u64; bins];
    for (v, &n) in per_value.iter().enumerate() {
        counts[v * bins / 256] += n;
    }
    Histogram::from_counts(counts)
}
