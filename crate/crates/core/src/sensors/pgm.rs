//! Binary PGM (`P5`, maxval 255) reading and writing.

use std::path::Path;

use super::{Image, SensorError};

pub fn read(path: &Path) -> Result<Image, SensorError> {
    let bytes = std::fs::read(path).map_err(|source| SensorError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(&bytes).map_err(|message| SensorError::format(path.display().to_string(), message))
}

pub fn write(path: &Path, image: &Image) -> Result<(), SensorError> {
    std::fs::write(path, encode(image)).map_err(|source| SensorError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn encode(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}

pub fn decode(bytes: &[u8]) -> Result<Image, String> {
    if !bytes.starts_with(b"P5") {
        return Err("not a binary PGM (missing P5 magic)".into());
    }
    let mut pos = 2;
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval} (only 255)"));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err("missing whitespace after maxval".into()),
    }
    let raster = &bytes[pos..];
    let expected = width as u64 * height as u64;
    if raster.len() as u64 != expected {
        return Err(format!(
            "raster has {} bytes, expected {width}x{height} = {expected}",
            raster.len()
        ));
    }
    Image::new(width, height, raster.to_vec()).map_err(|e| e.to_string())
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32, String> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| format!("invalid {what} in PGM header"))
}
