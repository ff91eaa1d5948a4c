//! 8-bit PNG rendering of cube bands.
//!
//! Every band is min–max normalized on its own and written as
//! `round(255·(v − min)/(max − min))`; a constant band renders as mid-gray
//! 128. The bounds go to a `key=value` sidecar next to the image, with
//! the image extension replaced by `txt`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hsinpaint_core::{Error as CoreError, HyperCube};
use image::{GrayImage, RgbImage};

use crate::error::{Error, Result};

/// Normalization bounds of one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRange {
    pub band: usize,
    pub min: f64,
    pub max: f64,
}

/// Maps a band to 8-bit gray levels.
pub fn normalize_band(cube: &HyperCube, band: usize) -> Result<(Vec<u8>, BandRange)> {
    if band >= cube.bands() {
        return Err(CoreError::BandOutOfRange { band, bands: cube.bands() }.into());
    }
    let values = cube.band(band);
    let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let pixels = if max > min {
        values.iter().map(|&v| (255.0 * (v - min) / (max - min)).round() as u8).collect()
    } else {
        vec![128; values.len()]
    };
    Ok((pixels, BandRange { band, min, max }))
}

/// Sidecar path: the image path with a `txt` extension.
pub fn sidecar_path(image: &Path) -> PathBuf {
    image.with_extension("txt")
}

fn write_sidecar(image: &Path, ranges: &[BandRange]) -> Result<()> {
    let mut text = String::new();
    for (i, r) in ranges.iter().enumerate() {
        let prefix = if ranges.len() == 1 { String::new() } else { format!("{}.", ["red", "green", "blue"][i]) };
        writeln!(text, "{prefix}band={}", r.band + 1).unwrap();
        writeln!(text, "{prefix}min={:e}", r.min).unwrap();
        writeln!(text, "{prefix}max={:e}", r.max).unwrap();
    }
    let path = sidecar_path(image);
    fs::write(&path, text).map_err(|e| Error::io(path, e))
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        None => Ok(()),
    }
}

/// Writes band `band` (zero-based) as a grayscale PNG plus sidecar.
pub fn export_band_png(cube: &HyperCube, band: usize, path: impl AsRef<Path>) -> Result<BandRange> {
    let path = path.as_ref();
    let (pixels, range) = normalize_band(cube, band)?;
    ensure_parent(path)?;
    GrayImage::from_raw(cube.cols() as u32, cube.rows() as u32, pixels)
        .expect("buffer matches dims")
        .save_with_format(path, image::ImageFormat::Png)?;
    write_sidecar(path, &[range])?;
    Ok(range)
}

/// Writes three bands (zero-based) as the red, green and blue channels.
pub fn export_false_rgb(cube: &HyperCube, bands: [usize; 3], path: impl AsRef<Path>) -> Result<[BandRange; 3]> {
    let path = path.as_ref();
    let mut channels = Vec::with_capacity(3);
    let mut ranges = Vec::with_capacity(3);
    for band in bands {
        let (p, r) = normalize_band(cube, band)?;
        channels.push(p);
        ranges.push(r);
    }
    let rgb: Vec<u8> = (0..cube.plane_len()).flat_map(|i| [channels[0][i], channels[1][i], channels[2][i]]).collect();
    ensure_parent(path)?;
    RgbImage::from_raw(cube.cols() as u32, cube.rows() as u32, rgb)
        .expect("buffer matches dims")
        .save_with_format(path, image::ImageFormat::Png)?;
    write_sidecar(path, &ranges)?;
    Ok([ranges[0], ranges[1], ranges[2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_band_is_mid_gray() {
        let cube = HyperCube::filled(3, 3, 2, 0.4).unwrap();
        let (p, r) = normalize_band(&cube, 1).unwrap();
        assert!(p.iter().all(|&v| v == 128));
        assert_eq!((r.min, r.max), (0.4, 0.4));
    }

    #[test]
    fn unit_range_rounds() {
        let cube = HyperCube::from_vec(1, 4, 1, vec![0.0, 0.5, 0.2, 1.0]).unwrap();
        let (p, _) = normalize_band(&cube, 0).unwrap();
        assert_eq!(p, vec![0, 128, 51, 255]);
        assert!(normalize_band(&cube, 1).is_err());
    }
}
