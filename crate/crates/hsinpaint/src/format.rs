//! Cube (`.hsc`) and layout (`.msk`) containers.
//!
//! Both share the same framing: a 4-byte little-endian header length, a
//! UTF-8 JSON header of that many bytes, then the payload.
//!
//! * `.hsc` payload: `rows·cols·bands` IEEE 754 single-precision values,
//!   little-endian, band-sequential (band slowest, then row, then column).
//! * `.msk` payload: `rows·cols` unsigned 16-bit little-endian band indices,
//!   row-major, one-based.
//!
//! Sensor images are stored as single-band cubes.

use std::fs;
use std::path::Path;

use hsinpaint_core::{FilterLayout, FpaImage, HyperCube, LayoutKind};
use serde::{Deserialize, Serialize};

use crate::error::{Error, FormatError, Result};

pub const SCALAR_FORMAT: &str = "f32le";

/// JSON header of a `.hsc` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeHeader {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelengths_nm: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
}

impl CubeHeader {
    pub fn for_cube(cube: &HyperCube) -> Self {
        let (rows, cols, bands) = cube.dims();
        Self { rows, cols, bands, format: SCALAR_FORMAT.into(), wavelengths_nm: None, x_max: None }
    }
}

/// JSON header of a `.msk` file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutHeader {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<LayoutKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn frame(header: &impl Serialize, payload: &[u8]) -> Vec<u8> {
    let json = serde_json::to_vec(header).expect("headers serialize");
    let len = u32::try_from(json.len()).expect("header below 4 GiB");
    let mut out = Vec::with_capacity(4 + json.len() + payload.len());
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(payload);
    out
}

fn unframe<'a, H: Deserialize<'a>>(bytes: &'a [u8]) -> std::result::Result<(H, &'a [u8]), FormatError> {
    let prefix: [u8; 4] = bytes.get(..4).ok_or(FormatError::MissingPrefix)?.try_into().unwrap();
    let declared = u32::from_le_bytes(prefix) as usize;
    let rest = &bytes[4..];
    if rest.len() < declared {
        return Err(FormatError::TruncatedHeader { declared, available: rest.len() });
    }
    let header = serde_json::from_slice(&rest[..declared]).map_err(|e| FormatError::MalformedHeader(e.to_string()))?;
    Ok((header, &rest[declared..]))
}

fn payload_len(dims: &[usize], scalar: usize) -> std::result::Result<usize, FormatError> {
    dims.iter()
        .try_fold(scalar, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= isize::MAX as usize)
        .ok_or_else(|| FormatError::Overflow(dims.to_vec()))
}

fn check_len(expected: usize, found: usize) -> std::result::Result<(), FormatError> {
    match found.cmp(&expected) {
        std::cmp::Ordering::Less => Err(FormatError::TruncatedPayload { expected, found }),
        std::cmp::Ordering::Greater => Err(FormatError::TrailingBytes { extra: found - expected }),
        std::cmp::Ordering::Equal => Ok(()),
    }
}

/// Serializes a cube. Values are rounded to single precision.
pub fn encode_cube(cube: &HyperCube, header: &CubeHeader) -> Vec<u8> {
    let mut header = header.clone();
    (header.rows, header.cols, header.bands) = cube.dims();
    header.format = SCALAR_FORMAT.into();
    let payload: Vec<u8> = cube.data().iter().flat_map(|&v| (v as f32).to_le_bytes()).collect();
    frame(&header, &payload)
}

pub fn decode_cube(bytes: &[u8]) -> std::result::Result<(HyperCube, CubeHeader), FormatError> {
    let (header, payload): (CubeHeader, _) = unframe(bytes)?;
    if header.format != SCALAR_FORMAT {
        return Err(FormatError::UnsupportedFormat(header.format));
    }
    let dims = [header.rows, header.cols, header.bands];
    if dims.contains(&0) {
        return Err(FormatError::MalformedHeader(format!("zero dimension in {dims:?}")));
    }
    check_len(payload_len(&dims, 4)?, payload.len())?;
    let data = payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64).collect();
    let cube = HyperCube::from_vec(header.rows, header.cols, header.bands, data)
        .map_err(|e| FormatError::MalformedHeader(e.to_string()))?;
    Ok((cube, header))
}

pub fn encode_layout(layout: &FilterLayout, kind: Option<LayoutKind>, seed: Option<u64>) -> Vec<u8> {
    let header = LayoutHeader { rows: layout.rows(), cols: layout.cols(), bands: layout.bands(), kind, seed };
    let payload: Vec<u8> = layout.assignment().iter().flat_map(|&b| (b + 1).to_le_bytes()).collect();
    frame(&header, &payload)
}

pub fn decode_layout(bytes: &[u8]) -> std::result::Result<(FilterLayout, LayoutHeader), FormatError> {
    let (header, payload): (LayoutHeader, _) = unframe(bytes)?;
    check_len(payload_len(&[header.rows, header.cols], 2)?, payload.len())?;
    let mut assignment = Vec::with_capacity(payload.len() / 2);
    for (pixel, c) in payload.chunks_exact(2).enumerate() {
        let index = u16::from_le_bytes([c[0], c[1]]);
        if index == 0 || index as usize > header.bands {
            return Err(FormatError::BandIndex { index, pixel, bands: header.bands });
        }
        assignment.push(index - 1);
    }
    let layout = FilterLayout::new(header.rows, header.cols, header.bands, assignment)
        .map_err(|e| FormatError::MalformedHeader(e.to_string()))?;
    Ok((layout, header))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn format_err(path: &Path) -> impl FnOnce(FormatError) -> Error + '_ {
    move |source| Error::Format { path: path.to_path_buf(), source }
}

pub fn write_cube(path: impl AsRef<Path>, cube: &HyperCube, header: &CubeHeader) -> Result<()> {
    write_bytes(path.as_ref(), &encode_cube(cube, header))
}

pub fn read_cube(path: impl AsRef<Path>) -> Result<(HyperCube, CubeHeader)> {
    let path = path.as_ref();
    decode_cube(&read_bytes(path)?).map_err(format_err(path))
}

pub fn write_fpa(path: impl AsRef<Path>, y: &FpaImage) -> Result<()> {
    let cube = HyperCube::from_vec(y.rows(), y.cols(), 1, y.data().to_vec())?;
    write_cube(path, &cube, &CubeHeader::for_cube(&cube))
}

/// Reads a sensor image, which must be a single-band cube.
pub fn read_fpa(path: impl AsRef<Path>) -> Result<FpaImage> {
    let path = path.as_ref();
    let (cube, header) = read_cube(path)?;
    if header.bands != 1 {
        return Err(format_err(path)(FormatError::MalformedHeader(format!(
            "sensor image must have 1 band, found {}",
            header.bands
        ))));
    }
    Ok(FpaImage::from_vec(header.rows, header.cols, cube.into_vec())?)
}

pub fn write_layout(path: impl AsRef<Path>, layout: &FilterLayout, kind: Option<LayoutKind>, seed: Option<u64>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_layout(layout, kind, seed))
}

pub fn read_layout(path: impl AsRef<Path>) -> Result<(FilterLayout, LayoutHeader)> {
    let path = path.as_ref();
    decode_layout(&read_bytes(path)?).map_err(format_err(path))
}
