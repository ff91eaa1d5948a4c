//! Dense containers for hyperspectral volumes and focal-plane images.
//!
//! A [`HyperCube`] is stored band-sequential (BSQ): band slowest, then row,
//! then column. All indices are zero-based.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A `rows × cols × bands` volume in band-sequential order.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    rows: usize,
    cols: usize,
    bands: usize,
    data: Vec<f64>,
}

fn checked_len(rows: usize, cols: usize, bands: usize) -> Result<usize> {
    if rows == 0 || cols == 0 || bands == 0 {
        return Err(Error::InvalidDimensions(alloc::format!("all dimensions must be at least 1, got {rows}x{cols}x{bands}")));
    }
    rows.checked_mul(cols)
        .and_then(|n| n.checked_mul(bands))
        .ok_or_else(|| Error::InvalidDimensions(alloc::format!("{rows}x{cols}x{bands} overflows")))
}

impl HyperCube {
    pub fn zeros(rows: usize, cols: usize, bands: usize) -> Result<Self> {
        Self::filled(rows, cols, bands, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, bands: usize, value: f64) -> Result<Self> {
        let len = checked_len(rows, cols, bands)?;
        Ok(Self { rows, cols, bands, data: vec![value; len] })
    }

    pub fn from_vec(rows: usize, cols: usize, bands: usize, data: Vec<f64>) -> Result<Self> {
        let len = checked_len(rows, cols, bands)?;
        if data.len() != len {
            return Err(Error::InvalidDimensions(alloc::format!("{rows}x{cols}x{bands} needs {len} values, got {}", data.len())));
        }
        Ok(Self { rows, cols, bands, data })
    }

    /// Builds a cube by evaluating `f(row, col, band)` at every voxel.
    pub fn from_fn(rows: usize, cols: usize, bands: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let len = checked_len(rows, cols, bands)?;
        let mut data = Vec::with_capacity(len);
        for l in 0..bands {
            for i in 0..rows {
                for j in 0..cols {
                    data.push(f(i, j, l));
                }
            }
        }
        Ok(Self { rows, cols, bands, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn bands(&self) -> usize {
        self.bands
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.bands)
    }

    /// Number of pixels in one band.
    #[inline]
    pub fn plane_len(&self) -> usize {
        self.rows * self.cols
    }

    /// Total voxel count `N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, band: usize) -> f64 {
        self.data[(band * self.rows + row) * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, band: usize, value: f64) {
        self.data[(band * self.rows + row) * self.cols + col] = value;
    }

    pub fn band(&self, band: usize) -> &[f64] {
        let n = self.plane_len();
        &self.data[band * n..(band + 1) * n]
    }

    pub fn band_mut(&mut self, band: usize) -> &mut [f64] {
        let n = self.plane_len();
        &mut self.data[band * n..(band + 1) * n]
    }

    pub fn bands_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.plane_len())
    }

    pub(crate) fn expect_dims(&self, context: &'static str, dims: (usize, usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch { context, expected: dims, found: self.dims() });
        }
        Ok(())
    }
}

/// A `rows × cols` focal-plane array measurement, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FpaImage {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FpaImage {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        let len = checked_len(rows, cols, 1)?;
        Ok(Self { rows, cols, data: vec![value; len] })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let len = checked_len(rows, cols, 1)?;
        if data.len() != len {
            return Err(Error::InvalidDimensions(alloc::format!("{rows}x{cols} image needs {len} values, got {}", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub(crate) fn expect_dims(&self, context: &'static str, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch { context, expected: (dims.0, dims.1, 1), found: (self.rows, self.cols, 1) });
        }
        Ok(())
    }
}
