//! Per-pixel spectral filter assignment and the band masks `M_λ` it defines.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, FpaImage, Result};

/// Zero-based band index of every sensor pixel, row-major.
///
/// Each pixel carries exactly one band, so the masks `M_λ` partition the
/// identity: `Σ_λ M_λ = I` and `M_λ M_λ' = 0` for `λ ≠ λ'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterLayout {
    rows: usize,
    cols: usize,
    bands: usize,
    assignment: Vec<u16>,
}

impl FilterLayout {
    pub fn new(rows: usize, cols: usize, bands: usize, assignment: Vec<u16>) -> Result<Self> {
        if rows == 0 || cols == 0 || bands == 0 {
            return Err(Error::InvalidLayout(alloc::format!("empty layout {rows}x{cols} with {bands} bands")));
        }
        if bands > u16::MAX as usize + 1 {
            return Err(Error::InvalidLayout(alloc::format!("{bands} bands exceed u16 indices")));
        }
        if assignment.len() != rows * cols {
            return Err(Error::InvalidLayout(alloc::format!(
                "{rows}x{cols} layout needs {} entries, got {}",
                rows * cols,
                assignment.len()
            )));
        }
        if let Some(bad) = assignment.iter().find(|&&b| b as usize >= bands) {
            return Err(Error::InvalidLayout(alloc::format!("band index {bad} out of range for {bands} bands")));
        }
        Ok(Self { rows, cols, bands, assignment })
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
    pub fn bands(&self) -> usize {
        self.bands
    }

    #[inline]
    pub fn assignment(&self) -> &[u16] {
        &self.assignment
    }

    #[inline]
    pub fn band_at(&self, row: usize, col: usize) -> usize {
        self.assignment[row * self.cols + col] as usize
    }

    /// Number of pixels owned by every band.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.bands];
        for &b in &self.assignment {
            counts[b as usize] += 1;
        }
        counts
    }

    /// Row-major pixel indices owned by `band`.
    pub fn pixels_of(&self, band: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().enumerate().filter(move |(_, &b)| b as usize == band).map(|(p, _)| p)
    }

    /// True when every band owns exactly `M / L` pixels.
    pub fn is_balanced(&self) -> bool {
        let m = self.rows * self.cols;
        m.is_multiple_of(self.bands) && self.counts().iter().all(|&c| c == m / self.bands)
    }

    /// `M_λ y`: keeps the pixels assigned to `band`, zeroes the rest.
    pub fn apply_mask(&self, band: usize, fpa: &FpaImage) -> Result<FpaImage> {
        if band >= self.bands {
            return Err(Error::BandOutOfRange { band, bands: self.bands });
        }
        fpa.expect_dims("apply_mask", self.dims())?;
        let data = fpa.data().iter().zip(&self.assignment).map(|(&v, &b)| if b as usize == band { v } else { 0.0 }).collect();
        FpaImage::from_vec(self.rows, self.cols, data)
    }
}
