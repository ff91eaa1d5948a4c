//! Separable Lanczos upsampling (`Up`) and its transpose.
//!
//! Output sample `k` of a factor-`f` upsampling sits at source coordinate
//! `(k + 0.5)/f − 0.5` (center-aligned grids), so `f = 1` is the identity.
//! Borders use half-sample symmetric extension and every output row of the
//! operator is normalized to sum to one, which makes constants pass through
//! exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Default number of kernel lobes.
pub const DEFAULT_LOBES: usize = 3;

/// Lanczos window `sinc(x)·sinc(x/a)`, exactly zero at nonzero integers.
pub fn lanczos_kernel(x: f64, lobes: usize) -> f64 {
    let a = lobes as f64;
    if x == 0.0 {
        return 1.0;
    }
    if x.abs() >= a || x == libm::trunc(x) {
        return 0.0;
    }
    let px = PI * x;
    a * libm::sin(px) * libm::sin(px / a) / (px * px)
}

/// Half-sample symmetric reflection of `t` into `0..n`.
pub(crate) fn mirror(t: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let r = t.rem_euclid(period) as usize;
    if r < n {
        r
    } else {
        2 * n - 1 - r
    }
}

/// Sparse 1-D linear map stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampler {
    src_len: usize,
    dst_len: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    weights: Vec<f64>,
}

impl Resampler {
    /// Normalized Lanczos upsampler from `src_len` to `factor · src_len` samples.
    pub fn lanczos(src_len: usize, factor: usize, lobes: usize) -> Self {
        let dst_len = src_len * factor;
        let mut offsets = Vec::with_capacity(dst_len + 1);
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        let f = factor as f64;
        let a = lobes as isize;
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(2 * lobes);
        for k in 0..dst_len {
            let s = (k as f64 + 0.5) / f - 0.5;
            let base = libm::floor(s) as isize;
            row.clear();
            for t in (base - a + 1)..=(base + a) {
                let w = lanczos_kernel(s - t as f64, lobes);
                if w == 0.0 {
                    continue;
                }
                let idx = mirror(t, src_len);
                match row.iter_mut().find(|(i, _)| *i == idx) {
                    Some(entry) => entry.1 += w,
                    None => row.push((idx, w)),
                }
            }
            let total: f64 = row.iter().map(|(_, w)| w).sum();
            for &(i, w) in &row {
                indices.push(i);
                weights.push(w / total);
            }
            offsets.push(indices.len());
        }
        Self { src_len, dst_len, offsets, indices, weights }
    }

    #[inline]
    pub fn src_len(&self) -> usize {
        self.src_len
    }

    #[inline]
    pub fn dst_len(&self) -> usize {
        self.dst_len
    }

    /// Taps `(source index, weight)` of output sample `k`.
    pub fn taps(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[k]..self.offsets[k + 1];
        self.indices[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    /// `dst = R · src` on strided data.
    fn apply_strided(&self, src: &[f64], src_stride: usize, dst: &mut [f64], dst_stride: usize) {
        for k in 0..self.dst_len {
            let mut acc = 0.0;
            for (i, w) in self.taps(k) {
                acc += w * src[i * src_stride];
            }
            dst[k * dst_stride] = acc;
        }
    }

    /// `src = Rᵀ · dst` on strided data (overwrites `src`).
    fn apply_transpose_strided(&self, dst: &[f64], dst_stride: usize, src: &mut [f64], src_stride: usize) {
        for i in 0..self.src_len {
            src[i * src_stride] = 0.0;
        }
        for k in 0..self.dst_len {
            let v = dst[k * dst_stride];
            for (i, w) in self.taps(k) {
                src[i * src_stride] += w * v;
            }
        }
    }

    pub fn apply(&self, src: &[f64], dst: &mut [f64]) {
        self.apply_strided(src, 1, dst, 1);
    }

    pub fn apply_transpose(&self, dst: &[f64], src: &mut [f64]) {
        self.apply_transpose_strided(dst, 1, src, 1);
    }

    /// `Rᵀ` with each of its rows rescaled to unit sum: a downsampler that
    /// maps constants to constants.
    pub fn transpose_normalized(&self) -> Resampler {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.src_len];
        for k in 0..self.dst_len {
            for (i, w) in self.taps(k) {
                rows[i].push((k, w));
            }
        }
        let mut offsets = Vec::with_capacity(self.src_len + 1);
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for row in rows {
            let total: f64 = row.iter().map(|(_, w)| w).sum();
            for (k, w) in row {
                indices.push(k);
                weights.push(w / total);
            }
            offsets.push(indices.len());
        }
        Resampler { src_len: self.dst_len, dst_len: self.src_len, offsets, indices, weights }
    }
}

/// Geometry of the upsampling operator `Up` from the target grid
/// `n_I × n_J` to the sensor grid `m_I × m_J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UpsampleSpec {
    pub src_rows: usize,
    pub src_cols: usize,
    pub factor: usize,
    pub lobes: usize,
}

impl UpsampleSpec {
    pub fn new(src_rows: usize, src_cols: usize, factor: usize) -> Result<Self> {
        if !matches!(factor, 1 | 2 | 4) {
            return Err(Error::UnsupportedFactor(factor));
        }
        if src_rows == 0 || src_cols == 0 {
            return Err(Error::InvalidDimensions(alloc::format!("source grid {src_rows}x{src_cols} is empty")));
        }
        Ok(Self { src_rows, src_cols, factor, lobes: DEFAULT_LOBES })
    }

    /// Infers the factor from a source and a target grid.
    pub fn between(src: (usize, usize), dst: (usize, usize)) -> Result<Self> {
        let (n_i, n_j) = src;
        let (m_i, m_j) = dst;
        if n_i == 0 || n_j == 0 || m_i % n_i != 0 || m_j % n_j != 0 || m_i / n_i != m_j / n_j {
            return Err(Error::InvalidDimensions(alloc::format!("{m_i}x{m_j} is not an integer multiple of {n_i}x{n_j}")));
        }
        Self::new(n_i, n_j, m_i / n_i)
    }

    pub fn with_lobes(mut self, lobes: usize) -> Self {
        self.lobes = lobes.max(1);
        self
    }

    #[inline]
    pub fn src_dims(&self) -> (usize, usize) {
        (self.src_rows, self.src_cols)
    }

    #[inline]
    pub fn dst_dims(&self) -> (usize, usize) {
        (self.src_rows * self.factor, self.src_cols * self.factor)
    }
}

/// Separable 2-D upsampler built from two [`Resampler`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct Upsampler {
    spec: UpsampleSpec,
    rows: Resampler,
    cols: Resampler,
}

impl Upsampler {
    pub fn new(spec: UpsampleSpec) -> Self {
        Self {
            spec,
            rows: Resampler::lanczos(spec.src_rows, spec.factor, spec.lobes),
            cols: Resampler::lanczos(spec.src_cols, spec.factor, spec.lobes),
        }
    }

    #[inline]
    pub fn spec(&self) -> &UpsampleSpec {
        &self.spec
    }

    /// `dst = Up · src` for row-major planes.
    pub fn apply(&self, src: &[f64], dst: &mut [f64]) {
        let (n_i, n_j) = self.spec.src_dims();
        let (m_i, m_j) = self.spec.dst_dims();
        debug_assert_eq!(src.len(), n_i * n_j);
        debug_assert_eq!(dst.len(), m_i * m_j);
        let mut tmp = vec![0.0; n_i * m_j];
        for i in 0..n_i {
            self.cols.apply(&src[i * n_j..(i + 1) * n_j], &mut tmp[i * m_j..(i + 1) * m_j]);
        }
        for j in 0..m_j {
            self.rows.apply_strided(&tmp[j..], m_j, &mut dst[j..], m_j);
        }
    }

    /// `src = Upᵀ · dst` for row-major planes (overwrites `src`).
    pub fn apply_transpose(&self, dst: &[f64], src: &mut [f64]) {
        let (n_i, n_j) = self.spec.src_dims();
        let (m_i, m_j) = self.spec.dst_dims();
        debug_assert_eq!(src.len(), n_i * n_j);
        debug_assert_eq!(dst.len(), m_i * m_j);
        let mut tmp = vec![0.0; n_i * m_j];
        for j in 0..m_j {
            self.rows.apply_transpose_strided(&dst[j..], m_j, &mut tmp[j..], m_j);
        }
        for i in 0..n_i {
            self.cols.apply_transpose(&tmp[i * m_j..(i + 1) * m_j], &mut src[i * n_j..(i + 1) * n_j]);
        }
    }

    /// Downsampler from the sensor grid to the target grid, built as the
    /// row-normalized transpose of `Up` along each axis.
    pub fn resize_down(&self, dst: &[f64], src: &mut [f64]) {
        let (n_i, n_j) = self.spec.src_dims();
        let (_, m_j) = self.spec.dst_dims();
        let rows = self.rows.transpose_normalized();
        let cols = self.cols.transpose_normalized();
        let mut tmp = vec![0.0; n_i * m_j];
        for j in 0..m_j {
            rows.apply_strided(&dst[j..], m_j, &mut tmp[j..], m_j);
        }
        for i in 0..n_i {
            cols.apply(&tmp[i * m_j..(i + 1) * m_j], &mut src[i * n_j..(i + 1) * n_j]);
        }
    }
}

/// Upsamples one row-major band of size `spec.src_dims()`.
pub fn lanczos_upsample(band: &[f64], spec: &UpsampleSpec) -> Result<Vec<f64>> {
    let (n_i, n_j) = spec.src_dims();
    if band.len() != n_i * n_j {
        return Err(Error::DimensionMismatch { context: "lanczos_upsample", expected: (n_i, n_j, 1), found: (band.len(), 1, 1) });
    }
    let (m_i, m_j) = spec.dst_dims();
    let mut out = vec![0.0; m_i * m_j];
    Upsampler::new(*spec).apply(band, &mut out);
    Ok(out)
}
