//! Orthonormal DCT-II by dense basis matrix.
//!
//! Transform lengths in this crate are small (band counts and scaling
//! subband edges), so an `O(n²)` product with a cached basis is exact,
//! deterministic and fast enough.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::sqrt;
use crate::HyperCube;

/// Orthonormal DCT-II of a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dct {
    n: usize,
    /// `basis[k * n + m] = c_k cos(π (2m + 1) k / 2n)`
    basis: Vec<f64>,
}

impl Dct {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "DCT length must be positive");
        let mut basis = vec![0.0; n * n];
        let dc = sqrt(1.0 / n as f64);
        let ac = sqrt(2.0 / n as f64);
        for k in 0..n {
            let c = if k == 0 { dc } else { ac };
            for m in 0..n {
                basis[k * n + m] = if k == 0 { dc } else { c * libm::cos(PI * (2 * m + 1) as f64 * k as f64 / (2 * n) as f64) };
            }
        }
        Self { n, basis }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Entry `(k, m)` of the transform matrix.
    #[inline]
    pub fn coefficient(&self, k: usize, m: usize) -> f64 {
        self.basis[k * self.n + m]
    }

    pub(crate) fn forward_strided(&self, src: &[f64], stride: usize, dst: &mut [f64], dst_stride: usize) {
        let n = self.n;
        for k in 0..n {
            let row = &self.basis[k * n..(k + 1) * n];
            let mut acc = 0.0;
            for (m, b) in row.iter().enumerate() {
                acc += b * src[m * stride];
            }
            dst[k * dst_stride] = acc;
        }
    }

    pub(crate) fn inverse_strided(&self, src: &[f64], stride: usize, dst: &mut [f64], dst_stride: usize) {
        let n = self.n;
        for m in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += self.basis[k * n + m] * src[k * stride];
            }
            dst[m * dst_stride] = acc;
        }
    }

    pub fn forward(&self, src: &[f64], dst: &mut [f64]) {
        self.forward_strided(src, 1, dst, 1);
    }

    pub fn inverse(&self, src: &[f64], dst: &mut [f64]) {
        self.inverse_strided(src, 1, dst, 1);
    }
}

/// Separable orthonormal 2-D DCT-II of a row-major `rows × cols` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Dct2 {
    rows: Dct,
    cols: Dct,
}

impl Dct2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows: Dct::new(rows), cols: Dct::new(cols) }
    }

    pub fn forward(&self, plane: &mut [f64]) {
        let (r, c) = (self.rows.len(), self.cols.len());
        let mut tmp = vec![0.0; r * c];
        for i in 0..r {
            self.cols.forward(&plane[i * c..(i + 1) * c], &mut tmp[i * c..(i + 1) * c]);
        }
        for j in 0..c {
            self.rows.forward_strided(&tmp[j..], c, &mut plane[j..], c);
        }
    }

    pub fn inverse(&self, plane: &mut [f64]) {
        let (r, c) = (self.rows.len(), self.cols.len());
        let mut tmp = vec![0.0; r * c];
        for j in 0..c {
            self.rows.inverse_strided(&plane[j..], c, &mut tmp[j..], c);
        }
        for i in 0..r {
            self.cols.inverse(&tmp[i * c..(i + 1) * c], &mut plane[i * c..(i + 1) * c]);
        }
    }
}

/// Applies an orthonormal DCT-II along the spectral axis of every pixel.
pub fn dct_spectral(x: &HyperCube) -> HyperCube {
    let mut out = x.clone();
    spectral_in_place(&Dct::new(x.bands()), x.plane_len(), x.data(), out.data_mut(), false);
    out
}

/// Inverse of [`dct_spectral`].
pub fn idct_spectral(x: &HyperCube) -> HyperCube {
    let mut out = x.clone();
    spectral_in_place(&Dct::new(x.bands()), x.plane_len(), x.data(), out.data_mut(), true);
    out
}

pub(crate) fn spectral_in_place(dct: &Dct, plane: usize, src: &[f64], dst: &mut [f64], inverse: bool) {
    for p in 0..plane {
        if inverse {
            dct.inverse_strided(&src[p..], plane, &mut dst[p..], plane);
        } else {
            dct.forward_strided(&src[p..], plane, &mut dst[p..], plane);
        }
    }
}
