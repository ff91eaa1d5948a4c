//! The sensing operator `Φ = [M_1·Up, …, M_L·Up]` and its adjoint.

use alloc::vec;

use crate::lanczos::{Resampler, UpsampleSpec};
use crate::{Error, FilterLayout, FpaImage, HyperCube, Result};

/// Forward model of the snapshot sensor.
///
/// Every sensor pixel `(k_i, k_j)` assigned to band `λ` records the value of
/// the Lanczos-upsampled band `λ` at that location. Only the taps of the
/// recorded pixels are evaluated; the adjoint scatters each sample back
/// with the same weights, so it is the exact transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingOperator {
    layout: FilterLayout,
    spec: UpsampleSpec,
    rows: Resampler,
    cols: Resampler,
}

impl SensingOperator {
    pub fn new(layout: FilterLayout, spec: UpsampleSpec) -> Result<Self> {
        if spec.dst_dims() != layout.dims() {
            let (m_i, m_j) = spec.dst_dims();
            return Err(Error::DimensionMismatch {
                context: "sensing operator",
                expected: (m_i, m_j, layout.bands()),
                found: (layout.rows(), layout.cols(), layout.bands()),
            });
        }
        Ok(Self {
            rows: Resampler::lanczos(spec.src_rows, spec.factor, spec.lobes),
            cols: Resampler::lanczos(spec.src_cols, spec.factor, spec.lobes),
            layout,
            spec,
        })
    }

    /// Builds the operator for target dims `n_I × n_J` with upscale `factor`.
    pub fn with_factor(layout: FilterLayout, factor: usize) -> Result<Self> {
        let (m_i, m_j) = layout.dims();
        if m_i % factor != 0 || m_j % factor != 0 {
            return Err(Error::InvalidDimensions(alloc::format!("sensor {m_i}x{m_j} is not divisible by factor {factor}")));
        }
        let spec = UpsampleSpec::new(m_i / factor, m_j / factor, factor)?;
        Self::new(layout, spec)
    }

    #[inline]
    pub fn layout(&self) -> &FilterLayout {
        &self.layout
    }

    #[inline]
    pub fn spec(&self) -> &UpsampleSpec {
        &self.spec
    }

    #[inline]
    pub fn bands(&self) -> usize {
        self.layout.bands()
    }

    /// Dimensions `(n_I, n_J, L)` of the cubes the operator acts on.
    pub fn cube_dims(&self) -> (usize, usize, usize) {
        (self.spec.src_rows, self.spec.src_cols, self.layout.bands())
    }

    /// Sensor dimensions `(m_I, m_J)`.
    pub fn fpa_dims(&self) -> (usize, usize) {
        self.layout.dims()
    }

    /// `N = n_I · n_J · L`.
    pub fn unknowns(&self) -> usize {
        let (a, b, c) = self.cube_dims();
        a * b * c
    }

    /// `M = m_I · m_J`.
    pub fn measurements(&self) -> usize {
        self.layout.rows() * self.layout.cols()
    }

    pub(crate) fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        let (n_i, n_j, _) = self.cube_dims();
        let plane = n_i * n_j;
        let m_j = self.layout.cols();
        for (p, out) in y.iter_mut().enumerate() {
            let band = self.layout.assignment()[p] as usize;
            let xb = &x[band * plane..(band + 1) * plane];
            let (ki, kj) = (p / m_j, p % m_j);
            let mut acc = 0.0;
            for (ti, wi) in self.rows.taps(ki) {
                let row = &xb[ti * n_j..(ti + 1) * n_j];
                let mut racc = 0.0;
                for (tj, wj) in self.cols.taps(kj) {
                    racc += wj * row[tj];
                }
                acc += wi * racc;
            }
            *out = acc;
        }
    }

    pub(crate) fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        let (n_i, n_j, _) = self.cube_dims();
        let plane = n_i * n_j;
        let m_j = self.layout.cols();
        x.fill(0.0);
        for (p, &v) in y.iter().enumerate() {
            let band = self.layout.assignment()[p] as usize;
            let xb = &mut x[band * plane..(band + 1) * plane];
            let (ki, kj) = (p / m_j, p % m_j);
            for (ti, wi) in self.rows.taps(ki) {
                let row = &mut xb[ti * n_j..(ti + 1) * n_j];
                let s = wi * v;
                for (tj, wj) in self.cols.taps(kj) {
                    row[tj] += wj * s;
                }
            }
        }
    }

    /// `y = Φ x`.
    pub fn forward(&self, x: &HyperCube) -> Result<FpaImage> {
        x.expect_dims("forward", self.cube_dims())?;
        let (m_i, m_j) = self.fpa_dims();
        let mut y = vec![0.0; m_i * m_j];
        self.forward_into(x.data(), &mut y);
        FpaImage::from_vec(m_i, m_j, y)
    }

    /// `x = Φ* y`.
    pub fn adjoint(&self, y: &FpaImage) -> Result<HyperCube> {
        y.expect_dims("adjoint", self.fpa_dims())?;
        let (n_i, n_j, l) = self.cube_dims();
        let mut x = vec![0.0; n_i * n_j * l];
        self.adjoint_into(y.data(), &mut x);
        HyperCube::from_vec(n_i, n_j, l, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lanczos::lanczos_upsample;
    use alloc::vec::Vec;

    fn mosaic(m: usize, edge: usize) -> FilterLayout {
        let a = (0..m * m).map(|p| (edge * ((p / m) % edge) + (p % m) % edge) as u16).collect();
        FilterLayout::new(m, m, edge * edge, a).unwrap()
    }

    fn scrambled(m: usize, bands: usize) -> FilterLayout {
        // fixed permutation: multiply by a unit modulo M
        let mm = m * m;
        let a = (0..mm).map(|p| ((p * 7 + 3) % mm % bands) as u16).collect();
        FilterLayout::new(m, m, bands, a).unwrap()
    }

    fn lcg_cube(dims: (usize, usize, usize), seed: u64) -> HyperCube {
        let mut s = seed;
        HyperCube::from_fn(dims.0, dims.1, dims.2, |_, _, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .unwrap()
    }

    #[test]
    fn delta_through_unit_factor() {
        let layout = mosaic(4, 2);
        let phi = SensingOperator::with_factor(layout.clone(), 1).unwrap();
        for band in 0..4 {
            for p in 0..16 {
                let mut x = HyperCube::zeros(4, 4, 4).unwrap();
                x.band_mut(band)[p] = 1.0;
                let y = phi.forward(&x).unwrap();
                for (q, &v) in y.data().iter().enumerate() {
                    let hit = q == p && layout.assignment()[p] as usize == band;
                    assert_eq!(v, if hit { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn constant_cube_gives_constant_image() {
        for f in [1, 2, 4] {
            let phi = SensingOperator::with_factor(scrambled(8, 4), f).unwrap();
            let (a, b, c) = phi.cube_dims();
            let x = HyperCube::filled(a, b, c, 0.3).unwrap();
            let y = phi.forward(&x).unwrap();
            assert!(y.data().iter().all(|v| (v - 0.3).abs() < 1e-14));
        }
    }

    #[test]
    fn unit_factor_normal_operator_is_mask() {
        let layout = scrambled(4, 4);
        let phi = SensingOperator::with_factor(layout.clone(), 1).unwrap();
        let x = lcg_cube((4, 4, 4), 3);
        let back = phi.adjoint(&phi.forward(&x).unwrap()).unwrap();
        for l in 0..4 {
            for p in 0..16 {
                let expected = if layout.assignment()[p] as usize == l { x.band(l)[p] } else { 0.0 };
                assert_eq!(back.band(l)[p], expected);
            }
        }
    }

    #[test]
    fn identical_bands_reproduce_upsampling() {
        let phi = SensingOperator::with_factor(scrambled(8, 4), 2).unwrap();
        let band: Vec<f64> = (0..16).map(|v| (v as f64 * 0.37).cos()).collect();
        let x = HyperCube::from_fn(4, 4, 4, |i, j, _| band[i * 4 + j]).unwrap();
        let y = phi.forward(&x).unwrap();
        let up = lanczos_upsample(&band, phi.spec()).unwrap();
        for (a, b) in y.data().iter().zip(&up) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn dimension_errors() {
        let phi = SensingOperator::with_factor(mosaic(4, 2), 2).unwrap();
        assert!(phi.forward(&HyperCube::zeros(4, 4, 4).unwrap()).is_err());
        assert!(phi.adjoint(&FpaImage::zeros(2, 2).unwrap()).is_err());
        assert!(SensingOperator::with_factor(mosaic(4, 2), 3).is_err());
    }

    #[test]
    fn sampling_ratio() {
        for (f, ratio) in [(1, 16), (2, 4), (4, 1)] {
            let phi = SensingOperator::with_factor(mosaic(16, 4), f).unwrap();
            assert_eq!(phi.unknowns(), ratio * phi.measurements());
        }
    }
}
