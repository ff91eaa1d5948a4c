//! Redundant analysis dictionary `A = A_UDWT ⊗ A_DCT` and its left inverse.
//!
//! `analyze` runs an orthonormal DCT along the spectral axis of every pixel,
//! then an undecimated wavelet transform of every transformed band, then an
//! orthonormal 2-D DCT of each scaling subband. Coefficients are laid out
//! spectral index slowest, then subband (scaling first, then details by
//! level and orientation), then row-major space.
//!
//! With an orthonormal filter bank every stage is either an isometry or a
//! Parseval frame, so `A*A = I` and [`AnalysisDictionary::pinv_synthesize`]
//! is the Moore–Penrose pseudo-inverse. With a biorthogonal bank it is the
//! dual-frame left inverse.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::dct::{spectral_in_place, Dct, Dct2};
use crate::wavelet::{Boundary, FilterBank, Udwt, DEFAULT_LEVELS};
use crate::{Error, HyperCube, Result};

/// Partition of a coefficient vector into `(spectral index, subband)` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubbandMap {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub levels: usize,
}

impl SubbandMap {
    #[inline]
    pub fn subbands(&self) -> usize {
        1 + 3 * self.levels
    }

    #[inline]
    pub fn plane_len(&self) -> usize {
        self.rows * self.cols
    }

    /// Total coefficient count `P`.
    #[inline]
    pub fn len(&self) -> usize {
        self.plane_len() * self.subbands() * self.bands
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index range of subband `subband` of spectral index `band`.
    pub fn block(&self, band: usize, subband: usize) -> Range<usize> {
        let n = self.plane_len();
        let start = (band * self.subbands() + subband) * n;
        start..start + n
    }

    /// Human-readable label of a subband: `scaling` or `L{level}-{orientation}`.
    pub fn label(&self, subband: usize) -> alloc::string::String {
        if subband == 0 {
            return alloc::string::String::from("scaling");
        }
        let level = (subband - 1) / 3 + 1;
        let orientation = ["lh", "hl", "hh"][(subband - 1) % 3];
        alloc::format!("L{level}-{orientation}")
    }
}

/// Coefficients `α = A x` together with their layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefVector {
    data: Vec<f64>,
    map: SubbandMap,
}

impl CoefVector {
    pub fn new(data: Vec<f64>, map: SubbandMap) -> Result<Self> {
        if data.len() != map.len() {
            return Err(Error::DimensionMismatch {
                context: "coefficient vector",
                expected: (map.len(), 1, 1),
                found: (data.len(), 1, 1),
            });
        }
        Ok(Self { data, map })
    }

    pub fn zeros(map: SubbandMap) -> Self {
        Self { data: vec![0.0; map.len()], map }
    }

    #[inline]
    pub fn map(&self) -> &SubbandMap {
        &self.map
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
}

/// Construction options of the dictionary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DictionaryConfig {
    pub levels: usize,
    pub bank: FilterBank,
    pub boundary: Boundary,
    /// Apply the 2-D DCT to the scaling subbands.
    pub scaling_dct: bool,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        Self { levels: DEFAULT_LEVELS, bank: FilterBank::daubechies8(), boundary: Boundary::Periodic, scaling_dct: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisDictionary {
    map: SubbandMap,
    udwt: Udwt,
    spectral: Dct,
    scaling: Option<Dct2>,
}

impl AnalysisDictionary {
    pub fn new(rows: usize, cols: usize, bands: usize) -> Result<Self> {
        Self::with_config(rows, cols, bands, DictionaryConfig::default())
    }

    pub fn with_config(rows: usize, cols: usize, bands: usize, cfg: DictionaryConfig) -> Result<Self> {
        if bands == 0 {
            return Err(Error::InvalidDimensions(alloc::string::String::from("no spectral bands")));
        }
        let udwt = Udwt::new(rows, cols, cfg.levels, cfg.bank, cfg.boundary)?;
        Ok(Self {
            map: SubbandMap { rows, cols, bands, levels: cfg.levels },
            udwt,
            spectral: Dct::new(bands),
            scaling: cfg.scaling_dct.then(|| Dct2::new(rows, cols)),
        })
    }

    #[inline]
    pub fn map(&self) -> &SubbandMap {
        &self.map
    }

    /// Cube dimensions `(n_I, n_J, L)` the dictionary acts on.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.map.rows, self.map.cols, self.map.bands)
    }

    /// Coefficient count `P`.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// True when the left inverse equals the adjoint.
    pub fn is_tight(&self) -> bool {
        self.udwt.bank().is_orthogonal() && self.udwt.boundary() == Boundary::Periodic
    }

    pub(crate) fn analyze_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.map.plane_len();
        let block = n * self.map.subbands();
        let mut spec = vec![0.0; x.len()];
        spectral_in_place(&self.spectral, n, x, &mut spec, false);
        for (plane, coefs) in spec.chunks_exact(n).zip(out.chunks_exact_mut(block)) {
            self.udwt.analyze_into(plane, coefs);
            if let Some(dct) = &self.scaling {
                dct.forward(&mut coefs[..n]);
            }
        }
    }

    pub(crate) fn synthesize_into(&self, coefs: &[f64], x: &mut [f64]) {
        let n = self.map.plane_len();
        let block = n * self.map.subbands();
        let mut spec = vec![0.0; x.len()];
        let mut scratch = vec![0.0; block];
        for (c, plane) in coefs.chunks_exact(block).zip(spec.chunks_exact_mut(n)) {
            scratch.copy_from_slice(c);
            if let Some(dct) = &self.scaling {
                dct.inverse(&mut scratch[..n]);
            }
            self.udwt.synthesize_into(&scratch, plane);
        }
        spectral_in_place(&self.spectral, n, &spec, x, true);
    }

    /// `α = A x`.
    pub fn analyze(&self, x: &HyperCube) -> Result<CoefVector> {
        x.expect_dims("analyze", self.dims())?;
        let mut out = vec![0.0; self.len()];
        self.analyze_into(x.data(), &mut out);
        Ok(CoefVector { data: out, map: self.map })
    }

    /// `x = A† α`.
    pub fn pinv_synthesize(&self, alpha: &CoefVector) -> Result<HyperCube> {
        if alpha.len() != self.len() || alpha.map != self.map {
            return Err(Error::DimensionMismatch {
                context: "pinv_synthesize",
                expected: (self.len(), 1, 1),
                found: (alpha.len(), 1, 1),
            });
        }
        let (r, c, l) = self.dims();
        let mut x = vec![0.0; r * c * l];
        self.synthesize_into(alpha.data(), &mut x);
        HyperCube::from_vec(r, c, l, x)
    }
}
