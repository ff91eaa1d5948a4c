//! Undecimated (à trous) 2-D wavelet transform.
//!
//! Level `j` (zero-based) filters with the taps dilated by `2^j` and keeps
//! every subband at full resolution. Each 1-D filtering pass is scaled by
//! `1/√2`, so an orthonormal filter pair yields a Parseval tight frame
//! (`W*W = I`) and any perfect-reconstruction biorthogonal pair yields a
//! dual-frame left inverse.
//!
//! Subband order per plane: the coarsest scaling band first, then the
//! detail bands of level 1, 2, … each as (low rows / high cols,
//! high rows / low cols, high rows / high cols).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::lanczos::mirror;
use crate::{Error, Result};

/// Default number of decomposition levels.
pub const DEFAULT_LEVELS: usize = 3;

/// FIR filter with the index of its zero-lag tap.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Filter {
    pub taps: Vec<f64>,
    pub origin: usize,
}

impl Filter {
    /// Filter whose origin sits at `(len − 1) / 2`.
    pub fn centered(taps: Vec<f64>) -> Self {
        let origin = taps.len().saturating_sub(1) / 2;
        Self { taps, origin }
    }

    fn is_symmetric(&self) -> bool {
        let n = self.taps.len();
        n % 2 == 1 && self.origin == n / 2 && (0..n / 2).all(|k| (self.taps[k] - self.taps[n - 1 - k]).abs() <= 1e-15)
    }

    /// Quadrature-mirror high-pass `g[k] = (−1)^k h[n−1−k]`.
    pub fn quadrature_mirror(&self) -> Self {
        let n = self.taps.len();
        let taps = (0..n).map(|k| if k % 2 == 0 { self.taps[n - 1 - k] } else { -self.taps[n - 1 - k] }).collect();
        Self { taps, origin: self.origin }
    }
}

/// Analysis and synthesis filter pairs of a two-channel bank.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterBank {
    pub analysis_low: Filter,
    pub analysis_high: Filter,
    pub synthesis_low: Filter,
    pub synthesis_high: Filter,
}

/// Daubechies orthonormal low-pass filter with 4 vanishing moments (8 taps).
#[allow(clippy::excessive_precision)]
const DAUBECHIES_8: [f64; 8] = [
    0.230_377_813_308_896_500_863,
    0.714_846_570_552_915_647_090,
    0.630_880_767_929_858_907_882,
    -0.027_983_769_416_859_854_211,
    -0.187_034_811_719_093_084_080,
    0.030_841_381_835_560_763_627,
    0.032_883_011_666_885_199_735,
    -0.010_597_401_785_069_032_105,
];

impl FilterBank {
    /// Orthonormal 8-tap Daubechies bank; synthesis equals analysis.
    pub fn daubechies8() -> Self {
        let low = Filter { taps: DAUBECHIES_8.to_vec(), origin: 4 };
        let high = low.quadrature_mirror();
        Self { analysis_low: low.clone(), analysis_high: high.clone(), synthesis_low: low, synthesis_high: high }
    }

    /// Linear-spline à trous bank with symmetric 3-tap filters; perfect
    /// reconstruction but not tight. Usable with [`Boundary::Symmetric`].
    pub fn linear_spline() -> Self {
        let s = core::f64::consts::SQRT_2;
        Self {
            analysis_low: Filter::centered(vec![s / 4.0, s / 2.0, s / 4.0]),
            analysis_high: Filter::centered(vec![-s / 4.0, s / 2.0, -s / 4.0]),
            synthesis_low: Filter::centered(vec![0.0, s, 0.0]),
            synthesis_high: Filter::centered(vec![0.0, s, 0.0]),
        }
    }

    /// True when synthesis uses the analysis filters, i.e. the frame is
    /// tight and its left inverse is the adjoint.
    pub fn is_orthogonal(&self) -> bool {
        self.analysis_low == self.synthesis_low && self.analysis_high == self.synthesis_high
    }

    /// Largest deviation from the undecimated perfect-reconstruction
    /// identity `Σ_k h̃[k]h[k+t] + g̃[k]g[k+t] = 2δ_t`.
    pub fn reconstruction_defect(&self) -> f64 {
        let lo = cross_correlation(&self.synthesis_low, &self.analysis_low);
        let hi = cross_correlation(&self.synthesis_high, &self.analysis_high);
        let min = lo.iter().chain(&hi).map(|(t, _)| *t).min().unwrap_or(0);
        let max = lo.iter().chain(&hi).map(|(t, _)| *t).max().unwrap_or(0);
        let mut worst: f64 = 0.0;
        for t in min..=max {
            let v: f64 = lo.iter().chain(&hi).filter(|(s, _)| *s == t).map(|(_, v)| v).sum();
            let target = if t == 0 { 2.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("analysis_low", &self.analysis_low),
            ("analysis_high", &self.analysis_high),
            ("synthesis_low", &self.synthesis_low),
            ("synthesis_high", &self.synthesis_high),
        ] {
            if f.taps.is_empty() || f.origin >= f.taps.len() {
                return Err(Error::InvalidFilter(alloc::format!("{name} has no tap at its origin")));
            }
            if f.taps.iter().any(|t| !t.is_finite()) {
                return Err(Error::InvalidFilter(alloc::format!("{name} has non-finite taps")));
            }
        }
        let defect = self.reconstruction_defect();
        if defect > 1e-10 {
            return Err(Error::InvalidFilter(alloc::format!("bank is not perfect-reconstruction (defect {defect:e})")));
        }
        Ok(())
    }
}

/// `(t, Σ_k a[k] b[k + t + o_b − o_a])` for every lag with overlap.
fn cross_correlation(a: &Filter, b: &Filter) -> Vec<(isize, f64)> {
    let mut out = Vec::new();
    let (na, nb) = (a.taps.len() as isize, b.taps.len() as isize);
    let shift = b.origin as isize - a.origin as isize;
    for t in -(na + nb)..=(na + nb) {
        let mut acc = 0.0;
        let mut any = false;
        for k in 0..na {
            let l = k + t + shift;
            if (0..nb).contains(&l) {
                acc += a.taps[k as usize] * b.taps[l as usize];
                any = true;
            }
        }
        if any {
            out.push((t, acc));
        }
    }
    out
}

/// Signal extension used at the borders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Boundary {
    /// Circular wrap-around. Keeps the Parseval property for any bank.
    #[default]
    Periodic,
    /// Half-sample mirror. Requires linear-phase odd-length filters.
    Symmetric,
}

impl Boundary {
    #[inline]
    fn map(self, t: isize, n: usize) -> usize {
        match self {
            Boundary::Periodic => t.rem_euclid(n as isize) as usize,
            Boundary::Symmetric => mirror(t, n),
        }
    }
}

/// Gather plan of one dilated filter along one axis.
#[derive(Debug, Clone, PartialEq)]
struct LinePlan {
    weights: Vec<f64>,
    index: Vec<usize>,
}

impl LinePlan {
    /// `sign = +1` gathers `src[m + d(k − o)]` (analysis), `−1` gathers
    /// `src[m − d(k − o)]` (synthesis).
    fn new(filter: &Filter, len: usize, dilation: usize, sign: isize, boundary: Boundary) -> Self {
        let o = filter.origin as isize;
        let d = dilation as isize;
        let mut index = Vec::with_capacity(len * filter.taps.len());
        for m in 0..len as isize {
            for k in 0..filter.taps.len() as isize {
                index.push(boundary.map(m + sign * d * (k - o), len));
            }
        }
        let weights = filter.taps.iter().map(|t| t * FRAC_1_SQRT_2).collect();
        Self { weights, index }
    }

    /// Filters one contiguous line.
    fn line(&self, src: &[f64], dst: &mut [f64], accumulate: bool) {
        let k = self.weights.len();
        for (m, out) in dst.iter_mut().enumerate() {
            let idx = &self.index[m * k..(m + 1) * k];
            let mut acc = 0.0;
            for (w, &i) in self.weights.iter().zip(idx) {
                acc += w * src[i];
            }
            if accumulate {
                *out += acc;
            } else {
                *out = acc;
            }
        }
    }

    /// Filters along the slow axis of a row-major plane, whole rows at a time.
    fn rows(&self, src: &[f64], dst: &mut [f64], width: usize, accumulate: bool) {
        let k = self.weights.len();
        for (m, out) in dst.chunks_exact_mut(width).enumerate() {
            if !accumulate {
                out.fill(0.0);
            }
            for (w, &i) in self.weights.iter().zip(&self.index[m * k..(m + 1) * k]) {
                let row = &src[i * width..(i + 1) * width];
                for (o, s) in out.iter_mut().zip(row) {
                    *o += w * s;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct LevelPlan {
    ana_lo_x: LinePlan,
    ana_hi_x: LinePlan,
    ana_lo_y: LinePlan,
    ana_hi_y: LinePlan,
    syn_lo_x: LinePlan,
    syn_hi_x: LinePlan,
    syn_lo_y: LinePlan,
    syn_hi_y: LinePlan,
}

/// Undecimated wavelet transform for a fixed plane size.
#[derive(Debug, Clone, PartialEq)]
pub struct Udwt {
    rows: usize,
    cols: usize,
    levels: usize,
    boundary: Boundary,
    bank: FilterBank,
    plans: Vec<LevelPlan>,
}

impl Udwt {
    pub fn new(rows: usize, cols: usize, levels: usize, bank: FilterBank, boundary: Boundary) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidConfig(String::from("at least one wavelet level is required")));
        }
        let min = 1usize << (levels - 1);
        if rows < min || cols < min {
            return Err(Error::InvalidDimensions(alloc::format!(
                "{rows}x{cols} plane is too small for {levels} levels (need at least {min}x{min})"
            )));
        }
        bank.validate()?;
        if boundary == Boundary::Symmetric
            && ![&bank.analysis_low, &bank.analysis_high, &bank.synthesis_low, &bank.synthesis_high]
                .iter()
                .all(|f| f.is_symmetric())
        {
            return Err(Error::InvalidFilter(String::from(
                "symmetric boundary requires odd-length filters symmetric about their origin",
            )));
        }
        let plans = (0..levels)
            .map(|j| {
                let d = 1 << j;
                LevelPlan {
                    ana_lo_x: LinePlan::new(&bank.analysis_low, cols, d, 1, boundary),
                    ana_hi_x: LinePlan::new(&bank.analysis_high, cols, d, 1, boundary),
                    ana_lo_y: LinePlan::new(&bank.analysis_low, rows, d, 1, boundary),
                    ana_hi_y: LinePlan::new(&bank.analysis_high, rows, d, 1, boundary),
                    syn_lo_x: LinePlan::new(&bank.synthesis_low, cols, d, -1, boundary),
                    syn_hi_x: LinePlan::new(&bank.synthesis_high, cols, d, -1, boundary),
                    syn_lo_y: LinePlan::new(&bank.synthesis_low, rows, d, -1, boundary),
                    syn_hi_y: LinePlan::new(&bank.synthesis_high, rows, d, -1, boundary),
                }
            })
            .collect();
        Ok(Self { rows, cols, levels, boundary, bank, plans })
    }

    /// Default transform: 3 levels of the 8-tap Daubechies bank, periodic.
    pub fn standard(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, DEFAULT_LEVELS, FilterBank::daubechies8(), Boundary::Periodic)
    }

    #[inline]
    pub fn levels(&self) -> usize {
        self.levels
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    #[inline]
    pub fn bank(&self) -> &FilterBank {
        &self.bank
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `1 + 3 · levels`.
    #[inline]
    pub fn subbands(&self) -> usize {
        1 + 3 * self.levels
    }

    /// Position of the detail subband `(level, orientation)` in the output,
    /// both zero-based.
    #[inline]
    pub fn detail_index(level: usize, orientation: usize) -> usize {
        1 + 3 * level + orientation
    }

    /// Analyzes one row-major plane into `subbands()` planes written to `out`.
    pub fn analyze_into(&self, plane: &[f64], out: &mut [f64]) {
        let n = self.rows * self.cols;
        assert_eq!(plane.len(), n);
        assert_eq!(out.len(), n * self.subbands());
        let w = self.cols;
        let mut current = plane.to_vec();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for (j, p) in self.plans.iter().enumerate() {
            for ((src, l), h) in current.chunks_exact(w).zip(lo.chunks_exact_mut(w)).zip(hi.chunks_exact_mut(w)) {
                p.ana_lo_x.line(src, l, false);
                p.ana_hi_x.line(src, h, false);
            }
            let base = Self::detail_index(j, 0) * n;
            let (details, _) = out[base..].split_at_mut(3 * n);
            let (d0, rest) = details.split_at_mut(n);
            let (d1, d2) = rest.split_at_mut(n);
            p.ana_lo_y.rows(&hi, d0, w, false);
            p.ana_hi_y.rows(&lo, d1, w, false);
            p.ana_hi_y.rows(&hi, d2, w, false);
            p.ana_lo_y.rows(&lo, &mut current, w, false);
        }
        out[..n].copy_from_slice(&current);
    }

    pub fn analyze(&self, plane: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; plane.len() * self.subbands()];
        self.analyze_into(plane, &mut out);
        out
    }

    /// Dual-frame synthesis of `subbands()` planes back to one plane.
    pub fn synthesize_into(&self, coefs: &[f64], out: &mut [f64]) {
        let n = self.rows * self.cols;
        assert_eq!(out.len(), n);
        assert_eq!(coefs.len(), n * self.subbands());
        let w = self.cols;
        let mut current = coefs[..n].to_vec();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for (j, p) in self.plans.iter().enumerate().rev() {
            let base = Self::detail_index(j, 0) * n;
            let d0 = &coefs[base..base + n];
            let d1 = &coefs[base + n..base + 2 * n];
            let d2 = &coefs[base + 2 * n..base + 3 * n];
            p.syn_lo_y.rows(&current, &mut lo, w, false);
            p.syn_hi_y.rows(d1, &mut lo, w, true);
            p.syn_lo_y.rows(d0, &mut hi, w, false);
            p.syn_hi_y.rows(d2, &mut hi, w, true);
            for ((c, l), h) in current.chunks_exact_mut(w).zip(lo.chunks_exact(w)).zip(hi.chunks_exact(w)) {
                p.syn_lo_x.line(l, c, false);
                p.syn_hi_x.line(h, c, true);
            }
        }
        out.copy_from_slice(&current);
    }

    pub fn synthesize(&self, coefs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        self.synthesize_into(coefs, &mut out);
        out
    }
}
