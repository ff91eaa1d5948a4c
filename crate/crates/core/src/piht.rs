//! Pseudo-inverse Iterative Hard Thresholding.
//!
//! Each iteration takes an exact line-search gradient step on
//! `‖y − Φx‖²`, analyzes the result, keeps the `K^s` largest coefficients,
//! maps back with the left inverse `A†` and clamps into `[0, x_max]`:
//!
//! ```text
//! τ^s     = ‖Φ*(y − Φx^s)‖² / ‖ΦΦ*(y − Φx^s)‖²
//! a^s     = x^s + τ^s Φ*(y − Φx^s)
//! x^{s+1} = P_R[ A† H_{K^s}(A a^s) ]
//! ```
//!
//! `K^s` grows linearly from `K^0` to `K^S`, both counted on the
//! distribution of `log|A x_0|`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::math::{axpy, norm, norm_sq, sqrt};
use crate::threshold::hard_threshold_in_place;
use crate::{AnalysisDictionary, CoefVector, Error, FpaImage, HyperCube, Result, SensingOperator};

/// How `K^s` moves from `K^0` to `K^S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ScheduleShape {
    #[default]
    Linear,
    /// `K^S` from the first iteration on.
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PihtConfig {
    /// Number of iterations `S`.
    pub iterations: usize,
    /// Intensity ceiling; `None` uses the largest observed sample.
    pub x_max: Option<f64>,
    /// Explicit `(K^0, K^S)` instead of the log-magnitude heuristic.
    pub k_range: Option<(usize, usize)>,
    pub schedule: ScheduleShape,
    /// Stop once `‖y − Φx‖ ≤ tolerance · ‖y‖`, or once an iteration leaves
    /// `x` unchanged. Zero disables both and runs every iteration.
    pub tolerance: f64,
}

impl Default for PihtConfig {
    fn default() -> Self {
        Self { iterations: 200, x_max: None, k_range: None, schedule: ScheduleShape::Linear, tolerance: 1e-12 }
    }
}

impl PihtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig(String::from("PIHT needs at least one iteration")));
        }
        if let Some((k0, ks)) = self.k_range {
            if k0 > ks {
                return Err(Error::InvalidConfig(alloc::format!("K^0 = {k0} exceeds K^S = {ks}")));
            }
        }
        if let Some(x_max) = self.x_max {
            if !(x_max.is_finite() && x_max > 0.0) {
                return Err(Error::InvalidConfig(alloc::format!("x_max must be positive, got {x_max}")));
            }
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidConfig(String::from("tolerance must be non-negative")));
        }
        Ok(())
    }
}

/// Why the iteration loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    ResidualTolerance,
    /// `Φ*(y − Φx) = 0`: no descent direction left.
    Stationary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub cube: HyperCube,
    /// `‖y − Φx^s‖` at the start of every executed iteration.
    pub residuals: Vec<f64>,
    pub taus: Vec<f64>,
    pub ks: Vec<usize>,
    pub iterations: usize,
    pub stop: StopReason,
    /// Filled in by callers that have a clock.
    pub elapsed: Option<Duration>,
}

/// Line-search step and the convergence signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSize {
    pub tau: f64,
    pub converged: bool,
}

fn step_from(gradient: &[f64], projected: &[f64]) -> StepSize {
    let num = norm_sq(gradient);
    if num == 0.0 {
        return StepSize { tau: 0.0, converged: true };
    }
    StepSize { tau: num / norm_sq(projected), converged: false }
}

/// `τ = ‖Φ* r‖² / ‖ΦΦ* r‖²`, the minimizer of `‖r − τΦΦ* r‖`.
pub fn step_size(phi: &SensingOperator, residual: &FpaImage) -> Result<StepSize> {
    let g = phi.adjoint(residual)?;
    let pg = phi.forward(&g)?;
    Ok(step_from(g.data(), pg.data()))
}

/// Magnitudes at or below this fraction of the largest one are rounding
/// residue of exact zeros and are left out of the log statistics.
pub const ZERO_FLOOR: f64 = 1e-12;

/// `(K^0, K^S)`: counts of `log|α|` above `μ + 2.5σ` and `μ + σ`, with `μ`
/// and the population deviation `σ` taken over the nonzero entries (see
/// [`ZERO_FLOOR`]).
/// Both are clamped to at least one.
pub fn k_bounds(alpha0: &[f64]) -> Result<(usize, usize)> {
    let peak = alpha0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = ZERO_FLOOR * peak;
    let logs: Vec<f64> = alpha0.iter().filter(|v| v.abs() > floor).map(|v| libm::log(v.abs())).collect();
    if logs.is_empty() {
        return Err(Error::DegenerateCoefficients);
    }
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let sigma = sqrt(logs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n);
    let count = |t: f64| logs.iter().filter(|&&v| v > t).count();
    let k0 = count(mean + 2.5 * sigma).max(1);
    let ks = count(mean + sigma).max(k0);
    Ok((k0, ks))
}

/// Linear ramp `K^s = round(K^0 + (s−1)/(S−1)·(K^S − K^0))`, `s = 1..=S`.
pub fn ramp(k0: usize, ks: usize, iterations: usize, shape: ScheduleShape) -> Vec<usize> {
    if iterations <= 1 || shape == ScheduleShape::Constant {
        return vec![ks; iterations];
    }
    let span = ks as f64 - k0 as f64;
    (0..iterations).map(|s| libm::round(k0 as f64 + s as f64 / (iterations - 1) as f64 * span) as usize).collect()
}

/// Sparsity schedule `K^1..K^S` derived from `α₀ = A x₀`.
pub fn k_schedule(alpha0: &CoefVector, iterations: usize) -> Result<Vec<usize>> {
    let (k0, ks) = k_bounds(alpha0.data())?;
    Ok(ramp(k0, ks, iterations, ScheduleShape::Linear))
}

/// Runs PIHT from `x0`.
pub fn piht(
    phi: &SensingOperator,
    dict: &AnalysisDictionary,
    y: &FpaImage,
    x0: &HyperCube,
    cfg: &PihtConfig,
) -> Result<ReconstructionReport> {
    piht_observed(phi, dict, y, x0, cfg, |_, _| {})
}

/// [`piht`] calling `observer(s, x^{s+1})` after every iteration.
pub fn piht_observed(
    phi: &SensingOperator,
    dict: &AnalysisDictionary,
    y: &FpaImage,
    x0: &HyperCube,
    cfg: &PihtConfig,
    mut observer: impl FnMut(usize, &[f64]),
) -> Result<ReconstructionReport> {
    cfg.validate()?;
    let dims = phi.cube_dims();
    x0.expect_dims("piht initial point", dims)?;
    y.expect_dims("piht observations", phi.fpa_dims())?;
    if dict.dims() != dims {
        return Err(Error::DimensionMismatch { context: "piht dictionary", expected: dims, found: dict.dims() });
    }
    let x_max = match cfg.x_max {
        Some(v) => v,
        None => y.data().iter().fold(0.0f64, |m, &v| m.max(v)),
    };

    let n = phi.unknowns();
    let m = phi.measurements();
    let y_norm = norm(y.data());
    let mut x = x0.data().to_vec();
    let mut residual = vec![0.0; m];
    let mut grad = vec![0.0; n];
    let mut projected = vec![0.0; m];
    let mut coefs = vec![0.0; dict.len()];
    let mut scratch = Vec::new();

    let mut schedule: Option<Vec<usize>> = None;
    let mut report = ReconstructionReport {
        cube: x0.clone(),
        residuals: Vec::new(),
        taus: Vec::new(),
        ks: Vec::new(),
        iterations: 0,
        stop: StopReason::Completed,
        elapsed: None,
    };

    let mut previous = Vec::new();
    for s in 1..=cfg.iterations {
        phi.forward_into(&x, &mut residual);
        for (r, &v) in residual.iter_mut().zip(y.data()) {
            *r = v - *r;
        }
        let r_norm = norm(&residual);
        // Only after one thresholding step: a data-consistent x0 (f = 1)
        // still has to be projected onto the sparse model.
        if s > 1 && cfg.tolerance > 0.0 && r_norm <= cfg.tolerance * y_norm {
            report.stop = StopReason::ResidualTolerance;
            break;
        }
        phi.adjoint_into(&residual, &mut grad);
        phi.forward_into(&grad, &mut projected);
        let step = step_from(&grad, &projected);
        if step.converged {
            previous.clear();
            previous.extend_from_slice(&x);
        } else {
            axpy(step.tau, &grad, &mut x);
        }

        dict.analyze_into(&x, &mut coefs);
        let ks = match &schedule {
            Some(ks) => ks,
            None => {
                let ks = match cfg.k_range {
                    Some((k0, ks)) => ramp(k0.min(dict.len()), ks.min(dict.len()), cfg.iterations, cfg.schedule),
                    None => {
                        let mut alpha0 = vec![0.0; dict.len()];
                        dict.analyze_into(x0.data(), &mut alpha0);
                        if step.converged && alpha0.iter().all(|&v| v == 0.0) {
                            // x0 = 0 explains y exactly and is 0-sparse.
                            report.residuals.push(r_norm);
                            report.taus.push(0.0);
                            report.ks.push(0);
                            report.iterations = s;
                            report.stop = StopReason::Stationary;
                            observer(s, &x);
                            break;
                        }
                        let (k0, ks) = k_bounds(&alpha0)?;
                        ramp(k0, ks, cfg.iterations, cfg.schedule)
                    }
                };
                schedule.insert(ks)
            }
        };
        let k = ks[s - 1];
        hard_threshold_in_place(&mut coefs, k, &mut scratch);
        dict.synthesize_into(&coefs, &mut x);
        for v in x.iter_mut() {
            if v.is_nan() {
                return Err(Error::NonFinite { iteration: s });
            }
            *v = v.clamp(0.0, x_max);
        }

        report.residuals.push(r_norm);
        report.taus.push(step.tau);
        report.ks.push(k);
        report.iterations = s;
        observer(s, &x);
        if cfg.tolerance > 0.0 && step.converged && previous == x {
            report.stop = StopReason::Stationary;
            break;
        }
    }

    report.cube = HyperCube::from_vec(dims.0, dims.1, dims.2, x)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FilterLayout;

    fn operator(m: usize, bands: usize, f: usize) -> SensingOperator {
        let mm = m * m;
        let a = (0..mm).map(|p| ((p * 5 + 1) % mm % bands) as u16).collect();
        SensingOperator::with_factor(FilterLayout::new(m, m, bands, a).unwrap(), f).unwrap()
    }

    #[test]
    fn zero_residual_signals_convergence() {
        let phi = operator(8, 4, 2);
        let s = step_size(&phi, &FpaImage::zeros(8, 8).unwrap()).unwrap();
        assert_eq!(s, StepSize { tau: 0.0, converged: true });
    }

    #[test]
    fn unit_factor_step_is_one() {
        let phi = operator(8, 4, 1);
        let r = FpaImage::from_vec(8, 8, (0..64).map(|v| (v as f64 * 0.7).sin()).collect()).unwrap();
        let s = step_size(&phi, &r).unwrap();
        assert!((s.tau - 1.0).abs() < 1e-14);
    }

    #[test]
    fn step_minimizes_line_residual() {
        let phi = operator(8, 4, 2);
        let x = HyperCube::from_fn(4, 4, 4, |i, j, l| ((i * 7 + j * 3 + l) as f64 * 0.9).cos()).unwrap();
        let y = FpaImage::from_vec(8, 8, (0..64).map(|v| (v as f64 * 0.3).sin()).collect()).unwrap();
        let fx = phi.forward(&x).unwrap();
        let r = FpaImage::from_vec(8, 8, y.data().iter().zip(fx.data()).map(|(a, b)| a - b).collect()).unwrap();
        let tau = step_size(&phi, &r).unwrap().tau;
        let g = phi.adjoint(&r).unwrap();
        let q = |t: f64| {
            let moved: Vec<f64> = x.data().iter().zip(g.data()).map(|(a, b)| a + t * b).collect();
            let cube = HyperCube::from_vec(4, 4, 4, moved).unwrap();
            let p = phi.forward(&cube).unwrap();
            norm(&y.data().iter().zip(p.data()).map(|(a, b)| a - b).collect::<Vec<_>>())
        };
        let eps = 1e-3 * tau;
        assert!(q(tau) <= q(tau + eps));
        assert!(q(tau) <= q(tau - eps));
        assert!(q(tau) <= q(0.0));
    }

    #[test]
    fn equal_magnitudes_clamp_to_one() {
        let (k0, ks) = k_bounds(&[2.0, -2.0, 2.0, 0.0]).unwrap();
        assert_eq!((k0, ks), (1, 1));
        assert_eq!(k_bounds(&[0.0, 0.0]), Err(Error::DegenerateCoefficients));
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(3, 9, 1, ScheduleShape::Linear), vec![9]);
        let r = ramp(3, 9, 4, ScheduleShape::Linear);
        assert_eq!(r, vec![3, 5, 7, 9]);
        assert_eq!(ramp(3, 9, 3, ScheduleShape::Constant), vec![9, 9, 9]);
    }

    #[test]
    fn zero_data_stays_zero() {
        let phi = operator(8, 4, 2);
        let dict = AnalysisDictionary::new(4, 4, 4).unwrap();
        let y = FpaImage::zeros(8, 8).unwrap();
        let x0 = HyperCube::zeros(4, 4, 4).unwrap();
        let cfg = PihtConfig { tolerance: 0.0, ..PihtConfig::default() };
        let rep = piht(&phi, &dict, &y, &x0, &cfg).unwrap();
        assert!(rep.cube.data().iter().all(|&v| v == 0.0));
        assert!(rep.residuals.iter().all(|&v| v == 0.0));
        assert_eq!(rep.residuals.len(), rep.iterations);
    }

    #[test]
    fn rejects_zero_iterations() {
        let cfg = PihtConfig { iterations: 0, ..PihtConfig::default() };
        assert!(cfg.validate().is_err());
        let bad = PihtConfig { k_range: Some((5, 2)), ..PihtConfig::default() };
        assert!(bad.validate().is_err());
    }
}
