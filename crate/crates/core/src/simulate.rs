//! Synthetic acquisitions: filter layouts, sensor capture with calibrated
//! noise, and smooth phantom scenes.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use crate::dct::Dct;
use crate::math::{norm, sqrt};
use crate::rng::{self, Purpose};
use crate::{Error, FilterLayout, FpaImage, HyperCube, Result, SensingOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LayoutKind {
    /// Tiled `edge × edge` macropixels.
    #[default]
    Mosaic,
    /// Seeded permutation of the mosaic over the whole sensor.
    Random,
}

impl core::fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            LayoutKind::Mosaic => "mosaic",
            LayoutKind::Random => "random",
        })
    }
}

impl core::str::FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mosaic" => Ok(LayoutKind::Mosaic),
            "random" => Ok(LayoutKind::Random),
            other => Err(Error::InvalidLayout(alloc::format!("unknown layout kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LayoutSpec {
    pub kind: LayoutKind,
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    /// Macropixel edge of the mosaic.
    pub edge: usize,
    pub seed: u64,
}

impl LayoutSpec {
    pub fn mosaic(rows: usize, cols: usize, bands: usize) -> Self {
        Self { kind: LayoutKind::Mosaic, rows, cols, bands, edge: 4, seed: 0 }
    }

    pub fn random(rows: usize, cols: usize, bands: usize, seed: u64) -> Self {
        Self { kind: LayoutKind::Random, rows, cols, bands, edge: 4, seed }
    }

    fn mosaic_fits(&self) -> bool {
        self.edge > 0
            && self.edge * self.edge == self.bands
            && self.rows.is_multiple_of(self.edge)
            && self.cols.is_multiple_of(self.edge)
    }
}

/// Builds a filter layout.
///
/// The mosaic assigns `λ(i, j) = edge·(i mod edge) + (j mod edge)`
/// (zero-based). The random layout applies a seeded Fisher–Yates shuffle
/// to the mosaic (or, when no mosaic fits the sensor, to the cyclic
/// assignment `p mod L`), so every band keeps exactly `M / L` pixels.
pub fn make_layout(spec: &LayoutSpec) -> Result<FilterLayout> {
    let (rows, cols, bands) = (spec.rows, spec.cols, spec.bands);
    if rows == 0 || cols == 0 || bands == 0 {
        return Err(Error::InvalidLayout(String::from("layout dimensions must be positive")));
    }
    let m = rows * cols;
    let mosaic = |p: usize| (spec.edge * ((p / cols) % spec.edge) + (p % cols) % spec.edge) as u16;
    let assignment: Vec<u16> = match spec.kind {
        LayoutKind::Mosaic => {
            if spec.edge == 0 || spec.edge * spec.edge != bands {
                return Err(Error::InvalidLayout(alloc::format!("mosaic edge {} does not cover {bands} bands", spec.edge)));
            }
            if rows % spec.edge != 0 || cols % spec.edge != 0 {
                return Err(Error::InvalidLayout(alloc::format!(
                    "{rows}x{cols} sensor is not divisible by macropixel edge {}",
                    spec.edge
                )));
            }
            (0..m).map(mosaic).collect()
        }
        LayoutKind::Random => {
            if m % bands != 0 {
                return Err(Error::InvalidLayout(alloc::format!("{bands} bands do not divide {m} pixels")));
            }
            let mut a: Vec<u16> =
                if spec.mosaic_fits() { (0..m).map(mosaic).collect() } else { (0..m).map(|p| (p % bands) as u16).collect() };
            let mut rng = rng::stream(spec.seed, Purpose::Layout);
            for i in (1..m).rev() {
                let j = rng::below(&mut rng, i as u64 + 1) as usize;
                a.swap(i, j);
            }
            a
        }
    };
    FilterLayout::new(rows, cols, bands, assignment)
}

/// Additive white Gaussian noise at an exact input SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// Simulates `y = Φx (+ n)`; the noise is rescaled so that
/// `20·log10(‖Φx‖ / ‖n‖)` equals the requested SNR.
pub fn acquire(x: &HyperCube, phi: &SensingOperator, noise: Option<NoiseSpec>) -> Result<FpaImage> {
    let clean = phi.forward(x)?;
    let Some(noise) = noise else {
        return Ok(clean);
    };
    if !noise.snr_db.is_finite() {
        return Err(Error::InvalidConfig(alloc::format!("input SNR must be finite, got {}", noise.snr_db)));
    }
    let mut rng = rng::stream(noise.seed, Purpose::Noise);
    let draws: Vec<f64> = (0..clean.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let scale = norm(clean.data()) / (norm(&draws) * libm::pow(10.0, noise.snr_db / 20.0));
    let (rows, cols) = clean.dims();
    let data = clean.data().iter().zip(&draws).map(|(c, n)| c + scale * n).collect();
    FpaImage::from_vec(rows, cols, data)
}

/// Parameters of the synthetic scene generator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PhantomSpec {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub blobs: usize,
    /// Number of low-order DCT atoms mixed into every blob spectrum.
    pub spectral_atoms: usize,
    /// Smallest blob standard deviation, in pixels.
    pub smoothness: f64,
    pub seed: u64,
    pub x_max: f64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self { rows: 64, cols: 64, bands: 8, blobs: 12, spectral_atoms: 3, smoothness: 2.0, seed: 0, x_max: 1.0 }
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.blobs == 0 {
            return Err(Error::InvalidConfig(String::from("phantom needs at least one blob")));
        }
        if self.spectral_atoms == 0 || self.spectral_atoms > self.bands {
            return Err(Error::InvalidConfig(alloc::format!("spectral atom count must lie in 1..={}", self.bands)));
        }
        if !(self.smoothness > 0.0 && self.x_max > 0.0) {
            return Err(Error::InvalidConfig(String::from("smoothness and x_max must be positive")));
        }
        if self.rows == 0 || self.cols == 0 || self.bands == 0 {
            return Err(Error::InvalidConfig(String::from("phantom dimensions must be positive")));
        }
        Ok(())
    }
}

/// Sum of rotated anisotropic Gaussian blobs, each with its own smooth
/// spectrum, rescaled affinely into `[0.05·x_max, 0.95·x_max]`.
pub fn make_phantom(spec: &PhantomSpec) -> Result<HyperCube> {
    spec.validate()?;
    let mut rng = rng::stream(spec.seed, Purpose::Phantom);
    let (rows, cols, bands) = (spec.rows, spec.cols, spec.bands);
    let dct = Dct::new(bands);
    let mut cube = HyperCube::zeros(rows, cols, bands)?;
    let mut spatial = alloc::vec![0.0; rows * cols];
    for _ in 0..spec.blobs {
        let ci = rng::uniform(&mut rng) * rows as f64;
        let cj = rng::uniform(&mut rng) * cols as f64;
        let si = spec.smoothness * (1.0 + 3.0 * rng::uniform(&mut rng));
        let sj = spec.smoothness * (1.0 + 3.0 * rng::uniform(&mut rng));
        let theta = PI * rng::uniform(&mut rng);
        let weight = 0.5 + rng::uniform(&mut rng);
        let (sin, cos) = (libm::sin(theta), libm::cos(theta));
        for i in 0..rows {
            for j in 0..cols {
                let (di, dj) = (i as f64 - ci, j as f64 - cj);
                let u = cos * di + sin * dj;
                let v = -sin * di + cos * dj;
                spatial[i * cols + j] = weight * libm::exp(-0.5 * (u * u / (si * si) + v * v / (sj * sj)));
            }
        }
        // DC atom positive so every blob adds light; higher atoms signed.
        let mut spectrum = alloc::vec![0.0; bands];
        for k in 0..spec.spectral_atoms {
            let amp = if k == 0 {
                sqrt(bands as f64) * (0.5 + 0.5 * rng::uniform(&mut rng))
            } else {
                sqrt(bands as f64) * 0.6 * (2.0 * rng::uniform(&mut rng) - 1.0) / k as f64
            };
            for (l, s) in spectrum.iter_mut().enumerate() {
                *s += amp * dct.coefficient(k, l);
            }
        }
        for (l, &s) in spectrum.iter().enumerate() {
            for (v, &g) in cube.band_mut(l).iter_mut().zip(&spatial) {
                *v += s * g;
            }
        }
    }
    let (lo, hi) = cube.data().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (floor, span) = (0.05 * spec.x_max, 0.9 * spec.x_max);
    for v in cube.data_mut() {
        *v = if hi > lo { floor + span * (*v - lo) / (hi - lo) } else { 0.5 * spec.x_max };
    }
    Ok(cube)
}
