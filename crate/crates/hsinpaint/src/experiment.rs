//! Experiment pipeline: scene, layout, acquisition, reconstruction, scoring.
//!
//! A sweep runs the grid `factors × noise levels × methods` in that nesting
//! order and writes
//!
//! * `manifest.json`: the configuration, sufficient to replay the sweep,
//! * `table.csv`: one row per grid point, in grid order, stamped with the
//!   SHA-256 of the manifest,
//! * `timing.csv`: wall-clock seconds per row,
//! * `cubes/*.hsc`: every reconstruction.
//!
//! Timing lives in its own file so `table.csv` and the cubes are bitwise
//! reproducible.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use hsinpaint_core::metrics::snr_db_slices;
use hsinpaint_core::simulate::NoiseSpec;
use hsinpaint_core::{
    acquire, interp3d_init, make_layout, make_phantom, naive_demosaic, piht, resize_cube, snr_db, AnalysisDictionary,
    FilterLayout, FpaImage, HyperCube, LayoutKind, LayoutSpec, PhantomSpec, PihtConfig, ReconstructionReport, SensingOperator,
    UpsampleSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, ErrorClass, Result};
use crate::format::{self, CubeHeader};

pub const FACTORS: [usize; 3] = [1, 2, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Interp3d,
    Piht,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Method::Naive => "naive",
            Method::Interp3d => "interp3d",
            Method::Piht => "piht",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "naive" => Ok(Method::Naive),
            "interp3d" => Ok(Method::Interp3d),
            "piht" => Ok(Method::Piht),
            other => Err(format!("unknown method `{other}` (expected naive, interp3d or piht)")),
        }
    }
}

/// Phantom parameters; dimensions come from the experiment and the seed
/// from [`ExperimentConfig::seed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhantomScene {
    pub blobs: usize,
    pub spectral_atoms: usize,
    pub smoothness: f64,
    pub x_max: f64,
}

impl Default for PhantomScene {
    fn default() -> Self {
        let d = PhantomSpec::default();
        Self { blobs: d.blobs, spectral_atoms: d.spectral_atoms, smoothness: d.smoothness, x_max: d.x_max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum Scene {
    Phantom(PhantomScene),
    /// A `.hsc` ground truth, either at target resolution or at sensor
    /// resolution (then resized per factor).
    File {
        path: PathBuf,
    },
}

impl Default for Scene {
    fn default() -> Self {
        Scene::Phantom(PhantomScene::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scene: Scene,
    /// Sensor size `(m_I, m_J)`.
    pub fpa: (usize, usize),
    pub bands: usize,
    pub layout: LayoutKind,
    /// Mosaic macropixel edge.
    pub edge: usize,
    pub factors: Vec<usize>,
    /// Input SNRs in dB; `null` is a noiseless acquisition.
    pub noise_snr_db: Vec<Option<f64>>,
    pub methods: Vec<Method>,
    pub piht: PihtConfig,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scene: Scene::default(),
            fpa: (64, 64),
            bands: 16,
            layout: LayoutKind::Random,
            edge: 4,
            factors: vec![2],
            noise_snr_db: vec![None],
            methods: vec![Method::Naive, Method::Interp3d, Method::Piht],
            piht: PihtConfig::default(),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if self.factors.is_empty() || self.noise_snr_db.is_empty() {
            return bad("factor and noise lists must not be empty".into());
        }
        for &f in &self.factors {
            if !FACTORS.contains(&f) {
                return bad(format!("factor {f} is not one of 1, 2, 4"));
            }
            if !self.fpa.0.is_multiple_of(f) || !self.fpa.1.is_multiple_of(f) {
                return bad(format!("sensor {}x{} is not divisible by factor {f}", self.fpa.0, self.fpa.1));
            }
        }
        if let Some(s) = self.noise_snr_db.iter().flatten().find(|s| !s.is_finite()) {
            return bad(format!("input SNR {s} is not finite"));
        }
        self.piht.validate()?;
        Ok(())
    }

    pub fn layout_spec(&self) -> LayoutSpec {
        LayoutSpec { kind: self.layout, rows: self.fpa.0, cols: self.fpa.1, bands: self.bands, edge: self.edge, seed: self.seed }
    }

    pub fn target_dims(&self, factor: usize) -> (usize, usize) {
        (self.fpa.0 / factor, self.fpa.1 / factor)
    }

    /// Grid points in output order: factor, then noise, then method.
    pub fn grid(&self) -> Vec<Trial> {
        let mut out = Vec::new();
        for &factor in &self.factors {
            for &noise in &self.noise_snr_db {
                for &method in &self.methods {
                    out.push(Trial { factor, noise_snr_db: noise, method });
                }
            }
        }
        out
    }

    /// Canonical manifest text.
    pub fn manifest(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub factor: usize,
    pub noise_snr_db: Option<f64>,
    pub method: Method,
}

/// A simulated acquisition together with its ground truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub truth: HyperCube,
    pub layout: FilterLayout,
    pub phi: SensingOperator,
    pub y: FpaImage,
}

/// Ground truth at the target resolution of `factor`.
pub fn scene(cfg: &ExperimentConfig, factor: usize) -> Result<HyperCube> {
    let (rows, cols) = cfg.target_dims(factor);
    match &cfg.scene {
        Scene::Phantom(p) => Ok(make_phantom(&PhantomSpec {
            rows,
            cols,
            bands: cfg.bands,
            blobs: p.blobs,
            spectral_atoms: p.spectral_atoms,
            smoothness: p.smoothness,
            seed: cfg.seed,
            x_max: p.x_max,
        })?),
        Scene::File { path } => {
            let (cube, _) = format::read_cube(path)?;
            let dims = cube.dims();
            if dims == (rows, cols, cfg.bands) {
                Ok(cube)
            } else if dims == (cfg.fpa.0, cfg.fpa.1, cfg.bands) {
                Ok(resize_cube(&cube, (rows, cols))?)
            } else {
                Err(Error::Config(format!(
                    "scene {} is {}x{}x{}, expected {rows}x{cols}x{} or {}x{}x{}",
                    path.display(),
                    dims.0,
                    dims.1,
                    dims.2,
                    cfg.bands,
                    cfg.fpa.0,
                    cfg.fpa.1,
                    cfg.bands
                )))
            }
        }
    }
}

pub fn simulate(cfg: &ExperimentConfig, factor: usize, noise_snr_db: Option<f64>) -> Result<Instance> {
    let truth = scene(cfg, factor)?;
    let layout = make_layout(&cfg.layout_spec())?;
    let phi = SensingOperator::with_factor(layout.clone(), factor)?;
    let noise = noise_snr_db.map(|snr_db| NoiseSpec { snr_db, seed: cfg.seed });
    let y = acquire(&truth, &phi, noise)?;
    Ok(Instance { truth, layout, phi, y })
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub cube: HyperCube,
    /// PIHT iteration history.
    pub report: Option<ReconstructionReport>,
    pub seconds: f64,
}

/// Runs one method. The naive demosaic is computed at sensor resolution and
/// resized to `target` like the interpolation baseline.
pub fn reconstruct(
    method: Method,
    y: &FpaImage,
    layout: &FilterLayout,
    target: (usize, usize),
    cfg: &PihtConfig,
) -> Result<Reconstruction> {
    let start = Instant::now();
    let (cube, report) = match method {
        Method::Naive => (resize_cube(&naive_demosaic(y, layout)?, target)?, None),
        Method::Interp3d => (interp3d_init(y, layout, target)?, None),
        Method::Piht => {
            let phi = SensingOperator::new(layout.clone(), UpsampleSpec::between(target, layout.dims())?)?;
            let dict = AnalysisDictionary::new(target.0, target.1, layout.bands())?;
            let x0 = interp3d_init(y, layout, target)?;
            let mut report = piht(&phi, &dict, y, &x0, cfg)?;
            report.elapsed = Some(start.elapsed());
            (report.cube.clone(), Some(report))
        }
    };
    Ok(Reconstruction { cube, report, seconds: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub overall_db: f64,
    pub per_band_db: Vec<f64>,
}

pub fn evaluate(truth: &HyperCube, estimate: &HyperCube) -> Result<Evaluation> {
    let overall_db = snr_db(truth, estimate)?;
    let per_band_db =
        (0..truth.bands()).map(|b| snr_db_slices(truth.band(b), estimate.band(b))).collect::<std::result::Result<_, _>>()?;
    Ok(Evaluation { overall_db, per_band_db })
}

/// Formats decibels for CSV output; `inf` for exact reconstructions.
pub fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        String::from(if v > 0.0 { "inf" } else { "-inf" })
    } else {
        format!("{v:.4}")
    }
}

#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub recon_snr_db: f64,
    pub iterations: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub trial: Trial,
    /// `N / M`.
    pub n_over_m: f64,
    pub outcome: std::result::Result<RowOutcome, (ErrorClass, String)>,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub manifest_sha256: String,
    pub rows: Vec<SweepRow>,
}

fn cube_name(t: &Trial) -> String {
    let noise = t.noise_snr_db.map_or_else(|| String::from("clean"), |s| format!("snr{s}"));
    format!("{}_f{}_{noise}.hsc", t.method, t.factor)
}

fn run_trial(cfg: &ExperimentConfig, t: &Trial) -> Result<(HyperCube, RowOutcome)> {
    let inst = simulate(cfg, t.factor, t.noise_snr_db)?;
    let rec = reconstruct(t.method, &inst.y, &inst.layout, cfg.target_dims(t.factor), &cfg.piht)?;
    let iterations = rec.report.as_ref().map_or(0, |r| r.iterations);
    let recon_snr_db = snr_db(&inst.truth, &rec.cube)?;
    Ok((rec.cube, RowOutcome { recon_snr_db, iterations, seconds: rec.seconds }))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs the full grid with up to `jobs` rows in flight and writes the
/// outputs under `out_dir`. Rows that fail are recorded and the sweep
/// returns [`Error::SweepFailed`] after writing everything else.
pub fn sweep(cfg: &ExperimentConfig, out_dir: &Path, jobs: usize) -> Result<SweepSummary> {
    cfg.validate()?;
    let cubes = out_dir.join("cubes");
    fs::create_dir_all(&cubes).map_err(|e| Error::io(&cubes, e))?;
    let manifest = cfg.manifest();
    let manifest_sha256 = sha256_hex(manifest.as_bytes());
    write_text(&out_dir.join("manifest.json"), &manifest)?;

    let trials = cfg.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| trials.par_iter().map(|t| run_trial(cfg, t)).collect());

    let mut rows = Vec::with_capacity(trials.len());
    for (trial, result) in trials.into_iter().zip(results) {
        let outcome = match result {
            Ok((cube, outcome)) => {
                format::write_cube(cubes.join(cube_name(&trial)), &cube, &CubeHeader::for_cube(&cube))?;
                Ok(outcome)
            }
            Err(e) => Err((e.class(), e.to_string())),
        };
        let n_over_m = cfg.bands as f64 / (trial.factor * trial.factor) as f64;
        rows.push(SweepRow { trial, n_over_m, outcome });
    }

    let mut table = String::from("method,n_over_m,factor,input_snr_db,recon_snr_db,iterations,status,manifest_sha256\n");
    let mut timing = String::from("method,factor,input_snr_db,seconds\n");
    for row in &rows {
        let t = &row.trial;
        let input = t.noise_snr_db.map_or_else(|| String::from("inf"), |s| format!("{s}"));
        let (snr, iters, status, secs) = match &row.outcome {
            Ok(o) => (fmt_db(o.recon_snr_db), o.iterations.to_string(), String::from("ok"), format!("{:.1}", o.seconds)),
            Err((_, msg)) => (String::new(), String::new(), format!("error: {}", msg.replace([',', '\n'], ";")), String::new()),
        };
        table += &format!("{},{},{},{input},{snr},{iters},{status},{manifest_sha256}\n", t.method, row.n_over_m, t.factor);
        timing += &format!("{},{},{input},{secs}\n", t.method, t.factor);
    }
    write_text(&out_dir.join("table.csv"), &table)?;
    write_text(&out_dir.join("timing.csv"), &timing)?;

    let failed: Vec<_> = rows.iter().filter_map(|r| r.outcome.as_ref().err()).collect();
    if !failed.is_empty() {
        return Err(Error::SweepFailed {
            failed: failed.len(),
            total: rows.len(),
            numerical: failed.iter().any(|(c, _)| *c == ErrorClass::Numerical),
        });
    }
    Ok(SweepSummary { manifest_sha256, rows })
}
