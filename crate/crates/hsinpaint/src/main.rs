use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsinpaint::core::piht::ScheduleShape;
use hsinpaint::core::{make_layout, LayoutKind};
use hsinpaint::experiment::{self, fmt_db, ExperimentConfig, Method, PhantomScene, Scene};
use hsinpaint::export::{export_band_png, export_false_rgb};
use hsinpaint::format::{self, CubeHeader};
use hsinpaint::{Error, Result};

const SEED_ENV: &str = "HSI_SEED";

/// Snapshot hyperspectral mosaic simulation and reconstruction.
///
/// Band indices on the command line and in outputs are one-based.
#[derive(Parser)]
#[command(name = "hsinpaint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a filter layout (`.msk`) and print per-band pixel counts.
    Layout(LayoutArgs),
    /// Simulate an acquisition: sensor image, ground truth, layout and manifest.
    Simulate(SimulateArgs),
    /// Reconstruct a cube from a sensor image and its layout.
    Reconstruct(ReconstructArgs),
    /// Score an estimate against ground truth and render bands to PNG.
    Evaluate(EvaluateArgs),
    /// Run the method × factor × noise grid and tabulate SNRs.
    Sweep(SweepArgs),
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected ROWSxCOLS, got `{s}`"))?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((p(r)?, p(c)?))
}

fn parse_kind(s: &str) -> std::result::Result<LayoutKind, String> {
    s.parse().map_err(|e: hsinpaint::core::Error| e.to_string())
}

fn parse_schedule(s: &str) -> std::result::Result<ScheduleShape, String> {
    match s {
        "linear" => Ok(ScheduleShape::Linear),
        "constant" => Ok(ScheduleShape::Constant),
        other => Err(format!("unknown schedule `{other}` (expected linear or constant)")),
    }
}

/// Noise level: a number of dB, or `none` for a noiseless acquisition.
fn parse_noise(s: &str) -> std::result::Result<Option<f64>, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|e| format!("`{s}`: {e}"))
}

#[derive(Args)]
struct SeedArg {
    /// Seed for layouts, phantoms and noise. Falls back to the config file,
    /// then to $HSI_SEED, then to 0.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self, from_config: Option<u64>) -> Result<u64> {
        if let Some(s) = self.seed.or(from_config) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long, value_parser = parse_kind, default_value = "mosaic")]
    kind: LayoutKind,
    /// Sensor size.
    #[arg(long, value_parser = parse_dims, default_value = "64x64")]
    dims: (usize, usize),
    #[arg(long, default_value_t = 16)]
    bands: usize,
    /// Mosaic macropixel edge.
    #[arg(long, default_value_t = 4)]
    edge: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: PathBuf,
}

/// Experiment settings shared by `simulate` and `sweep`; every flag
/// overrides the corresponding field of `--config`.
#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration (a previous `manifest.json` replays it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ground-truth `.hsc` instead of the phantom.
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    kind: Option<LayoutKind>,
    /// Sensor size [default: 64x64].
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize)>,
    /// Number of bands [default: 16].
    #[arg(long)]
    bands: Option<usize>,
    /// Mosaic macropixel edge [default: 4].
    #[arg(long)]
    edge: Option<usize>,
    /// Phantom blob count.
    #[arg(long)]
    blobs: Option<usize>,
    /// Smallest phantom blob standard deviation in pixels.
    #[arg(long)]
    smoothness: Option<f64>,
    /// PIHT iteration count S [default: 200].
    #[arg(long)]
    iterations: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
}

impl ExperimentArgs {
    fn build(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.seed = self.seed.resolve(self.config.as_ref().map(|_| cfg.seed))?;
        if let Some(path) = &self.scene {
            cfg.scene = Scene::File { path: path.clone() };
        }
        if self.blobs.is_some() || self.smoothness.is_some() {
            let mut p = match &cfg.scene {
                Scene::Phantom(p) => p.clone(),
                Scene::File { .. } => PhantomScene::default(),
            };
            p.blobs = self.blobs.unwrap_or(p.blobs);
            p.smoothness = self.smoothness.unwrap_or(p.smoothness);
            cfg.scene = Scene::Phantom(p);
        }
        cfg.layout = self.kind.unwrap_or(cfg.layout);
        cfg.fpa = self.dims.unwrap_or(cfg.fpa);
        cfg.bands = self.bands.unwrap_or(cfg.bands);
        cfg.edge = self.edge.unwrap_or(cfg.edge);
        cfg.piht.iterations = self.iterations.unwrap_or(cfg.piht.iterations);
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Upscale factor f ∈ {1, 2, 4} [default: 2].
    #[arg(long)]
    factor: Option<usize>,
    /// Input SNR in dB, or `none` [default: none].
    #[arg(long, value_parser = parse_noise)]
    snr: Option<Option<f64>>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PihtArgs {
    /// Iteration count S.
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Intensity ceiling [default: largest sensor value].
    #[arg(long)]
    x_max: Option<f64>,
    /// Explicit K^0 (requires --ks).
    #[arg(long, requires = "ks")]
    k0: Option<usize>,
    /// Explicit K^S (requires --k0).
    #[arg(long, requires = "k0")]
    ks: Option<usize>,
    #[arg(long, value_parser = parse_schedule, default_value = "linear")]
    schedule: ScheduleShape,
    /// Relative residual stopping tolerance; 0 runs all iterations.
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Sensor image (`.hsc`, one band).
    #[arg(long)]
    fpa: PathBuf,
    #[arg(long)]
    layout: PathBuf,
    #[arg(long, default_value = "piht")]
    method: Method,
    /// Upscale factor f ∈ {1, 2, 4}; the cube is (m_I/f)×(m_J/f).
    #[arg(long, default_value_t = 2)]
    factor: usize,
    #[command(flatten)]
    piht: PihtArgs,
    /// Output cube.
    #[arg(long)]
    out: PathBuf,
    /// Per-iteration CSV (piht only).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    estimate: PathBuf,
    /// Output directory for metrics.csv and PNGs.
    #[arg(long)]
    out: PathBuf,
    /// Bands to render, one-based; exactly three also produce a false-RGB composite.
    #[arg(long, value_delimiter = ',')]
    bands: Vec<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Comma-separated upscale factors.
    #[arg(long, value_delimiter = ',')]
    factors: Option<Vec<usize>>,
    /// Comma-separated input SNRs in dB; `none` is noiseless.
    #[arg(long, value_delimiter = ',', value_parser = parse_noise)]
    snr: Option<Vec<Option<f64>>>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Rows run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    }
    fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn cmd_layout(a: &LayoutArgs) -> Result<()> {
    let seed = a.seed.resolve(None)?;
    let spec = hsinpaint::core::LayoutSpec { kind: a.kind, rows: a.dims.0, cols: a.dims.1, bands: a.bands, edge: a.edge, seed };
    let layout = make_layout(&spec)?;
    let seed = (a.kind == LayoutKind::Random).then_some(seed);
    format::write_layout(&a.out, &layout, Some(a.kind), seed)?;
    let mut text = String::new();
    for (band, count) in layout.counts().iter().enumerate() {
        writeln!(text, "band {}: {count}", band + 1).unwrap();
    }
    // A closed pipe (`| head`) is not an error.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let mut cfg = a.exp.build()?;
    if let Some(f) = a.factor {
        cfg.factors = vec![f];
    }
    if let Some(s) = a.snr {
        cfg.noise_snr_db = vec![s];
    }
    cfg.validate()?;
    let (&[factor], &[noise]) = (&cfg.factors[..], &cfg.noise_snr_db[..]) else {
        return Err(Error::Config("simulate takes exactly one factor and one noise level".into()));
    };
    let inst = experiment::simulate(&cfg, factor, noise)?;
    let spec = cfg.layout_spec();
    format::write_fpa(a.out.join("fpa.hsc"), &inst.y)?;
    let mut header = CubeHeader::for_cube(&inst.truth);
    if let Scene::Phantom(p) = &cfg.scene {
        header.x_max = Some(p.x_max);
    }
    format::write_cube(a.out.join("truth.hsc"), &inst.truth, &header)?;
    let seed = (spec.kind == LayoutKind::Random).then_some(spec.seed);
    format::write_layout(a.out.join("layout.msk"), &inst.layout, Some(spec.kind), seed)?;
    write_text(&a.out.join("manifest.json"), &cfg.manifest())?;
    let (n_i, n_j, l) = inst.truth.dims();
    println!(
        "truth {n_i}x{n_j}x{l}, sensor {}x{}, N/M = {}",
        inst.y.rows(),
        inst.y.cols(),
        (n_i * n_j * l) as f64 / inst.y.len() as f64
    );
    Ok(())
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    let y = format::read_fpa(&a.fpa)?;
    let (layout, _) = format::read_layout(&a.layout)?;
    if !y.rows().is_multiple_of(a.factor) || !y.cols().is_multiple_of(a.factor) {
        return Err(Error::Config(format!("sensor {}x{} is not divisible by factor {}", y.rows(), y.cols(), a.factor)));
    }
    let cfg = hsinpaint::core::PihtConfig {
        iterations: a.piht.iterations,
        x_max: a.piht.x_max,
        k_range: a.piht.k0.zip(a.piht.ks),
        schedule: a.piht.schedule,
        tolerance: a.piht.tolerance,
    };
    cfg.validate()?;
    let target = (y.rows() / a.factor, y.cols() / a.factor);
    let rec = experiment::reconstruct(a.method, &y, &layout, target, &cfg)?;
    format::write_cube(&a.out, &rec.cube, &CubeHeader::for_cube(&rec.cube))?;
    if let Some(report) = &rec.report {
        println!("iterations {} stop {:?}", report.iterations, report.stop);
        if let Some(path) = &a.report {
            let mut csv = String::from("iteration,residual,tau,k\n");
            for s in 0..report.iterations {
                writeln!(csv, "{},{:e},{:e},{}", s + 1, report.residuals[s], report.taus[s], report.ks[s]).unwrap();
            }
            write_text(path, &csv)?;
        }
    }
    println!("seconds {:.1}", rec.seconds);
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let (truth, _) = format::read_cube(&a.truth)?;
    let (est, _) = format::read_cube(&a.estimate)?;
    let eval = experiment::evaluate(&truth, &est)?;
    let bands: Vec<usize> = a
        .bands
        .iter()
        .map(|&b| {
            if b == 0 || b > truth.bands() {
                Err(Error::Config(format!("band {b} is outside 1..={}", truth.bands())))
            } else {
                Ok(b - 1)
            }
        })
        .collect::<Result<_>>()?;

    let mut csv = String::from("band,snr_db\n");
    for (b, v) in eval.per_band_db.iter().enumerate() {
        writeln!(csv, "{},{}", b + 1, fmt_db(*v)).unwrap();
    }
    writeln!(csv, "all,{}", fmt_db(eval.overall_db)).unwrap();
    write_text(&a.out.join("metrics.csv"), &csv)?;
    for &b in &bands {
        export_band_png(&est, b, a.out.join(format!("band{:02}.png", b + 1)))?;
    }
    if let &[r, g, b] = &bands[..] {
        export_false_rgb(&est, [r, g, b], a.out.join("false_rgb.png"))?;
    }
    println!("snr_db {}", fmt_db(eval.overall_db));
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let mut cfg = a.exp.build()?;
    if let Some(f) = &a.factors {
        cfg.factors = f.clone();
    }
    if let Some(s) = &a.snr {
        cfg.noise_snr_db = s.clone();
    }
    if let Some(m) = &a.methods {
        cfg.methods = m.clone();
    }
    let result = experiment::sweep(&cfg, &a.out, a.jobs);
    let summary = match result {
        Ok(s) => s,
        Err(e) => {
            if matches!(e, Error::SweepFailed { .. }) {
                eprintln!("see {}", a.out.join("table.csv").display());
            }
            return Err(e);
        }
    };
    println!("manifest {}", summary.manifest_sha256);
    for row in &summary.rows {
        if let Ok(o) = &row.outcome {
            let t = &row.trial;
            let input = t.noise_snr_db.map_or_else(|| String::from("inf"), |s| s.to_string());
            println!("{:<9} N/M={:<5} input={input:<4} snr_db={}", t.method, row.n_over_m, fmt_db(o.recon_snr_db));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Layout(a) => cmd_layout(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
