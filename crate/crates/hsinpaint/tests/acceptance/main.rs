//! Acceptance suite: one PASS/FAIL line per criterion.

mod dense;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hsinpaint::core::math::{dot, norm};
use hsinpaint::core::piht::{piht_observed, PihtConfig};
use hsinpaint::core::rng::{stream, uniform, Purpose};
use hsinpaint::core::*;
use hsinpaint::experiment::{self, ExperimentConfig, Method};

use dense::Mat;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_vec(rng: &mut impl rand_core::RngCore, len: usize) -> Vec<f64> {
    (0..len).map(|_| 2.0 * uniform(rng) - 1.0).collect()
}

fn basis(len: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[i] = 1.0;
    v
}

/// Largest entrywise gap between a matrix given by its columns and a dense oracle.
fn column_gap(columns: impl Iterator<Item = Vec<f64>>, oracle: &Mat) -> f64 {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (j, col) in columns.enumerate() {
        assert_eq!(col.len(), oracle.rows);
        for (i, v) in col.iter().enumerate() {
            worst = worst.max((v - oracle.at(i, j)).abs());
        }
        count += 1;
    }
    assert_eq!(count, oracle.cols);
    worst
}

fn operator_oracles() -> Outcome {
    let start = Instant::now();
    let (n, bands) = (4, 2);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for f in [1, 2] {
        let m = n * f;
        let layout = make_layout(&LayoutSpec::random(m, m, bands, 11)).unwrap();
        let phi = SensingOperator::with_factor(layout.clone(), f).unwrap();
        let oracle = dense::sensing(&layout, n, f);
        let nn = n * n * bands;
        let fwd = column_gap(
            (0..nn).map(|q| phi.forward(&HyperCube::from_vec(n, n, bands, basis(nn, q)).unwrap()).unwrap().into_vec()),
            &oracle,
        );
        let adj = column_gap(
            (0..m * m).map(|p| phi.adjoint(&FpaImage::from_vec(m, m, basis(m * m, p)).unwrap()).unwrap().into_vec()),
            &oracle.transpose(),
        );
        parts.push(format!("f={f}: forward {fwd:.1e}, adjoint {adj:.1e}"));
        worst = worst.max(fwd).max(adj);
    }

    let dict = AnalysisDictionary::new(n, n, bands).unwrap();
    let a = dense::analysis(n, n, bands);
    let nn = n * n * bands;
    let ana = column_gap(
        (0..nn).map(|q| dict.analyze(&HyperCube::from_vec(n, n, bands, basis(nn, q)).unwrap()).unwrap().into_vec()),
        &a,
    );
    let p = dict.len();
    let synth = |i| dict.pinv_synthesize(&CoefVector::new(basis(p, i), *dict.map()).unwrap()).unwrap().into_vec();
    let pinv = column_gap((0..p).map(synth), &dense::pinv(&a));
    let adjoint = column_gap((0..p).map(synth), &a.transpose());
    parts.push(format!("analyze {ana:.1e}, pinv {pinv:.1e}, pinv vs transpose {adjoint:.1e}"));
    worst = worst.max(ana).max(pinv).max(adjoint);
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-12 && secs < 10.0, format!("{}; max {worst:.1e} in {secs:.2}s", parts.join("; ")))
}

fn adjoint_dot_products() -> Outcome {
    let (m, bands) = (32, 16);
    let mut worst: f64 = 0.0;
    for f in [1, 2, 4] {
        for kind in [LayoutKind::Mosaic, LayoutKind::Random] {
            let layout = make_layout(&LayoutSpec { kind, rows: m, cols: m, bands, edge: 4, seed: 5 }).unwrap();
            let phi = SensingOperator::with_factor(layout, f).unwrap();
            let (n_i, n_j, l) = phi.cube_dims();
            let mut rng = stream(f as u64 * 10 + kind as u64, Purpose::Test);
            for _ in 0..100 {
                let x = HyperCube::from_vec(n_i, n_j, l, random_vec(&mut rng, n_i * n_j * l)).unwrap();
                let y = FpaImage::from_vec(m, m, random_vec(&mut rng, m * m)).unwrap();
                let lhs = dot(phi.forward(&x).unwrap().data(), y.data());
                let rhs = dot(x.data(), phi.adjoint(&y).unwrap().data());
                worst = worst.max((lhs - rhs).abs() / (norm(x.data()) * norm(y.data())));
            }
        }
    }
    outcome(worst <= 1e-10, format!("600 pairs over f in {{1,2,4}} x {{mosaic,random}}; max relative gap {worst:.1e}"))
}

fn left_inverse() -> Outcome {
    let shapes = [(8, 8, 4), (16, 12, 3), (12, 20, 5)];
    let mut rng = stream(3, Purpose::Test);
    let mut worst: f64 = 0.0;
    let mut sizes_ok = true;
    for i in 0..50 {
        let (r, c, l) = shapes[i % shapes.len()];
        let dict = AnalysisDictionary::new(r, c, l).unwrap();
        let x = HyperCube::from_vec(r, c, l, random_vec(&mut rng, r * c * l)).unwrap();
        let alpha = dict.analyze(&x).unwrap();
        sizes_ok &= alpha.len() == 10 * x.len();
        let back = dict.pinv_synthesize(&alpha).unwrap();
        let err: Vec<f64> = back.data().iter().zip(x.data()).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&err) / norm(x.data()));
    }
    outcome(worst <= 1e-10 && sizes_ok, format!("50 cubes over {shapes:?}; P = 10N: {sizes_ok}; max relative error {worst:.1e}"))
}

fn fixed_point() -> Outcome {
    let layout = make_layout(&LayoutSpec::random(64, 64, 16, 2)).unwrap();
    let phi = SensingOperator::with_factor(layout.clone(), 2).unwrap();
    let dict = AnalysisDictionary::new(32, 32, 16).unwrap();
    let x = HyperCube::filled(32, 32, 16, 0.5).unwrap();
    let y = phi.forward(&x).unwrap();
    let x0 = interp3d_init(&y, &layout, (32, 32)).unwrap();
    let cfg = PihtConfig { tolerance: 0.0, ..PihtConfig::default() };
    let mut prev = x0.data().to_vec();
    let mut drift: f64 = 0.0;
    let report = piht_observed(&phi, &dict, &y, &x0, &cfg, |_, xs| {
        let d: Vec<f64> = xs.iter().zip(&prev).map(|(a, b)| a - b).collect();
        drift = drift.max(norm(&d) / norm(&prev));
        prev.copy_from_slice(xs);
    })
    .unwrap();
    outcome(
        report.iterations == 200 && drift <= 1e-12,
        format!("{} iterations, K = {:?}, max relative drift {drift:.1e}", report.iterations, report.ks.iter().max()),
    )
}

/// A cube whose analysis coefficients are exactly `k`-sparse: spatially
/// constant bands whose spectra mix `k` DCT atoms.
fn sparse_instance(dict: &AnalysisDictionary, seed: u64) -> (HyperCube, usize) {
    let map = *dict.map();
    let mut rng = stream(seed, Purpose::Test);
    loop {
        let k = 2 + (uniform(&mut rng) * 4.0) as usize;
        let mut order: Vec<usize> = (1..map.bands).collect();
        for i in 0..order.len() {
            let j = i + (uniform(&mut rng) * (order.len() - i) as f64) as usize;
            order.swap(i, j);
        }
        let mut alpha = CoefVector::zeros(map);
        alpha.data_mut()[map.block(0, 0).start] = 10.0;
        for &s in &order[..k - 1] {
            alpha.data_mut()[map.block(s, 0).start] = 2.0 * uniform(&mut rng) - 1.0;
        }
        let x = dict.pinv_synthesize(&alpha).unwrap();
        let ax = dict.analyze(&x).unwrap();
        let kept = hard_threshold(&ax, k);
        let gap: Vec<f64> = ax.data().iter().zip(kept.data()).map(|(a, b)| a - b).collect();
        if norm(&gap) <= 1e-12 * norm(ax.data()) && x.data().iter().all(|&v| v > 0.0) {
            return (x, k);
        }
    }
}

fn exact_sparse_recovery() -> Outcome {
    let start = Instant::now();
    let (n, l) = (32, 8);
    let dict = AnalysisDictionary::new(n, n, l).unwrap();
    let mut scores = Vec::new();
    for seed in 0..10 {
        let (x, _) = sparse_instance(&dict, seed);
        let layout = make_layout(&LayoutSpec::random(n, n, l, seed)).unwrap();
        let phi = SensingOperator::with_factor(layout.clone(), 1).unwrap();
        let y = acquire(&x, &phi, None).unwrap();
        let x0 = interp3d_init(&y, &layout, (n, n)).unwrap();
        let report = piht(&phi, &dict, &y, &x0, &PihtConfig::default()).unwrap();
        scores.push(snr_db(&x, &report.cube).unwrap());
    }
    let hits = scores.iter().filter(|&&s| s >= 60.0).count();
    let secs = start.elapsed().as_secs_f64();
    outcome(hits >= 9 && secs < 300.0, format!("{hits}/10 seeds >= 60 dB, SNRs {}; {secs:.1}s", list(&scores)))
}

fn list(v: &[f64]) -> String {
    v.iter().map(|s| format!("{s:.1}")).collect::<Vec<_>>().join(" ")
}

fn method_snr(cfg: &ExperimentConfig, factor: usize, noise: Option<f64>, methods: &[Method]) -> Vec<f64> {
    let inst = experiment::simulate(cfg, factor, noise).unwrap();
    methods
        .iter()
        .map(|&m| {
            let rec = experiment::reconstruct(m, &inst.y, &inst.layout, cfg.target_dims(factor), &cfg.piht).unwrap();
            snr_db(&inst.truth, &rec.cube).unwrap()
        })
        .collect()
}

fn method_ordering() -> Outcome {
    let start = Instant::now();
    let mut hits = 0;
    let mut rows = Vec::new();
    for seed in 0..5 {
        let cfg = ExperimentConfig { seed, ..ExperimentConfig::default() };
        let s = method_snr(&cfg, 2, None, &[Method::Naive, Method::Interp3d, Method::Piht]);
        if s[2] > s[1] && s[1] > s[0] && s[2] - s[1] >= 3.0 {
            hits += 1;
        }
        rows.push(format!("[{}]", list(&s)));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(hits >= 4 && secs < 600.0, format!("{hits}/5 seeds; naive/interp3d/piht dB {}; {secs:.1}s", rows.join(" ")))
}

fn layout_ordering() -> Outcome {
    let mut hits = 0;
    let mut rows = Vec::new();
    for seed in 0..5 {
        let snr = |layout| {
            let cfg = ExperimentConfig { seed, layout, ..ExperimentConfig::default() };
            method_snr(&cfg, 1, None, &[Method::Piht])[0]
        };
        let (mosaic, random) = (snr(LayoutKind::Mosaic), snr(LayoutKind::Random));
        if random >= mosaic + 1.0 {
            hits += 1;
        }
        rows.push(format!("[{mosaic:.2} {random:.2}]"));
    }
    outcome(hits >= 4, format!("N = 16M, {hits}/5 seeds; mosaic/random dB {}", rows.join(" ")))
}

fn noise_monotonicity() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for seed in 0..3 {
        let cfg = ExperimentConfig { seed, ..ExperimentConfig::default() };
        let s: Vec<f64> = [10.0, 20.0, 30.0].iter().map(|&n| method_snr(&cfg, 2, Some(n), &[Method::Piht])[0]).collect();
        ok &= s[0] < s[1] && s[1] < s[2] && s[2] - s[0] >= 5.0;
        rows.push(format!("[{}]", list(&s)));
    }
    outcome(ok, format!("input 10/20/30 dB -> piht dB {}", rows.join(" ")))
}

fn files_equal(a: &Path, b: &Path) -> bool {
    std::fs::read(a).ok().is_some_and(|x| std::fs::read(b).ok() == Some(x))
}

fn sweep_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        fpa: (32, 32),
        factors: vec![1, 2, 4],
        noise_snr_db: vec![None, Some(20.0)],
        piht: PihtConfig { iterations: 40, ..PihtConfig::default() },
        seed: 3,
        ..ExperimentConfig::default()
    };
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, cfg.manifest()).unwrap();
    let run = |config: &Path, out: &str, jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_hsinpaint"))
            .args(["sweep", "--config"])
            .arg(config)
            .arg("--out")
            .arg(dir.path().join(out))
            .args(["--jobs", jobs])
            .output()
            .unwrap()
            .status
            .success()
    };
    let mut ok = run(&cfg_path, "first", "1");
    let manifest = dir.path().join("first/manifest.json");
    ok &= run(&manifest, "replay", "1") && run(&manifest, "replay_jobs", "4");
    let mut compared = 0;
    let mut names = vec![String::from("table.csv"), String::from("manifest.json")];
    if let Ok(entries) = std::fs::read_dir(dir.path().join("first/cubes")) {
        names.extend(entries.map(|e| format!("cubes/{}", e.unwrap().file_name().to_string_lossy())));
    }
    for name in &names {
        for other in ["replay", "replay_jobs"] {
            ok &= files_equal(&dir.path().join("first").join(name), &dir.path().join(other).join(name));
            compared += 1;
        }
    }
    let cubes = names.len() - 2;
    ok &= cubes == 18;
    outcome(ok, format!("{compared} file comparisons ({cubes} cubes, table, manifest) across --jobs 1 and 4"))
}

fn schedule_contract() -> Outcome {
    let mut rng = stream(10, Purpose::Test);
    let map = SubbandMap { rows: 10, cols: 10, bands: 10, levels: 3 };
    let values: Vec<f64> = (0..map.len())
        .map(|i| {
            if i % 17 == 0 {
                return 0.0;
            }
            // Box-Muller
            let (u, v) = (uniform(&mut rng), uniform(&mut rng));
            let z = (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
            let sign = if uniform(&mut rng) < 0.5 { -1.0 } else { 1.0 };
            sign * (0.5 + 1.7 * z).exp()
        })
        .collect();

    let logs: Vec<f64> = values.iter().filter(|v| **v != 0.0).map(|v| v.abs().ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let sd = (logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / logs.len() as f64).sqrt();
    let k_s = logs.iter().filter(|&&l| l > mean + sd).count();
    let k_0 = logs.iter().filter(|&&l| l > mean + 2.5 * sd).count().max(1);

    let s = 200;
    let sched = k_schedule(&CoefVector::new(values, map).unwrap(), s).unwrap();
    let expected: Vec<usize> =
        (0..s).map(|i| (k_0 as f64 + i as f64 / (s - 1) as f64 * (k_s - k_0) as f64).round() as usize).collect();
    let monotone = sched.windows(2).all(|w| w[0] <= w[1]);
    outcome(
        monotone && sched[0] == k_0 && sched[s - 1] == k_s && sched == expected,
        format!("K^0 = {} (oracle {k_0}), K^S = {} (oracle {k_s}), nondecreasing {monotone}", sched[0], sched[s - 1]),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("operator matrices match dense oracles", operator_oracles),
        ("adjoint dot-product identity", adjoint_dot_products),
        ("dictionary left inverse", left_inverse),
        ("constant cube is a PIHT fixed point", fixed_point),
        ("exact analysis-sparse recovery", exact_sparse_recovery),
        ("method ordering piht > interp3d > naive", method_ordering),
        ("random layout beats mosaic", layout_ordering),
        ("noise robustness monotonicity", noise_monotonicity),
        ("sweep determinism", sweep_determinism),
        ("threshold schedule contract", schedule_contract),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("{verdict} {:>2} {name} ({:.1}s): {}", i + 1, start.elapsed().as_secs_f64(), o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
