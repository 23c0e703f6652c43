//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;

use tentropy::diffevo::DEConfig;
use tentropy::divergence::experiments::{
    run_breakdown_sweep, run_consistency_experiment, run_contamination_experiment, BreakdownConfig,
    ConsistencyConfig, ContaminationConfig,
};
use tentropy::entropy::axioms::{run_axiom_suite, AxiomSuiteConfig};
use tentropy::entropy::t_entropy;
use tentropy::ewkm::{self, Dataset, FitConfig, Regularizer, DEFAULT_LAMBDA_GRID};
use tentropy::io::delimited::LabelColumn;
use tentropy::io::{read_delimited, DelimitedOptions};
use tentropy::metrics;
use tentropy::rng::{derive_seed, seeded};
use tentropy::thresholding::{self, Histogram};
use tentropy::{EntropyMeasure, ProbabilityVector};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed.as_secs_f64() < limit_secs as f64
}

fn manifest_path(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn axiom_suite() -> Outcome {
    let start = Instant::now();
    let checks = run_axiom_suite(&AxiomSuiteConfig::default());
    let elapsed = start.elapsed();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} (slack {:e})", c.name, c.worst_slack))
        .collect();
    outcome(
        failed.is_empty() && within(elapsed, 30),
        format!(
            "{} properties x 1000 cases x c in {{0.1,1,10,50}}, failed: {:?}, {:.1}s",
            checks.len(),
            failed,
            elapsed.as_secs_f64()
        ),
    )
}

fn uniform_closed_form() -> Outcome {
    let mut ns: Vec<usize> = (1..=200).collect();
    ns.extend((201..10_000).step_by(97));
    ns.push(10_000);
    let mut worst: f64 = 0.0;
    for &c in &[0.1, 1.0, 10.0, 50.0] {
        for &n in &ns {
            let h = t_entropy(&ProbabilityVector::uniform(n), c).unwrap();
            let expected = (n as f64).powf(c).atan() - FRAC_PI_4;
            worst = worst.max((h - expected).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{} sizes up to 10^4, max |error| = {worst:e}", ns.len()),
    )
}

fn contamination() -> Outcome {
    let start = Instant::now();
    let cfg = ContaminationConfig::binomial_robustness(7);
    let report = run_contamination_experiment(&cfg).unwrap();
    let s = &report.summary;
    let passed = (0.18..=0.22).contains(&s.median_t)
        && s.median_mle >= 0.22
        && s.median_abs_error_t < 0.25 * s.median_abs_error_mle
        && within(start.elapsed(), 60);
    outcome(
        passed,
        format!(
            "median t = {:.4}, median mle = {:.4}, median |err| t = {:.4} vs mle = {:.4}, {:.1}s",
            s.median_t,
            s.median_mle,
            s.median_abs_error_t,
            s.median_abs_error_mle,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn breakdown() -> Outcome {
    let start = Instant::now();
    let cfg = BreakdownConfig::default_sweep(11);
    let report = run_breakdown_sweep(&cfg).unwrap();
    let mut passed = within(start.elapsed(), 90);
    let mut parts = Vec::new();
    for row in &report.rows {
        if row.eps >= 0.1 - 1e-12 {
            passed &= row.median_t < 0.35;
        }
        if (row.eps - 0.4).abs() < 1e-12 {
            passed &= row.median_mle > 0.5;
        }
        parts.push(format!("eps {:.1}: t {:.3} mle {:.3}", row.eps, row.median_t, row.median_mle));
    }
    passed &= report.rows.iter().any(|r| (r.eps - 0.4).abs() < 1e-12);
    outcome(passed, format!("{}, {:.1}s", parts.join("; "), start.elapsed().as_secs_f64()))
}

fn consistency() -> Outcome {
    let cfg = ConsistencyConfig::default_curve(5);
    let report = run_consistency_experiment(&cfg).unwrap();
    let errs: Vec<f64> = report.rows.iter().map(|r| r.median_abs_error_t).collect();
    let passed = errs.len() == 3 && errs.windows(2).all(|w| w[1] <= w[0]);
    outcome(passed, format!("median |err| over n = 50, 500, 5000: {errs:?}"))
}

fn threshold_oracle() -> Outcome {
    let start = Instant::now();
    let measures = [
        EntropyMeasure::t(0.1).unwrap(),
        EntropyMeasure::t(1.0).unwrap(),
        EntropyMeasure::Shannon,
        EntropyMeasure::renyi(2.0).unwrap(),
        EntropyMeasure::tsallis(2.0).unwrap(),
    ];
    let mut rng = seeded(2024);
    let mut total = 0usize;
    let mut exact = 0usize;
    let mut worst_rel: f64 = 0.0;
    let mut case = 0u64;
    let mut histograms = 0;
    while histograms < 50 {
        let levels = rng.random_range(8..=64usize);
        let counts: Vec<u64> = (0..levels)
            .map(|_| if rng.random_bool(0.3) { 0 } else { rng.random_range(1..500) })
            .collect();
        let k = rng.random_range(2..=3usize);
        let Ok(h) = Histogram::from_counts(counts) else { continue };
        if h.occupied_levels() < k {
            continue;
        }
        histograms += 1;
        for m in &measures {
            case += 1;
            let de = DEConfig::with_seed(derive_seed(99, case));
            let got = thresholding::optimize_thresholds(&h, k, m, &de).unwrap();
            let best = thresholding::exhaustive_thresholds(&h, k, m).unwrap();
            let rel = (best.objective - got.objective) / best.objective.abs().max(1e-300);
            total += 1;
            if rel <= 1e-12 {
                exact += 1;
            }
            worst_rel = worst_rel.max(rel);
        }
    }
    let rate = exact as f64 / total as f64;
    outcome(
        rate >= 0.9 && worst_rel <= 1e-3 && within(start.elapsed(), 120),
        format!(
            "{exact}/{total} exact ({:.1}%), worst relative gap {worst_rel:e}, {:.1}s",
            100.0 * rate,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn synthetic_segmentation() -> Outcome {
    let (img, truth) = thresholding::bimodal_fixture(3);
    let h = thresholding::histogram(&img);
    let m = EntropyMeasure::t(0.1).unwrap();
    let set = thresholding::optimize_thresholds(&h, 2, &m, &DEConfig::with_seed(3)).unwrap();
    let seg = thresholding::segment_labels(&img, &set);
    let pri = metrics::pri(&seg, &[truth.clone()]).unwrap();
    let gce = metrics::gce(&seg, &truth).unwrap();
    let voi = metrics::voi(&seg, &truth).unwrap();
    let t = set.thresholds()[0];
    outcome(
        (16..=47).contains(&t) && pri == 1.0 && gce == 0.0 && voi == 0.0,
        format!("threshold {t}, PRI {pri}, GCE {gce}, VoI {voi}"),
    )
}

fn monotone_descent() -> Outcome {
    let mut rng = seeded(808);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut runs = 0;
    for d in 0..100u64 {
        let n = rng.random_range(10..80usize);
        let p = rng.random_range(1..7usize);
        let centers = rng.random_range(1..5usize);
        let spread = rng.random_range(0.1..5.0);
        let offsets: Vec<Vec<f64>> = (0..centers)
            .map(|_| (0..p).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                offsets[i % centers]
                    .iter()
                    .map(|o| o + spread * rng.random_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let data = Dataset::new(points, None).unwrap();
        let k = rng.random_range(2..5usize);
        let lambda = 10f64.powf(rng.random_range(-1.5..1.5));
        for reg in [Regularizer::TEntropy, Regularizer::Shannon] {
            let cfg = FitConfig {
                restarts: 2,
                seed: d,
                ..FitConfig::new(k, lambda, reg)
            };
            for state in ewkm::fit_all_restarts(&data, &cfg).unwrap() {
                worst = worst.max(state.max_ascent());
                runs += 1;
            }
        }
    }
    outcome(
        worst <= 1e-8,
        format!("{runs} runs on 100 datasets, largest step increase {worst:e}"),
    )
}

fn grid_argmin(d: &[f64], lambda: f64) -> Vec<f64> {
    let f = |w: &[f64]| -> f64 {
        w.iter()
            .zip(d)
            .map(|(&wl, &dl)| wl * dl - if wl > 0.0 { lambda * wl * (1.0 / wl).atan() } else { 0.0 })
            .sum()
    };
    let steps = 1000usize;
    let mut best = (f64::INFINITY, vec![]);
    match d.len() {
        1 => return vec![1.0],
        2 => {
            for i in 0..=steps {
                let w1 = i as f64 / steps as f64;
                let w = [w1, 1.0 - w1];
                let v = f(&w);
                if v < best.0 {
                    best = (v, w.to_vec());
                }
            }
        }
        3 => {
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let w = [i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64];
                    let v = f(&w);
                    if v < best.0 {
                        best = (v, w.to_vec());
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    best.1
}

fn weight_solver_oracle() -> Outcome {
    let mut rng = seeded(4242);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = rng.random_range(2..=3usize);
        let d: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..5.0)).collect();
        let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
        let w = ewkm::update_weights_t(&d, lambda).unwrap();
        let g = grid_argmin(&d, lambda);
        let gap = w.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(gap);
    }
    outcome(worst <= 1e-3, format!("100 instances, max weight difference {worst:e}"))
}

fn iris() -> Outcome {
    let start = Instant::now();
    let bytes = std::fs::read(manifest_path("data/iris.csv")).unwrap();
    let opts = DelimitedOptions {
        has_header: true,
        label_column: LabelColumn::Last,
        ..Default::default()
    };
    let data = read_delimited(&bytes, &opts).unwrap().standardized();
    let cfg = FitConfig {
        seed: 1,
        ..FitConfig::new(3, 1.0, Regularizer::TEntropy)
    };
    let sweep = ewkm::sweep_lambda(&data, &cfg, &DEFAULT_LAMBDA_GRID).unwrap();
    let best = &sweep.scores[sweep.best];
    outcome(
        best.nmi >= 0.70 && best.ari >= 0.65 && within(start.elapsed(), 30),
        format!(
            "lambda {} NMI {:.4} ARI {:.4} (mean over restarts NMI {:.4} ARI {:.4}), {:.1}s",
            best.lambda,
            best.nmi,
            best.ari,
            best.mean_nmi,
            best.mean_ari,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn run_cli(args: &[&str], out: &Path) -> (bool, Vec<u8>) {
    let mut full = vec!["tentropy"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = tentropy::cli::run_from(full);
    let ok = code == std::process::ExitCode::SUCCESS;
    (ok, std::fs::read(out).unwrap_or_default())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (img, _) = thresholding::bimodal_fixture(5);
    let pgm = dir.path().join("fixture.pgm");
    std::fs::write(&pgm, tentropy::io::write_pgm(&img, tentropy::io::PgmVariant::P5).unwrap()).unwrap();
    let iris = manifest_path("data/iris.csv");
    let pgm_s = pgm.to_str().unwrap();
    let iris_s = iris.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["experiment", "--name", "binomial-robustness", "--seed", "7"],
        vec!["experiment", "--name", "breakdown-sweep", "--seed", "7"],
        vec!["experiment", "--name", "consistency", "--seed", "7"],
        vec!["experiment", "--name", "axiom-suite", "--seed", "7", "--cases", "50"],
        vec!["segment", "--input", pgm_s, "--k", "3", "--seed", "7"],
        vec![
            "cluster", "--input", iris_s, "--k", "3", "--header", "--label-column", "last", "--lambda-grid", "default",
            "--restarts", "5", "--seed", "7",
        ],
    ];
    let mut identical = 0;
    for (i, cmd) in commands.iter().enumerate() {
        let a = dir.path().join(format!("a{i}.json"));
        let b = dir.path().join(format!("b{i}.json"));
        let (ok_a, bytes_a) = run_cli(cmd, &a);
        let mut single = cmd.clone();
        single.extend_from_slice(&["--threads", "1"]);
        let (ok_b, bytes_b) = run_cli(&single, &b);
        if ok_a && ok_b && !bytes_a.is_empty() && bytes_a == bytes_b {
            identical += 1;
        }
    }
    outcome(
        identical == commands.len(),
        format!("{identical}/{} commands byte-identical across runs and thread counts", commands.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("axiom suite", axiom_suite),
        ("uniform closed form", uniform_closed_form),
        ("contaminated binomial", contamination),
        ("breakdown sweep", breakdown),
        ("consistency", consistency),
        ("thresholding oracle equivalence", threshold_oracle),
        ("synthetic segmentation", synthetic_segmentation),
        ("clustering monotone descent", monotone_descent),
        ("weight solver oracle", weight_solver_oracle),
        ("iris benchmark", iris),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        let status = if result.passed { "PASS" } else { "FAIL" };
        if !result.passed {
            failures += 1;
        }
        println!("criterion {:>2} {status} {name}: {}", i + 1, result.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
