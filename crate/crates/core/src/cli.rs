//! Command-line front end.
//!
//! Every subcommand writes one JSON report (stdout or `--out`). Exit codes:
//! 0 success, 2 invalid input or configuration, 3 infeasible request.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::diffevo::DEConfig;
use crate::divergence::experiments::{
    run_breakdown_sweep, run_consistency_experiment, run_contamination_experiment, BreakdownConfig,
    ConsistencyConfig, ContaminationConfig,
};
use crate::divergence::{fit_min_t_divergence, mle_binomial, BinomialModel};
use crate::entropy::axioms::{run_axiom_suite, AxiomSuiteConfig};
use crate::entropy::{entropy, EntropyMeasure, ProbabilityVector};
use crate::error::Error;
use crate::ewkm::{self, FitConfig, Regularizer, DEFAULT_LAMBDA_GRID};
use crate::io::delimited::LabelColumn;
use crate::io::{read_delimited, read_pgm, write_pgm, write_report, DelimitedOptions, PgmVariant, ReportDocument};
use crate::metrics;
use crate::thresholding::{self, SEGMENTATION_C};

#[derive(Debug, Parser)]
#[command(name = "tentropy", version, about = "Arctan entropy toolkit")]
pub struct Cli {
    /// Worker threads for restarts and replicates (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy of each row of a delimited file of probability vectors.
    Entropy(EntropyArgs),
    /// Multilevel thresholding of a PGM image.
    Segment(SegmentArgs),
    /// Minimum-divergence binomial estimate, or a named estimation experiment.
    Estimate(EstimateArgs),
    /// Entropy-weighted k-means on a delimited dataset.
    Cluster(ClusterArgs),
    /// Built-in reproducible experiments.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    T,
    Shannon,
    Renyi,
    Tsallis,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    #[arg(long, value_enum, default_value = "t")]
    pub measure: MeasureKind,
    /// Order of the arctan entropy (default 1, or 0.1 for `segment`).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
}

impl MeasureArgs {
    fn resolve(&self, default_c: f64) -> Result<EntropyMeasure, Error> {
        match self.measure {
            MeasureKind::T => EntropyMeasure::t(self.c.unwrap_or(default_c)),
            MeasureKind::Shannon => Ok(EntropyMeasure::Shannon),
            MeasureKind::Renyi => EntropyMeasure::renyi(self.alpha),
            MeasureKind::Tsallis => EntropyMeasure::tsallis(self.q),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    /// Delimited file, one probability vector per row (`-` for stdin).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMethod {
    De,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PgmFormat {
    P2,
    P5,
}

#[derive(Debug, Clone, Args)]
pub struct DeArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum DE generations.
    #[arg(long, default_value_t = 200)]
    pub generations: usize,
    /// Population size (default: max(10 · dimension, 20)).
    #[arg(long)]
    pub np: Option<usize>,
    /// Scale factor.
    #[arg(long, default_value_t = 0.8)]
    pub f: f64,
    /// Crossover rate.
    #[arg(long, default_value_t = 0.9)]
    pub cr: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// PGM image (P2 or P5).
    #[arg(long)]
    pub input: PathBuf,
    /// Number of segments (2..=64).
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "de")]
    pub method: SearchMethod,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub de: DeArgs,
    /// Where to write the segmented image.
    #[arg(long)]
    pub segmented: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "p5")]
    pub format: PgmFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    BinomialRobustness,
    BreakdownSweep,
    Consistency,
    AxiomSuite,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// Integer samples separated by commas or whitespace.
    #[arg(long, conflicts_with = "name", required_unless_present = "name")]
    pub input: Option<PathBuf>,
    /// Number of binomial trials N.
    #[arg(long = "binomial-N", default_value_t = 100)]
    pub binomial_n: u32,
    /// Run a named estimation experiment instead of fitting a file.
    #[arg(long, value_enum)]
    pub name: Option<ExperimentName>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegKind {
    T,
    Shannon,
    None,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// Delimited dataset.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "t")]
    pub reg: RegKind,
    /// Single λ (ignored when --lambda-grid is given).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// `default` or a comma-separated list; needs labels.
    #[arg(long = "lambda-grid")]
    pub lambda_grid: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long = "max-iterations", default_value_t = 100)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// First line is a header.
    #[arg(long)]
    pub header: bool,
    /// `last`, `none`, or a 1-based column number.
    #[arg(long = "label-column", default_value = "none")]
    pub label_column: String,
    /// Skip per-feature standardization.
    #[arg(long)]
    pub raw: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub name: ExperimentName,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fuzzed cases per property (axiom-suite only).
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A failed command: message plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InfeasibleK { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
            .map_err(|e| fail(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn delimiter_byte(c: char) -> Result<u8, Failure> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| fail(format!("delimiter {c:?} must be a single ASCII character")))
}

fn emit(doc: &ReportDocument, out: &OutputArgs) -> Result<(), Failure> {
    let bytes = write_report(doc);
    match &out.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| fail(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| fail(format!("stdout: {e}")))
        }
    }
}

fn cmd_entropy(args: &EntropyArgs) -> Result<ReportDocument, Failure> {
    let measure = args.measure.resolve(1.0)?;
    let delimiter = delimiter_byte(args.delimiter)?;
    let bytes = read_input(&args.input)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| fail("input is not UTF-8"))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = i + 1;
        let values = line
            .split(delimiter as char)
            .enumerate()
            .map(|(col, cell)| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Failure::from(Error::NonNumericCell {
                        row,
                        column: col + 1,
                        cell: cell.trim().to_string(),
                    })
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let p = ProbabilityVector::proper(values).map_err(|e| fail(format!("row {row}: {e}")))?;
        let h = entropy(&p, &measure).map_err(|e| fail(format!("row {row}: {e}")))?;
        rows.push(json!({ "row": row, "entropy": h }));
    }
    if rows.is_empty() {
        return Err(fail("input holds no probability vectors"));
    }
    let config = json!({ "input": args.input, "measure": measure, "delimiter": args.delimiter.to_string() });
    Ok(ReportDocument::new("entropy", config, json!({ "rows": rows }))?.with_input("input", &bytes))
}

fn de_config(args: &DeArgs) -> DEConfig {
    DEConfig {
        population_size: args.np,
        scale_factor: args.f,
        crossover_rate: args.cr,
        max_generations: args.generations,
        seed: args.seed,
        ..DEConfig::default()
    }
}

fn cmd_segment(args: &SegmentArgs) -> Result<ReportDocument, Failure> {
    if !(2..=64).contains(&args.k) {
        return Err(fail(format!("--k {} outside 2..=64", args.k)));
    }
    let measure = args.measure.resolve(SEGMENTATION_C)?;
    let de = de_config(&args.de);
    let bytes = read_input(&args.input)?;
    let img = read_pgm(&bytes)?;
    let hist = thresholding::histogram(&img);
    if args.k > hist.occupied_levels() {
        return Err(Error::InfeasibleK {
            k: args.k,
            occupied: hist.occupied_levels(),
        }
        .into());
    }
    let set = match args.method {
        SearchMethod::De => thresholding::optimize_thresholds(&hist, args.k, &measure, &de)?,
        SearchMethod::Exhaustive => thresholding::exhaustive_thresholds(&hist, args.k, &measure)?,
    };
    let reps = thresholding::representative_levels(&hist, &set);
    if let Some(path) = &args.segmented {
        let seg = thresholding::apply_thresholds(&img, &set)?;
        let variant = match args.format {
            PgmFormat::P2 => PgmVariant::P2,
            PgmFormat::P5 => PgmVariant::P5,
        };
        std::fs::write(path, write_pgm(&seg, variant)?).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    }
    let config = json!({
        "input": args.input,
        "k": args.k,
        "method": args.method,
        "measure": measure,
        "de": de,
    });
    let results = json!({
        "width": img.width(),
        "height": img.height(),
        "levels": img.levels(),
        "thresholds": set.thresholds(),
        "objective": set.objective,
        "representative_levels": reps,
    });
    Ok(ReportDocument::new("segment", config, results)?.with_input("input", &bytes))
}

fn parse_samples(bytes: &[u8]) -> Result<Vec<i64>, Failure> {
    let text = std::str::from_utf8(bytes).map_err(|_| fail("sample file is not UTF-8"))?;
    let samples = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<i64>()
                .map_err(|_| fail(format!("sample {}: cannot parse {s:?} as an integer", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if samples.is_empty() {
        return Err(Error::Empty.into());
    }
    Ok(samples)
}

fn run_named(name: ExperimentName, seed: u64, cases: usize) -> Result<ReportDocument, Failure> {
    let doc = match name {
        ExperimentName::BinomialRobustness => {
            let cfg = ContaminationConfig::binomial_robustness(seed);
            let report = run_contamination_experiment(&cfg)?;
            ReportDocument::new("binomial-robustness", &cfg, &report)?
        }
        ExperimentName::BreakdownSweep => {
            let cfg = BreakdownConfig::default_sweep(seed);
            let report = run_breakdown_sweep(&cfg)?;
            ReportDocument::new("breakdown-sweep", &cfg, &report)?
        }
        ExperimentName::Consistency => {
            let cfg = ConsistencyConfig::default_curve(seed);
            let report = run_consistency_experiment(&cfg)?;
            ReportDocument::new("consistency", &cfg, &report)?
        }
        ExperimentName::AxiomSuite => {
            if cases == 0 {
                return Err(fail("--cases must be positive"));
            }
            let cfg = AxiomSuiteConfig {
                cases,
                seed,
                ..AxiomSuiteConfig::default()
            };
            let checks = run_axiom_suite(&cfg);
            let passed = checks.iter().all(|c| c.passed);
            ReportDocument::new("axiom-suite", &cfg, json!({ "passed": passed, "checks": checks }))?
        }
    };
    Ok(doc)
}

fn cmd_estimate(args: &EstimateArgs) -> Result<ReportDocument, Failure> {
    if let Some(name) = args.name {
        if name == ExperimentName::AxiomSuite {
            return Err(fail("axiom-suite is not an estimation experiment; use `experiment`"));
        }
        return run_named(name, args.seed, 0);
    }
    let path = args.input.as_ref().ok_or_else(|| fail("--input or --name is required"))?;
    let bytes = read_input(path)?;
    let samples = parse_samples(&bytes)?;
    let model = BinomialModel::new(args.binomial_n)?;
    let estimate = fit_min_t_divergence(&samples, &model)?;
    let mle = mle_binomial(&samples, args.binomial_n)?;
    let config = json!({ "input": path, "model": { "family": "binomial", "trials": args.binomial_n } });
    let results = json!({ "n": samples.len(), "estimate": estimate, "theta_mle": mle });
    Ok(ReportDocument::new("estimate", config, results)?.with_input("input", &bytes))
}

fn parse_label_column(s: &str) -> Result<LabelColumn, Failure> {
    match s {
        "none" => Ok(LabelColumn::None),
        "last" => Ok(LabelColumn::Last),
        n => match n.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(LabelColumn::Index(i - 1)),
            _ => Err(fail(format!("--label-column {n:?}: expected last, none or a 1-based index"))),
        },
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    if s == "default" {
        return Ok(DEFAULT_LAMBDA_GRID.to_vec());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|l| *l > 0.0 && l.is_finite())
                .ok_or_else(|| fail(format!("--lambda-grid entry {v:?} is not a positive number")))
        })
        .collect()
}

fn cmd_cluster(args: &ClusterArgs) -> Result<ReportDocument, Failure> {
    let opts = DelimitedOptions {
        delimiter: delimiter_byte(args.delimiter)?,
        has_header: args.header,
        label_column: parse_label_column(&args.label_column)?,
    };
    let regularizer = match args.reg {
        RegKind::T => Regularizer::TEntropy,
        RegKind::Shannon => Regularizer::Shannon,
        RegKind::None => Regularizer::None,
    };
    let grid = args.lambda_grid.as_deref().map(parse_grid).transpose()?;
    let bytes = read_input(&args.input)?;
    let raw = read_delimited(&bytes, &opts)?;
    let data = if args.raw { raw } else { raw.standardized() };
    let cfg = FitConfig {
        restarts: args.restarts,
        max_iterations: args.max_iterations,
        seed: args.seed,
        ..FitConfig::new(args.k, args.lambda, regularizer)
    };

    let results = match (&grid, data.labels()) {
        (Some(_), None) => return Err(fail("--lambda-grid needs a label column to select λ")),
        (Some(grid), Some(_)) => {
            let sweep = ewkm::sweep_lambda(&data, &cfg, grid)?;
            let best = &sweep.scores[sweep.best];
            json!({
                "lambda": best.lambda,
                "nmi": best.nmi,
                "ari": best.ari,
                "mean_nmi": best.mean_nmi,
                "mean_ari": best.mean_ari,
                "grid": sweep.scores,
                "state": state_json(&sweep.best_state),
            })
        }
        (None, labels) => {
            let runs = ewkm::fit_all_restarts(&data, &cfg)?;
            let mut out = serde_json::Map::new();
            if let Some(truth) = labels {
                let (mut nmi_sum, mut ari_sum) = (0.0, 0.0);
                for run in &runs {
                    nmi_sum += metrics::nmi(truth, &run.labels)?;
                    ari_sum += metrics::ari(truth, &run.labels)?;
                }
                out.insert("mean_nmi".into(), json!(nmi_sum / runs.len() as f64));
                out.insert("mean_ari".into(), json!(ari_sum / runs.len() as f64));
            }
            let best = ewkm::lowest_objective(runs);
            if let Some(truth) = labels {
                out.insert("nmi".into(), json!(metrics::nmi(truth, &best.labels)?));
                out.insert("ari".into(), json!(metrics::ari(truth, &best.labels)?));
            }
            out.insert("lambda".into(), json!(cfg.lambda));
            out.insert("state".into(), state_json(&best));
            serde_json::Value::Object(out)
        }
    };
    let config = json!({
        "input": args.input,
        "fit": cfg,
        "lambda_grid": grid,
        "standardized": !args.raw,
        "header": args.header,
        "label_column": args.label_column,
        "delimiter": args.delimiter.to_string(),
    });
    Ok(ReportDocument::new("cluster", config, results)?.with_input("input", &bytes))
}

fn state_json(s: &ewkm::WeightedClusteringState) -> serde_json::Value {
    json!({
        "objective": s.objective,
        "iterations": s.iterations,
        "labels": s.labels,
        "centroids": s.centroids,
        "weights": s.weights,
    })
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let (doc, out) = match &cli.command {
        Command::Entropy(a) => (cmd_entropy(a)?, &a.output),
        Command::Segment(a) => (cmd_segment(a)?, &a.output),
        Command::Estimate(a) => (cmd_estimate(a)?, &a.output),
        Command::Cluster(a) => (cmd_cluster(a)?, &a.output),
        Command::Experiment(a) => (run_named(a.name, a.seed, a.cases)?, &a.output),
    };
    emit(&doc, out)
}

/// Parses `args` and runs the command.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(fail("--threads must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(fail(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

pub fn run() -> ExitCode {
    run_from(std::env::args_os())
}
