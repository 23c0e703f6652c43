//! Seeded robustness experiments for the minimum-divergence estimator.
//!
//! Replicate `i` draws from its own stream seeded with
//! `derive_seed(seed, i)`, so replicates can run in any order (or in
//! parallel) and the report is still assembled in replicate order.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{fit_min_t_divergence, mle_binomial, sample_model, BinomialModel, DiscreteModel};
use crate::error::{Error, Result};
use crate::rng::{self, derive_seed};

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct ContaminationConfig {
    pub model: BinomialModel,
    pub true_theta: f64,
    pub sample_size: usize,
    /// Outliers appended to each clean sample.
    pub outlier_count: usize,
    /// Outliers are drawn uniformly from these support values.
    pub outlier_values: Vec<i64>,
    pub replicates: usize,
    pub seed: u64,
}

impl ContaminationConfig {
    /// θ = 0.2, N = 100, n = 200, ten outliers from {91, …, 100}, 100 replicates.
    pub fn binomial_robustness(seed: u64) -> Self {
        Self {
            model: BinomialModel::new(100).expect("N = 100"),
            true_theta: 0.2,
            sample_size: 200,
            outlier_count: 10,
            outlier_values: (91..=100).collect(),
            replicates: 100,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.sample_size == 0 || self.replicates == 0 {
            return Err(Error::InvalidConfig("sample size and replicates must be positive".into()));
        }
        if self.outlier_count >= self.sample_size {
            return Err(Error::InvalidConfig(format!(
                "outlier count {} must be below the sample size {}",
                self.outlier_count, self.sample_size
            )));
        }
        if self.outlier_count > 0 && self.outlier_values.is_empty() {
            return Err(Error::InvalidConfig("no outlier values given".into()));
        }
        if let Some(&v) = self.outlier_values.iter().find(|&&v| self.model.index_of(v).is_none()) {
            return Err(Error::SampleOutsideSupport { value: v });
        }
        check_theta(&self.model, self.true_theta)
    }
}

fn check_theta(model: &BinomialModel, theta: f64) -> Result<()> {
    let b = model.bounds();
    if !(b.lower()[0]..=b.upper()[0]).contains(&theta) {
        return Err(Error::ParameterOutOfRange {
            name: "theta",
            value: theta,
            expected: "within the model bounds",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub seed: u64,
    pub theta_t: f64,
    pub theta_mle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub median_t: f64,
    pub median_mle: f64,
    pub mean_abs_error_t: f64,
    pub mean_abs_error_mle: f64,
    pub median_abs_error_t: f64,
    pub median_abs_error_mle: f64,
}

impl EstimatorSummary {
    fn from_rows(rows: &[ReplicateRow], truth: f64) -> Self {
        let t: Vec<f64> = rows.iter().map(|r| r.theta_t).collect();
        let m: Vec<f64> = rows.iter().map(|r| r.theta_mle).collect();
        let et: Vec<f64> = t.iter().map(|v| (v - truth).abs()).collect();
        let em: Vec<f64> = m.iter().map(|v| (v - truth).abs()).collect();
        Self {
            median_t: median(&t),
            median_mle: median(&m),
            mean_abs_error_t: mean(&et),
            mean_abs_error_mle: mean(&em),
            median_abs_error_t: median(&et),
            median_abs_error_mle: median(&em),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContaminationReport {
    pub generator: &'static str,
    pub rows: Vec<ReplicateRow>,
    pub summary: EstimatorSummary,
}

fn estimate_both(samples: &[i64], model: &BinomialModel) -> Result<(f64, f64)> {
    let fit = fit_min_t_divergence(samples, model)?;
    Ok((fit.theta_hat[0], mle_binomial(samples, model.trials())?))
}

/// Clean draws plus appended outliers, estimated by both estimators.
pub fn run_contamination_experiment(cfg: &ContaminationConfig) -> Result<ContaminationReport> {
    cfg.check()?;
    let rows = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let mut rng = rng::seeded(seed);
            let mut samples = sample_model(&cfg.model, &[cfg.true_theta], cfg.sample_size, &mut rng);
            for _ in 0..cfg.outlier_count {
                let j = rng.random_range(0..cfg.outlier_values.len());
                samples.push(cfg.outlier_values[j]);
            }
            let (theta_t, theta_mle) = estimate_both(&samples, &cfg.model)?;
            Ok(ReplicateRow {
                replicate: i,
                seed,
                theta_t,
                theta_mle,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = EstimatorSummary::from_rows(&rows, cfg.true_theta);
    Ok(ContaminationReport {
        generator: rng::GENERATOR,
        rows,
        summary,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakdownConfig {
    pub model: BinomialModel,
    pub true_theta: f64,
    pub eps_grid: Vec<f64>,
    pub outlier_value: i64,
    pub sample_size: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl BreakdownConfig {
    /// ε ∈ {0, 0.1, 0.2, 0.3, 0.4} with outliers at 100, N = 100, θ = 0.2,
    /// n = 200, 50 replicates per ε.
    pub fn default_sweep(seed: u64) -> Self {
        Self {
            model: BinomialModel::new(100).expect("N = 100"),
            true_theta: 0.2,
            eps_grid: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            outlier_value: 100,
            sample_size: 200,
            replicates: 50,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakdownRow {
    pub eps: f64,
    pub outliers: usize,
    pub median_t: f64,
    pub median_mle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakdownReport {
    pub generator: &'static str,
    pub rows: Vec<BreakdownRow>,
}

/// Replaces the last `⌊ε n⌋` draws by `outlier_value` for every ε. Replicate
/// `i` uses the same clean draws at every ε.
pub fn run_breakdown_sweep(cfg: &BreakdownConfig) -> Result<BreakdownReport> {
    if cfg.sample_size == 0 || cfg.replicates == 0 {
        return Err(Error::InvalidConfig("sample size and replicates must be positive".into()));
    }
    if let Some(&e) = cfg.eps_grid.iter().find(|e| !(0.0..0.5).contains(*e)) {
        return Err(Error::ParameterOutOfRange {
            name: "eps",
            value: e,
            expected: "0 <= eps < 0.5",
        });
    }
    if cfg.model.index_of(cfg.outlier_value).is_none() {
        return Err(Error::SampleOutsideSupport {
            value: cfg.outlier_value,
        });
    }
    check_theta(&cfg.model, cfg.true_theta)?;

    let clean: Vec<Vec<i64>> = (0..cfg.replicates)
        .map(|i| {
            let mut rng = rng::seeded(derive_seed(cfg.seed, i as u64));
            sample_model(&cfg.model, &[cfg.true_theta], cfg.sample_size, &mut rng)
        })
        .collect();
    let mut rows = Vec::with_capacity(cfg.eps_grid.len());
    for &eps in &cfg.eps_grid {
        let outliers = (eps * cfg.sample_size as f64).floor() as usize;
        let estimates = clean
            .par_iter()
            .map(|base| {
                let mut samples = base.clone();
                let n = samples.len();
                for s in &mut samples[n - outliers..] {
                    *s = cfg.outlier_value;
                }
                estimate_both(&samples, &cfg.model)
            })
            .collect::<Result<Vec<_>>>()?;
        let (t, m): (Vec<f64>, Vec<f64>) = estimates.into_iter().unzip();
        rows.push(BreakdownRow {
            eps,
            outliers,
            median_t: median(&t),
            median_mle: median(&m),
        });
    }
    Ok(BreakdownReport {
        generator: rng::GENERATOR,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyConfig {
    pub model: BinomialModel,
    pub true_theta: f64,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
}

impl ConsistencyConfig {
    /// n ∈ {50, 500, 5000}, 50 replicates, Binomial(100, 0.2).
    pub fn default_curve(seed: u64) -> Self {
        Self {
            model: BinomialModel::new(100).expect("N = 100"),
            true_theta: 0.2,
            sample_sizes: vec![50, 500, 5000],
            replicates: 50,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub sample_size: usize,
    pub median_abs_error_t: f64,
    pub median_abs_error_mle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub generator: &'static str,
    pub rows: Vec<ConsistencyRow>,
}

/// Median absolute error of both estimators on clean data, per sample size.
pub fn run_consistency_experiment(cfg: &ConsistencyConfig) -> Result<ConsistencyReport> {
    if cfg.replicates == 0 || cfg.sample_sizes.contains(&0) {
        return Err(Error::InvalidConfig("sample sizes and replicates must be positive".into()));
    }
    check_theta(&cfg.model, cfg.true_theta)?;
    let mut rows = Vec::new();
    for (k, &n) in cfg.sample_sizes.iter().enumerate() {
        let estimates = (0..cfg.replicates)
            .into_par_iter()
            .map(|i| {
                let stream = (k * cfg.replicates + i) as u64;
                let mut rng = rng::seeded(derive_seed(cfg.seed, stream));
                let samples = sample_model(&cfg.model, &[cfg.true_theta], n, &mut rng);
                estimate_both(&samples, &cfg.model)
            })
            .collect::<Result<Vec<_>>>()?;
        let (et, em): (Vec<f64>, Vec<f64>) = estimates
            .into_iter()
            .map(|(t, m)| ((t - cfg.true_theta).abs(), (m - cfg.true_theta).abs()))
            .unzip();
        rows.push(ConsistencyRow {
            sample_size: n,
            median_abs_error_t: median(&et),
            median_abs_error_mle: median(&em),
        });
    }
    Ok(ConsistencyReport {
        generator: rng::GENERATOR,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ContaminationConfig::binomial_robustness(1);
        cfg.outlier_count = 200;
        assert!(run_contamination_experiment(&cfg).is_err());
        let mut cfg = ContaminationConfig::binomial_robustness(1);
        cfg.outlier_values = vec![101];
        assert!(matches!(
            run_contamination_experiment(&cfg),
            Err(Error::SampleOutsideSupport { value: 101 })
        ));
        let mut sweep = BreakdownConfig::default_sweep(1);
        sweep.eps_grid = vec![0.5];
        assert!(run_breakdown_sweep(&sweep).is_err());
    }

    #[test]
    fn single_replicate_is_reproducible() {
        let mut cfg = ContaminationConfig::binomial_robustness(9);
        cfg.replicates = 1;
        let a = run_contamination_experiment(&cfg).unwrap();
        let b = run_contamination_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 1);
    }

    #[test]
    fn clean_data_medians_near_truth() {
        let mut cfg = ContaminationConfig::binomial_robustness(4);
        cfg.outlier_count = 0;
        let report = run_contamination_experiment(&cfg).unwrap();
        assert!((report.summary.median_t - 0.2).abs() < 0.01, "{:?}", report.summary);
        assert!((report.summary.median_mle - 0.2).abs() < 0.01, "{:?}", report.summary);
    }

    #[test]
    fn sweep_mle_monotone() {
        let mut cfg = BreakdownConfig::default_sweep(3);
        cfg.replicates = 10;
        let report = run_breakdown_sweep(&cfg).unwrap();
        for w in report.rows.windows(2) {
            assert!(w[1].median_mle >= w[0].median_mle);
        }
        assert!((report.rows[0].median_t - 0.2).abs() < 0.02);
        assert!((report.rows[0].median_mle - 0.2).abs() < 0.02);
    }
}
