//! Arctan divergence and minimum-divergence estimation over finite supports.
//!
//! `D(p ‖ q) = Σ p_i atan(p_i / q_i) − π/4` is the f-divergence generated by
//! `f(x) = x atan(x) − π/4`. It lies in `[0, π/4]`, so a handful of gross
//! outliers can shift it by at most their mass times `π/4`; the estimator
//! that minimizes it is correspondingly robust.

pub mod experiments;

use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use serde::Serialize;

use crate::diffevo::BoxBounds;
use crate::entropy::{sorted_sum, ProbabilityVector};
use crate::error::{Error, Result};

/// Points in the coarse grid that precedes golden-section refinement.
pub const GRID_POINTS: usize = 201;
/// Width at which golden-section refinement stops.
pub const REFINE_TOLERANCE: f64 = 1e-6;

/// Arctan divergence between two proper distributions on the same support.
///
/// Terms with `p_i = 0` vanish; terms with `p_i > 0 = q_i` contribute
/// `p_i · π/4` above the baseline (the `atan(∞) = π/2` limit).
pub fn t_divergence(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(divergence_unchecked(p.probs(), q.probs()))
}

/// Uses `atan(r) − π/4 = atan((r − 1)/(r + 1))` per term, which is exactly
/// zero when `p_i = q_i` and avoids dividing by `q_i`.
pub(crate) fn divergence_unchecked(p: &[f64], q: &[f64]) -> f64 {
    sorted_sum(
        p.iter()
            .zip(q)
            .filter(|(&pi, _)| pi > 0.0)
            .map(|(&pi, &qi)| pi * ((pi - qi) / (pi + qi)).atan()),
    )
}

/// A parametric family of distributions on a finite, ordered integer support.
pub trait DiscreteModel: Sync {
    fn support(&self) -> &[i64];

    /// Probabilities over [`support`](Self::support) at `theta`.
    fn pmf(&self, theta: &[f64]) -> Vec<f64>;

    fn bounds(&self) -> BoxBounds;

    fn index_of(&self, value: i64) -> Option<usize> {
        self.support().binary_search(&value).ok()
    }
}

/// `Binomial(N, θ)` with `θ ∈ [1e-6, 1 − 1e-6]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinomialModel {
    trials: u32,
    #[serde(skip)]
    support: Vec<i64>,
    #[serde(skip)]
    ln_choose: Vec<f64>,
}

impl BinomialModel {
    pub const THETA_MIN: f64 = 1e-6;
    pub const THETA_MAX: f64 = 1.0 - 1e-6;

    pub fn new(trials: u32) -> Result<Self> {
        if trials == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "N",
                value: 0.0,
                expected: "N >= 1",
            });
        }
        let mut ln_fact = Vec::with_capacity(trials as usize + 1);
        ln_fact.push(0.0f64);
        for i in 1..=trials as usize {
            ln_fact.push(ln_fact[i - 1] + (i as f64).ln());
        }
        let n = trials as usize;
        let ln_choose = (0..=n).map(|x| ln_fact[n] - ln_fact[x] - ln_fact[n - x]).collect();
        Ok(Self {
            trials,
            support: (0..=trials as i64).collect(),
            ln_choose,
        })
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }

    pub fn pmf_scalar(&self, theta: f64) -> Vec<f64> {
        let n = self.trials as f64;
        let (ln_t, ln_1mt) = (theta.ln(), (-theta).ln_1p());
        self.ln_choose
            .iter()
            .enumerate()
            .map(|(x, lc)| {
                let x = x as f64;
                (lc + x * ln_t + (n - x) * ln_1mt).exp()
            })
            .collect()
    }
}

impl DiscreteModel for BinomialModel {
    fn support(&self) -> &[i64] {
        &self.support
    }

    fn pmf(&self, theta: &[f64]) -> Vec<f64> {
        self.pmf_scalar(theta[0])
    }

    fn bounds(&self) -> BoxBounds {
        BoxBounds::new(vec![Self::THETA_MIN], vec![Self::THETA_MAX]).expect("valid bounds")
    }
}

/// Relative frequencies of `samples` over `support` (zeros allowed).
pub fn empirical_pmf(samples: &[i64], support: &[i64]) -> Result<ProbabilityVector> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut counts = vec![0u64; support.len()];
    for &s in samples {
        let idx = support
            .binary_search(&s)
            .map_err(|_| Error::SampleOutsideSupport { value: s })?;
        counts[idx] += 1;
    }
    let n = samples.len() as f64;
    ProbabilityVector::proper(counts.into_iter().map(|c| c as f64 / n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMethod {
    Grid,
    GoldenSection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationResult {
    pub theta_hat: Vec<f64>,
    pub divergence_at_min: f64,
    pub evaluations: usize,
    pub method: EstimationMethod,
}

/// Minimum-divergence estimate from raw samples.
pub fn fit_min_t_divergence(samples: &[i64], model: &dyn DiscreteModel) -> Result<EstimationResult> {
    let empirical = empirical_pmf(samples, model.support())?;
    fit_to_pmf(&empirical, model)
}

/// Minimizes `θ ↦ D(target ‖ p_θ)`: a 201-point grid over the parameter box,
/// then golden-section search on the bracket around the best grid point.
pub fn fit_to_pmf(target: &ProbabilityVector, model: &dyn DiscreteModel) -> Result<EstimationResult> {
    let bounds = model.bounds();
    if bounds.dimension() != 1 {
        return Err(Error::UnsupportedDimension(bounds.dimension()));
    }
    if target.len() != model.support().len() {
        return Err(Error::LengthMismatch {
            left: target.len(),
            right: model.support().len(),
        });
    }
    let (lo, hi) = (bounds.lower()[0], bounds.upper()[0]);
    let mut evaluations = 0usize;
    let mut objective = |theta: f64| {
        evaluations += 1;
        divergence_unchecked(target.probs(), &model.pmf(&[theta]))
    };

    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid_point = |i: usize| if i == GRID_POINTS - 1 { hi } else { lo + step * i as f64 };
    let mut best_i = 0;
    let mut best_value = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let v = objective(grid_point(i));
        if v < best_value {
            best_value = v;
            best_i = i;
        }
    }
    let grid_theta = grid_point(best_i);

    let mut a = grid_point(best_i.saturating_sub(1));
    let mut b = grid_point((best_i + 1).min(GRID_POINTS - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    while b - a > REFINE_TOLERANCE {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let refined = 0.5 * (a + b);
    let refined_value = objective(refined);

    let (theta, value, method) = if refined_value <= best_value {
        (refined, refined_value, EstimationMethod::GoldenSection)
    } else {
        (grid_theta, best_value, EstimationMethod::Grid)
    };
    Ok(EstimationResult {
        theta_hat: vec![theta],
        divergence_at_min: value,
        evaluations,
        method,
    })
}

/// Binomial maximum-likelihood estimate `Σ x / (n N)`.
pub fn mle_binomial(samples: &[i64], trials: u32) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut total: i128 = 0;
    for &s in samples {
        if s < 0 || s > trials as i64 {
            return Err(Error::SampleOutsideSupport { value: s });
        }
        total += s as i128;
    }
    Ok(total as f64 / (samples.len() as f64 * trials as f64))
}

/// Inverse-CDF draws from `model` at `theta`.
pub fn sample_model<R: Rng + ?Sized>(model: &dyn DiscreteModel, theta: &[f64], n: usize, rng: &mut R) -> Vec<i64> {
    let pmf = model.pmf(theta);
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for p in pmf {
        acc += p;
        cdf.push(acc);
    }
    let support = model.support();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c < u).min(support.len() - 1);
            support[idx]
        })
        .collect()
}

/// Upper bound of the divergence.
pub const DIVERGENCE_MAX: f64 = FRAC_PI_4;
