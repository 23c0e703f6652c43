//! Entropy-weighted k-means.
//!
//! Minimizes
//!
//! ```text
//! f(Θ, W) = Σ_i min_j Σ_l W_jl (x_il − θ_jl)² − λ Σ_j R(W_j·)
//! ```
//!
//! over centroids `Θ` and per-cluster feature weights `W` whose rows lie on
//! the probability simplex. `R` is the arctan regularizer
//! `Σ_l W_jl atan(1/W_jl)` (without the constant `−π/4` shift, which only
//! offsets `f` by `−λkπ/4`), the Shannon entropy, or absent (plain k-means
//! with fixed uniform weights).
//!
//! Fitting is block coordinate descent: assignment, centroid means, then an
//! exact per-cluster weight update. Each block minimizes `f` in its own
//! variables, so the objective never increases.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;
use crate::rng::{self, derive_seed};

/// Slack allowed on the per-step descent check.
pub const DESCENT_SLACK: f64 = 1e-8;

/// λ values scanned by experiment runs.
pub const DEFAULT_LAMBDA_GRID: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

/// Points (`n × p`) with optional ground-truth class ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let p = points.first().map_or(0, Vec::len);
        if points.is_empty() || p == 0 {
            return Err(Error::Empty);
        }
        for (row, pt) in points.iter().enumerate() {
            if pt.len() != p {
                return Err(Error::RaggedRows {
                    row,
                    expected: p,
                    found: pt.len(),
                });
            }
            if let Some(column) = pt.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonNumericCell {
                    row,
                    column,
                    cell: pt[column].to_string(),
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::LengthMismatch {
                    left: points.len(),
                    right: l.len(),
                });
            }
        }
        Ok(Self { points, labels })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn features(&self) -> usize {
        self.points[0].len()
    }

    /// Zero mean and unit (population) variance per feature; constant
    /// features are only centered.
    pub fn standardized(&self) -> Self {
        let n = self.len() as f64;
        let p = self.features();
        let mut points = self.points.clone();
        for l in 0..p {
            let mean = self.points.iter().map(|x| x[l]).sum::<f64>() / n;
            let var = self.points.iter().map(|x| (x[l] - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            for x in &mut points {
                x[l] = (x[l] - mean) / sd;
            }
        }
        Self {
            points,
            labels: self.labels.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularizer {
    /// Arctan regularizer with `c = 1`.
    #[serde(rename = "t")]
    TEntropy,
    Shannon,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfig {
    pub k: usize,
    pub lambda: f64,
    pub regularizer: Regularizer,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl FitConfig {
    pub fn new(k: usize, lambda: f64, regularizer: Regularizer) -> Self {
        Self {
            k,
            lambda,
            regularizer,
            restarts: 20,
            max_iterations: 100,
            tolerance: 1e-6,
            seed: 0,
        }
    }

    fn check(&self, data: &Dataset) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig(format!("k = {} < 2", self.k)));
        }
        if data.len() < self.k {
            return Err(Error::InvalidConfig(format!(
                "k = {} exceeds the number of points {}",
                self.k,
                data.len()
            )));
        }
        if self.regularizer != Regularizer::None && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda = {} must be > 0", self.lambda)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedClusteringState {
    pub centroids: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub objective: f64,
    pub iterations: usize,
    /// Objective after every block update (initial value first).
    pub trace: Vec<f64>,
}

impl WeightedClusteringState {
    /// Largest increase between consecutive trace entries (≤ 0 when monotone).
    pub fn max_ascent(&self) -> f64 {
        self.trace
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[inline]
fn weighted_distance(x: &[f64], centroid: &[f64], weights: &[f64]) -> f64 {
    x.iter()
        .zip(centroid)
        .zip(weights)
        .map(|((a, b), w)| w * (a - b) * (a - b))
        .sum()
}

/// Nearest cluster under each cluster's weighted squared distance; ties go
/// to the lowest cluster id.
pub fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>], weights: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|x| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, (c, w)) in centroids.iter().zip(weights).enumerate() {
                let d = weighted_distance(x, c, w);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Per-cluster coordinatewise means.
pub fn update_centroids(points: &[Vec<f64>], labels: &[usize], k: usize) -> Result<Vec<Vec<f64>>> {
    let p = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; p]; k];
    let mut counts = vec![0usize; k];
    for (x, &j) in points.iter().zip(labels) {
        counts[j] += 1;
        for (s, v) in sums[j].iter_mut().zip(x) {
            *s += v;
        }
    }
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster(j));
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        for v in s.iter_mut() {
            *v /= c as f64;
        }
    }
    Ok(sums)
}

/// `D_jl = Σ_{i in cluster j} (x_il − θ_jl)²`.
pub fn cluster_dispersions(points: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = centroids.first().map_or(0, Vec::len);
    let mut d = vec![vec![0.0; p]; centroids.len()];
    for (x, &j) in points.iter().zip(labels) {
        for l in 0..p {
            let diff = x[l] - centroids[j][l];
            d[j][l] += diff * diff;
        }
    }
    d
}

/// Closed-form Shannon weight row `softmax(−D/λ)`, shifted by `min D`.
pub fn update_weights_shannon(dispersions: &[f64], lambda: f64) -> Vec<f64> {
    let min = dispersions.iter().copied().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = dispersions.iter().map(|d| (-(d - min) / lambda).exp()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Marginal gain `g(w) = d/dw [w · r(w)]` of a concave regularizer term,
/// strictly decreasing on `(0, 1]`.
pub(crate) trait MarginalGain {
    fn gain(&self, w: f64) -> f64;
    fn gain_slope(&self, w: f64) -> f64;
    /// `lim_{w→0+} g(w)` (may be infinite).
    fn gain_at_zero(&self) -> f64;
}

/// `w · atan(1/w)`: `g(w) = atan(1/w) − w/(1+w²)`, `g'(w) = −2/(1+w²)²`.
pub(crate) struct ArctanGain;

impl MarginalGain for ArctanGain {
    fn gain(&self, w: f64) -> f64 {
        if w == 0.0 {
            FRAC_PI_2
        } else {
            (1.0 / w).atan() - w / (1.0 + w * w)
        }
    }

    fn gain_slope(&self, w: f64) -> f64 {
        let s = 1.0 + w * w;
        -2.0 / (s * s)
    }

    fn gain_at_zero(&self) -> f64 {
        FRAC_PI_2
    }
}

/// `−w ln w`: `g(w) = −ln w − 1`.
pub(crate) struct ShannonGain;

impl MarginalGain for ShannonGain {
    fn gain(&self, w: f64) -> f64 {
        -w.ln() - 1.0
    }

    fn gain_slope(&self, w: f64) -> f64 {
        -1.0 / w
    }

    fn gain_at_zero(&self) -> f64 {
        f64::INFINITY
    }
}

/// Solves `g(w) = y` on `[0, 1]` by bracketed Newton iteration (bisection
/// whenever a Newton step leaves the bracket) to width 1e-12.
fn invert_gain<G: MarginalGain>(g: &G, y: f64) -> f64 {
    if y >= g.gain_at_zero() {
        return 0.0;
    }
    if y <= g.gain(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut w = 0.5;
    for _ in 0..200 {
        let r = g.gain(w) - y;
        if r > 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        if r == 0.0 || hi - lo < 1e-12 {
            break;
        }
        let newton = w - r / g.gain_slope(w);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - w).abs() < 1e-15 {
            w = next;
            break;
        }
        w = next;
    }
    w
}

/// KKT solution of `min_w Σ w_l D_l − λ Σ w_l r(w_l)` on the simplex:
/// `w_l = g⁻¹((D_l + μ)/λ)`, with the multiplier `μ` found by bracketed
/// Newton iteration on `Σ_l w_l(μ) = 1`.
pub(crate) fn kkt_weights<G: MarginalGain>(g: &G, dispersions: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let p = dispersions.len();
    if p == 1 {
        return Ok(vec![1.0]);
    }
    let weights_at = |mu: f64| -> Vec<f64> {
        dispersions
            .iter()
            .map(|d| invert_gain(g, (d + mu) / lambda))
            .collect()
    };
    let (min_d, max_d) = dispersions
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
    // μ_lo puts every weight at 1; μ_hi makes the total fall to at most 1/p.
    let mut mu_lo = lambda * g.gain(1.0) - max_d;
    let target_small = g.gain(1.0 / p as f64);
    let mut mu_hi = lambda * target_small - min_d;
    let mean_d = dispersions.iter().sum::<f64>() / p as f64;
    let mut mu = (lambda * target_small - mean_d).clamp(mu_lo, mu_hi);

    let mut w = weights_at(mu);
    let mut total: f64 = w.iter().sum();
    for _ in 0..300 {
        let err = total - 1.0;
        if err.abs() <= 1e-12 {
            break;
        }
        if err > 0.0 {
            mu_lo = mu;
        } else {
            mu_hi = mu;
        }
        // dS/dμ = Σ_active 1 / (λ g'(w_l))
        let slope: f64 = w
            .iter()
            .filter(|&&wl| wl > 0.0 && wl < 1.0)
            .map(|&wl| 1.0 / (lambda * g.gain_slope(wl)))
            .sum();
        let newton = if slope < 0.0 { mu - err / slope } else { f64::NAN };
        let next = if newton > mu_lo && newton < mu_hi {
            newton
        } else {
            0.5 * (mu_lo + mu_hi)
        };
        if next == mu {
            break;
        }
        mu = next;
        w = weights_at(mu);
        total = w.iter().sum();
    }
    if !((total - 1.0).abs() <= 1e-10) {
        return Err(Error::NonConvergence(format!(
            "weight multiplier search ended with total {total} (lambda = {lambda})"
        )));
    }
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Arctan-regularized weight row for one cluster's dispersions.
pub fn update_weights_t(dispersions: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} must be > 0")));
    }
    kkt_weights(&ArctanGain, dispersions, lambda)
}

/// Shannon weight row through the generic KKT solver (cross-check of the
/// closed form).
pub fn update_weights_shannon_kkt(dispersions: &[f64], lambda: f64) -> Result<Vec<f64>> {
    kkt_weights(&ShannonGain, dispersions, lambda)
}

/// `Σ_l W_l atan(1/W_l)` (zero weights contribute 0).
pub fn arctan_regularizer(row: &[f64]) -> f64 {
    row.iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| w * (1.0 / w).atan())
        .sum()
}

fn shannon_regularizer(row: &[f64]) -> f64 {
    -row.iter().filter(|&&w| w > 0.0).map(|&w| w * w.ln()).sum::<f64>()
}

/// Objective with the given labels (equals the min-form objective when the
/// labels come from [`assign`]).
pub fn objective_with_labels(
    points: &[Vec<f64>],
    centroids: &[Vec<f64>],
    weights: &[Vec<f64>],
    labels: &[usize],
    regularizer: Regularizer,
    lambda: f64,
) -> f64 {
    let fit: f64 = points
        .iter()
        .zip(labels)
        .map(|(x, &j)| weighted_distance(x, &centroids[j], &weights[j]))
        .sum();
    let reg: f64 = match regularizer {
        Regularizer::TEntropy => weights.iter().map(|r| arctan_regularizer(r)).sum(),
        Regularizer::Shannon => weights.iter().map(|r| shannon_regularizer(r)).sum(),
        Regularizer::None => 0.0,
    };
    fit - lambda * reg
}

/// Objective of `state` under `cfg`.
pub fn objective(points: &[Vec<f64>], state: &WeightedClusteringState, cfg: &FitConfig) -> f64 {
    let lambda = if cfg.regularizer == Regularizer::None { 0.0 } else { cfg.lambda };
    objective_with_labels(
        points,
        &state.centroids,
        &state.weights,
        &state.labels,
        cfg.regularizer,
        lambda,
    )
}

fn kmeans_pp<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut nearest: Vec<f64> = points.iter().map(|x| sq(x, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, d) in nearest.iter().enumerate() {
                if u < *d {
                    chosen = i;
                    break;
                }
                u -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = points[idx].clone();
        for (d, x) in nearest.iter_mut().zip(points) {
            *d = d.min(sq(x, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Moves each empty cluster's centroid onto the point farthest (in its
/// current weighted distance) from its own centroid, taken from a cluster
/// with at least two members, and relabels that point.
fn reseed_empty(points: &[Vec<f64>], centroids: &mut [Vec<f64>], weights: &[Vec<f64>], labels: &mut [usize]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &j in labels.iter() {
            counts[j] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for (i, (x, &j)) in points.iter().zip(labels.iter()).enumerate() {
            if counts[j] < 2 {
                continue;
            }
            let d = weighted_distance(x, &centroids[j], &weights[j]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let i = far.expect("n >= k guarantees a cluster with two members");
        centroids[empty] = points[i].clone();
        labels[i] = empty;
    }
}

fn update_weights(
    points: &[Vec<f64>],
    labels: &[usize],
    centroids: &[Vec<f64>],
    weights: &mut [Vec<f64>],
    cfg: &FitConfig,
) -> Result<()> {
    if cfg.regularizer == Regularizer::None {
        return Ok(());
    }
    let d = cluster_dispersions(points, labels, centroids);
    for (row, dj) in weights.iter_mut().zip(&d) {
        *row = match cfg.regularizer {
            Regularizer::TEntropy => update_weights_t(dj, cfg.lambda)?,
            Regularizer::Shannon => update_weights_shannon(dj, cfg.lambda),
            Regularizer::None => unreachable!(),
        };
    }
    Ok(())
}

/// Runs one restart from a k-means++ seeding drawn with `seed`.
pub fn fit_single(data: &Dataset, cfg: &FitConfig, seed: u64) -> Result<WeightedClusteringState> {
    cfg.check(data)?;
    let points = data.points();
    let p = data.features();
    let lambda = if cfg.regularizer == Regularizer::None { 0.0 } else { cfg.lambda };
    let eval = |c: &[Vec<f64>], w: &[Vec<f64>], l: &[usize]| {
        objective_with_labels(points, c, w, l, cfg.regularizer, lambda)
    };

    let mut rng = rng::seeded(seed);
    let mut centroids = kmeans_pp(points, cfg.k, &mut rng);
    let mut weights = vec![vec![1.0 / p as f64; p]; cfg.k];
    let mut labels = assign(points, &centroids, &weights);
    let mut current = eval(&centroids, &weights, &labels);
    let mut trace = vec![current];
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        let start = current;

        reseed_empty(points, &mut centroids, &weights, &mut labels);
        centroids = update_centroids(points, &labels, cfg.k)?;
        trace.push(eval(&centroids, &weights, &labels));

        update_weights(points, &labels, &centroids, &mut weights, cfg)?;
        trace.push(eval(&centroids, &weights, &labels));

        labels = assign(points, &centroids, &weights);
        current = eval(&centroids, &weights, &labels);
        trace.push(current);

        debug_assert!(
            trace.windows(2).all(|w| w[1] <= w[0] + DESCENT_SLACK * w[0].abs().max(1.0)),
            "objective increased: {trace:?}"
        );
        if (start - current).abs() < cfg.tolerance {
            break;
        }
    }
    Ok(WeightedClusteringState {
        centroids,
        weights,
        labels,
        objective: current,
        iterations,
        trace,
    })
}

/// All restarts in restart order; restart `r` uses `derive_seed(cfg.seed, r)`.
pub fn fit_all_restarts(data: &Dataset, cfg: &FitConfig) -> Result<Vec<WeightedClusteringState>> {
    cfg.check(data)?;
    (0..cfg.restarts)
        .into_par_iter()
        .map(|r| fit_single(data, cfg, derive_seed(cfg.seed, r as u64)))
        .collect()
}

/// Lowest-objective restart (earliest restart on ties).
pub fn fit(data: &Dataset, cfg: &FitConfig) -> Result<WeightedClusteringState> {
    let runs = fit_all_restarts(data, cfg)?;
    Ok(lowest_objective(runs))
}

/// Lowest-objective run (earliest on ties).
pub fn lowest_objective(runs: Vec<WeightedClusteringState>) -> WeightedClusteringState {
    let mut best: Option<WeightedClusteringState> = None;
    for run in runs {
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}

/// Scores of one λ setting against ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaScore {
    pub lambda: f64,
    pub objective: f64,
    /// Scores of the lowest-objective restart.
    pub nmi: f64,
    pub ari: f64,
    pub mean_nmi: f64,
    pub mean_ari: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSweep {
    pub scores: Vec<LambdaScore>,
    /// Index into `scores` with the highest NMI (first on ties).
    pub best: usize,
    pub best_state: WeightedClusteringState,
}

/// Fits every λ in `grid` and scores each against the dataset's labels.
pub fn sweep_lambda(data: &Dataset, cfg: &FitConfig, grid: &[f64]) -> Result<LambdaSweep> {
    let truth = data
        .labels()
        .ok_or_else(|| Error::InvalidConfig("lambda sweep needs ground-truth labels".into()))?;
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty lambda grid".into()));
    }
    let mut scores = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let cfg = FitConfig { lambda, ..cfg.clone() };
        let runs = fit_all_restarts(data, &cfg)?;
        let mut nmis = Vec::with_capacity(runs.len());
        let mut aris = Vec::with_capacity(runs.len());
        for run in &runs {
            nmis.push(metrics::nmi(truth, &run.labels)?);
            aris.push(metrics::ari(truth, &run.labels)?);
        }
        let best = lowest_objective(runs);
        scores.push(LambdaScore {
            lambda,
            objective: best.objective,
            nmi: metrics::nmi(truth, &best.labels)?,
            ari: metrics::ari(truth, &best.labels)?,
            mean_nmi: nmis.iter().sum::<f64>() / nmis.len() as f64,
            mean_ari: aris.iter().sum::<f64>() / aris.len() as f64,
        });
        states.push(best);
    }
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.nmi > scores[best].nmi {
            best = i;
        }
    }
    Ok(LambdaSweep {
        best_state: states.swap_remove(best),
        scores,
        best,
    })
}
