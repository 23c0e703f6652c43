//! Seeded differential evolution (rand/1/bin) over a box.
//!
//! Trial vectors for a whole generation are generated from one random stream
//! before any of them is evaluated, so evaluating in parallel leaves the
//! trajectory identical to the sequential run.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DEConfig {
    /// `None` selects `max(10 · dimension, 20)`.
    pub population_size: Option<usize>,
    pub scale_factor: f64,
    pub crossover_rate: f64,
    pub max_generations: usize,
    /// Stop once the best value moved less than this over the last
    /// [`DEConfig::stagnation_window`] generations.
    pub target_tolerance: Option<f64>,
    pub stagnation_window: usize,
    pub seed: u64,
    /// Evaluate each generation's trial vectors on the rayon pool.
    pub parallel: bool,
}

impl Default for DEConfig {
    fn default() -> Self {
        Self {
            population_size: None,
            scale_factor: 0.8,
            crossover_rate: 0.9,
            max_generations: 200,
            target_tolerance: None,
            stagnation_window: 30,
            seed: 0,
            parallel: false,
        }
    }
}

impl DEConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn population_for(&self, dimension: usize) -> usize {
        self.population_size
            .unwrap_or_else(|| (10 * dimension).max(20))
    }

    fn check(&self, dimension: usize) -> Result<()> {
        let np = self.population_for(dimension);
        if np < 4 {
            return Err(Error::InvalidConfig(format!(
                "population size {np} < 4 (rand/1 needs three distinct partners)"
            )));
        }
        if !(self.scale_factor > 0.0 && self.scale_factor <= 2.0) {
            return Err(Error::InvalidConfig(format!(
                "scale factor {} not in (0, 2]",
                self.scale_factor
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::InvalidConfig(format!(
                "crossover rate {} not in [0, 1]",
                self.crossover_rate
            )));
        }
        if let Some(tol) = self.target_tolerance {
            if !(tol >= 0.0) || self.stagnation_window == 0 {
                return Err(Error::InvalidConfig(
                    "stagnation tolerance must be >= 0 with a positive window".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Componentwise bounds with `lower < upper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidConfig(format!(
                "bounds need equal non-zero lengths, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "bound {i}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval repeated `dimension` times.
    pub fn cube(lower: f64, upper: f64, dimension: usize) -> Result<Self> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DEResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    /// Best value after initialization (index 0) and after each generation.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// Folds `v` back into `[lo, hi]` by mirror reflection at the faces.
fn reflect(v: f64, lo: f64, hi: f64) -> f64 {
    if (lo..=hi).contains(&v) {
        return v;
    }
    let width = hi - lo;
    let period = 2.0 * width;
    let mut offset = (v - lo).rem_euclid(period);
    if offset > width {
        offset = period - offset;
    }
    (lo + offset).clamp(lo, hi)
}

/// Runs rand/1/bin differential evolution.
///
/// NaN objective values rank worst. Ties in selection favour the trial so
/// the population can drift across plateaus.
pub fn de_optimize<F>(objective: F, bounds: &BoxBounds, cfg: &DEConfig, sense: Sense) -> Result<DEResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = bounds.dimension();
    cfg.check(d)?;
    let np = cfg.population_for(d);
    let mut rng = rng::seeded(cfg.seed);

    // Internally minimize `score`.
    let score = |x: &[f64]| -> f64 {
        let v = objective(x);
        let s = match sense {
            Sense::Minimize => v,
            Sense::Maximize => -v,
        };
        if s.is_nan() {
            f64::INFINITY
        } else {
            s
        }
    };
    let evaluate = |batch: &[Vec<f64>]| -> Vec<f64> {
        if cfg.parallel {
            batch.par_iter().map(|x| score(x)).collect()
        } else {
            batch.iter().map(|x| score(x)).collect()
        }
    };

    let mut population: Vec<Vec<f64>> = (0..np)
        .map(|_| {
            (0..d)
                .map(|j| rng.random_range(bounds.lower[j]..bounds.upper[j]))
                .collect()
        })
        .collect();
    let mut scores = evaluate(&population);
    let mut evaluations = np;

    let best_index = |scores: &[f64]| -> usize {
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s < scores[best] {
                best = i;
            }
        }
        best
    };
    let to_value = |s: f64| match sense {
        Sense::Minimize => s,
        Sense::Maximize => -s,
    };

    let mut history = vec![to_value(scores[best_index(&scores)])];

    for _generation in 0..cfg.max_generations {
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|target| {
                let mut pick = || loop {
                    let r = rng.random_range(0..np);
                    if r != target {
                        break r;
                    }
                };
                let r1 = pick();
                let r2 = loop {
                    let r = pick();
                    if r != r1 {
                        break r;
                    }
                };
                let r3 = loop {
                    let r = pick();
                    if r != r1 && r != r2 {
                        break r;
                    }
                };
                let forced = rng.random_range(0..d);
                (0..d)
                    .map(|j| {
                        let cross = rng.random::<f64>() < cfg.crossover_rate || j == forced;
                        if cross {
                            let v = population[r1][j]
                                + cfg.scale_factor * (population[r2][j] - population[r3][j]);
                            reflect(v, bounds.lower[j], bounds.upper[j])
                        } else {
                            population[target][j]
                        }
                    })
                    .collect()
            })
            .collect();
        let trial_scores = evaluate(&trials);
        evaluations += np;
        for (i, (trial, s)) in trials.into_iter().zip(trial_scores).enumerate() {
            if s <= scores[i] {
                population[i] = trial;
                scores[i] = s;
            }
        }
        history.push(to_value(scores[best_index(&scores)]));

        if let Some(tol) = cfg.target_tolerance {
            let w = cfg.stagnation_window;
            if history.len() > w {
                let now = history[history.len() - 1];
                let then = history[history.len() - 1 - w];
                if (now - then).abs() <= tol {
                    break;
                }
            }
        }
    }

    let best = best_index(&scores);
    Ok(DEResult {
        best_x: population[best].clone(),
        best_value: to_value(scores[best]),
        history,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    #[test]
    fn sphere_minimum() {
        let bounds = BoxBounds::cube(-5.0, 5.0, 3).unwrap();
        let res = de_optimize(
            |x: &[f64]| x.iter().map(|v| v * v).sum(),
            &bounds,
            &DEConfig::with_seed(1),
            Sense::Minimize,
        )
        .unwrap();
        assert!(res.best_value < 1e-6, "{}", res.best_value);
    }

    #[test]
    fn quadratic_maximum() {
        let bounds = BoxBounds::cube(0.0, 5.0, 1).unwrap();
        let res = de_optimize(
            |x: &[f64]| -(x[0] - 2.0).powi(2),
            &bounds,
            &DEConfig::with_seed(7),
            Sense::Maximize,
        )
        .unwrap();
        assert!((res.best_x[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn constant_objective() {
        let bounds = BoxBounds::cube(-1.0, 1.0, 1).unwrap();
        let res = de_optimize(|_: &[f64]| 3.5, &bounds, &DEConfig::default(), Sense::Maximize).unwrap();
        assert_eq!(res.history[0], 3.5);
        assert_eq!(res.best_value, 3.5);
    }

    #[test]
    fn history_is_monotone_and_candidates_feasible() {
        let bounds = BoxBounds::new(vec![-3.0, 0.5], vec![2.0, 9.0]).unwrap();
        let outside = Mutex::new(0usize);
        let f = |x: &[f64]| {
            if !bounds.contains(x) {
                *outside.lock().unwrap() += 1;
            }
            (x[0] * 3.0).sin() + (x[1] - 4.0).powi(2) * 0.1
        };
        for sense in [Sense::Minimize, Sense::Maximize] {
            let res = de_optimize(f, &bounds, &DEConfig::with_seed(11), sense).unwrap();
            for w in res.history.windows(2) {
                match sense {
                    Sense::Minimize => assert!(w[1] <= w[0]),
                    Sense::Maximize => assert!(w[1] >= w[0]),
                }
            }
        }
        assert_eq!(*outside.lock().unwrap(), 0);
    }

    #[test]
    fn deterministic_and_parallel_agnostic() {
        let bounds = BoxBounds::cube(-2.0, 2.0, 4).unwrap();
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (v - i as f64 * 0.3).powi(2)).sum::<f64>();
        let cfg = DEConfig::with_seed(5);
        let a = de_optimize(f, &bounds, &cfg, Sense::Minimize).unwrap();
        let b = de_optimize(f, &bounds, &cfg, Sense::Minimize).unwrap();
        let par = DEConfig {
            parallel: true,
            ..cfg.clone()
        };
        let c = de_optimize(f, &bounds, &par, Sense::Minimize).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn early_stop_on_stagnation() {
        let bounds = BoxBounds::cube(-1.0, 1.0, 2).unwrap();
        let cfg = DEConfig {
            target_tolerance: Some(0.0),
            ..DEConfig::with_seed(2)
        };
        let res = de_optimize(|_: &[f64]| 1.0, &bounds, &cfg, Sense::Minimize).unwrap();
        assert_eq!(res.history.len(), 31);
    }

    #[test]
    fn invalid_configs() {
        let bounds = BoxBounds::cube(0.0, 1.0, 1).unwrap();
        let f = |_: &[f64]| 0.0;
        for cfg in [
            DEConfig {
                population_size: Some(3),
                ..DEConfig::default()
            },
            DEConfig {
                scale_factor: 0.0,
                ..DEConfig::default()
            },
            DEConfig {
                scale_factor: 2.5,
                ..DEConfig::default()
            },
            DEConfig {
                crossover_rate: 1.5,
                ..DEConfig::default()
            },
        ] {
            assert!(matches!(
                de_optimize(f, &bounds, &cfg, Sense::Minimize),
                Err(Error::InvalidConfig(_))
            ));
        }
        assert!(BoxBounds::new(vec![1.0], vec![1.0]).is_err());
        assert!(BoxBounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn reflection_stays_inside() {
        assert_eq!(reflect(1.5, 0.0, 1.0), 0.5);
        assert_eq!(reflect(-0.25, 0.0, 1.0), 0.25);
        assert!((reflect(3.7, 0.0, 1.0) - 0.3).abs() < 1e-12);
        assert!((reflect(-5.2, 0.0, 1.0) - 0.8).abs() < 1e-12);
    }
}
