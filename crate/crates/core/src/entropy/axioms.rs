//! Executable axiom suite for the arctan entropy.
//!
//! Each check fuzzes random proper/generalized vectors or joint tables for
//! every order parameter in the configuration and records the worst slack of
//! its inequality. A check passes when the worst slack is no lower than
//! `-tolerance`. Checks on exact identities use bitwise comparison and a zero
//! tolerance.

use std::f64::consts::FRAC_PI_4;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{
    conditional_t_entropy, joint_t_entropy, pointwise_conditional_t_entropy, t_entropy, t_term,
    Axis, JointDistribution, ProbabilityVector,
};
use crate::rng::{self, StreamRng};

/// Outcome of one property over all fuzzed cases.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub cases: usize,
    /// Minimum over cases of (right-hand slack); negative means violated by that much.
    pub worst_slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomSuiteConfig {
    /// Random cases per property and per order parameter.
    pub cases: usize,
    pub orders: Vec<f64>,
    pub seed: u64,
}

impl Default for AxiomSuiteConfig {
    fn default() -> Self {
        Self {
            cases: 1000,
            orders: vec![0.1, 1.0, 10.0, 50.0],
            seed: 0,
        }
    }
}

struct Tracker {
    name: &'static str,
    statement: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
}

impl Tracker {
    fn new(name: &'static str, statement: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            statement,
            tolerance,
            cases: 0,
            worst: f64::INFINITY,
        }
    }

    /// Records `slack`, which must stay >= -tolerance.
    fn record(&mut self, slack: f64) {
        self.cases += 1;
        // NaN slack is a failure.
        self.worst = if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.worst.min(slack)
        };
    }

    fn exact(&mut self, a: f64, b: f64) {
        self.record(if a.to_bits() == b.to_bits() {
            0.0
        } else {
            -(a - b).abs().max(f64::MIN_POSITIVE)
        });
    }

    fn finish(self) -> PropertyCheck {
        PropertyCheck {
            name: self.name,
            statement: self.statement,
            cases: self.cases,
            worst_slack: self.worst,
            tolerance: self.tolerance,
            passed: self.cases > 0 && self.worst >= -self.tolerance,
        }
    }
}

/// Random non-negative weights with occasional zeros and heavy skew.
fn random_weights(rng: &mut StreamRng, len: usize) -> Vec<f64> {
    let skew = [1.0, 2.0, 4.0, 8.0][rng.random_range(0..4)];
    let zero_rate = [0.0, 0.0, 0.2, 0.5][rng.random_range(0..4)];
    let mut w: Vec<f64> = (0..len)
        .map(|_| {
            if rng.random::<f64>() < zero_rate {
                0.0
            } else {
                let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                (-u.ln()).powf(skew)
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        let i = rng.random_range(0..len);
        w[i] = 1.0;
    }
    w
}

fn normalized(w: Vec<f64>, mass: f64) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| (v / total * mass).min(1.0)).collect()
}

pub(crate) fn random_proper(rng: &mut StreamRng, len: usize) -> ProbabilityVector {
    loop {
        let w = random_weights(rng, len);
        if let Ok(p) = ProbabilityVector::proper(normalized(w, 1.0)) {
            return p;
        }
    }
}

pub(crate) fn random_joint(rng: &mut StreamRng) -> JointDistribution {
    let rows = rng.random_range(1..=5);
    let cols = rng.random_range(1..=5);
    let cells = random_proper(rng, rows * cols).into_inner();
    JointDistribution::new(cells.chunks(cols).map(<[f64]>::to_vec).collect())
        .expect("normalized table is a valid joint")
}

fn t(p: &ProbabilityVector, c: f64) -> f64 {
    t_entropy(p, c).expect("order parameter validated")
}

/// Runs every property and returns one check per property.
pub fn run_axiom_suite(cfg: &AxiomSuiteConfig) -> Vec<PropertyCheck> {
    let mut rng = rng::seeded(cfg.seed);
    let mut checks = Vec::new();

    let mut nonneg = Tracker::new("non_negativity", "H_c(p) >= 0", 1e-12);
    let mut bounded = Tracker::new("boundedness", "H_c(p) <= pi/4", 1e-12);
    let mut symmetry = Tracker::new("symmetry", "H_c(sigma(p)) == H_c(p) bitwise", 0.0);
    let mut zero_event = Tracker::new(
        "zero_event_extension",
        "H_c(p_1..p_n, 0) == H_c(p_1..p_n) bitwise",
        0.0,
    );
    let mut maximum = Tracker::new("maximum_at_uniform", "H_c(p) <= H_c(uniform_n)", 1e-12);
    let mut concavity = Tracker::new(
        "concavity",
        "H_c(l p + (1-l) q) >= l H_c(p) + (1-l) H_c(q)",
        1e-10,
    );
    let mut conditioning = Tracker::new("conditioning_reduces", "H_c(X|Y) <= H_c(X)", 1e-10);
    let mut independence = Tracker::new(
        "conditioning_equality_when_independent",
        "|H_c(X|Y) - H_c(X)| == 0 for product joints",
        1e-10,
    );
    let mut joint_dom = Tracker::new(
        "joint_dominates_marginals",
        "H_c(X,Y) >= max(H_c(X), H_c(Y))",
        1e-10,
    );
    let mut subadd_cond = Tracker::new(
        "subadditivity_conditional",
        "H_c(X,Y) <= H_c(X) + H_c(Y|X)",
        1e-10,
    );
    let mut subadd = Tracker::new("subadditivity", "H_c(X,Y) <= H_c(X) + H_c(Y)", 1e-10);
    let mut chain = Tracker::new(
        "conditional_chain_decomposition",
        "H_c(X|Y) == sum_y p(y) H_c(X|Y=y)",
        1e-10,
    );
    let mut union = Tracker::new(
        "generalized_union_bound",
        "H_c(p u q) >= (W(p) H_c(p) + W(q) H_c(q)) / (W(p) + W(q))",
        1e-10,
    );
    let mut continuity = Tracker::new(
        "continuity",
        "|H_c(p) - H_c(p + d)| < 1e-4 for ||d||_1 = 1e-6",
        0.0,
    );

    for &c in &cfg.orders {
        for _ in 0..cfg.cases {
            let n = rng.random_range(1..=12);
            let p = random_proper(&mut rng, n);
            let h = t(&p, c);
            nonneg.record(h);
            bounded.record(FRAC_PI_4 - h);
            maximum.record(t(&ProbabilityVector::uniform(n), c) - h);

            let mut shuffled = p.probs().to_vec();
            shuffled.shuffle(&mut rng);
            symmetry.exact(t(&ProbabilityVector::proper(shuffled).unwrap(), c), h);

            let mut extended = p.probs().to_vec();
            extended.push(0.0);
            zero_event.exact(t(&ProbabilityVector::proper(extended).unwrap(), c), h);

            let q = random_proper(&mut rng, n);
            let lambda: f64 = rng.random_range(0.0..1.0);
            let mix: Vec<f64> = p
                .probs()
                .iter()
                .zip(q.probs())
                .map(|(a, b)| (lambda * a + (1.0 - lambda) * b).min(1.0))
                .collect();
            if let Ok(mix) = ProbabilityVector::proper(mix) {
                concavity.record(t(&mix, c) - (lambda * h + (1.0 - lambda) * t(&q, c)));
            }

            // Perturbation toward a random vector with L1 step 1e-6.
            let r = random_proper(&mut rng, n);
            let dist: f64 = p.probs().iter().zip(r.probs()).map(|(a, b)| (a - b).abs()).sum();
            if dist > 0.0 {
                let s = (1e-6 / dist).min(1.0);
                let moved: Vec<f64> = p
                    .probs()
                    .iter()
                    .zip(r.probs())
                    .map(|(a, b)| ((1.0 - s) * a + s * b).min(1.0))
                    .collect();
                if let Ok(moved) = ProbabilityVector::proper(moved) {
                    continuity.record(1e-4 - (t(&moved, c) - h).abs());
                }
            }

            let joint = random_joint(&mut rng);
            let px = joint.marginal(Axis::X);
            let py = joint.marginal(Axis::Y);
            let hx = t(&px, c);
            let hy = t(&py, c);
            let hj = joint_t_entropy(&joint, c).unwrap();
            let hx_given_y = conditional_t_entropy(&joint, c, Axis::Y).unwrap();
            let hy_given_x = conditional_t_entropy(&joint, c, Axis::X).unwrap();
            conditioning.record(hx - hx_given_y);
            joint_dom.record(hj - hx.max(hy));
            subadd_cond.record(hx + hy_given_x - hj);
            subadd.record(hx + hy - hj);
            let decomposed: f64 = (0..py.len())
                .filter_map(|y| {
                    pointwise_conditional_t_entropy(&joint, c, Axis::Y, y)
                        .unwrap()
                        .map(|hy_cond| py.probs()[y] * hy_cond)
                })
                .sum();
            chain.record(-(hx_given_y - decomposed).abs());

            let nx = rng.random_range(1..=5);
            let fx = random_proper(&mut rng, nx);
            let ny = rng.random_range(1..=5);
            let fy = random_proper(&mut rng, ny);
            let product = JointDistribution::product(&fx, &fy).unwrap();
            let h_cond = conditional_t_entropy(&product, c, Axis::Y).unwrap();
            independence.record(-(h_cond - t(&product.marginal(Axis::X), c)).abs());

            let total: f64 = rng.random_range(0.0..=1.0);
            let split: f64 = rng.random_range(0.0..=1.0);
            let (wp, wq) = (total * split, total * (1.0 - split));
            if wp > 0.0 && wq > 0.0 {
                let np = rng.random_range(1..=6);
                let nq = rng.random_range(1..=6);
                let gp = ProbabilityVector::generalized(normalized(random_weights(&mut rng, np), wp));
                let gq = ProbabilityVector::generalized(normalized(random_weights(&mut rng, nq), wq));
                if let (Ok(gp), Ok(gq)) = (gp, gq) {
                    if let Ok(joined) = gp.union(&gq) {
                        let (wp, wq) = (gp.total(), gq.total());
                        let bound = (wp * t(&gp, c) + wq * t(&gq, c)) / (wp + wq);
                        union.record(t(&joined, c) - bound);
                    }
                }
            }
        }
    }

    checks.extend([
        nonneg.finish(),
        bounded.finish(),
        symmetry.finish(),
        zero_event.finish(),
        maximum.finish(),
    ]);
    checks.push(uniform_monotone_in_n(&cfg.orders, 10_000));
    checks.push(concavity.finish());
    checks.push(scalar_concavity(&cfg.orders));
    checks.push(inverse_arctan_convexity());
    checks.extend([
        conditioning.finish(),
        independence.finish(),
        joint_dom.finish(),
        subadd_cond.finish(),
        subadd.finish(),
        chain.finish(),
        union.finish(),
        continuity.finish(),
    ]);
    checks
}

/// `atan(n^c) − π/4` strictly increases in `n`. Checked through the deficit
/// `π/4 − H = atan(n^{-c})`, which stays representable when `atan(n^c)`
/// rounds to `π/2` for large `c`.
fn uniform_monotone_in_n(orders: &[f64], max_n: usize) -> PropertyCheck {
    let mut tr = Tracker::new(
        "uniform_increases_with_n",
        "atan(n^c) - pi/4 strictly increasing in n",
        0.0,
    );
    for &c in orders {
        let mut prev = f64::INFINITY;
        for n in 1..=max_n {
            let deficit = (n as f64).powf(-c).atan();
            tr.record(if deficit < prev { 0.0 } else { -(deficit - prev).max(f64::MIN_POSITIVE) });
            prev = deficit;
        }
    }
    tr.finish()
}

/// Second central differences of `x · atan(1/x^c)` are non-positive on (0, 1].
fn scalar_concavity(orders: &[f64]) -> PropertyCheck {
    let mut tr = Tracker::new(
        "scalar_term_concavity",
        "x atan(1/x^c) has non-positive second differences on (0,1]",
        1e-12,
    );
    let h = 1e-3;
    for &c in orders {
        for i in 1..1000 {
            let x = i as f64 * h;
            let d2 = t_term(x + h, c) - 2.0 * t_term(x, c) + t_term(x - h, c);
            tr.record(-d2);
        }
    }
    tr.finish()
}

/// Second central differences of `atan(1/x)` are non-negative on (0.01, 100).
fn inverse_arctan_convexity() -> PropertyCheck {
    let mut tr = Tracker::new(
        "inverse_arctan_convexity",
        "atan(1/x) has non-negative second differences on (0.01, 100)",
        1e-12,
    );
    let f = |x: f64| (1.0 / x).atan();
    // geometric grid so both ends are resolved
    let steps = 2000;
    let (lo, hi) = (0.01f64.ln(), 100f64.ln());
    for i in 1..steps {
        let x = (lo + (hi - lo) * i as f64 / steps as f64).exp();
        let h = x * 1e-3;
        tr.record(f(x + h) - 2.0 * f(x) + f(x - h));
    }
    tr.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let checks = run_axiom_suite(&AxiomSuiteConfig {
            cases: 50,
            orders: vec![0.5, 2.0],
            seed: 3,
        });
        for check in &checks {
            assert!(check.passed, "{check:?}");
            assert!(check.cases > 0);
        }
        assert_eq!(checks.len(), 17);
    }

    #[test]
    fn tracker_flags_violation() {
        let mut tr = Tracker::new("x", "x", 1e-12);
        tr.record(1.0);
        tr.record(-1e-6);
        assert!(!tr.finish().passed);
        let mut tr = Tracker::new("x", "x", 0.0);
        tr.record(f64::NAN);
        assert!(!tr.finish().passed);
    }
}
