//! Probability vectors and entropy measures.
//!
//! The central quantity is the bounded arctan entropy
//!
//! ```text
//! H_c(p) = Σ p_i · atan(1 / p_i^c) − π/4,    c > 0
//! ```
//!
//! which lies in `[0, π/4]` for a proper probability vector and is maximal at
//! the uniform distribution, where it equals `atan(n^c) − π/4`. Shannon, Rényi
//! and Tsallis entropies are provided as baselines; all logarithms are natural.
//!
//! Zero entries never contribute (`0 · atan(∞) = 0`), and every sum is taken
//! over sorted summands so results do not depend on the order of the entries.

pub mod axioms;

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the simplex sum.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Library-wide default for the order parameter `c`.
pub const DEFAULT_C: f64 = 1.0;

/// Whether a vector must sum to one or only to at most one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    Proper,
    Generalized,
}

/// A validated vector of probabilities.
///
/// A `Proper` vector sums to one within [`SUM_TOLERANCE`]; a `Generalized`
/// one is any non-negative sequence with sum at most one (a sub-probability
/// distribution). Inputs are never renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
    kind: VectorKind,
}

impl ProbabilityVector {
    pub fn new(raw: Vec<f64>, kind: VectorKind) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
            if value > 1.0 {
                return Err(Error::EntryAboveOne { index, value });
            }
        }
        let sum = neumaier_sum(raw.iter().copied());
        match kind {
            VectorKind::Proper if (sum - 1.0).abs() > SUM_TOLERANCE => {
                return Err(Error::SumNotOne { sum })
            }
            VectorKind::Generalized if sum > 1.0 + SUM_TOLERANCE => {
                return Err(Error::SumExceedsOne { sum })
            }
            _ => {}
        }
        Ok(Self { probs: raw, kind })
    }

    pub fn proper(raw: Vec<f64>) -> Result<Self> {
        Self::new(raw, VectorKind::Proper)
    }

    pub fn generalized(raw: Vec<f64>) -> Result<Self> {
        Self::new(raw, VectorKind::Generalized)
    }

    /// The uniform distribution over `n` outcomes. Panics if `n == 0`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs at least one outcome");
        Self {
            probs: vec![1.0 / n as f64; n],
            kind: VectorKind::Proper,
        }
    }

    /// The point mass on outcome `at` out of `n`.
    pub fn degenerate(n: usize, at: usize) -> Self {
        assert!(at < n, "degenerate index out of range");
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self {
            probs,
            kind: VectorKind::Proper,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Total mass `W(p) = Σ p_i`.
    pub fn total(&self) -> f64 {
        neumaier_sum(self.probs.iter().copied())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.probs
    }

    /// Concatenation of two generalized distributions with combined mass at
    /// most one.
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut probs = self.probs.clone();
        probs.extend_from_slice(&other.probs);
        Self::generalized(probs)
    }
}

/// Validates `raw` as a probability vector of the requested kind.
pub fn validate(raw: &[f64], kind: VectorKind) -> Result<ProbabilityVector> {
    ProbabilityVector::new(raw.to_vec(), kind)
}

/// An entropy family together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum EntropyMeasure {
    /// Arctan entropy with order parameter `c > 0`.
    #[serde(rename = "t")]
    TEntropy { c: f64 },
    Shannon,
    /// Rényi entropy, `alpha > 0`, `alpha != 1`.
    Renyi { alpha: f64 },
    /// Tsallis entropy with unit Boltzmann constant, `q > 0`, `q != 1`.
    Tsallis { q: f64 },
}

impl Default for EntropyMeasure {
    fn default() -> Self {
        EntropyMeasure::TEntropy { c: DEFAULT_C }
    }
}

impl EntropyMeasure {
    pub fn t(c: f64) -> Result<Self> {
        check_order(c)?;
        Ok(Self::TEntropy { c })
    }

    pub fn renyi(alpha: f64) -> Result<Self> {
        check_non_unit("alpha", alpha)?;
        Ok(Self::Renyi { alpha })
    }

    pub fn tsallis(q: f64) -> Result<Self> {
        check_non_unit("q", q)?;
        Ok(Self::Tsallis { q })
    }

    /// Re-checks the parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::TEntropy { c } => check_order(c),
            Self::Shannon => Ok(()),
            Self::Renyi { alpha } => check_non_unit("alpha", alpha),
            Self::Tsallis { q } => check_non_unit("q", q),
        }
    }

    /// Short human-readable label, e.g. `t(c=0.1)`.
    pub fn label(&self) -> String {
        match *self {
            Self::TEntropy { c } => format!("t(c={c})"),
            Self::Shannon => "shannon".to_string(),
            Self::Renyi { alpha } => format!("renyi(alpha={alpha})"),
            Self::Tsallis { q } => format!("tsallis(q={q})"),
        }
    }
}

fn check_order(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "c",
            value: c,
            expected: "c > 0",
        })
    }
}

fn check_non_unit(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 && value != 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            expected: "> 0 and != 1",
        })
    }
}

/// Information carried by an event of probability `p_event`:
/// `atan(1 / p^c) − π/4`, equal to `π/4` at `p = 0`.
pub fn information(p_event: f64, c: f64) -> Result<f64> {
    check_order(c)?;
    if !(0.0..=1.0).contains(&p_event) {
        return Err(Error::ParameterOutOfRange {
            name: "p",
            value: p_event,
            expected: "0 <= p <= 1",
        });
    }
    if p_event == 0.0 {
        return Ok(FRAC_PI_4);
    }
    Ok(p_event.powf(-c).atan() - FRAC_PI_4)
}

/// The summand `x · atan(1 / x^c)`, zero at `x = 0`.
#[inline]
pub(crate) fn t_term(x: f64, c: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.powf(-c).atan()
    }
}

/// Arctan entropy of a proper or generalized probability vector.
pub fn t_entropy(p: &ProbabilityVector, c: f64) -> Result<f64> {
    check_order(c)?;
    Ok(t_entropy_unchecked(p.probs(), c))
}

pub(crate) fn t_entropy_unchecked(probs: &[f64], c: f64) -> f64 {
    sorted_sum(probs.iter().map(|&x| t_term(x, c))) - FRAC_PI_4
}

/// Shannon entropy in nats.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    shannon_unchecked(p.probs())
}

pub(crate) fn shannon_unchecked(probs: &[f64]) -> f64 {
    sorted_sum(
        probs
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.ln()),
    )
}

/// Rényi entropy of order `alpha` in nats.
pub fn renyi_entropy(p: &ProbabilityVector, alpha: f64) -> Result<f64> {
    check_non_unit("alpha", alpha)?;
    Ok(renyi_unchecked(p.probs(), alpha))
}

pub(crate) fn renyi_unchecked(probs: &[f64], alpha: f64) -> f64 {
    let power_sum = sorted_sum(probs.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)));
    let h = power_sum.ln() / (1.0 - alpha);
    // Clamp the −0.0 produced on degenerate inputs.
    if h == 0.0 {
        0.0
    } else {
        h
    }
}

/// Tsallis entropy with index `q` and unit Boltzmann constant.
pub fn tsallis_entropy(p: &ProbabilityVector, q: f64) -> Result<f64> {
    check_non_unit("q", q)?;
    Ok(tsallis_unchecked(p.probs(), q))
}

pub(crate) fn tsallis_unchecked(probs: &[f64], q: f64) -> f64 {
    let power_sum = sorted_sum(probs.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(q)));
    (1.0 - power_sum) / (q - 1.0)
}

/// Dispatches to the family-specific entropy.
pub fn entropy(p: &ProbabilityVector, measure: &EntropyMeasure) -> Result<f64> {
    measure.validate()?;
    Ok(entropy_unchecked(p.probs(), measure))
}

/// Entropy of raw probabilities with an already-validated measure.
pub(crate) fn entropy_unchecked(probs: &[f64], measure: &EntropyMeasure) -> f64 {
    match *measure {
        EntropyMeasure::TEntropy { c } => t_entropy_unchecked(probs, c),
        EntropyMeasure::Shannon => shannon_unchecked(probs),
        EntropyMeasure::Renyi { alpha } => renyi_unchecked(probs, alpha),
        EntropyMeasure::Tsallis { q } => tsallis_unchecked(probs, q),
    }
}

/// Which variable of a joint distribution an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// The row variable.
    X,
    /// The column variable.
    Y,
}

/// A joint probability table `p(x, y)`, rows indexed by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl JointDistribution {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        let rows = table.len();
        let cols = table.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || table.iter().any(|r| r.len() != cols) {
            return Err(Error::MalformedTable);
        }
        let cells: Vec<f64> = table.into_iter().flatten().collect();
        // Reuse the vector validation for the entry and sum checks.
        ProbabilityVector::proper(cells.clone())?;
        Ok(Self { rows, cols, cells })
    }

    /// The independent joint `p(x) q(y)`.
    pub fn product(px: &ProbabilityVector, py: &ProbabilityVector) -> Result<Self> {
        let table = px
            .probs()
            .iter()
            .map(|&a| py.probs().iter().map(|&b| a * b).collect())
            .collect();
        Self::new(table)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.cells[x * self.cols + y]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Row sums (`Axis::X`) or column sums (`Axis::Y`).
    pub fn marginal(&self, axis: Axis) -> ProbabilityVector {
        let probs = match axis {
            Axis::X => (0..self.rows)
                .map(|x| neumaier_sum((0..self.cols).map(|y| self.get(x, y))))
                .collect(),
            Axis::Y => (0..self.cols)
                .map(|y| neumaier_sum((0..self.rows).map(|x| self.get(x, y))))
                .collect(),
        };
        ProbabilityVector {
            probs,
            kind: VectorKind::Proper,
        }
    }

    /// Conditional distribution of the other variable given `given = index`,
    /// or `None` when that event has probability zero.
    pub fn conditional(&self, given: Axis, index: usize) -> Option<Vec<f64>> {
        let slice: Vec<f64> = match given {
            Axis::Y => (0..self.rows).map(|x| self.get(x, index)).collect(),
            Axis::X => (0..self.cols).map(|y| self.get(index, y)).collect(),
        };
        let mass = neumaier_sum(slice.iter().copied());
        (mass > 0.0).then(|| slice.into_iter().map(|v| v / mass).collect())
    }
}

/// Returns the marginal of `joint` along `axis`.
pub fn marginal(joint: &JointDistribution, axis: Axis) -> ProbabilityVector {
    joint.marginal(axis)
}

/// Joint arctan entropy `Σ p(x,y) atan(1 / p(x,y)^c) − π/4`.
pub fn joint_t_entropy(joint: &JointDistribution, c: f64) -> Result<f64> {
    check_order(c)?;
    Ok(t_entropy_unchecked(joint.cells(), c))
}

/// Conditional arctan entropy of one variable given the other.
///
/// With `given = Axis::Y` this is `H_c(X | Y) = Σ p(x,y) atan(1 / p(x|y)^c) − π/4`.
/// Conditioning events of probability zero contribute nothing.
pub fn conditional_t_entropy(joint: &JointDistribution, c: f64, given: Axis) -> Result<f64> {
    check_order(c)?;
    let cond_mass = joint.marginal(given);
    let (rows, cols) = joint.shape();
    let mut terms = Vec::with_capacity(rows * cols);
    for x in 0..rows {
        for y in 0..cols {
            let pxy = joint.get(x, y);
            if pxy == 0.0 {
                continue;
            }
            let marginal = match given {
                Axis::Y => cond_mass.probs()[y],
                Axis::X => cond_mass.probs()[x],
            };
            let conditional = (pxy / marginal).min(1.0);
            terms.push(pxy * conditional.powf(-c).atan());
        }
    }
    Ok(sorted_sum(terms) - FRAC_PI_4)
}

/// `H_c(X | Y = y)` (or `H_c(Y | X = x)`), `None` for a null conditioning event.
pub fn pointwise_conditional_t_entropy(
    joint: &JointDistribution,
    c: f64,
    given: Axis,
    index: usize,
) -> Result<Option<f64>> {
    check_order(c)?;
    Ok(joint
        .conditional(given, index)
        .map(|probs| t_entropy_unchecked(&probs, c)))
}

/// Compensated (Neumaier) summation.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Order-independent compensated sum: summands are sorted first, so any
/// permutation of the inputs yields the same bits.
pub(crate) fn sorted_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut terms: Vec<f64> = values.into_iter().collect();
    terms.sort_by(f64::total_cmp);
    neumaier_sum(terms)
}
