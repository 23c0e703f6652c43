//! Multilevel Kapur thresholding of grayscale images.
//!
//! For thresholds `t_1 < … < t_{k−1}` the gray levels are split into `k`
//! segments `[0, t_1]`, `[t_1 + 1, t_2]`, …, `[t_{k−1} + 1, L − 1]`. Each
//! segment's histogram mass is renormalized into a distribution `q_i` and the
//! posterior entropy `φ = Σ H(q_i)` is maximized over the thresholds. Empty
//! segments contribute zero.

use rand::Rng;
use serde::Serialize;

use crate::diffevo::{de_optimize, BoxBounds, DEConfig, Sense};
use crate::entropy::{entropy_unchecked, EntropyMeasure, ProbabilityVector};
use crate::error::{Error, Result};
use crate::rng;

/// Upper bound on the number of threshold vectors [`exhaustive_thresholds`] enumerates.
pub const MAX_COMBINATIONS: u128 = 10_000_000;

/// Default order parameter for segmentation runs.
pub const SEGMENTATION_C: f64 = 0.1;

/// Row-major grayscale raster with `levels` gray values `0..levels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    levels: usize,
    pixels: Vec<u16>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, levels: usize, pixels: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("width and height must be positive".into()));
        }
        if !(2..=65536).contains(&levels) {
            return Err(Error::InvalidImage(format!("levels {levels} not in 2..=65536")));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|&v| v as usize >= levels) {
            return Err(Error::InvalidImage(format!(
                "pixel {i} has value {} >= {levels} levels",
                pixels[i]
            )));
        }
        Ok(Self {
            width,
            height,
            levels,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }
}

/// Gray-level counts of an image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidImage("histogram needs at least two levels".into()));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidImage("histogram has no mass".into()));
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn levels(&self) -> usize {
        self.counts.len()
    }

    pub fn occupied_levels(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn probabilities(&self) -> ProbabilityVector {
        let probs = self
            .counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect();
        ProbabilityVector::proper(probs).expect("normalized counts form a probability vector")
    }
}

/// Counts how many pixels take each gray level.
pub fn histogram(img: &GrayImage) -> Histogram {
    let mut counts = vec![0u64; img.levels];
    for &v in &img.pixels {
        counts[v as usize] += 1;
    }
    Histogram::from_counts(counts).expect("image has at least one pixel")
}

/// Strictly increasing thresholds in `[1, L − 2]` plus the objective they attain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSet {
    thresholds: Vec<usize>,
    levels: usize,
    /// Posterior entropy at these thresholds (NaN when not evaluated).
    pub objective: f64,
}

impl ThresholdSet {
    pub fn new(thresholds: Vec<usize>, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidThresholds(format!("levels {levels} < 2")));
        }
        for (i, &t) in thresholds.iter().enumerate() {
            if t < 1 || t + 2 > levels {
                return Err(Error::InvalidThresholds(format!(
                    "threshold {t} outside [1, {}]",
                    levels as i64 - 2
                )));
            }
            if i > 0 && thresholds[i - 1] >= t {
                return Err(Error::InvalidThresholds(format!(
                    "thresholds not strictly increasing: {thresholds:?}"
                )));
            }
        }
        Ok(Self {
            thresholds,
            levels,
            objective: f64::NAN,
        })
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Number of segments `k`.
    pub fn segments(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Inclusive gray-level range of every segment.
    pub fn ranges(&self) -> Vec<(usize, usize)> {
        segment_ranges(&self.thresholds, self.levels)
    }

    /// Segment index of gray level `v`.
    pub fn segment_of(&self, v: usize) -> usize {
        self.thresholds.partition_point(|&t| t < v)
    }

    fn check_against(&self, h: &Histogram) -> Result<()> {
        if self.levels != h.levels() {
            return Err(Error::InvalidThresholds(format!(
                "thresholds for {} levels applied to a {}-level histogram",
                self.levels,
                h.levels()
            )));
        }
        Ok(())
    }
}

fn segment_ranges(thresholds: &[usize], levels: usize) -> Vec<(usize, usize)> {
    let mut ranges = Vec::with_capacity(thresholds.len() + 1);
    let mut start = 0;
    for &t in thresholds {
        ranges.push((start, t));
        start = t + 1;
    }
    ranges.push((start, levels - 1));
    ranges
}

/// Normalized distribution of each segment; `None` marks an empty segment.
pub fn segment_distributions(h: &Histogram, t: &ThresholdSet) -> Result<Vec<Option<ProbabilityVector>>> {
    t.check_against(h)?;
    Ok(t.ranges()
        .into_iter()
        .map(|(a, b)| {
            let counts = &h.counts[a..=b];
            let mass: u64 = counts.iter().sum();
            (mass > 0).then(|| {
                ProbabilityVector::proper(counts.iter().map(|&c| c as f64 / mass as f64).collect())
                    .expect("normalized segment")
            })
        })
        .collect())
}

/// Entropy of the renormalized counts on `[a, b]`, zero when empty.
fn segment_entropy(counts: &[u64], a: usize, b: usize, m: &EntropyMeasure, buf: &mut Vec<f64>) -> f64 {
    let slice = &counts[a..=b];
    let mass: u64 = slice.iter().sum();
    if mass == 0 {
        return 0.0;
    }
    buf.clear();
    buf.extend(slice.iter().map(|&c| c as f64 / mass as f64));
    entropy_unchecked(buf, m)
}

fn objective_unchecked(counts: &[u64], thresholds: &[usize], m: &EntropyMeasure, buf: &mut Vec<f64>) -> f64 {
    segment_ranges(thresholds, counts.len())
        .into_iter()
        .map(|(a, b)| segment_entropy(counts, a, b, m, buf))
        .sum()
}

/// Posterior entropy `φ = Σ_i H(q_i)` over the non-empty segments.
pub fn kapur_objective(h: &Histogram, t: &ThresholdSet, m: &EntropyMeasure) -> Result<f64> {
    m.validate()?;
    t.check_against(h)?;
    Ok(objective_unchecked(&h.counts, &t.thresholds, m, &mut Vec::new()))
}

/// Integer thresholds from a continuous genotype: round, clamp, sort, then
/// bump duplicates upward (and back down from the top if that overflows).
pub fn decode_genotype(x: &[f64], levels: usize) -> Vec<usize> {
    let max_t = levels - 2;
    let mut t: Vec<usize> = x
        .iter()
        .map(|v| (v.round().max(1.0) as usize).min(max_t))
        .collect();
    t.sort_unstable();
    for i in 1..t.len() {
        if t[i] <= t[i - 1] {
            t[i] = t[i - 1] + 1;
        }
    }
    if let Some(last) = t.last_mut() {
        if *last > max_t {
            *last = max_t;
            for i in (0..t.len() - 1).rev() {
                if t[i] >= t[i + 1] {
                    t[i] = t[i + 1] - 1;
                }
            }
        }
    }
    t
}

fn check_k(h: &Histogram, k: usize) -> Result<()> {
    let levels = h.levels();
    if k < 2 || k > levels || k - 1 > levels.saturating_sub(2) {
        return Err(Error::InvalidThresholds(format!(
            "k = {k} segments not possible with {levels} levels"
        )));
    }
    let occupied = h.occupied_levels();
    if k > occupied {
        return Err(Error::InfeasibleK { k, occupied });
    }
    Ok(())
}

/// Moves each threshold to the middle of the run of empty gray levels it
/// sits in. Occupied levels keep their segments, so the objective is unchanged.
pub fn center_in_gaps(h: &Histogram, thresholds: &mut [usize]) {
    let levels = h.levels();
    let counts = &h.counts;
    for i in 0..thresholds.len() {
        let t = thresholds[i];
        let Some(lo) = (0..=t).rev().find(|&v| counts[v] > 0) else {
            continue;
        };
        let Some(hi) = (t + 1..levels).find(|&v| counts[v] > 0) else {
            continue;
        };
        let min_t = [lo, 1, if i > 0 { thresholds[i - 1] + 1 } else { 0 }]
            .into_iter()
            .max()
            .unwrap();
        let max_t = [hi - 1, levels - 2, thresholds.get(i + 1).map_or(usize::MAX, |n| n - 1)]
            .into_iter()
            .min()
            .unwrap();
        if min_t <= max_t {
            thresholds[i] = ((lo + hi - 1) / 2).clamp(min_t, max_t);
        }
    }
}

/// Maximizes the posterior entropy with differential evolution.
///
/// The genotype lives in `[0.5, L − 1.5]^{k−1}` so every admissible integer
/// threshold owns a rounding cell of equal width. The best decoded vector is
/// then centered within empty gray-level runs.
pub fn optimize_thresholds(h: &Histogram, k: usize, m: &EntropyMeasure, de_cfg: &DEConfig) -> Result<ThresholdSet> {
    m.validate()?;
    check_k(h, k)?;
    let levels = h.levels();
    let dim = k - 1;
    let bounds = BoxBounds::cube(0.5, levels as f64 - 1.5, dim)?;
    let counts = &h.counts;
    let objective = |x: &[f64]| {
        let t = decode_genotype(x, levels);
        objective_unchecked(counts, &t, m, &mut Vec::with_capacity(levels))
    };
    let result = de_optimize(objective, &bounds, de_cfg, Sense::Maximize)?;
    let mut thresholds = decode_genotype(&result.best_x, levels);
    center_in_gaps(h, &mut thresholds);
    let mut set = ThresholdSet::new(thresholds, levels)?;
    set.objective = objective_unchecked(counts, &set.thresholds, m, &mut Vec::new());
    Ok(set)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Global maximizer by enumeration; ties go to the lexicographically
/// smallest threshold vector.
pub fn exhaustive_thresholds(h: &Histogram, k: usize, m: &EntropyMeasure) -> Result<ThresholdSet> {
    m.validate()?;
    let levels = h.levels();
    if k == 0 || k - 1 > levels.saturating_sub(2) {
        return Err(Error::InvalidThresholds(format!(
            "k = {k} segments not possible with {levels} levels"
        )));
    }
    let dim = k - 1;
    let combos = binomial(levels as u128 - 2, dim as u128);
    if combos > MAX_COMBINATIONS {
        return Err(Error::TooManyCombinations(combos));
    }
    let counts = &h.counts;
    let mut buf = Vec::with_capacity(levels);

    // Segment entropies are reused across combinations once k > 2.
    let table: Option<Vec<f64>> = (dim >= 2).then(|| {
        let mut table = vec![0.0; levels * levels];
        for a in 0..levels {
            for b in a..levels {
                table[a * levels + b] = segment_entropy(counts, a, b, m, &mut buf);
            }
        }
        table
    });
    let mut eval = |t: &[usize]| -> f64 {
        match &table {
            Some(table) => segment_ranges(t, levels)
                .into_iter()
                .map(|(a, b)| table[a * levels + b])
                .sum(),
            None => objective_unchecked(counts, t, m, &mut buf),
        }
    };

    let mut current: Vec<usize> = (1..=dim).collect();
    let mut best = current.clone();
    let mut best_value = eval(&current);
    let max_t = levels - 2;
    loop {
        // next combination in lexicographic order
        let mut i = dim;
        loop {
            if i == 0 {
                center_in_gaps(h, &mut best);
                let mut set = ThresholdSet::new(best, levels)?;
                set.objective = best_value;
                return Ok(set);
            }
            i -= 1;
            if current[i] < max_t - (dim - 1 - i) {
                break;
            }
        }
        current[i] += 1;
        for j in i + 1..dim {
            current[j] = current[j - 1] + 1;
        }
        let v = eval(&current);
        if v > best_value {
            best_value = v;
            best.clone_from(&current);
        }
    }
}

/// Representative gray level of each segment: the rounded mean level of its
/// histogram mass, or the middle of its range when empty.
pub fn representative_levels(h: &Histogram, t: &ThresholdSet) -> Vec<u16> {
    t.ranges()
        .into_iter()
        .map(|(a, b)| {
            let mass: u64 = h.counts[a..=b].iter().sum();
            let mean = if mass == 0 {
                (a + b) as f64 / 2.0
            } else {
                let weighted: u128 = (a..=b).map(|v| v as u128 * h.counts[v] as u128).sum();
                weighted as f64 / mass as f64
            };
            mean.round() as u16
        })
        .collect()
}

/// Replaces every pixel by its segment's representative level.
pub fn apply_thresholds(img: &GrayImage, t: &ThresholdSet) -> Result<GrayImage> {
    let h = histogram(img);
    t.check_against(&h)?;
    let reps = representative_levels(&h, t);
    let pixels = img
        .pixels
        .iter()
        .map(|&v| reps[t.segment_of(v as usize)])
        .collect();
    GrayImage::new(img.width, img.height, img.levels, pixels)
}

/// Segment index of every pixel.
pub fn segment_labels(img: &GrayImage, t: &ThresholdSet) -> Vec<usize> {
    img.pixels.iter().map(|&v| t.segment_of(v as usize)).collect()
}

/// Synthetic two-mode test image: 128×128 pixels over 64 levels, the top
/// half drawn uniformly from `0..=15` and the bottom half from `48..=63`.
/// Returns the image and each pixel's mode (0 or 1).
pub fn bimodal_fixture(seed: u64) -> (GrayImage, Vec<usize>) {
    let (w, h) = (128, 128);
    let mut rng = rng::seeded(seed);
    let mut pixels = Vec::with_capacity(w * h);
    let mut truth = Vec::with_capacity(w * h);
    for i in 0..w * h {
        let mode = usize::from(i >= w * h / 2);
        let base = if mode == 0 { 0 } else { 48 };
        pixels.push(base + rng.random_range(0..16u16));
        truth.push(mode);
    }
    let img = GrayImage::new(w, h, 64, pixels).expect("fixture dimensions are valid");
    (img, truth)
}
