//! Partition agreement scores: NMI, ARI, PRI, GCE and VoI.
//!
//! All scores are computed from a contingency table. Pair counts use exact
//! integer arithmetic so image-sized partitions do not lose precision.
//! Entropies use natural logarithms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cross-tabulation of two labelings of the same items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::Empty);
        }
        let index = |labels: &[usize]| -> (Vec<usize>, usize) {
            let mut ids = BTreeMap::new();
            for &l in labels {
                let next = ids.len();
                ids.entry(l).or_insert(next);
            }
            (labels.iter().map(|l| ids[l]).collect(), ids.len())
        };
        let (ra, r) = index(a);
        let (cb, s) = index(b);
        let mut counts = vec![vec![0u64; s]; r];
        for (&i, &j) in ra.iter().zip(&cb) {
            counts[i][j] += 1;
        }
        let row_sums = counts.iter().map(|row| row.iter().sum()).collect();
        let col_sums = (0..s).map(|j| counts.iter().map(|row| row[j]).sum()).collect();
        Ok(Self {
            counts,
            row_sums,
            col_sums,
            total: a.len() as u64,
        })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    fn cells(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.iter().flatten().copied().filter(|&c| c > 0)
    }

    fn entropy_of(sums: &[u64], n: u64) -> f64 {
        let n = n as f64;
        -sums
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * p.ln()
            })
            .sum::<f64>()
    }

    pub fn row_entropy(&self) -> f64 {
        Self::entropy_of(&self.row_sums, self.total)
    }

    pub fn col_entropy(&self) -> f64 {
        Self::entropy_of(&self.col_sums, self.total)
    }

    pub fn mutual_information(&self) -> f64 {
        let n = self.total as f64;
        let mut mi = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                let ratio = c * n / (self.row_sums[i] as f64 * self.col_sums[j] as f64);
                mi += c / n * ratio.ln();
            }
        }
        mi.max(0.0)
    }

    /// Pairs grouped together in both, in the rows, and in the columns.
    fn pair_counts(&self) -> (u128, u128, u128, u128) {
        let pairs = |c: u64| (c as u128) * (c.saturating_sub(1) as u128) / 2;
        let both = self.cells().map(pairs).sum();
        let rows = self.row_sums.iter().map(|&c| pairs(c)).sum();
        let cols = self.col_sums.iter().map(|&c| pairs(c)).sum();
        (both, rows, cols, pairs(self.total))
    }

    /// Unadjusted Rand index; 1 when there are fewer than two items.
    pub fn rand_index(&self) -> f64 {
        let (both, rows, cols, all) = self.pair_counts();
        if all == 0 {
            return 1.0;
        }
        // pairs split in both = all − rows − cols + both
        let agree = all + 2 * both - rows - cols;
        agree as f64 / all as f64
    }
}

/// Normalized mutual information with arithmetic-mean normalization.
/// Two single-block partitions score 1.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(a, b)?;
    let (ha, hb) = (table.row_entropy(), table.col_entropy());
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    let denom = 0.5 * (ha + hb);
    Ok((table.mutual_information() / denom).clamp(0.0, 1.0))
}

/// Adjusted Rand index (Hubert–Arabie).
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(a, b)?;
    let (both, rows, cols, all) = table.pair_counts();
    if rows == cols && (rows == 0 || rows == all) {
        // identical trivial partitions (one block, or all singletons)
        return Ok(1.0);
    }
    // ARI = (both − rows·cols/all) / ((rows + cols)/2 − rows·cols/all), cleared of fractions
    let (both, rows, cols, all) = (both as i128, rows as i128, cols as i128, all as i128);
    let num = 2 * (both * all - rows * cols);
    let den = (rows + cols) * all - 2 * rows * cols;
    Ok(num as f64 / den as f64)
}

/// Probabilistic Rand index against a set of ground truths: the mean, over
/// truths, of the Rand index. Equals the per-pair agreement probability with
/// the empirical co-labelling frequencies.
pub fn pri(seg: &[usize], truths: &[Vec<usize>]) -> Result<f64> {
    if truths.is_empty() {
        return Err(Error::Empty);
    }
    let mut sum = 0.0;
    for truth in truths {
        sum += ContingencyTable::new(seg, truth)?.rand_index();
    }
    Ok(sum / truths.len() as f64)
}

/// Global consistency error.
pub fn gce(a: &[usize], b: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(a, b)?;
    let mut err_ab = 0.0;
    let mut err_ba = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            err_ab += c * (table.row_sums[i] as f64 - c) / table.row_sums[i] as f64;
            err_ba += c * (table.col_sums[j] as f64 - c) / table.col_sums[j] as f64;
        }
    }
    Ok(err_ab.min(err_ba) / table.total as f64)
}

/// Variation of information `H(a | b) + H(b | a)`, summed cell by cell so
/// identical partitions give exactly 0.
pub fn voi(a: &[usize], b: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(a, b)?;
    let n = table.total as f64;
    let mut v = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            v -= c / n * ((c / table.row_sums[i] as f64).ln() + (c / table.col_sums[j] as f64).ln());
        }
    }
    Ok(v.max(0.0))
}
