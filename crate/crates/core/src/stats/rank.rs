use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::special::{normal_two_sided_p, student_t_two_sided_p};
use super::StatsError;

/// 1-based ranks with ties given the average of the positions they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean rank
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Sizes of the tie groups in `values`.
fn tie_sizes(values: &[f64]) -> Vec<usize> {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    s.chunk_by(|a, b| a == b).map(<[f64]>::len).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// Pairs with a non-zero difference.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    pub z: f64,
    /// Two-sided.
    pub p: f64,
}

/// Wilcoxon signed-rank test of `a - b` with the tie-corrected normal
/// approximation (no continuity correction).
///
/// Zero differences are dropped. If every difference is zero the result is
/// `z = 0, p = 1`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<Wilcoxon, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(StatsError::Empty);
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Ok(Wilcoxon {
            n: 0,
            w_plus: 0.0,
            w_minus: 0.0,
            z: 0.0,
            p: 1.0,
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| libm::fabs(*d)).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = diffs.len() as f64;
    let total = n * (n + 1.0) / 2.0;
    let w_minus = total - w_plus;
    let tie_term: f64 = tie_sizes(&abs)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - total / 2.0) / libm::sqrt(var);
    Ok(Wilcoxon {
        n: diffs.len(),
        w_plus,
        w_minus,
        z,
        p: normal_two_sided_p(z),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub n: usize,
    pub rho: f64,
    /// Two-sided, from the t approximation with n - 2 degrees of freedom.
    pub p: f64,
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<Correlation, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFew {
            needed: 3,
            got: x.len(),
        });
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Degenerate("constant ranks"));
    }
    let rho = (sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0);
    let df = n - 2.0;
    let p = if libm::fabs(rho) >= 1.0 {
        0.0
    } else {
        student_t_two_sided_p(rho * libm::sqrt(df / (1.0 - rho * rho)), df)
    };
    Ok(Correlation {
        n: x.len(),
        rho,
        p,
    })
}
