use alloc::vec::Vec;

use super::descriptive::sample_sd;
use super::StatsError;

/// Cronbach's alpha over one construct's item columns.
///
/// `items[j][i]` is participant `i`'s score on item `j`. Uses n - 1
/// variances. Zero variance of the participant totals is reported as
/// [`StatsError::Degenerate`].
pub fn cronbach_alpha<C: AsRef<[f64]>>(items: &[C]) -> Result<f64, StatsError> {
    let k = items.len();
    if k < 2 {
        return Err(StatsError::TooFew { needed: 2, got: k });
    }
    let n = items[0].as_ref().len();
    if let Some(col) = items.iter().find(|c| c.as_ref().len() != n) {
        return Err(StatsError::LengthMismatch(n, col.as_ref().len()));
    }
    if n < 2 {
        return Err(StatsError::TooFew { needed: 2, got: n });
    }
    let variance = |v: &[f64]| sample_sd(v).map(|sd| sd * sd);
    let item_var: f64 = items
        .iter()
        .map(|c| variance(c.as_ref()))
        .sum::<Result<f64, _>>()?;
    let totals: Vec<f64> = (0..n)
        .map(|i| items.iter().map(|c| c.as_ref()[i]).sum())
        .collect();
    let total_var = variance(&totals)?;
    if total_var == 0.0 {
        return Err(StatsError::Degenerate("zero variance of participant totals"));
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var / total_var))
}
