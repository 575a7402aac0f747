use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::descriptive::{quantile_sorted, sorted};
use super::StatsError;

/// Percentile bootstrap confidence interval for the mean.
///
/// Draws `resamples` samples with replacement from a ChaCha8 stream seeded
/// with `seed`, so the interval is bit-for-bit reproducible.
pub fn bootstrap_ci(
    values: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64), StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    if resamples == 0 {
        return Err(StatsError::Parameter("resamples must be at least 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::Parameter("level must be in (0, 1)"));
    }
    let n = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    let means = sorted(&means);
    let tail = (1.0 - level) / 2.0;
    Ok((
        quantile_sorted(&means, tail),
        quantile_sorted(&means, 1.0 - tail),
    ))
}
