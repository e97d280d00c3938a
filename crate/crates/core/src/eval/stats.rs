//! Sign-test statistics for win/loss counts.

use statrs::function::beta::inv_beta_reg;
use statrs::function::factorial::ln_binomial;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("no decided comparisons (wins + losses = 0)")]
    NoComparisons,
    #[error("alpha must lie in (0, 1), got {0}")]
    Alpha(f64),
}

/// Exact one-tailed sign-test p-value: `P(X >= wins)` for
/// `X ~ Binomial(wins + losses, 1/2)`. Returns 1 when there are no trials.
pub fn binomial_test(wins: u64, losses: u64) -> f64 {
    let n = wins + losses;
    if n == 0 {
        return 1.0;
    }
    let ln_half_n = n as f64 * 0.5f64.ln();
    let p: f64 = (wins..=n).map(|k| (ln_binomial(n, k) + ln_half_n).exp()).sum();
    p.min(1.0)
}

/// One-sided `1 - alpha` Clopper-Pearson lower bound on the win proportion:
/// the `alpha` quantile of `Beta(wins, losses + 1)`.
pub fn ci_lower(wins: u64, losses: u64, alpha: f64) -> Result<f64, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::Alpha(alpha));
    }
    let n = wins + losses;
    if n == 0 {
        return Err(StatsError::NoComparisons);
    }
    if wins == 0 {
        return Ok(0.0);
    }
    if losses == 0 {
        return Ok(alpha.powf(1.0 / n as f64));
    }
    Ok(inv_beta_reg(wins as f64, (losses + 1) as f64, alpha))
}
