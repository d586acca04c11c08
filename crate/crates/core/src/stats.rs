//! Goodness-of-fit helpers for Monte Carlo checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Result of a Pearson chi-square goodness-of-fit test.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// number of cells after pooling
    pub cells: usize,
}

impl ChiSquareTest {
    /// Accept at significance `alpha` (e.g. 0.01 for 99% confidence).
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson chi-square of `observed` counts against cell probabilities.
///
/// Adjacent cells are pooled left to right until each expected count is at
/// least `min_expected`; a short remainder joins the last pooled cell. Any
/// probability mass not covered by `probs` is added as one extra cell with
/// zero observations.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquareTest> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::domain("observed counts and probabilities must have equal, non-zero length"));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::domain("no observations"));
    }
    let total = total as f64;
    let mut cells: Vec<(f64, f64)> = observed.iter().zip(probs).map(|(&o, &p)| (o as f64, p * total)).collect();
    let missing = 1.0 - probs.iter().sum::<f64>();
    if missing * total > 1e-9 {
        cells.push((0.0, missing * total));
    }
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in cells {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= min_expected {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    if pooled.len() < 2 {
        return Err(Error::domain("fewer than two cells after pooling"));
    }
    let statistic: f64 = pooled.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::domain(e.to_string()))?;
    Ok(ChiSquareTest { statistic, dof, p_value: dist.sf(statistic), cells: pooled.len() })
}

/// Mean, unbiased sample variance and standard error of the mean.
pub fn mean_variance(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var, (var / n).sqrt())
}
