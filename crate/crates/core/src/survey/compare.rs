use serde::{Deserialize, Serialize};

use crate::audit::{maxgeo_eps_given_n, morris_bound_l, DpParams};
use crate::error::{Error, Result};

/// Tail mass used for both counters in the comparison.
pub const COMPARISON_DELTA: f64 = 0.00033;

/// One column of the aggregation-method comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub dp: DpParams,
    /// the closed-form epsilon approximation usually quoted for the method
    pub epsilon_approx: f64,
    pub estimator: String,
    pub variance: f64,
    /// `log2 n` for exact counts, `log2 log2 n` for the counters (no `O(1)` term)
    pub memory_bits: f64,
}

/// Laplace, Morris and MaxGeo side by side for `n` true answers.
///
/// The Morris epsilon is `-ln(1 - 16/n)`; its usual approximation
/// `16/(n - 8)` is kept in `epsilon_approx` and falls slightly below it.
/// The MaxGeo epsilon is `eps0(n, delta)`.
pub fn comparison_table(n: u64) -> Result<Vec<ComparisonRow>> {
    if n <= 16 {
        return Err(Error::domain(format!("comparison needs n > 16, got n = {n}")));
    }
    let nf = n as f64;
    let loglog = nf.log2().log2();
    let maxgeo = maxgeo_eps_given_n(n, COMPARISON_DELTA)?;
    Ok(vec![
        ComparisonRow {
            method: "laplace".into(),
            dp: DpParams::new(16.0 / nf, 0.0)?,
            epsilon_approx: 16.0 / nf,
            estimator: "n + Laplace(n/16)".into(),
            variance: nf * nf / 128.0,
            memory_bits: nf.log2(),
        },
        ComparisonRow {
            method: "morris".into(),
            dp: DpParams::new(morris_bound_l(n)?, COMPARISON_DELTA)?,
            epsilon_approx: 16.0 / (nf - 8.0),
            estimator: "2^M - 2".into(),
            variance: (nf * nf + nf) / 2.0,
            memory_bits: loglog,
        },
        ComparisonRow {
            method: "maxgeo".into(),
            dp: DpParams::new(maxgeo.eps0, COMPARISON_DELTA)?,
            epsilon_approx: 16.033 / nf,
            estimator: "floor(2^M / phi)".into(),
            variance: 0.61 * nf * nf,
            memory_bits: loglog,
        },
    ])
}
