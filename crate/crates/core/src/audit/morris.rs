use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::audit::DpParams;
use crate::dist::{ceil_log2, interval_in, interval_jn, jn_radius, morris_pmf, morris_tail_jn, morris_tails, Interval};
use crate::error::{Error, Result};
use crate::precision::{precision, round_down, round_up, with_precision, ExtReal};

/// Smallest `n` for which the Morris privacy loss is audited.
pub const MORRIS_MIN_N: u64 = 17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `p_{n+1,k} / p_{n,k}`
    Forward,
    /// `p_{n-1,k} / p_{n,k}`
    Backward,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonExact {
    pub epsilon: ExtReal,
    pub argmax_k: u64,
    pub direction: Direction,
}

fn check_min_n(n: u64) -> Result<()> {
    if n < MORRIS_MIN_N {
        return Err(Error::domain(format!(
            "Morris privacy loss is audited for n >= {MORRIS_MIN_N}, got n = {n}"
        )));
    }
    Ok(())
}

/// Maximal privacy loss over `I_n`, forward ratios everywhere and backward
/// ratios when `n - 1` is a power of two.
pub fn morris_epsilon_exact(n: u64) -> Result<EpsilonExact> {
    morris_epsilon_exact_with(n, false)
}

/// As [`morris_epsilon_exact`]; with `strict` the backward ratios are
/// included for every `n`.
pub fn morris_epsilon_exact_with(n: u64, strict: bool) -> Result<EpsilonExact> {
    check_min_n(n)?;
    let interval = interval_in(n)?;
    let backward = strict || (n - 1).is_power_of_two();
    let prec = precision();
    let mut best: Option<EpsilonExact> = None;
    let mut consider = |num: ExtReal, den: &ExtReal, k: u64, direction: Direction| {
        let loss = Float::with_val(prec, &num / den).ln().abs();
        if best.as_ref().map_or(true, |b| loss > b.epsilon) {
            best = Some(EpsilonExact { epsilon: loss, argmax_k: k, direction });
        }
    };
    for k in interval.iter() {
        let p = morris_pmf(n, k as i64);
        consider(morris_pmf(n + 1, k as i64), &p, k, Direction::Forward);
        if backward {
            consider(morris_pmf(n - 1, k as i64), &p, k, Direction::Backward);
        }
    }
    Ok(best.expect("I_n is never empty"))
}

fn check_bound_domain(n: u64) -> Result<()> {
    if n <= 16 {
        return Err(Error::domain(format!("L(n) = -ln(1 - 16/n) needs n > 16, got n = {n}")));
    }
    Ok(())
}

/// `L(n) = -ln(1 - 16/n)`.
pub fn morris_bound_l(n: u64) -> Result<f64> {
    check_bound_domain(n)?;
    Ok(-(-16.0 / n as f64).ln_1p())
}

fn neg_ln_one_minus(num: u32, n: u64) -> ExtReal {
    let prec = precision();
    let mut x = Float::with_val(prec, num);
    x /= n;
    x = -x;
    -x.ln_1p()
}

/// `L(n)` at working precision, for exact comparisons.
pub fn morris_bound_l_ext(n: u64) -> Result<ExtReal> {
    check_bound_domain(n)?;
    Ok(neg_ln_one_minus(16, n))
}

/// `-ln(1 - 8/n)` at working precision.
pub fn morris_lower_curve_ext(n: u64) -> Result<ExtReal> {
    if n <= 8 {
        return Err(Error::domain(format!("-ln(1 - 8/n) needs n > 8, got n = {n}")));
    }
    Ok(neg_ln_one_minus(8, n))
}

/// Exact privacy loss, the `L(n)` bound and the tail masses for one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MorrisAudit {
    pub n: u64,
    pub interval: Interval,
    pub epsilon_exact: ExtReal,
    /// `L(n)` rounded up
    pub epsilon_bound: f64,
    pub delta1: ExtReal,
    pub delta2: ExtReal,
    pub delta_total: ExtReal,
    pub argmax_k: u64,
    pub direction: Direction,
}

impl MorrisAudit {
    /// The guarantee the audit supports, rounded outward.
    pub fn dp_claim(&self) -> DpParams {
        DpParams {
            epsilon: round_up(&self.epsilon_exact).min(self.epsilon_bound),
            delta: round_up(&self.delta_total),
        }
    }

    pub fn report(&self) -> MorrisReport {
        MorrisReport {
            mechanism: "morris".into(),
            n: self.n,
            epsilon_exact: round_up(&self.epsilon_exact),
            epsilon_bound: self.epsilon_bound,
            delta1: round_up(&self.delta1),
            delta2: round_up(&self.delta2),
            delta: round_up(&self.delta_total),
            interval: self.interval,
            argmax_k: self.argmax_k,
            direction: self.direction,
        }
    }
}

/// Serialized form of a [`MorrisAudit`]; extended values rounded up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorrisReport {
    pub mechanism: String,
    pub n: u64,
    pub epsilon_exact: f64,
    pub epsilon_bound: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta: f64,
    pub interval: Interval,
    pub argmax_k: u64,
    pub direction: Direction,
}

pub fn morris_audit(n: u64) -> Result<MorrisAudit> {
    let eps = morris_epsilon_exact(n)?;
    let tails = morris_tails(n)?;
    Ok(MorrisAudit {
        n,
        interval: interval_in(n)?,
        epsilon_exact: eps.epsilon,
        epsilon_bound: round_up(&morris_bound_l_ext(n)?),
        delta1: tails.delta1,
        delta2: tails.delta2,
        delta_total: tails.delta_total,
        argmax_k: eps.argmax_k,
        direction: eps.direction,
    })
}

/// Envelope of the privacy loss over `J_n(c)` with the exact mass outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticParams {
    pub n: u64,
    pub c: f64,
    pub rho: u64,
    pub interval: Interval,
    pub epsilon_bound: f64,
    pub delta_exact: ExtReal,
}

/// `max(-ln(1 - 2^{rho - ceil(log2 n)}), ln(1 + (ceil(log2 n) + rho)^2 / n))`
/// and `P(M_n not in J_n(c))`.
pub fn morris_asymptotic_params(n: u64, c: f64) -> Result<AsymptoticParams> {
    let rho = jn_radius(n, c)?;
    let center = u64::from(ceil_log2(n));
    if rho >= center {
        return Err(Error::domain(format!(
            "envelope needs rho < ceil(log2 n) (rho = {rho}, ceil(log2 n) = {center})"
        )));
    }
    let low = -(-(2f64.powi(rho as i32 - center as i32))).ln_1p();
    let top = (center + rho) as f64;
    let high = (top * top / n as f64).ln_1p();
    Ok(AsymptoticParams {
        n,
        c,
        rho,
        interval: interval_jn(n, c)?,
        epsilon_bound: low.max(high),
        delta_exact: morris_tail_jn(n, c)?,
    })
}

/// One line of the privacy-loss curve data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCurveRow {
    pub n: u64,
    /// exact loss, rounded up
    pub epsilon_exact: f64,
    /// `-ln(1 - 8/n)`, rounded down
    pub lower_curve: f64,
    /// `-ln(1 - 16/n)`, rounded up
    pub upper_curve: f64,
}

/// Curve data for every `n` in `[lo : hi]`, evaluated in parallel.
pub fn epsilon_curve_rows(lo: u64, hi: u64) -> Result<Vec<EpsilonCurveRow>> {
    check_min_n(lo)?;
    if lo > hi {
        return Err(Error::domain(format!("empty range {lo}:{hi}")));
    }
    let prec = precision();
    (lo..=hi)
        .into_par_iter()
        .map(|n| {
            with_precision(prec, || {
                Ok(EpsilonCurveRow {
                    n,
                    epsilon_exact: round_up(&morris_epsilon_exact(n)?.epsilon),
                    lower_curve: round_down(&morris_lower_curve_ext(n)?),
                    upper_curve: round_up(&morris_bound_l_ext(n)?),
                })
            })
        })
        .collect()
}
