use rug::Float;
use serde::{Deserialize, Serialize};

use crate::dist::{ceil_log2, maxgeo_cdf, maxgeo_pmf};
use crate::error::{Error, Result};
use crate::precision::{precision, ExtReal};

/// How the threshold level `l_eps` is derived from `epsilon`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LEpsilonRule {
    /// `ceil(log2(e^eps / (e^eps - 1)))`, the smallest `l` with
    /// `ln(1 + 1/(2^l - 1)) <= eps`.
    #[default]
    Exact,
    /// `ceil(log2(1 + 1/eps))`, a coarser variant that is never smaller.
    Compat,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::domain(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `ln(1 + 1/(2^l - 1)) = -ln(1 - 2^-l)`
fn level_loss(l: u32) -> f64 {
    -(-(0.5f64.powi(l as i32))).ln_1p()
}

pub fn maxgeo_l_epsilon(epsilon: f64) -> Result<u32> {
    maxgeo_l_epsilon_with(epsilon, LEpsilonRule::Exact)
}

pub fn maxgeo_l_epsilon_with(epsilon: f64, rule: LEpsilonRule) -> Result<u32> {
    check_epsilon(epsilon)?;
    match rule {
        LEpsilonRule::Exact => {
            // e^eps / (e^eps - 1) = 1 / (1 - e^-eps)
            let x = -1.0 / (-epsilon).exp_m1();
            let mut l = (x.log2().ceil() as u32).max(1);
            while l > 1 && level_loss(l - 1) <= epsilon {
                l -= 1;
            }
            while level_loss(l) > epsilon {
                l += 1;
            }
            Ok(l)
        }
        LEpsilonRule::Compat => Ok(((1.0 + 1.0 / epsilon).log2().ceil() as u32).max(1)),
    }
}

pub fn maxgeo_min_n(epsilon: f64, delta: f64) -> Result<u64> {
    maxgeo_min_n_with(epsilon, delta, LEpsilonRule::Exact)
}

/// `ceil(ln delta / ln(1 - 2^-l_eps))`, at least 1.
pub fn maxgeo_min_n_with(epsilon: f64, delta: f64, rule: LEpsilonRule) -> Result<u64> {
    check_delta(delta)?;
    let l = maxgeo_l_epsilon_with(epsilon, rule)?;
    let denom = (-(0.5f64.powi(l as i32))).ln_1p();
    Ok(((delta.ln() / denom).ceil() as u64).max(1))
}

/// `eps0`, `psi` and `phi` for `n` requests at tail mass `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxGeoEnvelope {
    pub n: u64,
    pub delta: f64,
    /// `floor(-log2(1 - delta^{1/n}))`
    pub exponent: u32,
    pub eps0: f64,
    pub psi: f64,
    /// `+inf` when `exponent = 1`
    pub phi_bound: f64,
}

/// `eps0 = 1 / (2^e - 1)` with `e = floor(-log2(1 - delta^{1/n}))`,
/// `psi = (1 - q) / q` with `q = delta^{1/n}`, and `phi = 1 / (2^{e-1} - 1)`.
pub fn maxgeo_eps_given_n(n: u64, delta: f64) -> Result<MaxGeoEnvelope> {
    check_delta(delta)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let t = delta.ln() / n as f64;
    let one_minus_q = -t.exp_m1();
    let q = t.exp();
    let x = -one_minus_q.log2();
    let exponent = x.floor();
    if exponent < 1.0 {
        return Err(Error::domain(format!(
            "eps0 undefined for n = {n}, delta = {delta}: 1 - delta^(1/n) = {one_minus_q:.6} exceeds 1/2, \
             so floor(-log2(1 - delta^(1/n))) = {exponent} < 1; n must be at least log2(1/delta) = {:.3}",
            -delta.log2()
        )));
    }
    let e = exponent as i32;
    let phi_bound = if e == 1 { f64::INFINITY } else { 1.0 / (2f64.powi(e - 1) - 1.0) };
    Ok(MaxGeoEnvelope {
        n,
        delta,
        exponent: e as u32,
        eps0: 1.0 / (2f64.powi(e) - 1.0),
        psi: one_minus_q / q,
        phi_bound,
    })
}

/// Either of the two MaxGeo queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "query", rename_all = "snake_case")]
pub enum MaxGeoAudit {
    MinN {
        epsilon_requested: f64,
        delta_requested: f64,
        rule: LEpsilonRule,
        l_epsilon: u32,
        n_min: u64,
    },
    GivenN(MaxGeoEnvelope),
}

impl MaxGeoAudit {
    pub fn min_n(epsilon: f64, delta: f64, rule: LEpsilonRule) -> Result<Self> {
        Ok(MaxGeoAudit::MinN {
            epsilon_requested: epsilon,
            delta_requested: delta,
            rule,
            l_epsilon: maxgeo_l_epsilon_with(epsilon, rule)?,
            n_min: maxgeo_min_n_with(epsilon, delta, rule)?,
        })
    }

    pub fn given_n(n: u64, delta: f64) -> Result<Self> {
        Ok(MaxGeoAudit::GivenN(maxgeo_eps_given_n(n, delta)?))
    }
}

/// Numerical verification of the MaxGeo guarantee at `n_min`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxGeoCheck {
    pub l_epsilon: u32,
    pub n_min: u64,
    /// `P(M_{n_min} <= l_eps)`
    pub cdf_tail: ExtReal,
    /// largest `|ln(pmf(n,l) / pmf(n+1,l))|` over the checked levels `l > l_eps`
    pub max_log_ratio: ExtReal,
    /// level at which `max_log_ratio` is attained
    pub worst_level: u64,
    pub cdf_ok: bool,
    pub ratio_ok: bool,
}

impl MaxGeoCheck {
    pub fn holds(&self) -> bool {
        self.cdf_ok && self.ratio_ok
    }
}

/// Checks that at `n = n_min` the mass at or below `l_eps` is at most
/// `delta` and that above `l_eps` the pmf ratios of neighbouring `n` stay
/// within `e^{±eps}`. Levels are scanned up to `ceil(log2 n) + prec`, beyond
/// which the ratio is `n/(n+1)` to working precision.
pub fn maxgeo_dp_check(epsilon: f64, delta: f64) -> Result<MaxGeoCheck> {
    let l_epsilon = maxgeo_l_epsilon(epsilon)?;
    let n_min = maxgeo_min_n(epsilon, delta)?;
    let prec = precision();
    let cdf_tail = maxgeo_cdf(n_min, u64::from(l_epsilon));
    let cdf_ok = cdf_tail <= Float::with_val(prec, delta);
    let top = u64::from(ceil_log2(n_min + 1)) + u64::from(prec);
    let mut max_log_ratio = Float::new(prec);
    let mut worst_level = u64::from(l_epsilon) + 1;
    for l in u64::from(l_epsilon) + 1..=top {
        let r = Float::with_val(prec, maxgeo_pmf(n_min, l) / maxgeo_pmf(n_min + 1, l)).ln().abs();
        if r > max_log_ratio {
            max_log_ratio = r;
            worst_level = l;
        }
    }
    let ratio_ok = max_log_ratio <= Float::with_val(prec, epsilon);
    Ok(MaxGeoCheck { l_epsilon, n_min, cdf_tail, max_log_ratio, worst_level, cdf_ok, ratio_ok })
}

/// One line of the Morris/MaxGeo comparison curve data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub n: u64,
    pub morris_eps: f64,
    pub maxgeo_eps0: f64,
    pub psi: f64,
    pub phi: f64,
}

/// Curve data over `[lo : hi]`; `morris_eps` is the exact Morris loss
/// (rounded up), the rest come from [`maxgeo_eps_given_n`].
pub fn maxgeo_envelope_rows(lo: u64, hi: u64, delta: f64) -> Result<Vec<EnvelopeRow>> {
    use rayon::prelude::*;
    if lo > hi {
        return Err(Error::domain(format!("empty range {lo}:{hi}")));
    }
    let prec = precision();
    (lo..=hi)
        .into_par_iter()
        .map(|n| {
            crate::precision::with_precision(prec, || {
                let env = maxgeo_eps_given_n(n, delta)?;
                let morris = super::morris_epsilon_exact(n)?;
                Ok(EnvelopeRow {
                    n,
                    morris_eps: crate::precision::round_up(&morris.epsilon),
                    maxgeo_eps0: env.eps0,
                    psi: env.psi,
                    phi: env.phi_bound,
                })
            })
        })
        .collect()
}
