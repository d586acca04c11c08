//! Differential-privacy parameters of the counters.

mod maxgeo;
mod morris;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use maxgeo::{
    maxgeo_dp_check, maxgeo_eps_given_n, maxgeo_envelope_rows, maxgeo_l_epsilon,
    maxgeo_l_epsilon_with, maxgeo_min_n, maxgeo_min_n_with, EnvelopeRow, LEpsilonRule,
    MaxGeoAudit, MaxGeoCheck, MaxGeoEnvelope,
};
pub use morris::{
    epsilon_curve_rows, morris_asymptotic_params, morris_audit, morris_bound_l, morris_bound_l_ext,
    morris_epsilon_exact, morris_epsilon_exact_with, morris_lower_curve_ext, AsymptoticParams,
    Direction, EpsilonExact, EpsilonCurveRow, MorrisAudit, MorrisReport, MORRIS_MIN_N,
};

/// An `(epsilon, delta)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl DpParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::domain(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::domain(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    /// Whether `self` is at least as strong a guarantee as `other`.
    pub fn is_within(&self, other: &DpParams) -> bool {
        self.epsilon <= other.epsilon && self.delta <= other.delta
    }
}

/// Parallel composition over disjoint data: componentwise maximum.
pub fn parallel_compose(params: &[DpParams]) -> Result<DpParams> {
    let (first, rest) = params
        .split_first()
        .ok_or_else(|| Error::domain("parallel composition of an empty sequence"))?;
    Ok(rest.iter().fold(*first, |acc, p| DpParams {
        epsilon: acc.epsilon.max(p.epsilon),
        delta: acc.delta.max(p.delta),
    }))
}

/// Laplace scale `lambda = 1 / epsilon` for a sensitivity-1 counting query.
pub fn laplace_scale(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::domain(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    Ok(1.0 / epsilon)
}

/// Inverse of [`laplace_scale`].
pub fn laplace_epsilon(scale: f64) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::domain(format!("Laplace scale must be positive and finite, got {scale}")));
    }
    Ok(1.0 / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_takes_maxima() {
        let a = DpParams::new(0.5, 1e-6).unwrap();
        let b = DpParams::new(0.3, 1e-5).unwrap();
        assert_eq!(parallel_compose(&[a, b]).unwrap(), DpParams { epsilon: 0.5, delta: 1e-5 });
        assert_eq!(parallel_compose(&[b, a]).unwrap(), parallel_compose(&[a, b]).unwrap());
        assert_eq!(parallel_compose(&[a]).unwrap(), a);
        assert!(parallel_compose(&[]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(DpParams::new(-0.1, 0.0).is_err());
        assert!(DpParams::new(0.1, 1.0).is_err());
        assert!(DpParams::new(f64::NAN, 0.0).is_err());
        assert!(DpParams::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn laplace_calibration() {
        assert_eq!(laplace_scale(16.0 / 160.0).unwrap(), 10.0);
        let lambda = 200.0 / 16.0;
        assert_eq!(laplace_scale(laplace_epsilon(lambda).unwrap()).unwrap(), lambda);
        assert!(laplace_scale(0.0).is_err());
        assert!(laplace_epsilon(-1.0).is_err());
    }
}
