use crate::rng::{uniform_f64, BitSource};

/// One draw from the Laplace density `exp(-|x|/scale) / (2 scale)` by
/// inverting the cdf at a uniform in `(0, 1)`.
///
/// # Panics
/// If `scale` is not positive and finite.
pub fn laplace_sample<B: BitSource + ?Sized>(rng: &mut B, scale: f64) -> f64 {
    assert!(scale > 0.0 && scale.is_finite(), "Laplace scale must be positive, got {scale}");
    let u = uniform_f64(rng) - 0.5;
    -scale * u.signum() * (-2.0 * u.abs()).ln_1p()
}
