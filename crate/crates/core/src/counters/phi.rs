use rug::float::Constant;
use rug::Float;

use crate::precision::{precision, ExtReal};

/// Default truncation of the Morse–Thue product.
pub const DEFAULT_PHI_TERMS: u64 = 1 << 16;

/// The Flajolet–Martin bias constant `phi ~ 0.77351`.
#[derive(Clone, Debug, PartialEq)]
pub struct FmConstant {
    value: ExtReal,
    terms_used: u64,
}

impl FmConstant {
    /// Evaluate
    /// `(e^gamma / sqrt 2) * (2/3) * prod_{n=1}^{N} ((4n+1)(4n+2) / (4n(4n+3)))^{eps_n}`
    /// with `eps_n = (-1)^{popcount(n)}` at the working precision.
    pub fn compute(num_product_terms: u64) -> Self {
        let prec = precision() + 32;
        let mut value = Float::with_val(prec, Constant::Euler);
        value.exp_mut();
        value /= Float::with_val(prec, 2).sqrt();
        value *= 2;
        value /= 3;
        let mut factor = Float::new(prec);
        for n in 1..=num_product_terms {
            let n = u128::from(n);
            let num = (4 * n + 1) * (4 * n + 2);
            let den = 4 * n * (4 * n + 3);
            if morse_thue_sign(n as u64) > 0 {
                factor.assign_ratio(num, den);
            } else {
                factor.assign_ratio(den, num);
            }
            value *= &factor;
        }
        value.set_prec(precision());
        Self { value, terms_used: num_product_terms }
    }

    pub fn value(&self) -> &ExtReal {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn terms_used(&self) -> u64 {
        self.terms_used
    }

    /// Whether the value lies in the band `(0.7735, 0.7736)`.
    pub fn is_converged(&self) -> bool {
        self.value > 0.7735 && self.value < 0.7736
    }
}

impl Default for FmConstant {
    fn default() -> Self {
        Self::compute(DEFAULT_PHI_TERMS)
    }
}

/// `(-1)^{number of one bits in n}`.
pub fn morse_thue_sign(n: u64) -> i32 {
    if n.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

trait AssignRatio {
    fn assign_ratio(&mut self, num: u128, den: u128);
}

impl AssignRatio for Float {
    fn assign_ratio(&mut self, num: u128, den: u128) {
        use rug::Assign;
        self.assign(num);
        *self /= den;
    }
}
