//! Extended-precision reals and the working-precision setting.
//!
//! All extended-precision quantities are MPFR floats. The working precision
//! is a process-wide default (256 bits unless changed) that a thread can
//! temporarily override with [`with_precision`], which is how tests
//! re-validate results at higher precision without racing each other.

use std::cell::Cell;
use std::sync::atomic::{AtomicU32, Ordering};

use rug::float::Round;
use rug::Float;

/// Extended-precision real number.
pub type ExtReal = Float;

/// Default mantissa width in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Smallest accepted working precision.
pub const MIN_PRECISION: u32 = 64;

static GLOBAL_PRECISION: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION);

thread_local! {
    static LOCAL_PRECISION: Cell<Option<u32>> = const { Cell::new(None) };
}

/// Current working precision in bits.
pub fn precision() -> u32 {
    LOCAL_PRECISION
        .with(Cell::get)
        .unwrap_or_else(|| GLOBAL_PRECISION.load(Ordering::Relaxed))
}

/// Set the process-wide default precision. Values below [`MIN_PRECISION`]
/// are raised to it.
pub fn set_precision(bits: u32) {
    GLOBAL_PRECISION.store(bits.max(MIN_PRECISION), Ordering::Relaxed);
}

/// Run `f` with the working precision of the current thread set to `bits`.
pub fn with_precision<T>(bits: u32, f: impl FnOnce() -> T) -> T {
    struct Restore(Option<u32>);
    impl Drop for Restore {
        fn drop(&mut self) {
            LOCAL_PRECISION.with(|p| p.set(self.0));
        }
    }
    let _restore = Restore(LOCAL_PRECISION.with(|p| p.replace(Some(bits.max(MIN_PRECISION)))));
    f()
}

/// Approximate number of reliable decimal digits at the current precision.
pub fn precision_digits() -> u32 {
    (f64::from(precision()) * std::f64::consts::LOG10_2).floor() as u32
}

pub(crate) fn ext_u64(value: u64) -> ExtReal {
    Float::with_val(precision(), value)
}

/// `2^exp` as an exact extended real.
pub(crate) fn pow2(exp: i64, prec: u32) -> ExtReal {
    let exp = i32::try_from(exp).expect("power of two exponent out of range");
    Float::with_val(prec, Float::i_exp(1, exp))
}

/// Round towards +inf into an `f64`.
pub fn round_up(x: &ExtReal) -> f64 {
    x.to_f64_round(Round::Up)
}

/// Round towards -inf into an `f64`.
pub fn round_down(x: &ExtReal) -> f64 {
    x.to_f64_round(Round::Down)
}

/// Format with `digits` significant decimal digits.
///
/// Magnitudes in `[1e-10, 1e15)` are written positionally (`0.0000305176`),
/// everything else in scientific notation (`9.62050000000000e-24`).
pub fn format_sig(x: &ExtReal, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_zero() {
        return "0".to_owned();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.to_owned();
    }
    if x.is_nan() {
        return "nan".to_owned();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    // value = 0.<mantissa> * 10^exp
    let exp = exp.expect("finite non-zero value has an exponent");
    let sci_exp = exp - 1;
    let sign = if neg { "-" } else { "" };
    if (-10..15).contains(&sci_exp) {
        let body = if exp <= 0 {
            format!("0.{}{}", "0".repeat((-exp) as usize), mantissa)
        } else if exp as usize >= mantissa.len() {
            format!("{}{}", mantissa, "0".repeat(exp as usize - mantissa.len()))
        } else {
            let (int, frac) = mantissa.split_at(exp as usize);
            format!("{int}.{frac}")
        };
        format!("{sign}{body}")
    } else {
        let (lead, rest) = mantissa.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{sci_exp}")
        } else {
            format!("{sign}{lead}.{rest}e{sci_exp}")
        }
    }
}

/// [`format_sig`] for machine doubles.
pub fn format_sig_f64(x: f64, digits: usize) -> String {
    format_sig(&Float::with_val(53, x), digits)
}
