use serde::{Deserialize, Serialize};

use crate::rng::{bernoulli_pow2, uniform_open_closed, BitSource};

/// Random bits behind each uniform draw of a skip-ahead waiting time.
const SKIP_UNIFORM_BITS: u32 = 128;

/// Morris approximate counter with base 2.
///
/// Starts at level 1; every incrementation request raises the level by one
/// with probability `2^-level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MorrisState {
    level: u32,
    requests_seen: u64,
}

impl Default for MorrisState {
    fn default() -> Self {
        Self::new()
    }
}

impl MorrisState {
    pub fn new() -> Self {
        Self { level: 1, requests_seen: 0 }
    }

    /// A state at a given level, e.g. to replay a released value.
    pub fn with_level(level: u32) -> Self {
        assert!(level >= 1, "Morris level starts at 1");
        Self { level, requests_seen: 0 }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Diagnostic only: estimators never read it.
    pub fn requests_seen(&self) -> u64 {
        self.requests_seen
    }

    /// Feed one datum. `false` is ignored entirely.
    pub fn observe<B: BitSource + ?Sized>(&mut self, datum: bool, rng: &mut B) {
        if !datum {
            return;
        }
        self.requests_seen += 1;
        if bernoulli_pow2(rng, self.level) {
            self.level += 1;
        }
    }

    /// Apply `k` incrementation requests at once.
    ///
    /// The number of requests until the next increment at level `M` is
    /// Geometric(`2^-M`); it is drawn by inverting its cdf on an
    /// extended-precision uniform, so the final level has the same law as
    /// `k` calls to [`observe`](Self::observe) with `true`.
    pub fn skip_batch<B: BitSource + ?Sized>(&mut self, k: u64, rng: &mut B) {
        let mut left = k;
        self.requests_seen += k;
        while left > 0 {
            let wait = geometric_wait(self.level, rng);
            if wait > left {
                break;
            }
            left -= wait;
            self.level += 1;
        }
    }

    /// Unbiased point estimate `2^M - 2` of the number of requests.
    pub fn estimate(&self) -> u128 {
        morris_point_estimate(self.level)
    }
}

/// `2^level - 2`, saturating at `u128::MAX`.
pub fn morris_point_estimate(level: u32) -> u128 {
    if level >= 128 {
        u128::MAX
    } else {
        (1u128 << level) - 2
    }
}

/// Variance `n(n+1)/2` of the estimator `2^{M_n} - 2` at true count `n`.
pub fn morris_estimate_variance(n: u64) -> u128 {
    let n = u128::from(n);
    n * (n + 1) / 2
}

/// Trials until the first success of a `2^-level` Bernoulli sequence.
fn geometric_wait<B: BitSource + ?Sized>(level: u32, rng: &mut B) -> u64 {
    let prec = SKIP_UNIFORM_BITS + 64 + level;
    let u = uniform_open_closed(rng, SKIP_UNIFORM_BITS, prec);
    // W = ceil(ln U / ln(1 - p)), p = 2^-level
    let mut q = rug::Float::with_val(prec, rug::Float::i_exp(1, -(level as i32)));
    q = -q;
    q.ln_1p_mut();
    let mut w = u.ln() / q;
    w.ceil_mut();
    if w < 1 {
        return 1;
    }
    w.to_integer().and_then(|i| i.to_u64()).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RandomSource, ScriptedBits};

    #[test]
    fn false_datum_is_ignored() {
        let mut s = MorrisState::new();
        s.observe(false, &mut ScriptedBits::new([]));
        assert_eq!(s, MorrisState::new());
    }

    #[test]
    fn forced_increment() {
        let mut s = MorrisState::new();
        s.observe(true, &mut ScriptedBits::parse("0"));
        assert_eq!(s.level(), 2);
        assert_eq!(s.requests_seen(), 1);
        s.observe(true, &mut ScriptedBits::parse("01"));
        assert_eq!(s.level(), 2);
    }

    #[test]
    fn point_estimates() {
        assert_eq!(MorrisState::new().estimate(), 0);
        assert_eq!(MorrisState::with_level(5).estimate(), 30);
        assert_eq!(morris_estimate_variance(100), 5050);
    }

    #[test]
    fn empty_batch_is_noop() {
        let mut s = MorrisState::with_level(4);
        let mut rng = RandomSource::new(1);
        s.skip_batch(0, &mut rng);
        assert_eq!(s, MorrisState::with_level(4));
    }

    #[test]
    fn level_never_exceeds_requests_plus_one() {
        let mut rng = RandomSource::new(11);
        let mut s = MorrisState::new();
        for i in 1..=200u64 {
            s.observe(true, &mut rng);
            assert!(u64::from(s.level()) <= i + 1);
        }
        let mut b = MorrisState::new();
        b.skip_batch(3, &mut rng);
        assert!(b.level() <= 4);
    }
}
