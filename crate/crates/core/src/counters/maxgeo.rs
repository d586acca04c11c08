use serde::{Deserialize, Serialize};

use crate::counters::phi::FmConstant;
use crate::rng::{geometric_half, BitSource};

/// Maximum of i.i.d. Geometric(1/2) draws, one per incrementation request.
/// The initial level is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MaxGeoState {
    level: u32,
    requests_seen: u64,
}

impl Default for MaxGeoState {
    fn default() -> Self {
        Self::new()
    }
}

impl MaxGeoState {
    pub fn new() -> Self {
        Self { level: 1, requests_seen: 0 }
    }

    pub fn with_level(level: u32) -> Self {
        assert!(level >= 1, "MaxGeo level starts at 1");
        Self { level, requests_seen: 0 }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn requests_seen(&self) -> u64 {
        self.requests_seen
    }

    pub fn observe<B: BitSource + ?Sized>(&mut self, datum: bool, rng: &mut B) {
        if !datum {
            return;
        }
        self.requests_seen += 1;
        self.absorb(geometric_half(rng));
    }

    pub(crate) fn absorb(&mut self, draw: u64) {
        let draw = u32::try_from(draw).unwrap_or(u32::MAX);
        self.level = self.level.max(draw);
    }

    /// Union of two counters: the larger level and the summed request count.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            level: self.level.max(other.level),
            requests_seen: self.requests_seen + other.requests_seen,
        }
    }

    /// `floor(2^M / phi)`.
    pub fn estimate(&self, phi: &FmConstant) -> u128 {
        let prec = phi.value().prec().max(64) + self.level;
        let mut x = rug::Float::with_val(prec, rug::Float::i_exp(1, self.level as i32));
        x /= phi.value();
        x.floor_mut();
        x.to_integer().and_then(|i| i.to_u128()).unwrap_or(u128::MAX)
    }
}
