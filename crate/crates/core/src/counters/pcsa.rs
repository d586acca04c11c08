use serde::{Deserialize, Serialize};

use crate::counters::phi::FmConstant;
use crate::error::{Error, Result};
use crate::rng::{geometric_half, BitSource};

/// `m = 2^k` MaxGeo registers with uniformly random lot assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterArray {
    log2_lots: u32,
    registers: Vec<u32>,
    requests_seen: u64,
}

impl RegisterArray {
    fn new(lots: usize) -> Result<Self> {
        if lots < 2 || !lots.is_power_of_two() {
            return Err(Error::domain(format!(
                "lot count must be a power of two >= 2, got {lots}"
            )));
        }
        Ok(Self {
            log2_lots: lots.trailing_zeros(),
            registers: vec![1; lots],
            requests_seen: 0,
        })
    }

    fn from_levels(levels: Vec<u32>) -> Result<Self> {
        let mut arr = Self::new(levels.len())?;
        if levels.iter().any(|&l| l == 0) {
            return Err(Error::domain("register levels start at 1"));
        }
        arr.registers = levels;
        Ok(arr)
    }

    fn observe<B: BitSource + ?Sized>(&mut self, datum: bool, rng: &mut B) {
        if !datum {
            return;
        }
        self.requests_seen += 1;
        let lot = rng.next_bits(self.log2_lots) as usize;
        let draw = u32::try_from(geometric_half(rng)).unwrap_or(u32::MAX);
        let reg = &mut self.registers[lot];
        *reg = (*reg).max(draw);
    }

    pub fn lots(&self) -> usize {
        self.registers.len()
    }

    pub fn registers(&self) -> &[u32] {
        &self.registers
    }

    pub fn requests_seen(&self) -> u64 {
        self.requests_seen
    }

    /// Sum of all register levels.
    pub fn sigma(&self) -> u64 {
        self.registers.iter().map(|&r| u64::from(r)).sum()
    }
}

/// Probabilistic Counting with Stochastic Averaging over MaxGeo registers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PcsaState {
    array: RegisterArray,
}

impl PcsaState {
    /// `lots` must be a power of two, at least 2.
    pub fn new(lots: usize) -> Result<Self> {
        Ok(Self { array: RegisterArray::new(lots)? })
    }

    pub fn from_levels(levels: Vec<u32>) -> Result<Self> {
        Ok(Self { array: RegisterArray::from_levels(levels)? })
    }

    pub fn observe<B: BitSource + ?Sized>(&mut self, datum: bool, rng: &mut B) {
        self.array.observe(datum, rng);
    }

    pub fn registers(&self) -> &RegisterArray {
        &self.array
    }

    /// `floor((m / phi) * 2^(sigma / m))`, evaluated in extended precision.
    pub fn estimate(&self, phi: &FmConstant) -> u128 {
        let m = self.array.lots() as u64;
        let prec = phi.value().prec().max(64) + 64;
        let mut exp = rug::Float::with_val(prec, self.array.sigma());
        exp /= m;
        exp.exp2_mut();
        exp *= m;
        exp /= phi.value();
        exp.floor_mut();
        exp.to_integer().and_then(|i| i.to_u128()).unwrap_or(u128::MAX)
    }
}

/// HyperLogLog's raw harmonic-mean estimator over the same register array.
/// Only `m = 2^k` with `k >= 4` is accepted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HllState {
    array: RegisterArray,
    alpha: f64,
}

impl HllState {
    pub fn new(lots: usize) -> Result<Self> {
        let alpha = hll_alpha(lots)?;
        Ok(Self { array: RegisterArray::new(lots)?, alpha })
    }

    pub fn from_levels(levels: Vec<u32>) -> Result<Self> {
        let alpha = hll_alpha(levels.len())?;
        Ok(Self { array: RegisterArray::from_levels(levels)?, alpha })
    }

    pub fn observe<B: BitSource + ?Sized>(&mut self, datum: bool, rng: &mut B) {
        self.array.observe(datum, rng);
    }

    pub fn registers(&self) -> &RegisterArray {
        &self.array
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `alpha_m * m^2 / sum_j 2^-M[j]`, without range corrections.
    pub fn estimate(&self) -> f64 {
        let m = self.array.lots() as f64;
        let harmonic: f64 = self
            .array
            .registers()
            .iter()
            .map(|&r| 2f64.powi(-(r.min(1074) as i32)))
            .sum();
        self.alpha * m * m / harmonic
    }
}

/// Bias-correction constant for `lots = 2^k`, `k >= 4`.
pub fn hll_alpha(lots: usize) -> Result<f64> {
    if !lots.is_power_of_two() || lots < 16 {
        return Err(Error::domain(format!(
            "HyperLogLog needs m = 2^k with k >= 4, got m = {lots}"
        )));
    }
    Ok(match lots {
        16 => 0.673,
        32 => 0.697,
        64 => 0.709,
        m => 0.7213 / (1.0 + 1.079 / m as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ScriptedBits;

    #[test]
    fn rejects_bad_lot_counts() {
        assert!(PcsaState::new(1).is_err());
        assert!(PcsaState::new(6).is_err());
        assert!(HllState::new(8).is_err());
        assert!(HllState::new(16).is_ok());
    }

    #[test]
    fn forced_lot_and_draw() {
        let mut s = PcsaState::new(2).unwrap();
        s.observe(true, &mut ScriptedBits::parse("0 001"));
        assert_eq!(s.registers().registers(), &[3, 1]);
        let before = s.clone();
        s.observe(false, &mut ScriptedBits::new([]));
        assert_eq!(s, before);
    }

    #[test]
    fn pcsa_direct_evaluations() {
        let phi = FmConstant::compute(1 << 12);
        assert_eq!(PcsaState::new(4).unwrap().estimate(&phi), 10);
        assert_eq!(PcsaState::from_levels(vec![1, 3]).unwrap().estimate(&phi), 10);
    }

    #[test]
    fn hll_direct_evaluations() {
        let h = HllState::new(16).unwrap();
        assert!((h.estimate() - 21.536).abs() < 1e-9);
        for (m, r) in [(16usize, 5u32), (64, 9), (256, 3)] {
            let h = HllState::from_levels(vec![r; m]).unwrap();
            let expect = hll_alpha(m).unwrap() * m as f64 * 2f64.powi(r as i32);
            assert!((h.estimate() - expect).abs() < 1e-9 * expect);
        }
        assert!((hll_alpha(128).unwrap() - 0.7213 / (1.0 + 1.079 / 128.0)).abs() < 1e-15);
    }
}
