//! The probabilistic counters and their estimators.

mod maxgeo;
mod morris;
mod pcsa;
mod phi;

use serde::{Deserialize, Serialize};

pub use maxgeo::MaxGeoState;
pub use morris::{morris_estimate_variance, morris_point_estimate, MorrisState};
pub use pcsa::{hll_alpha, HllState, PcsaState, RegisterArray};
pub use phi::{morse_thue_sign, FmConstant, DEFAULT_PHI_TERMS};

use crate::error::Result;
use crate::rng::BitSource;

/// Which counter to run, with its parameters.
///
/// Serialized adjacently tagged: `{"mechanism": "pcsa", "params": {"m": 64}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", content = "params", rename_all = "lowercase")]
pub enum CounterKind {
    Morris,
    MaxGeo,
    Pcsa { m: usize },
    HyperLogLog { m: usize },
}

/// Any of the four counters behind one interface.
#[derive(Clone, Debug, PartialEq)]
pub enum Counter {
    Morris(MorrisState),
    MaxGeo(MaxGeoState),
    Pcsa(PcsaState),
    HyperLogLog(HllState),
}

impl Counter {
    pub fn new(kind: CounterKind) -> Result<Self> {
        Ok(match kind {
            CounterKind::Morris => Counter::Morris(MorrisState::new()),
            CounterKind::MaxGeo => Counter::MaxGeo(MaxGeoState::new()),
            CounterKind::Pcsa { m } => Counter::Pcsa(PcsaState::new(m)?),
            CounterKind::HyperLogLog { m } => Counter::HyperLogLog(HllState::new(m)?),
        })
    }

    pub fn observe<B: BitSource + ?Sized>(&mut self, datum: bool, rng: &mut B) {
        match self {
            Counter::Morris(s) => s.observe(datum, rng),
            Counter::MaxGeo(s) => s.observe(datum, rng),
            Counter::Pcsa(s) => s.observe(datum, rng),
            Counter::HyperLogLog(s) => s.observe(datum, rng),
        }
    }

    /// `k` incrementation requests. Morris uses the geometric skip-ahead.
    pub fn observe_many<B: BitSource + ?Sized>(&mut self, k: u64, rng: &mut B) {
        match self {
            Counter::Morris(s) => s.skip_batch(k, rng),
            other => (0..k).for_each(|_| other.observe(true, rng)),
        }
    }

    /// The released value: one level, or the register levels of a sketch.
    pub fn levels(&self) -> Vec<u32> {
        match self {
            Counter::Morris(s) => vec![s.level()],
            Counter::MaxGeo(s) => vec![s.level()],
            Counter::Pcsa(s) => s.registers().registers().to_vec(),
            Counter::HyperLogLog(s) => s.registers().registers().to_vec(),
        }
    }

    /// Scalar summary of the released value: the level, or the register sum.
    pub fn released_scalar(&self) -> f64 {
        self.levels().iter().map(|&l| f64::from(l)).sum()
    }

    /// The counter's own point estimate of the number of requests.
    pub fn estimate(&self, phi: &FmConstant) -> f64 {
        match self {
            Counter::Morris(s) => s.estimate() as f64,
            Counter::MaxGeo(s) => s.estimate(phi) as f64,
            Counter::Pcsa(s) => s.estimate(phi) as f64,
            Counter::HyperLogLog(s) => s.estimate(),
        }
    }

    pub fn requests_seen(&self) -> u64 {
        match self {
            Counter::Morris(s) => s.requests_seen(),
            Counter::MaxGeo(s) => s.requests_seen(),
            Counter::Pcsa(s) => s.registers().requests_seen(),
            Counter::HyperLogLog(s) => s.registers().requests_seen(),
        }
    }
}
