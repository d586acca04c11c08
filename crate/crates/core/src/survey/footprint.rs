use crate::counters::{Counter, HllState, MaxGeoState, MorrisState, PcsaState};

fn bit_length(level: u32) -> u64 {
    u64::from(32 - level.leading_zeros()).max(1)
}

/// Bits needed to store the released level(s).
pub trait MemoryFootprint {
    fn memory_bits(&self) -> u64;
}

impl MemoryFootprint for MorrisState {
    fn memory_bits(&self) -> u64 {
        bit_length(self.level())
    }
}

impl MemoryFootprint for MaxGeoState {
    fn memory_bits(&self) -> u64 {
        bit_length(self.level())
    }
}

impl MemoryFootprint for PcsaState {
    fn memory_bits(&self) -> u64 {
        self.registers().registers().iter().map(|&r| bit_length(r)).sum()
    }
}

impl MemoryFootprint for HllState {
    fn memory_bits(&self) -> u64 {
        self.registers().registers().iter().map(|&r| bit_length(r)).sum()
    }
}

impl MemoryFootprint for Counter {
    fn memory_bits(&self) -> u64 {
        match self {
            Counter::Morris(s) => s.memory_bits(),
            Counter::MaxGeo(s) => s.memory_bits(),
            Counter::Pcsa(s) => s.memory_bits(),
            Counter::HyperLogLog(s) => s.memory_bits(),
        }
    }
}
