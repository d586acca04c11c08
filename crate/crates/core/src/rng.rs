//! Fair-bit randomness.
//!
//! Every random decision in the counters is driven by fair coin flips, so a
//! branch with probability `2^-m` is decided by exactly `m` bits and a
//! Geometric(1/2) draw counts bits up to the first one. Nothing goes
//! through a floating-point comparison.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// A stream of independent fair bits.
pub trait BitSource {
    fn next_bit(&mut self) -> bool;

    /// Draw `count <= 64` bits; the first bit drawn is the least significant.
    fn next_bits(&mut self, count: u32) -> u64 {
        debug_assert!(count <= 64);
        (0..count).fold(0u64, |acc, i| acc | (u64::from(self.next_bit()) << i))
    }

    /// Number of bits drawn up to and including the first one bit.
    fn count_until_one(&mut self) -> u64 {
        let mut draws = 1;
        while !self.next_bit() {
            draws += 1;
        }
        draws
    }
}

impl<B: BitSource + ?Sized> BitSource for &mut B {
    fn next_bit(&mut self) -> bool {
        (**self).next_bit()
    }

    fn next_bits(&mut self, count: u32) -> u64 {
        (**self).next_bits(count)
    }

    fn count_until_one(&mut self) -> u64 {
        (**self).count_until_one()
    }
}

/// Seeded pseudo-random fair-bit source backed by ChaCha12.
///
/// Bits are taken from each generated 64-bit word starting at the least
/// significant bit. Identical `(seed, stream)` pairs yield identical bit
/// streams.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha12Rng,
    word: u64,
    avail: u32,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::for_stream(seed, 0)
    }

    /// Independent stream `stream` derived from `seed` (e.g. one per trial).
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng, word: 0, avail: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    fn refill(&mut self) {
        self.word = self.rng.next_u64();
        self.avail = 64;
    }
}

impl BitSource for RandomSource {
    #[inline]
    fn next_bit(&mut self) -> bool {
        if self.avail == 0 {
            self.refill();
        }
        let bit = self.word & 1 == 1;
        self.word >>= 1;
        self.avail -= 1;
        bit
    }

    #[inline]
    fn next_bits(&mut self, count: u32) -> u64 {
        debug_assert!(count <= 64);
        if count == 0 {
            return 0;
        }
        if count <= self.avail {
            let out = if count == 64 { self.word } else { self.word & ((1u64 << count) - 1) };
            self.word = if count == 64 { 0 } else { self.word >> count };
            self.avail -= count;
            return out;
        }
        let have = self.avail;
        let low = self.word;
        self.refill();
        let rest = self.next_bits(count - have);
        low | (rest << have)
    }

    #[inline]
    fn count_until_one(&mut self) -> u64 {
        let mut draws = 0u64;
        loop {
            if self.avail == 0 {
                self.refill();
            }
            let tz = self.word.trailing_zeros();
            if tz < self.avail {
                draws += u64::from(tz) + 1;
                self.word = if tz == 63 { 0 } else { self.word >> (tz + 1) };
                self.avail -= tz + 1;
                return draws;
            }
            draws += u64::from(self.avail);
            self.avail = 0;
        }
    }
}

/// Replays a fixed bit script; used to force specific branches in tests
/// and examples. Panics when the script runs out.
#[derive(Clone, Debug)]
pub struct ScriptedBits {
    bits: Vec<bool>,
    pos: usize,
}

impl ScriptedBits {
    pub fn new(bits: impl IntoIterator<Item = bool>) -> Self {
        Self { bits: bits.into_iter().collect(), pos: 0 }
    }

    /// Parse a string of `0`/`1` characters; other characters are ignored.
    pub fn parse(script: &str) -> Self {
        Self::new(script.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }))
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl BitSource for ScriptedBits {
    fn next_bit(&mut self) -> bool {
        let bit = *self.bits.get(self.pos).expect("bit script exhausted");
        self.pos += 1;
        bit
    }
}

/// Returns true with probability exactly `2^-m`, consuming exactly `m` bits
/// (true iff all of them are zero).
///
/// # Panics
///
/// `m == 0` is a contract violation: callers never request probability one.
pub fn bernoulli_pow2<B: BitSource + ?Sized>(rng: &mut B, m: u32) -> bool {
    assert!(m >= 1, "bernoulli_pow2 requires m >= 1");
    let mut left = m;
    let mut all_zero = true;
    while left > 0 {
        let take = left.min(64);
        all_zero &= rng.next_bits(take) == 0;
        left -= take;
    }
    all_zero
}

/// Geometric(1/2) on {1, 2, ...}: the number of fair bits drawn until the
/// first one, inclusive. `P(k) = 2^-k`.
pub fn geometric_half<B: BitSource + ?Sized>(rng: &mut B) -> u64 {
    rng.count_until_one()
}

/// Uniform draw on `(0, 1]` with `bits` random bits, as an extended real
/// of precision `prec >= bits`.
pub(crate) fn uniform_open_closed<B: BitSource + ?Sized>(
    rng: &mut B,
    bits: u32,
    prec: u32,
) -> rug::Float {
    use rug::Integer;
    let mut acc = Integer::new();
    let mut left = bits;
    while left > 0 {
        let take = left.min(64);
        acc <<= take;
        acc += rng.next_bits(take);
        left -= take;
    }
    acc += 1u32;
    let mut u = rug::Float::with_val(prec.max(bits + 2), acc);
    u >>= bits;
    u
}

/// Uniform double in `(0, 1)` from 53 random bits.
pub(crate) fn uniform_f64<B: BitSource + ?Sized>(rng: &mut B) -> f64 {
    (rng.next_bits(53) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
