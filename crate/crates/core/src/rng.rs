//! Counter-based randomness.
//!
//! Site states are a pure function of `(seed, stream, replicate, key)`, so a
//! configuration can be regenerated anywhere, by any worker, in any order,
//! and two domains that share a site key see the same state at that site.

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream tags, so that different uses of one seed never share
/// bits.
pub mod stream {
    pub const SITES: u64 = 0x5349_5445;
    pub const REFINED: u64 = 0x5245_4649;
    pub const MIXED: u64 = 0x4D49_5845;
}

/// Random generator for one (seed, stream, replicate) triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64, replicate: u64) -> Self {
        CounterRng { state: mix64(mix64(seed ^ mix64(stream)) ^ replicate) }
    }

    #[inline]
    pub fn bits(&self, key: u64) -> u64 {
        mix64(self.state ^ mix64(key))
    }

    /// Bernoulli draw with success probability `p` for counter `key`.
    #[inline]
    pub fn bernoulli(&self, key: u64, p: f64) -> bool {
        bernoulli_from_bits(self.bits(key), p)
    }

    /// Uniform draw in `[0, 1)` for counter `key`.
    #[inline]
    pub fn uniform(&self, key: u64) -> f64 {
        (self.bits(key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[inline]
pub fn bernoulli_from_bits(bits: u64, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else if p == 0.5 {
        bits >> 63 == 1
    } else {
        ((bits >> 11) as f64) < p * (1u64 << 53) as f64
    }
}
