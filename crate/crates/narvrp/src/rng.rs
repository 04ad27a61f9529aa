//! Deterministic random streams.
//!
//! Everything that draws randomness in this crate goes through [`SplitMix64`],
//! a counter-based generator with a 64-bit seed. The algorithm is pinned here
//! so that any other implementation can reproduce the exact streams:
//!
//! ```text
//! state <- state + 0x9E3779B97F4A7C15          (per draw)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Derived draws are defined on top of `next_u64`:
//! * `next_f64`: `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `next_below(n)`: `next_u64() % n` (the small modulo bias is accepted and
//!   part of the pinned definition).
//!
//! Stream conventions: instance `k` of a dataset uses seed `base_seed + k`;
//! sample `j` of a best-of-k search uses seed `seed + j`. Training code derives
//! sub-seeds by drawing `u64`s from a stream seeded with the run seed.

/// Counter-based PRNG (SplitMix64) with a 64-bit seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in `[lo, hi)`.
    pub fn next_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)` via modulo reduction.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below(0)");
        self.next_u64() % n
    }
}
