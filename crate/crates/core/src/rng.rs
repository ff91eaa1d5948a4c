//! Seeded random streams.
//!
//! All randomness uses ChaCha8 (`rand_chacha::ChaCha8Rng`), a portable
//! counter-based generator whose output is identical on every platform.
//! Each operation draws from its own stream, selected from the user seed
//! and a fixed purpose tag, so no generator state is shared between
//! operations.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// Stream tags of the operations that consume randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Layout = 1,
    Phantom = 2,
    Noise = 3,
    Test = 4,
}

/// Generator for `(seed, purpose)`.
pub fn stream(seed: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut impl rand_core::RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..n` without modulo bias.
pub fn below(rng: &mut impl rand_core::RngCore, n: u64) -> u64 {
    debug_assert!(n > 0);
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}
