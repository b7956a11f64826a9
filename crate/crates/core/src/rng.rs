//! Seed derivation and uniform streams.
//!
//! Every Monte Carlo path owns a seed derived from `(master seed, path index)`
//! and draws each kind of randomness from its own ChaCha stream, so results
//! never depend on how paths are scheduled across workers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids used by the walk simulators.
pub mod stream {
    pub const STEP: u64 = 0;
    pub const XI: u64 = 1;
    pub const PARETO: u64 = 2;
    pub const MIX: u64 = 3;
    pub const COUNT: u64 = 4;
}

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 20261017;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of path `index` under master seed `seed`.
pub fn path_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// A uniform stream on the open interval (0, 1).
#[derive(Clone, Debug)]
pub struct Uniforms {
    rng: ChaCha8Rng,
}

impl Uniforms {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Uniforms { rng }
    }

    /// Stream positioned after `draws` values have been consumed.
    pub fn at(seed: u64, stream: u64, draws: u64) -> Self {
        let mut u = Self::new(seed, stream);
        u.rng.set_word_pos(u128::from(draws) * 2);
        u
    }

    #[inline]
    pub fn next_raw(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Next draw, strictly inside (0, 1).
    #[inline]
    pub fn next_open(&mut self) -> f64 {
        open01(self.rng.next_u64())
    }
}

/// Maps 64 random bits to the midpoint grid of (0, 1), never hitting 0 or 1.
#[inline]
pub fn open01(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open01_bounds() {
        assert!(open01(0) > 0.0);
        assert!(open01(u64::MAX) < 1.0);
    }

    #[test]
    fn seek_matches_sequential() {
        let mut a = Uniforms::new(7, stream::STEP);
        for _ in 0..5 {
            a.next_raw();
        }
        let mut b = Uniforms::at(7, stream::STEP, 5);
        assert_eq!(a.next_raw(), b.next_raw());
    }

    #[test]
    fn streams_differ() {
        let mut a = Uniforms::new(7, stream::STEP);
        let mut b = Uniforms::new(7, stream::XI);
        assert_ne!(a.next_raw(), b.next_raw());
        assert_ne!(path_seed(1, 0), path_seed(1, 1));
    }
}
