//! Random streams for the simulator.
//!
//! Each replication owns a xoshiro256++ generator (Blackman and Vigna; 256
//! bits of state, period 2^256 - 1). Its seed is derived from the base seed
//! and the replication index with the SplitMix64 finalizer
//! (`0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`, increment
//! `0x9E3779B97F4A7C15`); the 64-bit result is then expanded into the full
//! state by `SeedableRng::seed_from_u64`, which runs SplitMix64 as well.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type SimRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(seed: u64, replication: usize) -> u64 {
    splitmix_finalize(
        seed.wrapping_add(
            (replication as u64)
                .wrapping_add(1)
                .wrapping_mul(GOLDEN_GAMMA),
        ),
    )
}

pub fn replication_rng(seed: u64, replication: usize) -> SimRng {
    SimRng::seed_from_u64(replication_seed(seed, replication))
}

/// Exponential variates by inversion.
#[derive(Debug, Clone, Copy)]
pub struct ExpSampler {
    rate: f64,
}

impl ExpSampler {
    pub fn new(rate: f64) -> Self {
        Self { rate }
    }

    /// `-ln(U) / rate` with `U` uniform on `(0, 1]`; infinite for rate 0.
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> f64 {
        if self.rate <= 0.0 {
            return f64::INFINITY;
        }
        // 53 random mantissa bits, mapped to (0, 1]
        let u = 1.0 - (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        -libm::log(u) / self.rate
    }
}
