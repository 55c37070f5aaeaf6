//! Reproducible random streams.
//!
//! Every random quantity in the crate comes from [`StreamRng`], which is
//! ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`). The 256-bit key is
//! expanded from the 64-bit master seed by `SeedableRng::seed_from_u64`
//! (PCG32 fill), and stream `k` selects ChaCha's 64-bit stream id, so stream
//! `k` of master seed `s` is a pure function of `(s, k)`.
//!
//! Integer draws use Lemire's multiply-and-reject method over raw 64-bit
//! outputs, so they are exactly uniform. Floats take the top 53 bits.

use num_bigint::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    /// Stream `stream` derived from `master_seed`.
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, bound)`. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let mut m = u128::from(self.next_u64()) * u128::from(bound);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(bound);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform float in `[0, 1)`.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform big integer in `[0, bound)` by masked rejection.
    pub fn below_big(&mut self, bound: &BigUint) -> BigUint {
        assert!(bound.bits() > 0, "empty range");
        let bits = bound.bits();
        let words = bits.div_ceil(64) as usize;
        let top_mask = if bits % 64 == 0 {
            u64::MAX
        } else {
            (1u64 << (bits % 64)) - 1
        };
        loop {
            let mut digits: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
            if let Some(last) = digits.last_mut() {
                *last &= top_mask;
            }
            let candidate = BigUint::from_slice(
                &digits
                    .iter()
                    .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            if &candidate < bound {
                return candidate;
            }
        }
    }
}
