//! Seeded, splittable random streams.
//!
//! Every random decision in the crate is drawn from a [`SeededRng`], a
//! SplitMix64 generator keyed by `(seed, stream_id)`:
//!
//! ```text
//! mix64(z)  = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!             z ^= z >> 27; z *= 0x94D049BB133111EB; z ^ (z >> 31)
//! state_0   = seed ^ mix64(stream_id)
//! state_n+1 = state_n + 0x9E3779B97F4A7C15        (wrapping)
//! output_n  = mix64(state_n+1)
//! ```
//!
//! Stream 0 is therefore plain SplitMix64 seeded with `seed`, and the
//! published SplitMix64 vectors apply to it directly. All arithmetic is on
//! wrapping `u64`, so any language with 64-bit unsigned integers reproduces
//! the same values; `scripts/rng_vectors.py` is such a port.
//!
//! Derived draws:
//!
//! - [`RandomSource::next_f64`]: `(next_u64() >> 11) * 2^-53`, in `[0, 1)`.
//! - [`RandomSource::int_in`]: Lemire's multiply-and-reject on the span
//!   `hi - lo + 1`, consuming one `u64` except on (rare) rejection.
//! - [`RandomSource::real_in`]: `lo + (hi - lo) * next_f64()`.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Source of uniformly distributed 64-bit words plus the derived draws the
/// samplers use. Implemented by [`SeededRng`]; tests plug in degenerate
/// sources to pin down boundary behavior.
pub trait RandomSource {
    fn next_u64(&mut self) -> u64;

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]` inclusive. Panics if `lo > hi`.
    fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "int_in: empty range [{lo}, {hi}]");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span == 1u128 << 64 {
            return lo.wrapping_add(self.next_u64() as i64);
        }
        let span = span as u64;
        let mut m = self.next_u64() as u128 * span as u128;
        let mut low = m as u64;
        if low < span {
            let threshold = span.wrapping_neg() % span;
            while low < threshold {
                m = self.next_u64() as u128 * span as u128;
                low = m as u64;
            }
        }
        (lo as i128 + (m >> 64) as i128) as i64
    }

    /// Uniform real in `[lo, hi)`; returns exactly `lo` when `lo == hi`.
    fn real_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

impl<R: RandomSource + ?Sized> RandomSource for &mut R {
    fn next_u64(&mut self) -> u64 {
        (**self).next_u64()
    }
}

/// A deterministic generator identified by `(seed, stream_id)`.
///
/// Instances are single-owner. Per-image generators are derived with
/// [`SeededRng::new`] rather than shared between tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self {
            seed,
            stream_id,
            state: seed ^ mix64(stream_id),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RandomSource for SeededRng {
    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}
