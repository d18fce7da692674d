//! Reproducible random-number streams.
//!
//! Every stochastic component of an experiment draws from an [`RngStream`]
//! addressed by a path of string tags and integer indices rooted at a single
//! experiment seed. Each path maps to an independent ChaCha substream via
//! SHA-256 key derivation, so any stream can be reconstructed in isolation:
//! the same path always yields the same draw sequence, regardless of what
//! other streams were consumed. That property is what makes macroreplications
//! replayable and lets post-processing reuse common random numbers across
//! algorithms.
//!
//! Forking never consumes state from the parent: a child stream is a pure
//! function of the parent's derivation key and the tag, not of how many draws
//! the parent has produced.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

/// Scales a 53-bit integer into [0, 1).
const U53_SCALE: f64 = 1.0 / (1u64 << 53) as f64;

/// A seedable random stream addressed by a derivation path.
#[derive(Clone, Debug)]
pub struct RngStream {
    key: [u8; 32],
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Root stream for an experiment seed.
    pub fn root(seed: u64) -> Self {
        Self::from_key(derive(&[0u8; 32], "sobench-root", Some(seed)))
    }

    /// Child stream for a string tag. Does not consume parent state.
    pub fn fork(&self, tag: &str) -> Self {
        Self::from_key(derive(&self.key, tag, None))
    }

    /// Child stream for a tag plus an integer index (macrorep, post-rep, ...).
    pub fn fork_index(&self, tag: &str, index: u64) -> Self {
        Self::from_key(derive(&self.key, tag, Some(index)))
    }

    fn from_key(key: [u8; 32]) -> Self {
        RngStream {
            key,
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw on [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * U53_SCALE
    }

    /// Uniform draw on (0, 1]; safe as a logarithm argument.
    pub fn uniform_open(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform draw on [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo < hi && lo.is_finite() && hi.is_finite());
        lo + (hi - lo) * self.uniform()
    }

    /// Exponential draw with the given mean, by inversion (one uniform).
    pub fn exponential(&mut self, mean: f64) -> f64 {
        debug_assert!(mean > 0.0);
        -mean * self.uniform_open().ln()
    }

    /// Standard normal draw via Box-Muller (exactly two uniforms).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Normal draw with the given mean and standard deviation.
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        debug_assert!(sd >= 0.0);
        mean + sd * self.standard_normal()
    }

    /// Laplace draw centered at zero, by inversion (one uniform).
    pub fn laplace(&mut self, scale: f64) -> f64 {
        debug_assert!(scale > 0.0);
        let u = self.uniform() - 0.5;
        // 1 - 2|u| lies in (0, 1], so the log is finite.
        -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }

    /// Gamma draw with integer shape k and the given scale, as a sum of k
    /// exponentials (exactly k uniforms).
    pub fn erlang(&mut self, shape: u32, scale: f64) -> f64 {
        debug_assert!(shape >= 1 && scale > 0.0);
        let mut sum = 0.0;
        for _ in 0..shape {
            sum -= self.uniform_open().ln();
        }
        scale * sum
    }

    /// Rademacher draw: +1 or -1 with equal probability.
    pub fn rademacher(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Derives a child key from a parent key, a length-prefixed tag, and an
/// optional index. The prefixes keep distinct paths from colliding.
fn derive(parent: &[u8; 32], tag: &str, index: Option<u64>) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(parent);
    hasher.update((tag.len() as u64).to_le_bytes());
    hasher.update(tag.as_bytes());
    match index {
        Some(i) => {
            hasher.update([1u8]);
            hasher.update(i.to_le_bytes());
        }
        None => hasher.update([0u8]),
    }
    hasher.finalize().into()
}
