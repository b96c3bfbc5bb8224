use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Vec3;

/// Deterministic random stream. Identical seeds produce identical draws on
/// every platform (ChaCha8 keyed through `seed_from_u64`).
#[derive(Debug, Clone, PartialEq)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

/// Serializable position of a [`SimRng`] stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub key: [u8; 32],
    pub stream: u64,
    /// Word position, split into high and low halves for portable encoding.
    pub word_pos_hi: u64,
    pub word_pos_lo: u64,
}

impl SimRng {
    pub fn seed_from(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// An independent child stream; advances `self`.
    pub fn fork(&mut self) -> Self {
        Self::seed_from(self.inner.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on `[lo, hi)`; returns `lo` exactly when `lo == hi`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u: f64 = self.inner.random();
        if lo == hi {
            lo
        } else {
            lo + (hi - lo) * u
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }

    /// Uniform integer in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Bernoulli trial; `p` outside `[0, 1]` is clamped.
    pub fn chance(&mut self, p: f64) -> bool {
        let u: f64 = self.inner.random();
        u < p.clamp(0.0, 1.0)
    }

    /// Direction uniformly distributed on the unit sphere.
    pub fn unit_vector(&mut self) -> Vec3 {
        loop {
            let v = Vec3::new(
                self.standard_normal(),
                self.standard_normal(),
                self.standard_normal(),
            );
            let n = v.norm();
            if n > 1e-12 {
                return v / n;
            }
        }
    }

    pub fn state(&self) -> RngState {
        let pos = self.inner.get_word_pos();
        RngState {
            key: self.inner.get_seed(),
            stream: self.inner.get_stream(),
            word_pos_hi: (pos >> 64) as u64,
            word_pos_lo: pos as u64,
        }
    }

    pub fn from_state(state: &RngState) -> Self {
        let mut inner = ChaCha8Rng::from_seed(state.key);
        inner.set_stream(state.stream);
        inner.set_word_pos(((state.word_pos_hi as u128) << 64) | state.word_pos_lo as u128);
        Self { inner }
    }
}
