//! Deterministic generation of random test data.
//!
//! All draws come from SplitMix64 (increment `0x9E3779B97F4A7C15`, mixing
//! multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`, shifts 30, 27,
//! 31) seeded directly with the user's 64-bit seed, and bounded integers are
//! taken as `next_u64() % n`. The draw order of every generator below is part
//! of its contract so corpora can be reproduced elsewhere.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::series::{int, ConstMatrix, Matrix, Rat};

#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: SplitMix64,
}

impl SeededRng {
    pub fn new(seed: u64) -> SeededRng {
        SeededRng {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Integer in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// `n / d` with `n` in `-bound..=bound` and `d` in `1..=den`.
    pub fn rat(&mut self, bound: i64, den: i64) -> Rat {
        let n = self.range(-bound, bound);
        let d = self.range(1, den);
        Rat::new(n.into(), d.into())
    }

    pub fn const_matrix(&mut self, m: usize, bound: i64, den: i64) -> ConstMatrix {
        Matrix::from_fn(m, |_, _| self.rat(bound, den))
    }

    /// Random invertible matrix, redrawn until the determinant is nonzero.
    pub fn invertible_matrix(&mut self, m: usize, bound: i64, den: i64) -> ConstMatrix {
        loop {
            let p = self.const_matrix(m, bound, den);
            if p.det() != int(0) {
                return p;
            }
        }
    }
}
