//! Seed-deterministic random rationals of bounded height.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{q, qr, Q};
use crate::lie::LieAlgebra;
use crate::linalg::Matrix;

pub const DEFAULT_HEIGHT: i64 = 10;

/// Seeded source of rationals `a/b` with `|a| <= height`, `1 <= b <= height`.
#[derive(Clone, Debug)]
pub struct RationalSampler {
    rng: ChaCha8Rng,
    height: i64,
}

impl RationalSampler {
    pub fn new(seed: u64, height: i64) -> Self {
        assert!(height >= 1, "height must be positive");
        RationalSampler { rng: ChaCha8Rng::seed_from_u64(seed), height }
    }

    pub fn rational(&mut self) -> Q {
        let a = self.rng.gen_range(-self.height..=self.height);
        let b = self.rng.gen_range(1..=self.height);
        qr(a, b)
    }

    pub fn nonzero(&mut self) -> Q {
        loop {
            let x = self.rational();
            if x != q(0) {
                return x;
            }
        }
    }

    pub fn vector(&mut self, len: usize) -> Vec<Q> {
        (0..len).map(|_| self.rational()).collect()
    }

    /// Random linear combination of `basis`.
    pub fn combination(&mut self, basis: &[Vec<Q>]) -> Vec<Q> {
        let len = basis.first().map_or(0, |b| b.len());
        let mut v = vec![q(0); len];
        for b in basis {
            let c = self.rational();
            for (x, y) in v.iter_mut().zip(b) {
                *x += &c * y;
            }
        }
        v
    }

    pub fn element(&mut self, alg: &LieAlgebra) -> Matrix {
        let c = self.vector(alg.dim());
        alg.element(&c)
    }

    /// Invertible `n x n` matrix (resampled until the determinant is nonzero).
    pub fn invertible(&mut self, n: usize) -> Matrix {
        loop {
            let m = Matrix::from_rows((0..n).map(|_| self.vector(n)).collect());
            if m.determinant() != q(0) {
                return m;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a: Vec<Q> = RationalSampler::new(7, 10).vector(5);
        let b: Vec<Q> = RationalSampler::new(7, 10).vector(5);
        let c: Vec<Q> = RationalSampler::new(8, 10).vector(5);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn height_is_respected() {
        let mut s = RationalSampler::new(1, 3);
        for _ in 0..200 {
            let x = s.rational();
            assert!(x.numer().magnitude() <= &3u32.into() && x.denom() <= &3.into());
        }
    }
}
