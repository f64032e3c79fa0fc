//! Deterministic rational sample points.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{Rational, ScalarExpr};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const MAX_RETRIES: usize = 200;

/// Seeded source of small rationals: numerators in [-7, 7], denominators in 1..=5.
pub struct Sampler {
    rng: ChaCha8Rng,
    seed: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rational(&mut self) -> Rational {
        let n: i64 = self.rng.random_range(-7..=7);
        let d: i64 = self.rng.random_range(1..=5);
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn point(&mut self, dim: usize) -> Vec<Rational> {
        (0..dim).map(|_| self.rational()).collect()
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Draw until `accept` holds, at most [`MAX_RETRIES`] times.
    pub fn point_where(&mut self, dim: usize, accept: impl Fn(&[Rational]) -> bool) -> Result<Vec<Rational>> {
        for _ in 0..MAX_RETRIES {
            let p = self.point(dim);
            if accept(&p) {
                return Ok(p);
            }
        }
        Err(Error::SamplesExhausted(MAX_RETRIES))
    }

    /// `count` accepted points; each point gets its own retry budget.
    pub fn points_where(
        &mut self,
        dim: usize,
        count: usize,
        accept: impl Fn(&[Rational]) -> bool,
    ) -> Result<Vec<Vec<Rational>>> {
        (0..count).map(|_| self.point_where(dim, &accept)).collect()
    }
}

/// `count` points at which every expression in `exprs` evaluates without a pole.
pub fn regular_points(
    sampler: &mut Sampler,
    dim: usize,
    count: usize,
    exprs: &[ScalarExpr],
) -> Result<Vec<Vec<Rational>>> {
    sampler.points_where(dim, count, |p| exprs.iter().all(|e| e.eval(p).is_ok()))
}

pub fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(crate::scalar::fmt_rational).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn deterministic_and_bounded() {
        let a = Sampler::new(7).point(20);
        let b = Sampler::new(7).point(20);
        assert_eq!(a, b);
        for q in &a {
            assert!(q.numer().abs() <= BigInt::from(7));
            assert!(q.denom() <= &BigInt::from(5));
        }
        assert_ne!(a, Sampler::new(8).point(20));
    }

    #[test]
    fn retries_bounded() {
        let mut s = Sampler::new(1);
        assert!(matches!(s.point_where(2, |_| false), Err(Error::SamplesExhausted(_))));
        let p = s.point_where(2, |p| !p[0].is_negative()).unwrap();
        assert!(!p[0].is_negative());
    }
}
