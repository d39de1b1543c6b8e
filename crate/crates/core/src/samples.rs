//! Reproducible low-discrepancy sample points in a box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::Point;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

pub const DEFAULT_COUNT: usize = 20;
pub const DEFAULT_SEED: u64 = 42;

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Where a structure is checked: a Halton set in `[lo, hi]^dim`, randomly
/// shifted modulo 1 by a seeded generator, plus any explicit points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub seed: u64,
    pub extra: Vec<Vec<f64>>,
}

impl Default for SampleSet {
    fn default() -> Self {
        Self {
            lo: -1.0,
            hi: 1.0,
            count: DEFAULT_COUNT,
            seed: DEFAULT_SEED,
            extra: Vec::new(),
        }
    }
}

impl SampleSet {
    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_point(mut self, p: Vec<f64>) -> Self {
        self.extra.push(p);
        self
    }

    /// Explicit points first, then the shifted Halton points.
    pub fn points(&self, dim: usize) -> Vec<Point> {
        assert!(dim <= PRIMES.len(), "sample dimension {dim} not supported");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let mut out: Vec<Point> = self
            .extra
            .iter()
            .filter(|p| p.len() == dim)
            .map(|p| Point::from(p.as_slice()))
            .collect();
        for i in 0..self.count {
            let coords = (0..dim)
                .map(|k| {
                    let u = (radical_inverse(i as u64 + 1, PRIMES[k]) + shift[k]).fract();
                    self.lo + (self.hi - self.lo) * u
                })
                .collect::<Vec<_>>();
            out.push(Point::from(coords.as_slice()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_box() {
        let s = SampleSet::default();
        let a = s.points(5);
        let b = s.points(5);
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        assert!(a.iter().all(|p| p.iter().all(|c| (-1.0..=1.0).contains(c))));
        let c = s.clone().with_seed(7).points(5);
        assert_ne!(a, c);
    }

    #[test]
    fn explicit_points_come_first() {
        let s = SampleSet::default().with_count(2).with_point(vec![1.0, 2.0]);
        let pts = s.points(2);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].coords(), &[1.0, 2.0]);
    }
}
