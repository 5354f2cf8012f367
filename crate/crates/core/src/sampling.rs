//! Seeded spectral-parameter samples for the two-variable identity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::C64;

const MODULUS_LO: f64 = 0.6;
const MODULUS_HI: f64 = 1.5;

/// Stream ids keep the `u` axis, the `w` axis and one-dimensional samples independent.
const STREAM_U: u64 = 1;
const STREAM_W: u64 = 2;
const STREAM_LINE: u64 = 3;

/// `n` points with distinct moduli, one per stratum of `[0.6, 1.5]`, and
/// uniformly random phases.
fn stratified(seed: u64, stream: u64, n: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let width = (MODULUS_HI - MODULUS_LO) / n as f64;
    (0..n)
        .map(|i| {
            let r = MODULUS_LO + width * (i as f64 + rng.random::<f64>());
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            C64::from_polar(r, phase)
        })
        .collect()
}

/// Number of samples per variable for a level-`n` identity.
pub fn grid_side(level: usize) -> usize {
    4 * level + 8
}

/// The two sample axes of a `side × side` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub u: Vec<C64>,
    pub w: Vec<C64>,
}

impl Grid {
    pub fn new(seed: u64, side: usize) -> Self {
        Self { u: stratified(seed, STREAM_U, side), w: stratified(seed, STREAM_W, side) }
    }

    pub fn for_level(seed: u64, level: usize) -> Self {
        Self::new(seed, grid_side(level))
    }

    pub fn len(&self) -> usize {
        self.u.len() * self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> Vec<(C64, C64)> {
        self.u.iter().flat_map(|&u| self.w.iter().map(move |&w| (u, w))).collect()
    }
}

/// `n` single-variable samples.
pub fn line(seed: u64, n: usize) -> Vec<C64> {
    stratified(seed, STREAM_LINE, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_are_distinct_and_in_range() {
        let g = Grid::for_level(7, 3);
        assert_eq!(g.u.len(), 20);
        let mut moduli: Vec<f64> = g.u.iter().map(|z| z.norm()).collect();
        assert!(moduli.iter().all(|&r| (MODULUS_LO..=MODULUS_HI).contains(&r)));
        moduli.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(moduli.len(), 20);
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(Grid::new(11, 5), Grid::new(11, 5));
        assert_ne!(Grid::new(11, 5), Grid::new(12, 5));
        assert_ne!(Grid::new(11, 5).u, Grid::new(11, 5).w);
    }
}
