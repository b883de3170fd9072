//! Counter-keyed random streams and the two sampling primitives of the
//! estimator: uniform directions on the Euclidean unit sphere and uniform
//! radii on `[-1, 1]`.
//!
//! A stream is identified by a master seed and a short path of integers, e.g.
//! `(iteration, sample)`. The generator for a path is a fresh Xoshiro256++ instance
//! keyed by a SplitMix64 hash of the seed and path, so a sample depends only on
//! its coordinates and never on the order in which streams are consumed.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rand_distr::StandardNormal;

/// Maximum path length of a derived stream.
pub const MAX_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SamplingError {
    #[error("sphere dimension must be at least 1")]
    ZeroDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    master_seed: u64,
    path: [u64; MAX_DEPTH],
    depth: u8,
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            path: [0; MAX_DEPTH],
            depth: 0,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path[..self.depth as usize]
    }

    /// Stream one level deeper at `index`.
    ///
    /// # Panics
    ///
    /// If the path is already [`MAX_DEPTH`] long.
    pub fn child(&self, index: u64) -> Self {
        let depth = self.depth as usize;
        assert!(depth < MAX_DEPTH, "stream path deeper than {MAX_DEPTH}");
        let mut path = self.path;
        path[depth] = index;
        Self {
            master_seed: self.master_seed,
            path,
            depth: self.depth + 1,
        }
    }

    /// A generator positioned at the start of this stream.
    pub fn rng(&self) -> Xoshiro256PlusPlus {
        let mut state = splitmix64(self.master_seed ^ 0x6a09_e667_f3bc_c908);
        state = splitmix64(state ^ self.depth as u64);
        for &p in self.path() {
            state = splitmix64(state ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        Xoshiro256PlusPlus::from_seed(seed)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform direction on the unit sphere of `R^d` (normalized Gaussian).
pub fn sample_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<f64>, SamplingError> {
    if d == 0 {
        return Err(SamplingError::ZeroDimension);
    }
    let mut e = vec![0.0; d];
    fill_direction(&mut e, rng);
    Ok(e)
}

/// Writes a uniform unit direction into `out`; `out` must be non-empty.
pub(crate) fn fill_direction<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    debug_assert!(!out.is_empty());
    loop {
        let mut sq = 0.0;
        for v in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = z;
            sq += z * z;
        }
        // A zero draw has probability zero; redraw rather than divide by it.
        if sq > 0.0 && sq.is_finite() {
            let n = libm::sqrt(sq);
            out.iter_mut().for_each(|v| *v /= n);
            return;
        }
    }
}

/// Uniform radius on `[-1, 1]`.
pub fn sample_radius<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = RngStream::new(1).rng();
        assert_eq!(sample_direction(0, &mut rng), Err(SamplingError::ZeroDimension));
    }

    #[test]
    fn one_dimensional_sphere_has_two_points() {
        let mut rng = RngStream::new(3).rng();
        let mut plus = 0usize;
        for _ in 0..2000 {
            let e = sample_direction(1, &mut rng).unwrap();
            assert!(e[0] == 1.0 || e[0] == -1.0);
            plus += (e[0] > 0.0) as usize;
        }
        assert!((800..1200).contains(&plus), "{plus}");
    }

    #[test]
    fn unit_norm() {
        let mut rng = RngStream::new(11).rng();
        for _ in 0..100 {
            let e = sample_direction(5, &mut rng).unwrap();
            let n: f64 = e.iter().map(|v| v * v).sum();
            assert!((libm::sqrt(n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_path_same_sequence() {
        let a = RngStream::new(42).child(7).child(3);
        let b = RngStream::new(42).child(7).child(3);
        let ea = sample_direction(8, &mut a.rng()).unwrap();
        let eb = sample_direction(8, &mut b.rng()).unwrap();
        assert_eq!(ea, eb);
    }

    #[test]
    fn distinct_paths_differ() {
        let root = RngStream::new(42);
        let x: u64 = root.child(0).child(1).rng().random();
        let y: u64 = root.child(1).child(0).rng().random();
        let z: u64 = root.child(0).rng().random();
        let w: u64 = RngStream::new(43).child(0).child(1).rng().random();
        assert!(x != y && x != z && y != z && x != w);
    }

    #[test]
    fn path_is_recorded() {
        let s = RngStream::new(5).child(10).child(20);
        assert_eq!(s.path(), &[10, 20]);
        assert_eq!(s.master_seed(), 5);
    }

    #[test]
    fn radius_stays_in_range() {
        let mut rng = RngStream::new(9).rng();
        for _ in 0..10_000 {
            let r = sample_radius(&mut rng);
            assert!((-1.0..=1.0).contains(&r));
        }
    }
}
