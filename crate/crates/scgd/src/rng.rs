//! Deterministic random streams.
//!
//! Every randomized routine in this crate draws from ChaCha8 streams seeded
//! through [`stream`]: one root seed (`seed_from_u64`) plus a stream id
//! (`set_stream`). Distinct ids give statistically independent sequences, so a
//! run can consume coordinate draws, data draws, and smoothing directions in
//! any interleaving without perturbing the others. Gaussians come from the
//! Box–Muller transform on explicit uniforms — no ziggurat tables — so a port
//! in another language can replicate every stream bit for bit from this file.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids used by the optimizer; see [`stream`].
pub mod streams {
    /// Coordinate draws ζ.
    pub const COORDINATE: u64 = 0;
    /// Data mini-batch draws ξ.
    pub const DATA: u64 = 1;
    /// Smoothing directions U.
    pub const SMOOTHING: u64 = 2;
}

/// ChaCha8 stream `id` of the generator seeded from `seed`.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// One standard normal deviate via Box–Muller: √(−2 ln u₁)·cos(2π u₂),
/// with u₁ drawn in (0, 1] so the logarithm is finite.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Vector of `p` i.i.d. standard normals.
pub fn normal_vector(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    (0..p).map(|_| standard_normal(rng)).collect()
}

/// Uniform draw from the unit sphere in R^p (normalized Gaussian; the
/// rejection loop guards the measure-zero all-zeros draw).
pub fn sphere_vector(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    loop {
        let v = normal_vector(rng, p);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform index in `0..n` as ⌊u·n⌋, clamped to n−1 for the u → 1 edge.
pub fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    debug_assert!(n > 0);
    let u: f64 = rng.random();
    ((u * n as f64) as usize).min(n - 1)
}

/// `m` pairwise-distinct indices from `0..n` by Floyd's subset sampling,
/// returned in insertion order (deterministic for a given stream).
pub fn distinct_indices(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    debug_assert!(m <= n);
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for j in (n - m)..n {
        let t = uniform_index(rng, j + 1);
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let mut a = stream(7, streams::COORDINATE);
        let mut b = stream(7, streams::COORDINATE);
        let mut c = stream(7, streams::DATA);
        let xs: Vec<f64> = (0..8).map(|_| a.random()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.random()).collect();
        let zs: Vec<f64> = (0..8).map(|_| c.random()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn normal_moments_match_standard_gaussian() {
        let mut rng = stream(11, 0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        // SE(mean) ≈ 1/√n ≈ 0.0022, SE(var) ≈ √(2/n) ≈ 0.0032; allow 5 SE.
        assert!(mean.abs() < 5.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt(), "var {var}");
    }

    #[test]
    fn sphere_vectors_have_unit_norm() {
        let mut rng = stream(3, 0);
        for _ in 0..100 {
            let v = sphere_vector(&mut rng, 5);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distinct_indices_are_distinct_and_in_range() {
        let mut rng = stream(5, 0);
        for _ in 0..200 {
            let idx = distinct_indices(&mut rng, 50, 8);
            assert_eq!(idx.len(), 8);
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 8, "duplicates in {idx:?}");
            assert!(idx.iter().all(|&i| i < 50));
        }
    }

    #[test]
    fn uniform_index_covers_range() {
        let mut rng = stream(9, 0);
        let mut seen = [false; 10];
        for _ in 0..1000 {
            seen[uniform_index(&mut rng, 10)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
