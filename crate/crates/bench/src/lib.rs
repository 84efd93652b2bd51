//! Seeded fixtures shared by the criterion benchmarks.

use hyperlab_core::sampling::{sample_hvec, sample_point, sample_rng, sample_z};
use hyperlab_core::{MPoint, QVector};

pub const SEED: u64 = 7;

/// `count` seeded points of ℳ with quaternionic dimension `n`.
pub fn points(n: usize, count: usize) -> Vec<MPoint> {
    (0..count as u64)
        .map(|s| sample_point(&mut sample_rng(SEED, "bench.points", s), n))
        .collect()
}

/// A seeded base point `z ∈ ℍⁿ` with two tangent vectors.
pub fn base_and_vectors(n: usize) -> (QVector, QVector, QVector) {
    let mut rng = sample_rng(SEED, "bench.vectors", 0);
    (
        sample_z(&mut rng, n),
        sample_hvec(&mut rng, n),
        sample_hvec(&mut rng, n),
    )
}

/// Real coordinates of a seeded point of ℍⁿ.
pub fn coords(n: usize) -> Vec<f64> {
    base_and_vectors(n).0.to_reals()
}
