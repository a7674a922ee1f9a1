//! Counter-based random streams.
//!
//! Every stochastic task draws from a ChaCha8 generator seeded with the
//! experiment seed and switched to a stream derived from the task's key, so
//! results do not depend on how tasks are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::Vector;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a task key.
pub fn mix(key: &[u64]) -> u64 {
    key.iter()
        .fold(0x6A09_E667_F3BC_C908, |h, k| splitmix64(h ^ splitmix64(*k)))
}

/// Generator for `(seed, key...)`.
pub fn stream(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix(key));
    rng
}

/// Stable numeric tag for a name, for use inside stream keys.
pub fn tag(name: &str) -> u64 {
    name.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01B3))
}

pub fn normal_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    for i in 0..dim {
        v[i] = rng.sample(StandardNormal);
    }
    v
}

/// Uniform direction on the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        if let Some(u) = normal_vector(rng, dim).normalized() {
            return u;
        }
    }
}

/// Uniform point of the box `[lo, hi]`.
pub fn in_box<R: Rng + ?Sized>(rng: &mut R, lo: &Vector, hi: &Vector) -> Vector {
    let mut v = *lo;
    for i in 0..lo.dim() {
        v[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
    }
    v
}

/// Random convex combination of `points` with flat Dirichlet weights.
pub fn convex_combination<R: Rng + ?Sized>(rng: &mut R, points: &[Vector]) -> Vector {
    let w: Vec<f64> = (0..points.len())
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    let mut z = Vector::zeros(points[0].dim());
    for (p, wi) in points.iter().zip(&w) {
        z += *p * (wi / total);
    }
    z
}
