#![allow(dead_code)]

use std::path::PathBuf;

use lpbm::geometry::{Body, Vector};
use lpbm::rng;

pub const REGRESSION_SEED: u64 = 20_240_917;

/// Twenty seeded random polytopes: four segments, eight polygons and eight
/// polyhedra. Each contains the cross-polytope of radius 0.2, so the origin
/// is interior.
pub fn regression_set() -> Vec<Body> {
    let dims = [1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3];
    dims.iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut r = rng::stream(REGRESSION_SEED, &[i as u64]);
            let mut pts: Vec<Vector> = (0..4 + 2 * n).map(|_| rng::normal_vector(&mut r, n) * 0.8).collect();
            for a in 0..n {
                pts.push(Vector::unit(n, a) * 0.2);
                pts.push(Vector::unit(n, a) * -0.2);
            }
            Body::polytope(&pts).expect("regression polytope")
        })
        .collect()
}

/// Consecutive same-dimension pairs of the regression set.
pub fn regression_pairs() -> Vec<(Body, Body)> {
    let set = regression_set();
    set.windows(2)
        .filter(|w| w[0].dim() == w[1].dim())
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

pub fn square(a: f64) -> Body {
    Body::polytope(&[v(&[-a, -a]), v(&[a, -a]), v(&[a, a]), v(&[-a, a])]).unwrap()
}

pub fn v(c: &[f64]) -> Vector {
    Vector::new(c)
}

pub fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}
