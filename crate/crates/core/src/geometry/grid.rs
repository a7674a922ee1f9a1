use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::vector::{Vector, MAX_DIM};
use crate::error::{Error, Result};

/// Default resolution in the plane.
pub const DEFAULT_M_2D: usize = 720;
/// Default resolution in dimensions 3 and 4.
pub const DEFAULT_M_HIGH: usize = 2000;

/// How a grid was built; two grids with equal descriptors are identical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub dim: usize,
    pub resolution: usize,
    pub seed: u64,
}

/// A fixed, antipodally closed set of unit directions.
///
/// Directions are stored in two halves: entry `i + len/2` is always the
/// negation of entry `i`.
#[derive(Clone, Debug)]
pub struct DirectionGrid {
    descriptor: GridDescriptor,
    directions: Vec<Vector>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_fraction(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

impl DirectionGrid {
    /// Grid with the default resolution for `dim`.
    pub fn default_for(dim: usize) -> Result<Self> {
        let m = if dim <= 2 { DEFAULT_M_2D } else { DEFAULT_M_HIGH };
        Self::new(dim, m, 0)
    }

    /// Builds a grid of (about) `resolution` directions.
    ///
    /// In the plane the directions are `resolution` equally spaced angles
    /// (rounded up to an even count). In dimensions 3 and 4 half of the
    /// directions come from a shifted low-discrepancy sequence on the upper
    /// hemisphere, together with the coordinate axes, and the other half are
    /// their antipodes. In dimension 1 the grid is `{+1, -1}`.
    pub fn new(dim: usize, resolution: usize, seed: u64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if dim > 1 && resolution < 2 * dim {
            return Err(Error::InvalidArgument(format!(
                "grid resolution {resolution} too small for dimension {dim}"
            )));
        }
        let half: Vec<Vector> = match dim {
            1 => vec![Vector::new(&[1.0])],
            2 => {
                let m = resolution + resolution % 2;
                (0..m / 2)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / m as f64;
                        Vector::new(&[t.cos(), t.sin()])
                    })
                    .collect()
            }
            _ => {
                let h = resolution.div_ceil(2);
                let shift = [
                    unit_fraction(splitmix64(seed)),
                    unit_fraction(splitmix64(seed ^ 0xA5A5)),
                    unit_fraction(splitmix64(seed ^ 0x5A5A_5A5A)),
                ];
                let mut dirs: Vec<Vector> = (0..dim).map(|i| Vector::unit(dim, i)).collect();
                let extra = h.saturating_sub(dim);
                if dim == 3 {
                    let golden = (1.0 + 5f64.sqrt()) / 2.0;
                    for k in 0..extra {
                        let z = (k as f64 + 0.5) / extra as f64;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let phi = 2.0 * PI * ((k as f64 / golden + shift[0]).fract());
                        dirs.push(Vector::new(&[r * phi.cos(), r * phi.sin(), z]));
                    }
                } else {
                    for k in 0..extra {
                        let i = k as u64 + 1;
                        let u1 = (radical_inverse(i, 2) + shift[0]).fract();
                        let u2 = (radical_inverse(i, 3) + shift[1]).fract();
                        let u3 = (radical_inverse(i, 5) + shift[2]).fract();
                        let (r1, r2) = (u1.sqrt(), (1.0 - u1).sqrt());
                        let (t1, t2) = (2.0 * PI * u2, 2.0 * PI * u3);
                        let mut v = Vector::new(&[r1 * t1.cos(), r1 * t1.sin(), r2 * t2.cos(), r2 * t2.sin()]);
                        if v[3] < 0.0 {
                            v = -v;
                        }
                        dirs.push(v.normalized().unwrap_or_else(|| Vector::unit(4, 3)));
                    }
                }
                dirs
            }
        };
        let mut directions = half.clone();
        directions.extend(half.iter().map(|v| -*v));
        Ok(Self {
            descriptor: GridDescriptor {
                dim,
                resolution,
                seed,
            },
            directions,
        })
    }

    pub fn descriptor(&self) -> GridDescriptor {
        self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.descriptor.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    pub fn get(&self, i: usize) -> &Vector {
        &self.directions[i]
    }

    /// Index of the antipode of direction `i`.
    pub fn antipode(&self, i: usize) -> usize {
        let h = self.directions.len() / 2;
        (i + h) % self.directions.len()
    }

    /// Index of `u` (after normalization) in the grid, within 1e-9.
    pub fn index_of(&self, u: &Vector) -> Option<usize> {
        let u = u.normalized()?;
        self.directions.iter().position(|d| d.approx_eq(&u, 1e-9))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norm_and_antipodes() {
        for (dim, m) in [(1, 2), (2, 720), (2, 7), (3, 2000), (4, 500)] {
            let g = DirectionGrid::new(dim, m, 11).unwrap();
            for (i, d) in g.directions().iter().enumerate() {
                assert!((d.norm() - 1.0).abs() < 1e-12, "dim {dim}");
                let a = g.get(g.antipode(i));
                assert!((*a + *d).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn plane_grid_contains_axes() {
        let g = DirectionGrid::new(2, 720, 0).unwrap();
        assert_eq!(g.len(), 720);
        for u in [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]] {
            assert!(g.index_of(&Vector::new(&u)).is_some());
        }
        assert!(g.index_of(&Vector::new(&[1.0, 1.0])).is_some());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = DirectionGrid::new(3, 300, 5).unwrap();
        let b = DirectionGrid::new(3, 300, 5).unwrap();
        assert_eq!(a.directions(), b.directions());
        assert_eq!(a.len(), 300);
    }
}
