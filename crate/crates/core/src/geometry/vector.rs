use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ambient dimension handled by the library.
pub const MAX_DIM: usize = 4;

/// A point or direction in R^n, 1 <= n <= 4, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Vector {
    /// Builds a vector from its coordinates.
    ///
    /// Panics when the slice is empty or longer than [`MAX_DIM`]; use
    /// [`Vector::try_new`] for untrusted input.
    pub fn new(coords: &[f64]) -> Self {
        Self::try_new(coords).expect("vector dimension must be in 1..=4")
    }

    pub fn try_new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        let mut buf = [0.0; MAX_DIM];
        buf[..dim].copy_from_slice(coords);
        Ok(Self { coords: buf, dim })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension must be in 1..=4");
        Self {
            coords: [0.0; MAX_DIM],
            dim,
        }
    }

    /// The `axis`-th standard basis vector.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[axis] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            s += self.coords[i] * other.coords[i];
        }
        s
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Unit vector in the same direction, or `None` for (near) zero input.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE || !n.is_finite() {
            None
        } else {
            Some(*self * (1.0 / n))
        }
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        (*self - *other).norm()
    }

    /// Componentwise approximate equality with absolute tolerance `tol`.
    pub fn approx_eq(&self, other: &Vector, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .as_slice()
                .iter()
                .zip(other.as_slice())
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Cross product; both vectors must be three dimensional.
    pub fn cross(&self, other: &Vector) -> Vector {
        debug_assert!(self.dim == 3 && other.dim == 3);
        let a = &self.coords;
        let b = &other.coords;
        Vector {
            coords: [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
                0.0,
            ],
            dim: 3,
        }
    }

    /// Coordinates with every axis where `mask` is false set to zero.
    pub fn masked(&self, mask: u32) -> Vector {
        let mut out = *self;
        for i in 0..self.dim {
            if mask & (1 << i) == 0 {
                out.coords[i] = 0.0;
            }
        }
        out
    }

    /// Reflection through the hyperplane with unit normal `normal`.
    pub fn reflect(&self, normal: &Vector) -> Vector {
        *self - *normal * (2.0 * self.dot(normal))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        let mut out = *self;
        for i in 0..self.dim {
            out.coords[i] = f(self.coords[i]);
        }
        out
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        debug_assert!(i < self.dim);
        &self.coords[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        debug_assert!(i < self.dim);
        &mut self.coords[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    #[inline]
    fn add(mut self, rhs: Vector) -> Vector {
        self += rhs;
        self
    }
}

impl AddAssign for Vector {
    #[inline]
    fn add_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.coords[i] += rhs.coords[i];
        }
    }
}

impl Sub for Vector {
    type Output = Vector;
    #[inline]
    fn sub(mut self, rhs: Vector) -> Vector {
        self -= rhs;
        self
    }
}

impl SubAssign for Vector {
    #[inline]
    fn sub_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.coords[i] -= rhs.coords[i];
        }
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    #[inline]
    fn mul(mut self, rhs: f64) -> Vector {
        for c in self.coords.iter_mut() {
            *c *= rhs;
        }
        self
    }
}

impl Neg for Vector {
    type Output = Vector;
    #[inline]
    fn neg(self) -> Vector {
        self * -1.0
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_slice())
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Vector::try_new(&coords).map_err(serde::de::Error::custom)
    }
}

/// Arithmetic mean of a nonempty point list.
pub fn centroid(points: &[Vector]) -> Vector {
    let mut c = Vector::zeros(points[0].dim());
    for p in points {
        c += *p;
    }
    c * (1.0 / points.len() as f64)
}
