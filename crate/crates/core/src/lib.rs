//! Convex bodies, L_p Minkowski combinations, Gaussian and density measures,
//! Wills-type functionals, and a harness that checks Brunn-Minkowski type
//! inequalities numerically.

pub mod error;
pub mod experiment;
pub mod functionals;
pub mod geometry;
pub mod measures;
pub mod psum;
pub mod quad;
pub mod rng;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
