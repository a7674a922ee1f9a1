//! Convex bodies and exact geometric operations on them.

mod body;
mod grid;
mod hull;
mod literal;
mod polytope;
mod vector;

pub use body::{
    convex_hull, is_weakly_unconditional, minkowski_sum, points_weakly_unconditional, polar,
    reflect_invariant, Body, SupportTable, INTERIOR_DELTA,
};
pub use grid::{DirectionGrid, GridDescriptor, DEFAULT_M_2D, DEFAULT_M_HIGH};
pub use hull::{convex_hull_points, Facet, Hull, DEDUP_EPS};
pub use literal::{parse_body, BodyLiteral};
pub use polytope::Polytope;
pub use vector::{centroid, Vector, MAX_DIM};
