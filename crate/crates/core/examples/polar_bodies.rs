//! Polar bodies and the reflection predicates.

use std::sync::Arc;

use lpbm::geometry::{is_weakly_unconditional, polar, reflect_invariant, Body, DirectionGrid, Polytope, Vector, INTERIOR_DELTA};

fn main() -> lpbm::Result<()> {
    let grid = Arc::new(DirectionGrid::default_for(2)?);
    let square = Body::VPolytope(Polytope::cube(2, 1.0)?);
    let dual = polar(&square, &grid, INTERIOR_DELTA)?;
    println!("polar of [-1,1]^2: {:?}", dual.as_polytope().map(|p| p.vertices().to_vec()));
    let big = polar(&square.scale(3.0)?, &grid, INTERIOR_DELTA)?;
    println!("h_(3K)*(e1) = {:.6}, h_K*(e1) / 3 = {:.6}", big.support(&Vector::unit(2, 0))?, dual.support(&Vector::unit(2, 0))? / 3.0);

    let axes = [Vector::unit(2, 0), Vector::unit(2, 1)];
    let shifted = square.translate(&Vector::new(&[1.0, 0.0]))?;
    println!("square unconditional: {}", reflect_invariant(&square, &axes)?);
    println!("shifted square unconditional: {}", reflect_invariant(&shifted, &axes)?);
    let tri = Body::polytope(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]].map(|c| Vector::new(&c)))?;
    println!("triangle weakly unconditional: {}", is_weakly_unconditional(&tri, 1e-9)?);
    Ok(())
}
