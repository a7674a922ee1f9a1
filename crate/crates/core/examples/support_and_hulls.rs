//! Support functions, hulls and Minkowski sums of small bodies.

use std::sync::Arc;

use lpbm::geometry::{convex_hull_points, minkowski_sum, Body, DirectionGrid, Vector};

fn main() -> lpbm::Result<()> {
    let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.25], [0.0, 1.0], [1.0, 1.0]].map(|c| Vector::new(&c));
    let hull = convex_hull_points(&pts)?;
    println!("hull of {} points keeps {} vertices", pts.len(), hull.vertices.len());

    let square = Body::polytope(&hull.vertices)?;
    let disc = Body::unit_ball(2);
    let table = Arc::new(DirectionGrid::new(2, 720, 0)?);
    let sum = minkowski_sum(&square, &disc, Some(&table))?;
    let grid = DirectionGrid::new(2, 8, 0)?;
    for u in grid.directions() {
        println!(
            "u = ({:+.3}, {:+.3})  h_K = {:.4}  h_B = {:.4}  h_(K+B) = {:.4}",
            u[0],
            u[1],
            square.support(u)?,
            disc.support(u)?,
            sum.support(u)?
        );
    }
    let scaled = square.scale(2.0)?;
    println!("h_2K(1,1) = {}", scaled.support(&Vector::new(&[1.0, 1.0]))?);
    Ok(())
}
