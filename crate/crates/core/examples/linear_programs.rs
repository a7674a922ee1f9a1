//! The dense simplex solver and the distance routines built on it.

use lpbm::geometry::{Body, Polytope, Vector};
use lpbm::solver::{euclidean_distance, frank_wolfe_distance, gauge_distance, membership, solve_lp, LpProblem, Relation};

fn main() -> lpbm::Result<()> {
    let mut lp = LpProblem::maximize(vec![3.0, 2.0]);
    lp.add(vec![1.0, 1.0], Relation::Le, 4.0).add(vec![1.0, 3.0], Relation::Le, 6.0);
    let sol = solve_lp(&lp)?;
    println!("{:?}: value {} at {:?}, dual {:?}", sol.status, sol.value, sol.point, sol.dual_value);

    let square = Body::VPolytope(Polytope::cube(2, 1.0)?);
    let x = Vector::new(&[2.0, 2.0]);
    println!("(2,2) in K: {}", membership(&x, &square, 1e-9)?);
    println!("euclidean distance: {:.9}", euclidean_distance(&x, &square)?);
    let fw = frank_wolfe_distance(&x, square.as_polytope().unwrap().vertices())?;
    println!("Frank-Wolfe: {:.9} after {} iterations (gap {:.1e})", fw.distance, fw.iterations, fw.gap);
    let point = Body::polytope(&[Vector::zeros(2)])?;
    println!("square gauge of (3,1) from the origin: {}", gauge_distance(&Vector::new(&[3.0, 1.0]), &point, &square)?);
    Ok(())
}
