//! Firey and LYZ p-combinations, and the inclusion of the Minkowski combination.

use std::sync::Arc;

use lpbm::geometry::{Body, DirectionGrid, Polytope, Vector};
use lpbm::measures::volume_exact;
use lpbm::psum::{firey_combination, inclusion_check, lyz_inner_body, MuGrid, PCombinationSpec};

fn main() -> lpbm::Result<()> {
    let grid = Arc::new(DirectionGrid::default_for(2)?);
    let k = Body::VPolytope(Polytope::cube(2, 1.0)?);
    let l = Body::polytope(&[[1.5, 0.0], [-1.5, 0.0], [0.0, 0.7], [0.0, -0.7]].map(|c| Vector::new(&c)))?;
    for p in [1.0, 2.0, 4.0, 16.0] {
        let spec = PCombinationSpec::new(p, 0.5)?;
        let outer = firey_combination(&k, &l, &spec, &grid)?;
        let inner = lyz_inner_body(&k, &l, &spec, &MuGrid::uniform(128)?, &grid)?;
        let h = outer.support(&Vector::unit(2, 0))?;
        println!(
            "p = {p:>4}: h(e1) = {h:.4}, inner volume {:.4}",
            volume_exact(&inner)?.value
        );
    }
    let spec = PCombinationSpec::new(2.0, 0.5)?;
    let report = inclusion_check(&k, &l, &spec, &grid, 10_000, 1)?;
    println!("inclusion: {} violations in {} samples", report.violations, report.samples);
    Ok(())
}
