//! The Wills functional and its generalization with a gauge body and profile.

use lpbm::functionals::{generalized_wills, generalized_wills_exact, weights_identity_check, wills_exact, wills_hadwiger, UFamily, VolumeEngine};
use lpbm::geometry::{Body, Polytope, Vector};
use lpbm::measures::McBudget;

fn main() -> lpbm::Result<()> {
    let budget = McBudget::new(5, 200_000).with_shards(4);
    let unit = Body::polytope(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]].map(|c| Vector::new(&c)))?;
    let w = wills_hadwiger(&unit, &budget)?;
    println!("W([0,1]^2): Hadwiger {:.4} ± {:.4}, exact {}", w.value, w.std_error, wills_exact(&unit).unwrap().value);

    let gauge = Body::VPolytope(Polytope::cube(2, 1.0)?);
    for u in [UFamily::CLASSICAL, UFamily::Affine { a: 1.0, b: 0.0 }, UFamily::Power { k: 1.5 }] {
        let direct = generalized_wills(&unit, &gauge, &u, &budget)?;
        let layered = generalized_wills_exact(&unit, &gauge, &u)?;
        println!("{u:?}: direct {:.4} ± {:.4}, Steiner weights {:.4}", direct.value, direct.std_error, layered.value);
    }
    let r = weights_identity_check(&unit, &Body::unit_ball(2), &UFamily::Affine { a: 1.0, b: 1.0 }, &VolumeEngine::Exact, &budget)?;
    println!("layer-cake identity discrepancy: {:.2} sigma", r.discrepancy_sigma);
    Ok(())
}
