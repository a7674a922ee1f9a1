//! Quermassintegrals by Steiner fitting and the intrinsic volumes they give.

use lpbm::functionals::{intrinsic_volumes, quermassintegrals_fit, VolumeEngine};
use lpbm::geometry::{Body, Polytope};
use lpbm::measures::McBudget;

fn main() -> lpbm::Result<()> {
    let square = Body::VPolytope(Polytope::cube(2, 1.0)?);
    let disc = Body::unit_ball(2);
    let exact = quermassintegrals_fit(&square, &disc, None, &VolumeEngine::Exact)?;
    println!("W_i([-1,1]^2; B_2) = {:?}, condition {:.1}", exact.w, exact.condition);
    let mc = quermassintegrals_fit(&square, &disc, None, &VolumeEngine::Mc(McBudget::new(3, 200_000)))?;
    for i in 0..=2 {
        println!("  Monte Carlo W_{i} = {:.4} ± {:.4}", mc.w[i], mc.w_err[i]);
    }
    for body in [square, disc, Body::VPolytope(Polytope::cube(3, 0.5)?)] {
        let iv = intrinsic_volumes(&body, &VolumeEngine::Exact)?;
        let v: Vec<f64> = iv.values.iter().map(|e| e.value).collect();
        println!("V = {v:.6?}, sum {:.6}", iv.total().value);
    }
    Ok(())
}
