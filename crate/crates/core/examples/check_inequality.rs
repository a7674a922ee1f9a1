//! Single inequality checks and an equality probe.

use lpbm::functionals::FunctionalSpec;
use lpbm::geometry::{Body, Polytope, Vector};
use lpbm::measures::MeasureSpec;
use lpbm::verify::{check_lp_bm, check_polar_lp_bm, equality_probe, CheckOptions, InequalitySpec};

fn main() -> lpbm::Result<()> {
    let opts = CheckOptions::new(2, 11, 100_000)?;
    let gauss = InequalitySpec::new("gaussian", FunctionalSpec::Measure { measure: MeasureSpec::Gaussian }, 0.5);
    let k = Body::VPolytope(Polytope::cube(2, 1.0)?);
    let l = Body::polytope(&[[1.5, 0.0], [-1.5, 0.0], [0.0, 0.7], [0.0, -0.7]].map(|c| Vector::new(&c)))?;
    for p in [1.0, 2.0, 4.0] {
        let r = check_lp_bm(&gauss, &k, &l, 0.5, p, &opts)?;
        let c = r.comparison.as_ref().unwrap();
        println!("gaussian p={p}: lhs {:.5} rhs {:.5} slack {:+.2} sigma -> {:?}", c.lhs.value, c.rhs.value, c.slack_in_sigma, r.verdict);
    }
    let (main, base) = check_polar_lp_bm(0, &k, &Body::unit_ball(2), 2.0, 0.5, &opts)?;
    println!("polar area p=2: {:?}, p=1: {:?}", main.verdict, base.verdict);

    let probe = equality_probe(&gauss, &k, &k.scale(2.0)?, &[0.25, 0.5, 0.75], &[1.0, 1.5, 2.0, 4.0], &opts)?;
    println!(
        "dilatates under the Gaussian measure: equality expected {}, strictly positive {}, smallest slack {:.2} sigma",
        probe.equality_expected, probe.strictly_positive, probe.min_slack.2
    );
    let probe = equality_probe(&gauss, &k, &k, &[0.5], &[2.0], &opts)?;
    println!("identical pair consistent: {}", probe.consistent());
    Ok(())
}
