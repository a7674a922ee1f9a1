//! Gaussian, product and radial measures of convex bodies, with volumes.

use lpbm::geometry::{Body, Polytope};
use lpbm::measures::{
    density_measure, gaussian_measure, gaussian_measure_mc, is_radially_decreasing, volume_exact, volume_mc, AxisDensity,
    McBudget, MeasureSpec, RadialDensity,
};

fn main() -> lpbm::Result<()> {
    let square = Body::VPolytope(Polytope::cube(2, 1.0)?);
    let budget = McBudget::new(7, 1_000_000).with_shards(4);
    let exact = gaussian_measure(&square, &budget)?;
    let mc = gaussian_measure_mc(&square, &budget)?;
    println!("gamma_2([-1,1]^2): {:.6} ({:?}), Monte Carlo {:.6} ± {:.6}", exact.value, exact.method, mc.value, mc.std_error);
    println!("gamma_2(B_2): {:.6}", gaussian_measure(&Body::unit_ball(2), &budget)?.value);

    let laplace = MeasureSpec::Product {
        axes: vec![AxisDensity::Laplace { scale: 1.0 }; 2],
    };
    println!("Laplace product of [-1,1]^2: {:.6}", density_measure(&square, &laplace, &budget)?.value);
    let cap = MeasureSpec::Radial {
        density: RadialDensity::PowerCap { beta: 0.5 },
    };
    println!("power cap radially decreasing: {}", is_radially_decreasing(&cap, 2, 1000, 3.0, 1)?.holds);

    let octa = Body::VPolytope(Polytope::cross_polytope(3, 1.0)?);
    let v = volume_mc(&octa, &McBudget::new(1, 200_000))?;
    println!("vol(octahedron): exact {:.6}, Monte Carlo {:.4} ± {:.4}", volume_exact(&octa)?.value, v.value, v.std_error);
    Ok(())
}
