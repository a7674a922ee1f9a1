use crate::error::Result;
use crate::geometry::{Body, Polytope, Vector};
use crate::quad;
use crate::rng;

use super::density::{AxisDensity, MeasureSpec, RadialDensity};
use super::estimate::{Estimate, McBudget};
use super::volume::{as_polytope, volume, Region};

/// Absolute tolerance of the planar quadrature paths.
pub const QUAD_TOL: f64 = 1e-13;

/// Axis-aligned box `[lo, hi]` if the polytope is one.
pub fn as_box(p: &Polytope) -> Option<(Vector, Vector)> {
    let n = p.dim();
    if !p.is_full_dim() || p.vertices().len() != 1 << n {
        return None;
    }
    let (lo, hi) = p.bounding_box();
    let on = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
    let all = p
        .vertices()
        .iter()
        .all(|v| (0..n).all(|i| on(v[i], lo[i]) || on(v[i], hi[i])));
    all.then_some((lo, hi))
}

/// Standard Gaussian measure; exact for axis-aligned boxes and centred balls,
/// hit-or-miss otherwise.
pub fn gaussian_measure(k: &Body, budget: &McBudget) -> Result<Estimate> {
    if let Some((lo, hi)) = k.as_polytope().and_then(as_box) {
        return Ok(Estimate::exact(box_mass(&unit_gaussian_axes(k.dim()), &lo, &hi)));
    }
    if let Body::Ball { center, radius } = k {
        if center.max_abs() == 0.0 {
            let d = MeasureSpec::Gaussian.as_radial().expect("radial");
            return Ok(Estimate::exact(d.radial_cdf(k.dim(), *radius)));
        }
    }
    gaussian_measure_mc(k, budget)
}

/// Hit-or-miss standard Gaussian measure with binomial error.
pub fn gaussian_measure_mc(k: &Body, budget: &McBudget) -> Result<Estimate> {
    hit_or_miss(k, &MeasureSpec::Gaussian, budget)
}

fn unit_gaussian_axes(n: usize) -> Vec<AxisDensity> {
    vec![AxisDensity::Gaussian { sigma: 1.0 }; n]
}

fn box_mass(axes: &[AxisDensity], lo: &Vector, hi: &Vector) -> f64 {
    axes.iter()
        .enumerate()
        .map(|(i, a)| a.cdf(hi[i]) - a.cdf(lo[i]))
        .product()
}

/// `∫_K f` for the density of `spec`.
///
/// Exact paths: Lebesgue volume where available; boxes under product
/// densities; centred balls under radial densities; polygons in the plane by
/// adaptive boundary quadrature. In higher dimensions, radial densities on
/// bodies with the origin inside use the ray-length estimator
/// `E_u[F(rho_K(u))]`; everything else samples the density and counts hits.
pub fn density_measure(k: &Body, spec: &MeasureSpec, budget: &McBudget) -> Result<Estimate> {
    let n = k.dim();
    spec.validate(n)?;
    match spec {
        MeasureSpec::Lebesgue => volume(k, budget),
        MeasureSpec::Product { axes } => {
            if let Some(p) = as_polytope(k) {
                if let Some((lo, hi)) = as_box(&p) {
                    return Ok(Estimate::exact(box_mass(axes, &lo, &hi)));
                }
                if n == 2 && p.is_full_dim() {
                    return Ok(Estimate::exact(polygon_product_mass(p.vertices(), axes)));
                }
                if !p.is_full_dim() {
                    return Ok(Estimate::exact(0.0));
                }
            }
            hit_or_miss(k, spec, budget)
        }
        MeasureSpec::Gaussian | MeasureSpec::Radial { .. } => {
            let d = spec.as_radial().expect("radial");
            if let Body::Ball { center, radius } = k {
                if center.max_abs() == 0.0 {
                    return Ok(Estimate::exact(d.radial_cdf(n, *radius)));
                }
            }
            if let Some(p) = as_polytope(k) {
                if !p.is_full_dim() {
                    return Ok(Estimate::exact(0.0));
                }
                if n == 1 {
                    let (lo, hi) = p.bounding_box();
                    let f = |x: f64| 0.5 * d.radial_cdf(1, x.abs()) * x.signum();
                    return Ok(Estimate::exact(f(hi[0]) - f(lo[0])));
                }
                if n == 2 {
                    return Ok(Estimate::exact(polygon_radial_mass(p.vertices(), &d)));
                }
                if let Some(est) = ray_estimator(&p, &d, budget)? {
                    return Ok(est);
                }
            }
            hit_or_miss(k, spec, budget)
        }
    }
}

/// Samples the normalized measure and counts points of `K`.
fn hit_or_miss(k: &Body, spec: &MeasureSpec, budget: &McBudget) -> Result<Estimate> {
    let n = k.dim();
    let mass = match spec.total_mass() {
        Some(m) => m,
        None => return volume(k, budget),
    };
    let region = Region::new(k)?;
    let mut err = None;
    let e = budget.mean_of(|r| {
        let x = spec.sample(n, r);
        match region.contains(&x) {
            Ok(b) => f64::from(u8::from(b)),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(e.scaled(mass)),
    }
}

/// Mass of the triangle `conv{0, a, b}`, signed by orientation.
fn triangle_radial_mass(a: &Vector, b: &Vector, d: &RadialDensity) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    if cross.abs() < 1e-300 {
        return 0.0;
    }
    let e = *b - *a;
    // angle swept along the edge: d(theta) = cross / |x(s)|^2 ds
    let v = quad::integrate(
        |s| {
            let x = *a + e * s;
            let r2 = x.norm_sq();
            if r2 == 0.0 {
                return 0.0;
            }
            d.radial_cdf(2, r2.sqrt()) / r2
        },
        0.0,
        1.0,
        QUAD_TOL / cross.abs().max(1e-300),
    );
    cross * v / (2.0 * std::f64::consts::PI)
}

/// Mass of a counterclockwise polygon under a planar radial density.
pub fn polygon_radial_mass(vs: &[Vector], d: &RadialDensity) -> f64 {
    let m = vs.len();
    (0..m)
        .map(|i| triangle_radial_mass(&vs[i], &vs[(i + 1) % m], d))
        .sum::<f64>()
        .max(0.0)
}

/// Mass of a counterclockwise polygon under a product density, by Green's
/// theorem `∫∫ f1 f2 = ∮ F1(x) f2(y) dy`.
pub fn polygon_product_mass(vs: &[Vector], axes: &[AxisDensity]) -> f64 {
    let m = vs.len();
    let mut total = 0.0;
    for i in 0..m {
        let (a, b) = (vs[i], vs[(i + 1) % m]);
        let dy = b[1] - a[1];
        if dy == 0.0 {
            continue;
        }
        let v = quad::integrate(
            |s| axes[0].cdf(a[0] + s * (b[0] - a[0])) * axes[1].pdf(a[1] + s * dy),
            0.0,
            1.0,
            QUAD_TOL / dy.abs(),
        );
        total += v * dy;
    }
    total.max(0.0)
}

/// `E_u[F(rho_K(u))]` over uniform directions, for polytopes with facets
/// and the origin strictly inside.
fn ray_estimator(p: &Polytope, d: &RadialDensity, budget: &McBudget) -> Result<Option<Estimate>> {
    if !p.has_facets() || p.facets().iter().any(|f| f.offset <= 0.0) {
        return Ok(None);
    }
    let n = p.dim();
    let rows: Vec<([f64; 4], f64)> = p
        .facets()
        .iter()
        .map(|f| {
            let mut a = [0.0; 4];
            a[..n].copy_from_slice(f.normal.as_slice());
            (a, f.offset)
        })
        .collect();
    let e = budget.mean_of(|r| {
        let u = rng::unit_vector(r, n);
        let mut w = [0.0; 4];
        w[..n].copy_from_slice(u.as_slice());
        // smallest offset / cos over facets facing u, kept as a fraction
        let (mut num, mut den) = (f64::INFINITY, 1.0);
        for (a, b) in &rows {
            let c = a[0] * w[0] + a[1] * w[1] + a[2] * w[2] + a[3] * w[3];
            if c > 0.0 && *b * den < num * c {
                num = *b;
                den = c;
            }
        }
        d.radial_cdf(n, num / den)
    });
    Ok(Some(e))
}
