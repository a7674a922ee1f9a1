//! L_p combinations of bodies: Firey's support-function form and the
//! Lutwak-Yang-Zhang point-set form.
//!
//! For `p >= 1`, `lambda in (0,1)` and the Hölder conjugate `q`, the LYZ
//! combination `(1-lambda).K +_p lambda.L` is the union over `mu in [0,1]`
//! of the slices `t(mu) K + s(mu) L` with
//! `t = (1-mu)^{1/q} (1-lambda)^{1/p}` and `s = mu^{1/q} lambda^{1/p}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{minkowski_sum, Body, DirectionGrid, Polytope, SupportTable, Vector};
use crate::rng;

/// Default number of uniform points in a [`MuGrid`].
pub const DEFAULT_MU_POINTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PCombinationSpec {
    pub p: f64,
    pub lambda: f64,
}

impl PCombinationSpec {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("p = {p} must be a finite real >= 1")));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} must lie in (0,1)")));
        }
        Ok(Self { p, lambda })
    }

    /// Hölder conjugate; infinite for `p = 1`.
    pub fn q(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// `1/q`, i.e. `1 - 1/p`.
    pub fn inv_q(&self) -> f64 {
        1.0 - 1.0 / self.p
    }

    /// Slice coefficients `(t, s)` at `mu`.
    pub fn holder_step(&self, mu: f64) -> (f64, f64) {
        holder_step(self.p, self.lambda, mu)
    }

    /// Support of the convex hull of the LYZ combination, given the
    /// supports `a = h(K,u)` and `b = h(L,u)`.
    ///
    /// When both are nonnegative this is Firey's
    /// `((1-lambda) a^p + lambda b^p)^{1/p}`.
    pub fn combine_support(&self, a: f64, b: f64) -> f64 {
        let (p, l) = (self.p, self.lambda);
        let alpha = (1.0 - l).powf(1.0 / p) * a;
        let beta = l.powf(1.0 / p) * b;
        if p == 1.0 {
            return alpha + beta;
        }
        if a >= 0.0 && b >= 0.0 {
            ((1.0 - l) * a.powf(p) + l * b.powf(p)).powf(1.0 / p)
        } else {
            alpha.max(beta)
        }
    }
}

/// `t = (1-mu)^{1/q}(1-lambda)^{1/p}`, `s = mu^{1/q} lambda^{1/p}`; for
/// `p = 1` the `mu` factors are read as 1.
pub fn holder_step(p: f64, lambda: f64, mu: f64) -> (f64, f64) {
    let inv_q = 1.0 - 1.0 / p;
    let pw = |x: f64| if inv_q == 0.0 { 1.0 } else { x.powf(inv_q) };
    (pw(1.0 - mu) * (1.0 - lambda).powf(1.0 / p), pw(mu) * lambda.powf(1.0 / p))
}

/// The optimal `mu = lambda F(L)^{p alpha} / ((1-lambda) F(K)^{p alpha} + lambda F(L)^{p alpha})`.
pub fn mu_star(lambda: f64, fk: f64, fl: f64, p: f64, alpha: f64) -> f64 {
    let a = (1.0 - lambda) * fk.powf(p * alpha);
    let b = lambda * fl.powf(p * alpha);
    b / (a + b)
}

/// Sorted discretization of `[0,1]` containing both endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct MuGrid {
    values: Vec<f64>,
    resolution: usize,
}

impl MuGrid {
    /// `resolution` equally spaced points from 0 to 1.
    pub fn uniform(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidArgument("mu grid needs at least two points".into()));
        }
        let values = (0..resolution)
            .map(|k| k as f64 / (resolution - 1) as f64)
            .collect();
        Ok(Self { values, resolution })
    }

    /// Adds `mu` if it is not already present.
    pub fn with_point(mut self, mu: f64) -> Self {
        if mu.is_finite() && (0.0..=1.0).contains(&mu) && !self.values.iter().any(|v| (v - mu).abs() < 1e-15) {
            let pos = self.values.partition_point(|v| *v < mu);
            self.values.insert(pos, mu);
        }
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }
}

impl Default for MuGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_MU_POINTS).expect("default mu grid")
    }
}

fn same_body(k: &Body, l: &Body) -> bool {
    match (k, l) {
        (Body::VPolytope(a), Body::VPolytope(b)) => a.same_vertices(b, 0.0),
        (Body::Ball { center: c1, radius: r1 }, Body::Ball { center: c2, radius: r2 }) => c1 == c2 && r1 == r2,
        _ => false,
    }
}

/// Firey combination `(1-lambda).K +_p lambda.L` as a support table.
///
/// Identical bodies, centred balls and `p = 1` on polytopes are returned
/// exactly instead.
pub fn firey_combination(k: &Body, l: &Body, spec: &PCombinationSpec, grid: &Arc<DirectionGrid>) -> Result<Body> {
    if k.dim() != l.dim() || k.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: if k.dim() != grid.dim() { k.dim() } else { l.dim() },
        });
    }
    let hk = k.support_values(grid)?;
    let hl = l.support_values(grid)?;
    let tol = 1e-12;
    if let Some(v) = hk.iter().chain(&hl).copied().find(|v| *v < -tol) {
        return Err(Error::NegativeSupport { value: v });
    }
    if same_body(k, l) {
        return Ok(k.clone());
    }
    if let (Body::Ball { center: c1, radius: r1 }, Body::Ball { center: c2, radius: r2 }) = (k, l) {
        if c1.max_abs() == 0.0 && c2.max_abs() == 0.0 {
            let r = spec.combine_support(*r1, *r2);
            return Body::ball(*c1, r);
        }
    }
    if spec.p == 1.0 {
        if let (Body::VPolytope(_), Body::VPolytope(_)) = (k, l) {
            return minkowski_sum(&k.scale(1.0 - spec.lambda)?, &l.scale(spec.lambda)?, None);
        }
    }
    let values = hk
        .iter()
        .zip(&hl)
        .map(|(a, b)| spec.combine_support(a.max(0.0), b.max(0.0)))
        .collect();
    let hint = k.interior_point() * (1.0 - spec.lambda) + l.interior_point() * spec.lambda;
    Ok(Body::SupportTable(SupportTable::new(grid.clone(), values, hint, true)?))
}

/// Points `t(mu) x + s(mu) y` for all `mu` in the grid, `x` in `k`, `y` in `l`.
pub fn lyz_point_combination(k: &[Vector], l: &[Vector], spec: &PCombinationSpec, mu_grid: &MuGrid) -> Result<Vec<Vector>> {
    if k.is_empty() || l.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let mut out = Vec::with_capacity(mu_grid.values().len() * k.len() * l.len());
    for &mu in mu_grid.values() {
        let (t, s) = spec.holder_step(mu);
        for x in k {
            for y in l {
                out.push(*x * t + *y * s);
            }
        }
    }
    Ok(out)
}

/// Finite inner approximation of a body, used as the generator set for
/// LYZ slices: polytope vertices, or grid points on a ball's boundary.
pub fn inner_points(body: &Body, grid: &DirectionGrid) -> Result<Vec<Vector>> {
    match body {
        Body::VPolytope(p) => Ok(p.vertices().to_vec()),
        Body::Ball { center, radius } => Ok(grid.directions().iter().map(|u| *center + *u * *radius).collect()),
        Body::SupportTable(_) => Err(Error::Unsupported(
            "support tables are outer approximations; no inner point set".into(),
        )),
    }
}

/// Slice `t K + s L` as a hull-reduced polytope.
fn slice(kp: &[Vector], lp: &[Vector], t: f64, s: f64) -> Result<Polytope> {
    let mut pts = Vec::with_capacity(kp.len() * lp.len());
    for x in kp {
        for y in lp {
            pts.push(*x * t + *y * s);
        }
    }
    Polytope::from_points(&pts)
}

/// All LYZ slices over the mu grid.
pub fn lyz_slices(k: &Body, l: &Body, spec: &PCombinationSpec, mu_grid: &MuGrid, grid: &DirectionGrid) -> Result<Vec<Polytope>> {
    let kp = inner_points(k, grid)?;
    let lp = inner_points(l, grid)?;
    mu_grid
        .values()
        .iter()
        .map(|&mu| {
            let (t, s) = spec.holder_step(mu);
            slice(&kp, &lp, t, s)
        })
        .collect()
}

/// Convex hull of the LYZ slices: an inner approximation of the
/// combination when `K` and `L` are convex and contain the origin.
pub fn lyz_inner_body(k: &Body, l: &Body, spec: &PCombinationSpec, mu_grid: &MuGrid, grid: &DirectionGrid) -> Result<Body> {
    let slices = lyz_slices(k, l, spec, mu_grid, grid)?;
    let pts: Vec<Vector> = slices.iter().flat_map(|s| s.vertices().iter().copied()).collect();
    Ok(Body::VPolytope(Polytope::from_points(&pts)?))
}

/// The LYZ combination as a union of convex slices; used for sets that do
/// not contain the origin, where the union need not be convex.
#[derive(Clone, Debug)]
pub struct LyzUnion {
    pub slices: Vec<Polytope>,
}

impl LyzUnion {
    pub fn new(k: &Body, l: &Body, spec: &PCombinationSpec, mu_grid: &MuGrid, grid: &DirectionGrid) -> Result<Self> {
        Ok(Self {
            slices: lyz_slices(k, l, spec, mu_grid, grid)?,
        })
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        for s in &self.slices {
            let (lo, hi) = s.bounding_box();
            if (0..x.dim()).any(|i| x[i] < lo[i] - tol || x[i] > hi[i] + tol) {
                continue;
            }
            let inside = match s.contains_by_facets(x, tol) {
                Some(b) => b,
                None => crate::solver::membership(x, &Body::VPolytope(s.clone()), tol)?,
            };
            if inside {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn bounding_box(&self) -> (Vector, Vector) {
        let (mut lo, mut hi) = self.slices[0].bounding_box();
        for s in &self.slices[1..] {
            let (a, b) = s.bounding_box();
            for i in 0..lo.dim() {
                lo[i] = lo[i].min(a[i]);
                hi[i] = hi[i].max(b[i]);
            }
        }
        (lo, hi)
    }
}

/// Result of [`inclusion_check`].
#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub samples: usize,
    pub violations: usize,
    pub max_violation: f64,
    /// Smallest and largest `h_p(u) - ((1-lambda) h_K(u) + lambda h_L(u))` over the grid.
    pub min_support_slack: f64,
    pub max_support_slack: f64,
}

/// Checks `(1-lambda) K + lambda L` against the p-combination.
///
/// Samples `z = (1-lambda) x + lambda y` with `x`, `y` random convex
/// combinations of the generators of `K` and `L`, and tests `z` against the
/// outer support table of the combination.
pub fn inclusion_check(
    k: &Body,
    l: &Body,
    spec: &PCombinationSpec,
    grid: &DirectionGrid,
    n_samples: usize,
    seed: u64,
) -> Result<InclusionReport> {
    let hk = k.support_values(grid)?;
    let hl = l.support_values(grid)?;
    let hp: Vec<f64> = hk.iter().zip(&hl).map(|(a, b)| spec.combine_support(*a, *b)).collect();
    let mut min_slack = f64::INFINITY;
    let mut max_slack = f64::NEG_INFINITY;
    for i in 0..grid.len() {
        let s = hp[i] - ((1.0 - spec.lambda) * hk[i] + spec.lambda * hl[i]);
        min_slack = min_slack.min(s);
        max_slack = max_slack.max(s);
    }
    let kp = inner_points(k, grid)?;
    let lp = inner_points(l, grid)?;
    let scale = hk.iter().chain(&hl).fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;
    let mut r = rng::stream(seed, &[rng::tag("inclusion")]);
    let mut violations = 0;
    let mut max_violation = 0.0_f64;
    for _ in 0..n_samples {
        let x = rng::convex_combination(&mut r, &kp);
        let y = rng::convex_combination(&mut r, &lp);
        let z = x * (1.0 - spec.lambda) + y * spec.lambda;
        let excess = grid
            .directions()
            .iter()
            .zip(&hp)
            .map(|(u, h)| u.dot(&z) - h)
            .fold(f64::NEG_INFINITY, f64::max);
        if excess > tol {
            violations += 1;
        }
        max_violation = max_violation.max(excess);
    }
    Ok(InclusionReport {
        samples: n_samples,
        violations,
        max_violation,
        min_support_slack: min_slack,
        max_support_slack: max_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2(m: usize) -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::new(2, m, 0).unwrap())
    }

    #[test]
    fn conjugate() {
        let s = PCombinationSpec::new(3.0, 0.5).unwrap();
        assert!((1.0 / s.p + 1.0 / s.q() - 1.0).abs() < 1e-12);
        assert!(PCombinationSpec::new(1.0, 0.5).unwrap().q().is_infinite());
        assert!(PCombinationSpec::new(0.5, 0.5).is_err());
        assert!(PCombinationSpec::new(2.0, 1.0).is_err());
    }

    #[test]
    fn identity_case() {
        let g = grid2(64);
        let k = Body::VPolytope(Polytope::cube(2, 1.0).unwrap());
        let t = SupportTable::from_fn(g.clone(), Vector::zeros(2), false, |u| k.support(u).unwrap()).unwrap();
        let tb = Body::SupportTable(t);
        let c = firey_combination(&tb, &tb, &PCombinationSpec::new(2.5, 0.3).unwrap(), &g).unwrap();
        for i in 0..g.len() {
            let a = c.support_on(&g, i).unwrap();
            assert!((a - k.support(g.get(i)).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn p_one_is_minkowski() {
        let g = grid2(64);
        let k = Body::VPolytope(Polytope::cuboid(&[0.0, 0.0], &[2.0, 2.0]).unwrap());
        let l = Body::VPolytope(Polytope::point(Vector::zeros(2)));
        let c = firey_combination(&k, &l, &PCombinationSpec::new(1.0, 0.5).unwrap(), &g).unwrap();
        assert!(c
            .as_polytope()
            .unwrap()
            .same_vertices(&Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1e-12));
    }

    #[test]
    fn direct_formula() {
        let g = grid2(64);
        let k = Body::VPolytope(Polytope::cube(2, 1.0).unwrap());
        let l = Body::unit_ball(2);
        let c = firey_combination(&k, &l, &PCombinationSpec::new(2.0, 0.5).unwrap(), &g).unwrap();
        let i = g.index_of(&Vector::new(&[1.0, 0.0])).unwrap();
        assert!((c.support_on(&g, i).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_support_is_rejected() {
        let g = grid2(16);
        let k = Body::VPolytope(Polytope::cuboid(&[1.0, 1.0], &[2.0, 2.0]).unwrap());
        let r = firey_combination(&k, &k, &PCombinationSpec::new(2.0, 0.5).unwrap(), &g);
        assert!(matches!(r, Err(Error::NegativeSupport { .. })));
    }

    #[test]
    fn lyz_endpoints() {
        let spec = PCombinationSpec::new(2.0, 0.5).unwrap();
        let x = Vector::new(&[1.0, 2.0]);
        let y = Vector::new(&[-3.0, 0.5]);
        let mu = MuGrid::uniform(5).unwrap();
        let pts = lyz_point_combination(&[x], &[y], &spec, &mu).unwrap();
        let (t0, _) = spec.holder_step(0.0);
        assert!(pts[0].approx_eq(&(x * t0), 1e-15));
        let (_, s1) = spec.holder_step(1.0);
        assert!(pts[4].approx_eq(&(y * s1), 1e-15));
        let z = lyz_point_combination(&[Vector::zeros(2)], &[Vector::zeros(2)], &spec, &mu).unwrap();
        assert!(z.iter().all(|p| p.max_abs() == 0.0));
    }

    #[test]
    fn mu_grid_contains_optimizer() {
        let g = MuGrid::default().with_point(0.123);
        assert_eq!(g.values().len(), DEFAULT_MU_POINTS + 1);
        assert!(g.values().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.values()[0], 0.0);
        assert_eq!(*g.values().last().unwrap(), 1.0);
    }

    #[test]
    fn inclusion_for_identical_body_and_shifted_body() {
        let g = grid2(90);
        let spec = PCombinationSpec::new(2.0, 0.5).unwrap();
        let k = Body::VPolytope(Polytope::cube(2, 1.0).unwrap());
        let r = inclusion_check(&k, &k, &spec, &g, 2000, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_support_slack.abs() < 1e-12);
        let shifted = k.translate(&Vector::new(&[3.0, 0.0])).unwrap();
        let r = inclusion_check(&shifted, &shifted, &spec, &g, 2000, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_support_slack > 0.1);
    }
}
