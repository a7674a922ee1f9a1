use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use super::grid::DirectionGrid;
use super::polytope::Polytope;
use super::vector::Vector;
use crate::error::{Error, Result};
use crate::solver::lp::{solve_lp, LpProblem, LpStatus, Relation};

/// Default margin for "origin strictly interior" checks.
pub const INTERIOR_DELTA: f64 = 1e-9;

/// Support values of a convex body on a fixed direction grid.
///
/// The table stands for the outer polytope `{x : <x,u> <= h(u) for all grid u}`.
#[derive(Debug)]
pub struct SupportTable {
    grid: Arc<DirectionGrid>,
    values: Vec<f64>,
    interior_hint: Vector,
    approximate: bool,
    outer: OnceLock<std::result::Result<Polytope, String>>,
}

impl Clone for SupportTable {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.clone(),
            interior_hint: self.interior_hint,
            approximate: self.approximate,
            outer: OnceLock::new(),
        }
    }
}

impl SupportTable {
    /// `interior_hint` must be an interior point of the represented body; it
    /// anchors the vertex enumeration of the outer polytope.
    pub fn new(grid: Arc<DirectionGrid>, values: Vec<f64>, interior_hint: Vector, approximate: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite support value".into()));
        }
        if interior_hint.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: interior_hint.dim(),
            });
        }
        Ok(Self {
            grid,
            values,
            interior_hint,
            approximate,
            outer: OnceLock::new(),
        })
    }

    /// Tabulates `h` on the grid.
    pub fn from_fn(grid: Arc<DirectionGrid>, interior_hint: Vector, approximate: bool, h: impl Fn(&Vector) -> f64) -> Result<Self> {
        let values = grid.directions().iter().map(h).collect();
        Self::new(grid, values, interior_hint, approximate)
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior_hint(&self) -> Vector {
        self.interior_hint
    }

    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.grid
            .directions()
            .iter()
            .zip(&self.values)
            .all(|(u, h)| u.dot(x) <= h + tol)
    }

    /// The outer polytope as a vertex list (n <= 3).
    ///
    /// Computed by double polarity about the interior hint: the polar of
    /// `P - c` is `conv{u / (h(u) - <c,u>)}`, whose facets give the vertices
    /// of `P`.
    pub fn outer_polytope(&self) -> Result<&Polytope> {
        let r = self.outer.get_or_init(|| self.compute_outer().map_err(|e| e.to_string()));
        r.as_ref().map_err(|m| Error::Unsupported(m.clone()))
    }

    fn compute_outer(&self) -> Result<Polytope> {
        let n = self.grid.dim();
        let c = self.interior_hint;
        if n == 1 {
            let hi = self.values[0];
            let lo = -self.values[1];
            return Polytope::from_points(&[Vector::new(&[lo]), Vector::new(&[hi])]);
        }
        if n > 3 {
            return Err(Error::Unsupported("outer polytope of a support table needs n <= 3".into()));
        }
        let mut dual = Vec::with_capacity(self.values.len());
        for (u, h) in self.grid.directions().iter().zip(&self.values) {
            let g = h - c.dot(u);
            if g <= INTERIOR_DELTA {
                return Err(Error::OriginNotInterior { margin: g });
            }
            dual.push(*u * (1.0 / g));
        }
        let q = Polytope::from_points(&dual)?;
        if !q.has_facets() {
            return Err(Error::Hull("degenerate dual of support table".into()));
        }
        let pts: Vec<Vector> = q
            .facets()
            .iter()
            .map(|f| c + f.normal * (1.0 / f.offset))
            .collect();
        Polytope::from_points(&pts)
    }
}

/// A convex body.
#[derive(Clone, Debug)]
pub enum Body {
    VPolytope(Polytope),
    Ball { center: Vector, radius: f64 },
    SupportTable(SupportTable),
}

impl From<Polytope> for Body {
    fn from(p: Polytope) -> Self {
        Body::VPolytope(p)
    }
}

impl Body {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius {radius} must be positive")));
        }
        Ok(Body::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Body::Ball {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn polytope(points: &[Vector]) -> Result<Self> {
        Ok(Body::VPolytope(Polytope::from_points(points)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::VPolytope(p) => p.dim(),
            Body::Ball { center, .. } => center.dim(),
            Body::SupportTable(t) => t.grid.dim(),
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Body::VPolytope(p) => Some(p),
            _ => None,
        }
    }

    /// `max_{x in K} <x,u>`.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        if u.max_abs() == 0.0 {
            return Err(Error::ZeroDirection);
        }
        Ok(match self {
            Body::VPolytope(p) => p.support(u),
            Body::Ball { center, radius } => center.dot(u) + radius * u.norm(),
            Body::SupportTable(t) => {
                let i = t.grid.index_of(u).ok_or(Error::OffGrid)?;
                t.values[i] * u.norm()
            }
        })
    }

    /// Support value in grid direction `i`; for tables on the same grid this
    /// is a lookup.
    pub fn support_on(&self, grid: &DirectionGrid, i: usize) -> Result<f64> {
        if let Body::SupportTable(t) = self {
            if t.grid.descriptor() == grid.descriptor() {
                return Ok(t.values[i]);
            }
        }
        self.support(grid.get(i))
    }

    /// Support values on every grid direction.
    pub fn support_values(&self, grid: &DirectionGrid) -> Result<Vec<f64>> {
        (0..grid.len()).map(|i| self.support_on(grid, i)).collect()
    }

    /// `rK`.
    pub fn scale(&self, r: f64) -> Result<Body> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("negative scale factor {r}")));
        }
        if r == 0.0 {
            return Ok(Body::VPolytope(Polytope::point(Vector::zeros(self.dim()))));
        }
        Ok(match self {
            Body::VPolytope(p) => Body::VPolytope(p.scaled(r)?),
            Body::Ball { center, radius } => Body::Ball {
                center: *center * r,
                radius: radius * r,
            },
            Body::SupportTable(t) => Body::SupportTable(SupportTable::new(
                t.grid.clone(),
                t.values.iter().map(|h| h * r).collect(),
                t.interior_hint * r,
                t.approximate,
            )?),
        })
    }

    pub fn translate(&self, shift: &Vector) -> Result<Body> {
        Ok(match self {
            Body::VPolytope(p) => Body::VPolytope(p.translated(shift)?),
            Body::Ball { center, radius } => Body::Ball {
                center: *center + *shift,
                radius: *radius,
            },
            Body::SupportTable(t) => Body::SupportTable(SupportTable::new(
                t.grid.clone(),
                t.grid
                    .directions()
                    .iter()
                    .zip(&t.values)
                    .map(|(u, h)| h + u.dot(shift))
                    .collect(),
                t.interior_hint + *shift,
                t.approximate,
            )?),
        })
    }

    /// A point in the relative interior (centroid of vertices, centre, or the
    /// stored hint).
    pub fn interior_point(&self) -> Vector {
        match self {
            Body::VPolytope(p) => p.centroid(),
            Body::Ball { center, .. } => *center,
            Body::SupportTable(t) => t.interior_hint,
        }
    }

    /// Axis-aligned bounding box from the supports along `+-e_i`.
    pub fn bounding_box(&self) -> Result<(Vector, Vector)> {
        let n = self.dim();
        match self {
            Body::VPolytope(p) => Ok(p.bounding_box()),
            Body::Ball { center, radius } => Ok((
                center.map(|c| c - radius),
                center.map(|c| c + radius),
            )),
            Body::SupportTable(t) => {
                let mut lo = Vector::zeros(n);
                let mut hi = Vector::zeros(n);
                for i in 0..n {
                    let e = Vector::unit(n, i);
                    let a = t.grid.index_of(&e).ok_or(Error::OffGrid)?;
                    let b = t.grid.antipode(a);
                    hi[i] = t.values[a];
                    lo[i] = -t.values[b];
                }
                // grids that miss the axes still bound the body through the polytope
                if let Ok(p) = t.outer_polytope() {
                    let (plo, phi) = p.bounding_box();
                    for i in 0..n {
                        lo[i] = lo[i].max(plo[i]);
                        hi[i] = hi[i].min(phi[i]);
                    }
                }
                Ok((lo, hi))
            }
        }
    }

    /// Largest distance from `c` to a point of the body.
    pub fn radius_about(&self, c: &Vector) -> Result<f64> {
        Ok(match self {
            Body::VPolytope(p) => p.radius_about(c),
            Body::Ball { center, radius } => center.dist(c) + radius,
            Body::SupportTable(t) => match t.outer_polytope() {
                Ok(p) => p.radius_about(c),
                Err(_) => {
                    let (lo, hi) = self.bounding_box()?;
                    let mut r2 = 0.0;
                    for i in 0..self.dim() {
                        let d = (lo[i] - c[i]).abs().max((hi[i] - c[i]).abs());
                        r2 += d * d;
                    }
                    r2.sqrt()
                }
            },
        })
    }

    /// Whether `support(K,u) > delta` on every grid direction.
    pub fn origin_interior_on_grid(&self, grid: &DirectionGrid, delta: f64) -> Result<(bool, f64)> {
        let mut worst = f64::INFINITY;
        for i in 0..grid.len() {
            worst = worst.min(self.support_on(grid, i)?);
        }
        Ok((worst > delta, worst))
    }
}

/// Convex hull of a nonempty point list.
pub fn convex_hull(points: &[Vector]) -> Result<Body> {
    Body::polytope(points)
}

/// `K + L`.
///
/// Mixed polytope/ball sums are tabulated on `grid` and flagged approximate;
/// they fail without a grid.
pub fn minkowski_sum(k: &Body, l: &Body, grid: Option<&Arc<DirectionGrid>>) -> Result<Body> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: l.dim(),
        });
    }
    match (k, l) {
        (Body::VPolytope(a), Body::VPolytope(b)) => {
            let mut pts = Vec::with_capacity(a.vertices().len() * b.vertices().len());
            for x in a.vertices() {
                for y in b.vertices() {
                    pts.push(*x + *y);
                }
            }
            Body::polytope(&pts)
        }
        (Body::Ball { center: c1, radius: r1 }, Body::Ball { center: c2, radius: r2 }) => Ok(Body::Ball {
            center: *c1 + *c2,
            radius: r1 + r2,
        }),
        _ => {
            let grid = match (k, l, grid) {
                (_, _, Some(g)) => g.clone(),
                (Body::SupportTable(t), _, None) | (_, Body::SupportTable(t), None) => t.grid.clone(),
                _ => {
                    return Err(Error::InvalidArgument(
                        "mixed Minkowski sum needs a direction grid".into(),
                    ))
                }
            };
            let hk = k.support_values(&grid)?;
            let hl = l.support_values(&grid)?;
            let values = hk.iter().zip(&hl).map(|(a, b)| a + b).collect();
            Ok(Body::SupportTable(SupportTable::new(
                grid,
                values,
                k.interior_point() + l.interior_point(),
                true,
            )?))
        }
    }
}

/// Polar body `K* = {x : <x,y> <= 1 for all y in K}`.
///
/// Requires the origin strictly inside `K`, checked as `support(K,u) > delta`
/// on the grid (and exactly through facets when they are available).
pub fn polar(k: &Body, grid: &Arc<DirectionGrid>, delta: f64) -> Result<Body> {
    if grid.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: grid.dim(),
        });
    }
    let (ok, margin) = k.origin_interior_on_grid(grid, delta)?;
    if !ok {
        return Err(Error::OriginNotInterior { margin });
    }
    match k {
        Body::Ball { center, radius } => {
            if center.max_abs() > 0.0 {
                return Err(Error::Unsupported("polar of an off-centre ball".into()));
            }
            Ok(Body::Ball {
                center: *center,
                radius: 1.0 / radius,
            })
        }
        Body::VPolytope(p) if p.dim() <= 3 => {
            if !p.has_facets() {
                return Err(Error::OriginNotInterior { margin: 0.0 });
            }
            let min_offset = p.facets().iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
            if min_offset <= delta {
                return Err(Error::OriginNotInterior { margin: min_offset });
            }
            let pts: Vec<Vector> = p.facets().iter().map(|f| f.normal * (1.0 / f.offset)).collect();
            Body::polytope(&pts)
        }
        Body::VPolytope(p) => {
            let values = grid
                .directions()
                .iter()
                .map(|u| polar_support_lp(p.vertices(), u))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Body::SupportTable(SupportTable::new(
                grid.clone(),
                values,
                Vector::zeros(p.dim()),
                true,
            )?))
        }
        Body::SupportTable(t) => {
            let pts: Vec<Vector> = t
                .grid
                .directions()
                .iter()
                .zip(&t.values)
                .map(|(u, h)| *u * (1.0 / h))
                .collect();
            Body::polytope(&pts)
        }
    }
}

/// `max <x,u>` subject to `<x,v_i> <= 1`.
fn polar_support_lp(vertices: &[Vector], u: &Vector) -> Result<f64> {
    let n = u.dim();
    let mut lp = LpProblem::maximize(u.as_slice().to_vec());
    for j in 0..n {
        lp.free(j);
    }
    for v in vertices {
        lp.add(v.as_slice().to_vec(), Relation::Le, 1.0);
    }
    let s = solve_lp(&lp)?;
    match s.status {
        LpStatus::Optimal => Ok(s.value),
        LpStatus::Unbounded => Err(Error::OriginNotInterior { margin: 0.0 }),
        LpStatus::Infeasible => Err(Error::Solver("polar support LP infeasible".into())),
    }
}

fn check_normals(dim: usize, normals: &[Vector]) -> Result<()> {
    if normals.iter().any(|u| u.dim() != dim) {
        return Err(Error::InvalidArgument("normal of wrong dimension".into()));
    }
    let m = DMatrix::from_fn(dim, normals.len(), |i, j| normals[j][i]);
    if normals.len() < dim || m.rank(1e-9) < dim {
        return Err(Error::InvalidArgument(format!(
            "need {dim} independent hyperplane normals"
        )));
    }
    Ok(())
}

/// Whether the body is invariant under the reflections through the linear
/// hyperplanes with the given normals.
pub fn reflect_invariant(k: &Body, normals: &[Vector]) -> Result<bool> {
    check_normals(k.dim(), normals)?;
    let units: Vec<Vector> = normals
        .iter()
        .map(|u| u.normalized().ok_or(Error::ZeroDirection))
        .collect::<Result<_>>()?;
    match k {
        Body::VPolytope(p) => {
            for u in &units {
                let refl = p.map_points(|v| v.reflect(u))?;
                if !refl.same_vertices(p, 1e-9) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Body::Ball { center, .. } => Ok(units.iter().all(|u| center.reflect(u).approx_eq(center, 1e-9))),
        Body::SupportTable(_) => Err(Error::Unsupported(
            "reflection test on a support table".into(),
        )),
    }
}

/// Whether every `{0,1}` coordinate masking of every vertex stays in the body.
pub fn is_weakly_unconditional(k: &Body, tol: f64) -> Result<bool> {
    let n = k.dim();
    let points: Vec<Vector> = match k {
        Body::VPolytope(p) => p.vertices().to_vec(),
        Body::Ball { center, .. } => {
            if center.max_abs() <= tol {
                return Ok(true);
            }
            return Err(Error::Unsupported("masking test on an off-centre ball".into()));
        }
        Body::SupportTable(_) => {
            return Err(Error::Unsupported("masking test on a support table".into()))
        }
    };
    for x in &points {
        for mask in 0..(1u32 << n) {
            if !crate::solver::membership(&x.masked(mask), k, tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Weak unconditionality of a finite point set, i.e. of its convex hull.
pub fn points_weakly_unconditional(points: &[Vector], tol: f64) -> Result<bool> {
    is_weakly_unconditional(&convex_hull(points)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c)
    }

    fn square() -> Body {
        Body::VPolytope(Polytope::cube(2, 1.0).unwrap())
    }

    #[test]
    fn support_examples() {
        assert_eq!(square().support(&v(&[1.0, 0.0])).unwrap(), 1.0);
        let b = Body::unit_ball(2);
        assert!((b.support(&v(&[0.6, 0.8])).unwrap() - 1.0).abs() < 1e-15);
        let d = Body::polytope(&[v(&[2.0, 0.0]), v(&[-2.0, 0.0]), v(&[0.0, 2.0]), v(&[0.0, -2.0])]).unwrap();
        assert_eq!(d.support(&v(&[1.0, 1.0])).unwrap(), 2.0);
        assert!(matches!(d.support(&v(&[0.0, 0.0])), Err(Error::ZeroDirection)));
    }

    #[test]
    fn table_rejects_off_grid() {
        let g = Arc::new(DirectionGrid::new(2, 8, 0).unwrap());
        let t = Body::SupportTable(SupportTable::from_fn(g, Vector::zeros(2), false, |u| u.norm()).unwrap());
        assert!(t.support(&v(&[1.0, 0.0])).is_ok());
        assert!(matches!(t.support(&v(&[1.0, 0.1])), Err(Error::OffGrid)));
    }

    #[test]
    fn scaling() {
        let s = square().scale(2.0).unwrap();
        assert!(s.as_polytope().unwrap().same_vertices(&Polytope::cube(2, 2.0).unwrap(), 1e-12));
        match Body::unit_ball(2).scale(0.5).unwrap() {
            Body::Ball { radius, .. } => assert_eq!(radius, 0.5),
            _ => panic!(),
        }
        assert!(square().scale(-1.0).is_err());
        assert_eq!(square().scale(0.0).unwrap().as_polytope().unwrap().vertices().len(), 1);
    }

    #[test]
    fn minkowski_examples() {
        let unit = Body::VPolytope(Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        let s = minkowski_sum(&unit, &unit, None).unwrap();
        assert!(s.as_polytope().unwrap().same_vertices(&Polytope::cuboid(&[0.0, 0.0], &[2.0, 2.0]).unwrap(), 1e-12));
        let a = Body::polytope(&[v(&[-1.0, 0.0]), v(&[1.0, 0.0])]).unwrap();
        let b = Body::polytope(&[v(&[0.0, -1.0]), v(&[0.0, 1.0])]).unwrap();
        let s = minkowski_sum(&a, &b, None).unwrap();
        assert!(s.as_polytope().unwrap().same_vertices(&Polytope::cube(2, 1.0).unwrap(), 1e-12));
        let b1 = Body::unit_ball(2);
        let b2 = Body::ball(Vector::zeros(2), 2.0).unwrap();
        match minkowski_sum(&b1, &b2, None).unwrap() {
            Body::Ball { radius, .. } => assert_eq!(radius, 3.0),
            _ => panic!(),
        }
        assert!(minkowski_sum(&square(), &b1, None).is_err());
        let g = Arc::new(DirectionGrid::new(2, 16, 0).unwrap());
        match minkowski_sum(&square(), &b1, Some(&g)).unwrap() {
            Body::SupportTable(t) => assert!(t.is_approximate()),
            _ => panic!(),
        }
    }

    #[test]
    fn polar_examples() {
        let g = Arc::new(DirectionGrid::new(2, 64, 0).unwrap());
        let p = polar(&square(), &g, INTERIOR_DELTA).unwrap();
        assert!(p
            .as_polytope()
            .unwrap()
            .same_vertices(&Polytope::cross_polytope(2, 1.0).unwrap(), 1e-12));
        match polar(&Body::unit_ball(2), &g, INTERIOR_DELTA).unwrap() {
            Body::Ball { radius, .. } => assert_eq!(radius, 1.0),
            _ => panic!(),
        }
        let shifted = square().translate(&v(&[1.0, 0.0])).unwrap();
        assert!(matches!(polar(&shifted, &g, INTERIOR_DELTA), Err(Error::OriginNotInterior { .. })));
    }

    #[test]
    fn polar_in_four_dimensions_is_tabulated() {
        let g = Arc::new(DirectionGrid::new(4, 40, 1).unwrap());
        let cube = Body::VPolytope(Polytope::cube(4, 1.0).unwrap());
        let p = polar(&cube, &g, INTERIOR_DELTA).unwrap();
        // polar of the cube is the cross-polytope: h(u) = max |u_i|
        for (i, u) in g.directions().iter().enumerate() {
            assert!((p.support_on(&g, i).unwrap() - u.max_abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn outer_polytope_of_table() {
        let g = Arc::new(DirectionGrid::new(2, 720, 0).unwrap());
        let t = SupportTable::from_fn(g, Vector::zeros(2), false, |u| u[0].abs() + u[1].abs()).unwrap();
        let p = t.outer_polytope().unwrap();
        assert!(p.same_vertices(&Polytope::cube(2, 1.0).unwrap(), 1e-9));
    }

    #[test]
    fn reflections() {
        assert!(reflect_invariant(&square(), &[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap());
        let shifted = square().translate(&v(&[1.0, 0.0])).unwrap();
        assert!(!reflect_invariant(&shifted, &[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap());
        assert!(reflect_invariant(&square(), &[v(&[1.0, 0.0])]).is_err());
    }

    #[test]
    fn weak_unconditionality() {
        let unit = Body::VPolytope(Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert!(is_weakly_unconditional(&unit, 1e-9).unwrap());
        let tri = Body::polytope(&[v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])]).unwrap();
        assert!(!is_weakly_unconditional(&tri, 1e-9).unwrap());
    }
}
