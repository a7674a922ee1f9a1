use crate::error::{Error, Result};
use crate::geometry::{minkowski_sum, Body, DirectionGrid, Polytope, Vector, INTERIOR_DELTA};

use super::lp::{solve_lp, LpProblem, LpStatus, Relation};

/// Frank-Wolfe iteration cap.
pub const FW_MAX_ITERS: usize = 10_000;
/// Frank-Wolfe duality-gap stopping threshold.
pub const FW_GAP: f64 = 1e-9;

/// Whether `x` lies in `K` up to `tol`.
///
/// Polytopes with facets use the facet inequalities; other polytopes in
/// n <= 3 use the exact Euclidean distance; four-dimensional ones solve
/// [`membership_lp`]. Support tables are tested against their outer polytope.
pub fn membership(x: &Vector, k: &Body, tol: f64) -> Result<bool> {
    if x.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: x.dim(),
        });
    }
    match k {
        Body::VPolytope(p) => {
            if let Some(b) = p.contains_by_facets(x, tol) {
                return Ok(b);
            }
            if p.dim() <= 3 {
                return Ok(polytope_distance_exact(x, p) <= tol);
            }
            membership_lp(x, p.vertices(), tol)
        }
        Body::Ball { center, radius } => Ok(x.dist(center) <= radius + tol),
        Body::SupportTable(t) => Ok(t.contains(x, tol)),
    }
}

/// Membership in `conv(vertices)` as the LP
/// `min sum |r|` subject to `x = sum l_i v_i + r`, `sum l_i = 1`, `l >= 0`.
pub fn membership_lp(x: &Vector, vertices: &[Vector], tol: f64) -> Result<bool> {
    let n = x.dim();
    let m = vertices.len();
    let nv = m + 2 * n;
    let mut obj = vec![0.0; nv];
    for c in obj.iter_mut().skip(m) {
        *c = 1.0;
    }
    let mut lp = LpProblem::minimize(obj);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v[i];
        }
        row[m + i] = 1.0;
        row[m + n + i] = -1.0;
        lp.add(row, Relation::Eq, x[i]);
    }
    let mut row = vec![0.0; nv];
    for c in row.iter_mut().take(m) {
        *c = 1.0;
    }
    lp.add(row, Relation::Eq, 1.0);
    let s = solve_lp(&lp)?;
    match s.status {
        LpStatus::Optimal => Ok(s.value <= tol),
        _ => Err(Error::Solver("membership LP failed".into())),
    }
}

fn segment_distance(x: &Vector, a: &Vector, b: &Vector) -> f64 {
    let d = *b - *a;
    let len2 = d.norm_sq();
    if len2 == 0.0 {
        return x.dist(a);
    }
    let t = ((*x - *a).dot(&d) / len2).clamp(0.0, 1.0);
    x.dist(&(*a + d * t))
}

/// Distance from `x` to a planar convex polygon in R^2 or R^3 given by an
/// ordered vertex loop.
fn polygon_distance(x: &Vector, vs: &[Vector], ids: &[usize], normal: Option<&Vector>) -> f64 {
    let m = ids.len();
    let (y, h) = match normal {
        Some(nrm) => {
            let off = nrm.dot(&vs[ids[0]]);
            let s = nrm.dot(x) - off;
            (*x - *nrm * s, s.abs())
        }
        None => (*x, 0.0),
    };
    let mut pos = true;
    let mut neg = true;
    for k in 0..m {
        let a = vs[ids[k]];
        let b = vs[ids[(k + 1) % m]];
        let c = match normal {
            Some(nrm) => (b - a).cross(&(y - a)).dot(nrm),
            None => (b[0] - a[0]) * (y[1] - a[1]) - (b[1] - a[1]) * (y[0] - a[0]),
        };
        pos &= c >= -1e-15;
        neg &= c <= 1e-15;
    }
    if pos || neg {
        return h;
    }
    (0..m)
        .map(|k| segment_distance(x, &vs[ids[k]], &vs[ids[(k + 1) % m]]))
        .fold(f64::INFINITY, f64::min)
}

/// Exact Euclidean distance to a polytope in dimension at most three.
fn polytope_distance_exact(x: &Vector, p: &Polytope) -> f64 {
    let vs = p.vertices();
    match (p.dim(), p.affine_dim()) {
        (_, 0) => x.dist(&vs[0]),
        (_, 1) => segment_distance(x, &vs[0], &vs[1]),
        (2, 2) => {
            let outside: Vec<_> = p.facets().iter().filter(|f| f.normal.dot(x) > f.offset).collect();
            if outside.is_empty() {
                return 0.0;
            }
            outside
                .iter()
                .map(|f| segment_distance(x, &vs[f.vertices[0]], &vs[f.vertices[1]]))
                .fold(f64::INFINITY, f64::min)
        }
        (3, 2) => {
            let ids: Vec<usize> = (0..vs.len()).collect();
            polygon_distance(x, vs, &ids, p.plane_normal().as_ref())
        }
        _ => {
            let outside: Vec<_> = p.facets().iter().filter(|f| f.normal.dot(x) > f.offset).collect();
            if outside.is_empty() {
                return 0.0;
            }
            outside
                .iter()
                .map(|f| polygon_distance(x, vs, &f.vertices, Some(&f.normal)))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrankWolfeResult {
    pub distance: f64,
    pub closest: Vector,
    pub gap: f64,
    pub iterations: usize,
}

/// Projection of `x` onto `conv(vertices)` by away-step Frank-Wolfe over
/// the simplex of vertex weights.
pub fn frank_wolfe_distance(x: &Vector, vertices: &[Vector]) -> Result<FrankWolfeResult> {
    if vertices.is_empty() {
        return Err(Error::Empty("vertex list"));
    }
    let m = vertices.len();
    let start = (0..m)
        .min_by(|&a, &b| vertices[a].dist(x).partial_cmp(&vertices[b].dist(x)).unwrap())
        .unwrap();
    let mut w = vec![0.0; m];
    w[start] = 1.0;
    let mut y = vertices[start];
    let mut gap = f64::INFINITY;
    let mut it = 0;
    while it < FW_MAX_ITERS {
        let r = y - *x;
        let g: Vec<f64> = vertices.iter().map(|v| v.dot(&r)).collect();
        let s = (0..m).min_by(|&a, &b| g[a].partial_cmp(&g[b]).unwrap()).unwrap();
        gap = r.dot(&(y - vertices[s]));
        if gap < FW_GAP {
            break;
        }
        let a = (0..m)
            .filter(|&i| w[i] > 0.0)
            .max_by(|&i, &j| g[i].partial_cmp(&g[j]).unwrap())
            .unwrap();
        let away_gap = r.dot(&(vertices[a] - y));
        let (d, gmax, fw_step) = if gap >= away_gap || w[a] >= 1.0 {
            (vertices[s] - y, 1.0, true)
        } else {
            (y - vertices[a], w[a] / (1.0 - w[a]), false)
        };
        let dd = d.norm_sq();
        if dd == 0.0 {
            break;
        }
        let gamma = (-r.dot(&d) / dd).clamp(0.0, gmax);
        if fw_step {
            for wi in w.iter_mut() {
                *wi *= 1.0 - gamma;
            }
            w[s] += gamma;
        } else {
            for wi in w.iter_mut() {
                *wi *= 1.0 + gamma;
            }
            w[a] -= gamma;
            if gamma == gmax {
                w[a] = 0.0;
            }
        }
        y = y + d * gamma;
        it += 1;
    }
    Ok(FrankWolfeResult {
        distance: y.dist(x),
        closest: y,
        gap,
        iterations: it,
    })
}

/// `min_{y in K} ||x - y||`.
pub fn euclidean_distance(x: &Vector, k: &Body) -> Result<f64> {
    if x.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: x.dim(),
        });
    }
    match k {
        Body::Ball { center, radius } => Ok((x.dist(center) - radius).max(0.0)),
        Body::VPolytope(p) if p.dim() <= 3 => Ok(polytope_distance_exact(x, p)),
        Body::VPolytope(p) => {
            if let Some(true) = p.contains_by_facets(x, 0.0) {
                return Ok(0.0);
            }
            Ok(frank_wolfe_distance(x, p.vertices())?.distance)
        }
        Body::SupportTable(t) => {
            let p = t.outer_polytope()?;
            euclidean_distance(x, &Body::VPolytope(p.clone()))
        }
    }
}

/// Precomputed exact gauge distance `d_E(., K)` for polytopes in n <= 3.
///
/// The facet normals `a` of `K + E` are the facet normals of every `K + tE`
/// with `t > 0`, so `d_E(x,K) = max(0, max_a (<a,x> - h_K(a)) / h_E(a))`.
/// A centred ball `E = rB` reduces to the Euclidean distance over `r`.
#[derive(Clone, Debug)]
pub enum GaugeField {
    Facets { rows: Vec<(Vector, f64, f64)> },
    Ball { k: Body, radius: f64 },
}

impl GaugeField {
    pub fn new(k: &Body, e: &Body) -> Result<Self> {
        if k.dim() != e.dim() {
            return Err(Error::DimensionMismatch {
                expected: k.dim(),
                found: e.dim(),
            });
        }
        match (k, e) {
            (_, Body::Ball { center, radius }) => {
                if center.max_abs() > 0.0 {
                    return Err(Error::OriginNotInterior { margin: -center.norm() });
                }
                Ok(GaugeField::Ball {
                    k: k.clone(),
                    radius: *radius,
                })
            }
            (Body::VPolytope(kp), Body::VPolytope(ep)) if k.dim() <= 3 => {
                check_gauge_body(ep)?;
                let sum = minkowski_sum(k, e, None)?;
                let sp = sum.as_polytope().expect("polytope sum");
                let rows = sp
                    .facets()
                    .iter()
                    .map(|f| (f.normal, kp.support(&f.normal), ep.support(&f.normal)))
                    .collect();
                Ok(GaugeField::Facets { rows })
            }
            _ => Err(Error::Unsupported(
                "exact gauge field needs polytopes in n <= 3 or a centred ball gauge".into(),
            )),
        }
    }

    pub fn distance(&self, x: &Vector) -> Result<f64> {
        match self {
            GaugeField::Ball { k, radius } => Ok(euclidean_distance(x, k)? / radius),
            GaugeField::Facets { rows } => Ok(rows
                .iter()
                .map(|(a, hk, he)| (a.dot(x) - hk) / he)
                .fold(0.0, f64::max)),
        }
    }
}

fn check_gauge_body(e: &Polytope) -> Result<()> {
    if e.has_facets() {
        let m = e.facets().iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
        if m <= INTERIOR_DELTA {
            return Err(Error::OriginNotInterior { margin: m });
        }
        return Ok(());
    }
    if e.dim() <= 3 {
        return Err(Error::OriginNotInterior { margin: 0.0 });
    }
    let g = DirectionGrid::new(e.dim(), 200, 0)?;
    let m = g.directions().iter().map(|u| e.support(u)).fold(f64::INFINITY, f64::min);
    if m <= INTERIOR_DELTA {
        return Err(Error::OriginNotInterior { margin: m });
    }
    Ok(())
}

/// The gauge-distance LP: minimize `sum w_j` subject to
/// `x = sum l_i v_i + sum w_j e_j`, `sum l_i = 1`, `l, w >= 0`, where `v_i`
/// and `e_j` are the vertices of `K` and `E`.
pub fn gauge_distance_lp(x: &Vector, k: &Polytope, e: &Polytope) -> Result<f64> {
    check_gauge_body(e)?;
    let n = x.dim();
    let (mk, me) = (k.vertices().len(), e.vertices().len());
    let nv = mk + me;
    let mut obj = vec![0.0; nv];
    for c in obj.iter_mut().skip(mk) {
        *c = 1.0;
    }
    let mut lp = LpProblem::minimize(obj);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        for (j, v) in k.vertices().iter().enumerate() {
            row[j] = v[i];
        }
        for (j, v) in e.vertices().iter().enumerate() {
            row[mk + j] = v[i];
        }
        lp.add(row, Relation::Eq, x[i]);
    }
    let mut row = vec![0.0; nv];
    for c in row.iter_mut().take(mk) {
        *c = 1.0;
    }
    lp.add(row, Relation::Eq, 1.0);
    let s = solve_lp(&lp)?;
    match s.status {
        LpStatus::Optimal => Ok(s.value.max(0.0)),
        _ => Err(Error::Solver("gauge distance LP not optimal".into())),
    }
}

/// `d_E(x,K) = min{t >= 0 : x in K + tE}`.
pub fn gauge_distance(x: &Vector, k: &Body, e: &Body) -> Result<f64> {
    match (k, e) {
        (Body::VPolytope(kp), Body::VPolytope(ep)) if k.dim() > 3 => gauge_distance_lp(x, kp, ep),
        _ => GaugeField::new(k, e)?.distance(x),
    }
}
