//! Convex hulls of finite point sets in dimensions 1 to 4.
//!
//! The affine hull of the input is found first; lower-dimensional inputs are
//! projected onto an orthonormal basis of it. Planar hulls use the monotone
//! chain, spatial hulls an incremental algorithm followed by a merge of
//! coplanar triangles, and four-dimensional inputs an extreme-point filter
//! driven by small linear programs.

use std::collections::{HashMap, HashSet};

use super::vector::Vector;
use crate::error::{Error, Result};
use crate::solver::lp::{solve_lp, LpProblem, LpStatus, Relation, MAX_CONSTRAINTS};

/// Absolute tolerance used to identify duplicate points.
pub const DEDUP_EPS: f64 = 1e-9;

/// A supporting hyperplane `<normal, x> = offset` of a full-dimensional hull,
/// with the indices of the hull vertices on it (in boundary order for n = 2, 3).
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

/// Output of [`convex_hull_points`].
#[derive(Clone, Debug)]
pub struct Hull {
    /// Extreme points. Ordered counterclockwise when the hull is a polygon.
    pub vertices: Vec<Vector>,
    pub affine_dim: usize,
    /// Facets, present when the hull is full-dimensional and n <= 3.
    pub facets: Vec<Facet>,
    /// Unit normal of the supporting plane of a flat polygon in R^3.
    pub plane_normal: Option<Vector>,
}

/// Orthonormal frame of the affine hull of a point set.
pub(crate) struct AffineFrame {
    pub origin: Vector,
    pub basis: Vec<Vector>,
}

impl AffineFrame {
    pub fn coords(&self, p: &Vector) -> Vec<f64> {
        let d = *p - self.origin;
        self.basis.iter().map(|b| b.dot(&d)).collect()
    }
}

pub(crate) fn scale_of(points: &[Vector]) -> f64 {
    points.iter().fold(1.0_f64, |m, p| m.max(p.max_abs()))
}

/// Greedy Gram-Schmidt on farthest points.
pub(crate) fn affine_frame(points: &[Vector], tol: f64) -> AffineFrame {
    let dim = points[0].dim();
    let origin = points[0];
    let mut basis: Vec<Vector> = Vec::new();
    while basis.len() < dim {
        let mut best = (0.0, None);
        for p in points {
            let mut r = *p - origin;
            for b in &basis {
                r -= *b * b.dot(&r);
            }
            let d = r.norm();
            if d > best.0 {
                best = (d, Some(r));
            }
        }
        match best {
            (d, Some(r)) if d > tol => {
                // second pass for numerical orthogonality
                let mut r = r;
                for b in &basis {
                    r -= *b * b.dot(&r);
                }
                basis.push(r.normalized().expect("nonzero residual"));
            }
            _ => break,
        }
    }
    AffineFrame { origin, basis }
}

fn dedup(points: &[Vector]) -> Vec<Vector> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in points {
        let key: Vec<i64> = p.as_slice().iter().map(|c| (c / DEDUP_EPS).round() as i64).collect();
        if seen.insert(key) {
            out.push(*p);
        }
    }
    out
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone chain on planar coordinates; returns indices of the strict
/// corners in counterclockwise order.
pub(crate) fn monotone_chain(pts: &[[f64; 2]], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a][0]
            .partial_cmp(&pts[b][0])
            .unwrap()
            .then(pts[a][1].partial_cmp(&pts[b][1]).unwrap())
    });
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= tol
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= tol
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Convex hull of a nonempty point set.
pub fn convex_hull_points(points: &[Vector]) -> Result<Hull> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let dim = points[0].dim();
    if points.iter().any(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: points.iter().find(|p| p.dim() != dim).unwrap().dim(),
        });
    }
    let pts = dedup(points);
    let scale = scale_of(&pts);
    let frame = affine_frame(&pts, 1e-9 * scale);
    let k = frame.basis.len();
    match k {
        0 => Ok(Hull {
            vertices: vec![pts[0]],
            affine_dim: 0,
            facets: full_dim_segment_facets(dim, 0, &[pts[0]]),
            plane_normal: None,
        }),
        1 => {
            let t: Vec<f64> = pts.iter().map(|p| frame.coords(p)[0]).collect();
            let (mut lo, mut hi) = (0, 0);
            for i in 0..pts.len() {
                if t[i] < t[lo] {
                    lo = i;
                }
                if t[i] > t[hi] {
                    hi = i;
                }
            }
            let vertices = vec![pts[lo], pts[hi]];
            let facets = full_dim_segment_facets(dim, 1, &vertices);
            Ok(Hull {
                vertices,
                affine_dim: 1,
                facets,
                plane_normal: None,
            })
        }
        2 => {
            let local: Vec<[f64; 2]> = pts
                .iter()
                .map(|p| {
                    let c = frame.coords(p);
                    [c[0], c[1]]
                })
                .collect();
            let order = monotone_chain(&local, 1e-12 * scale * scale);
            let vertices: Vec<Vector> = order.iter().map(|&i| pts[i]).collect();
            let m = vertices.len();
            let mut facets = Vec::new();
            let mut plane_normal = None;
            if dim == 2 {
                // orientation of the local frame may be reversed
                let flip = frame.basis[0][0] * frame.basis[1][1] - frame.basis[0][1] * frame.basis[1][0] < 0.0;
                let mut vertices = vertices;
                if flip {
                    vertices.reverse();
                }
                for i in 0..m {
                    let (a, b) = (vertices[i], vertices[(i + 1) % m]);
                    let e = b - a;
                    let normal = Vector::new(&[e[1], -e[0]]).normalized().expect("distinct corners");
                    facets.push(Facet {
                        normal,
                        offset: normal.dot(&a),
                        vertices: vec![i, (i + 1) % m],
                    });
                }
                fix_offsets(&mut facets, &pts);
                return Ok(Hull {
                    vertices,
                    affine_dim: 2,
                    facets,
                    plane_normal: None,
                });
            }
            if dim == 3 {
                plane_normal = Some(frame.basis[0].cross(&frame.basis[1]));
            }
            Ok(Hull {
                vertices,
                affine_dim: 2,
                facets,
                plane_normal,
            })
        }
        _ if dim == 3 => hull3(&pts, scale),
        _ => {
            if k == 4 {
                let vertices = extreme_points_lp(&pts, scale)?;
                return Ok(Hull {
                    vertices,
                    affine_dim: 4,
                    facets: Vec::new(),
                    plane_normal: None,
                });
            }
            // k == 3 inside R^4: hull in local coordinates.
            let local: Vec<Vector> = pts.iter().map(|p| Vector::new(&frame.coords(p))).collect();
            let h = hull3(&local, scale)?;
            let keep: Vec<Vector> = h
                .vertices
                .iter()
                .map(|v| {
                    let i = local.iter().position(|l| l == v).expect("hull vertex from input");
                    pts[i]
                })
                .collect();
            Ok(Hull {
                vertices: keep,
                affine_dim: 3,
                facets: Vec::new(),
                plane_normal: None,
            })
        }
    }
}

/// Facets of a point or segment when the ambient dimension is one.
fn full_dim_segment_facets(dim: usize, k: usize, vertices: &[Vector]) -> Vec<Facet> {
    if dim != 1 || k != 1 {
        return Vec::new();
    }
    let (a, b) = if vertices[0][0] <= vertices[1][0] { (0, 1) } else { (1, 0) };
    vec![
        Facet {
            normal: Vector::new(&[1.0]),
            offset: vertices[b][0],
            vertices: vec![b],
        },
        Facet {
            normal: Vector::new(&[-1.0]),
            offset: -vertices[a][0],
            vertices: vec![a],
        },
    ]
}

fn fix_offsets(facets: &mut [Facet], pts: &[Vector]) {
    for f in facets.iter_mut() {
        for p in pts {
            f.offset = f.offset.max(f.normal.dot(p));
        }
    }
}

struct Tri {
    v: [usize; 3],
    n: Vector,
    b: f64,
    alive: bool,
}

fn tri_plane(p: &[Vector], v: [usize; 3]) -> Option<(Vector, f64)> {
    let n = (p[v[1]] - p[v[0]]).cross(&(p[v[2]] - p[v[0]]));
    let n = n.normalized()?;
    Some((n, n.dot(&p[v[0]])))
}

/// Insertion orders and visibility tolerances tried in turn.
const HULL3_ATTEMPTS: [(u8, f64); 4] = [(0, 1e-10), (1, 1e-10), (2, 1e-9), (2, 1e-8)];

fn hull3(pts: &[Vector], scale: f64) -> Result<Hull> {
    let mut last = None;
    for (kind, rel) in HULL3_ATTEMPTS {
        let order: Vec<usize> = match kind {
            0 => (0..pts.len()).collect(),
            1 => {
                let c = super::vector::centroid(pts);
                let mut o: Vec<usize> = (0..pts.len()).collect();
                o.sort_by(|&a, &b| pts[b].dist(&c).total_cmp(&pts[a].dist(&c)));
                o
            }
            _ => {
                // fixed multiplicative scramble of the indices
                let m = pts.len().max(1);
                let mut o: Vec<usize> = (0..pts.len()).collect();
                o.sort_by_key(|&i| (i.wrapping_mul(2_654_435_761) ^ (i >> 3)) % (m * 7919));
                o
            }
        };
        match hull3_once(pts, &order, scale, rel * scale) {
            Ok(h) => return Ok(h),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn hull3_once(pts: &[Vector], order: &[usize], scale: f64, eps: f64) -> Result<Hull> {
    // Initial tetrahedron.
    let i0 = 0;
    let i1 = (0..pts.len())
        .max_by(|&a, &b| pts[a].dist(&pts[i0]).partial_cmp(&pts[b].dist(&pts[i0])).unwrap())
        .unwrap();
    let d01 = (pts[i1] - pts[i0]).normalized().ok_or_else(|| Error::Hull("degenerate input".into()))?;
    let line_dist = |q: &Vector| {
        let r = *q - pts[i0];
        (r - d01 * d01.dot(&r)).norm()
    };
    let i2 = (0..pts.len())
        .max_by(|&a, &b| line_dist(&pts[a]).partial_cmp(&line_dist(&pts[b])).unwrap())
        .unwrap();
    let nrm = (pts[i1] - pts[i0])
        .cross(&(pts[i2] - pts[i0]))
        .normalized()
        .ok_or_else(|| Error::Hull("degenerate input".into()))?;
    let i3 = (0..pts.len())
        .max_by(|&a, &b| {
            nrm.dot(&(pts[a] - pts[i0]))
                .abs()
                .partial_cmp(&nrm.dot(&(pts[b] - pts[i0])).abs())
                .unwrap()
        })
        .unwrap();
    let inner = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) * 0.25;

    let mut tris: Vec<Tri> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let push_tri = |tris: &mut Vec<Tri>, edges: &mut HashMap<(usize, usize), usize>, mut v: [usize; 3], fallback: Option<(Vector, f64)>| {
        let (mut n, mut b) = match tri_plane(pts, v) {
            Some(x) => x,
            None => fallback.expect("degenerate triangle without fallback plane"),
        };
        if n.dot(&inner) > b {
            v.swap(1, 2);
            n = -n;
            b = -b;
        }
        let id = tris.len();
        for k in 0..3 {
            edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        tris.push(Tri { v, n, b, alive: true });
    };
    for v in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        push_tri(&mut tris, &mut edges, v, None);
    }

    let initial = [i0, i1, i2, i3];
    for &pi in order {
        let p = &pts[pi];
        if initial.contains(&pi) {
            continue;
        }
        let height = |t: &Tri| t.n.dot(p) - t.b;
        let seed = (0..tris.len())
            .filter(|&t| tris[t].alive)
            .max_by(|&a, &b| height(&tris[a]).total_cmp(&height(&tris[b])));
        let seed = match seed {
            Some(t) if height(&tris[t]) > eps => t,
            _ => continue,
        };
        // visible faces form the connected region around the highest face
        let mut vis: HashSet<usize> = HashSet::from([seed]);
        let mut visible = vec![seed];
        let mut head = 0;
        while head < visible.len() {
            let t = visible[head];
            head += 1;
            let v = tris[t].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let nb = *edges
                    .get(&(b, a))
                    .ok_or_else(|| Error::Hull("open surface in incremental hull".into()))?;
                if !vis.contains(&nb) && height(&tris[nb]) > eps {
                    vis.insert(nb);
                    visible.push(nb);
                }
            }
        }
        let mut horizon: Vec<((usize, usize), (Vector, f64))> = Vec::new();
        for &t in &visible {
            let v = tris[t].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                match edges.get(&(b, a)) {
                    Some(nb) if !vis.contains(nb) => horizon.push(((a, b), (tris[t].n, tris[t].b))),
                    None => return Err(Error::Hull("open surface in incremental hull".into())),
                    _ => {}
                }
            }
        }
        for &t in &visible {
            tris[t].alive = false;
            let v = tris[t].v;
            for k in 0..3 {
                let key = (v[k], v[(k + 1) % 3]);
                if edges.get(&key) == Some(&t) {
                    edges.remove(&key);
                }
            }
        }
        for ((a, b), plane) in horizon {
            // orientation is inherited from the removed face: (a, b, p)
            let v = [a, b, pi];
            let (n, off) = tri_plane(pts, v).unwrap_or(plane);
            let id = tris.len();
            for k in 0..3 {
                edges.insert((v[k], v[(k + 1) % 3]), id);
            }
            tris.push(Tri { v, n, b: off, alive: true });
        }
    }

    // Merge coplanar triangles into facets.
    let tol_n = 1e-9;
    let tol_b = 1e-9 * scale;
    let mut groups: Vec<(Vector, f64, Vec<usize>)> = Vec::new();
    for t in tris.iter().filter(|t| t.alive) {
        let g = groups
            .iter_mut()
            .find(|(n, b, _)| (1.0 - n.dot(&t.n)) < tol_n && (b - t.b).abs() < tol_b);
        match g {
            Some((_, _, vs)) => vs.extend_from_slice(&t.v),
            None => groups.push((t.n, t.b, t.v.to_vec())),
        }
    }

    let mut index_of: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Vector> = Vec::new();
    let mut facets: Vec<Facet> = Vec::new();
    for (n, b, mut vs) in groups {
        vs.sort_unstable();
        vs.dedup();
        // in-plane frame
        let e1 = (pts[vs[1]] - pts[vs[0]]).normalized().unwrap();
        let e2 = n.cross(&e1);
        let local: Vec<[f64; 2]> = vs
            .iter()
            .map(|&i| {
                let d = pts[i] - pts[vs[0]];
                [e1.dot(&d), e2.dot(&d)]
            })
            .collect();
        let order = monotone_chain(&local, 1e-12 * scale * scale);
        if order.len() < 3 {
            continue;
        }
        let loop_ids: Vec<usize> = order
            .iter()
            .map(|&k| {
                let gi = vs[k];
                *index_of.entry(gi).or_insert_with(|| {
                    vertices.push(pts[gi]);
                    vertices.len() - 1
                })
            })
            .collect();
        facets.push(Facet {
            normal: n,
            offset: b,
            vertices: loop_ids,
        });
    }
    fix_offsets(&mut facets, pts);
    Ok(Hull {
        vertices,
        affine_dim: 3,
        facets,
        plane_normal: None,
    })
}

/// Whether `p` can be strictly separated from `others`, i.e. lies outside
/// their convex hull.
fn separable(p: &Vector, others: &[&Vector], scale: f64) -> Result<bool> {
    let n = p.dim();
    if others.is_empty() {
        return Ok(true);
    }
    // variables: a (n, boxed), b (free); maximize <a,p> - b
    let mut obj: Vec<f64> = p.as_slice().to_vec();
    obj.push(-1.0);
    let mut lp = LpProblem::maximize(obj);
    for j in 0..n {
        lp.bounds(j, -1.0, 1.0);
    }
    lp.free(n);
    for q in others {
        let mut row: Vec<f64> = q.as_slice().to_vec();
        row.push(-1.0);
        lp.add(row, Relation::Le, 0.0);
    }
    let s = solve_lp(&lp)?;
    match s.status {
        LpStatus::Optimal => Ok(s.value > 1e-9 * scale),
        _ => Err(Error::Hull("extreme-point LP did not solve".into())),
    }
}

fn extreme_points_lp(pts: &[Vector], scale: f64) -> Result<Vec<Vector>> {
    let dim = pts[0].dim();
    // Points maximizing a probe direction are extreme (up to ties).
    let probes = super::grid::DirectionGrid::new(dim, 200, 17)?;
    let mut sure: Vec<usize> = Vec::new();
    for u in probes.directions() {
        let best = (0..pts.len())
            .max_by(|&a, &b| pts[a].dot(u).partial_cmp(&pts[b].dot(u)).unwrap())
            .unwrap();
        if !sure.contains(&best) {
            sure.push(best);
        }
    }
    sure.sort_unstable();
    let mut maybe: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        if sure.contains(&i) {
            continue;
        }
        let others: Vec<&Vector> = sure.iter().map(|&j| &pts[j]).collect();
        if others.len() > MAX_CONSTRAINTS {
            return Err(Error::LpTooLarge {
                vars: dim + 1,
                rows: others.len(),
            });
        }
        if separable(&pts[i], &others, scale)? {
            maybe.push(i);
        }
    }
    let pool: Vec<usize> = sure.iter().chain(maybe.iter()).copied().collect();
    if pool.len() > MAX_CONSTRAINTS + 1 {
        return Err(Error::LpTooLarge {
            vars: dim + 1,
            rows: pool.len() - 1,
        });
    }
    let mut out = Vec::new();
    for &i in &pool {
        let others: Vec<&Vector> = pool.iter().filter(|&&j| j != i).map(|&j| &pts[j]).collect();
        if separable(&pts[i], &others, scale)? {
            out.push(pts[i]);
        }
    }
    Ok(out)
}
