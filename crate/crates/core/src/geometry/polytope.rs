use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::hull::{convex_hull_points, Facet, Hull};
use super::vector::{centroid, Vector};
use crate::error::{Error, Result};

/// Convex hull of finitely many points, stored in hull-reduced form.
///
/// Full-dimensional polytopes in dimension at most three also carry their
/// facets, which gives exact membership, distances and volumes.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    hull: Hull,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.same_vertices(other, 1e-9)
    }
}

impl Polytope {
    pub fn from_points(points: &[Vector]) -> Result<Self> {
        let hull = convex_hull_points(points)?;
        Ok(Self {
            dim: points[0].dim(),
            hull,
        })
    }

    pub fn point(p: Vector) -> Self {
        Self::from_points(&[p]).expect("single point hull")
    }

    /// Axis-parallel box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        let n = lo.len();
        let pts: Vec<Vector> = (0..1u32 << n)
            .map(|m| {
                let c: Vec<f64> = (0..n).map(|i| if m & (1 << i) == 0 { lo[i] } else { hi[i] }).collect();
                Vector::try_new(&c)
            })
            .collect::<Result<_>>()?;
        Self::from_points(&pts)
    }

    /// The cube `[-a, a]^n`.
    pub fn cube(dim: usize, a: f64) -> Result<Self> {
        Self::cuboid(&vec![-a; dim], &vec![a; dim])
    }

    /// The cross-polytope `conv{+-a e_i}`.
    pub fn cross_polytope(dim: usize, a: f64) -> Result<Self> {
        let mut pts = Vec::new();
        for i in 0..dim {
            pts.push(Vector::unit(dim, i) * a);
            pts.push(Vector::unit(dim, i) * -a);
        }
        Self::from_points(&pts)
    }

    /// Regular `m`-gon inscribed in the circle of radius `r` about `center`.
    pub fn regular_polygon(center: Vector, r: f64, m: usize) -> Result<Self> {
        if center.dim() != 2 || m < 3 {
            return Err(Error::InvalidArgument("regular polygon needs n = 2, m >= 3".into()));
        }
        let pts: Vec<Vector> = (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                center + Vector::new(&[r * t.cos(), r * t.sin()])
            })
            .collect();
        Self::from_points(&pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.hull.vertices
    }

    pub fn affine_dim(&self) -> usize {
        self.hull.affine_dim
    }

    pub fn is_full_dim(&self) -> bool {
        self.hull.affine_dim == self.dim
    }

    /// Facets; empty unless full-dimensional with n <= 3.
    pub fn facets(&self) -> &[Facet] {
        &self.hull.facets
    }

    pub fn has_facets(&self) -> bool {
        self.is_full_dim() && !self.hull.facets.is_empty()
    }

    pub(crate) fn plane_normal(&self) -> Option<Vector> {
        self.hull.plane_normal
    }

    pub fn support(&self, u: &Vector) -> f64 {
        self.vertices().iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn centroid(&self) -> Vector {
        centroid(self.vertices())
    }

    /// Largest distance from `c` to a vertex.
    pub fn radius_about(&self, c: &Vector) -> f64 {
        self.vertices().iter().map(|v| v.dist(c)).fold(0.0, f64::max)
    }

    pub fn bounding_box(&self) -> (Vector, Vector) {
        let mut lo = self.vertices()[0];
        let mut hi = lo;
        for v in self.vertices() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    pub fn map_points(&self, f: impl Fn(&Vector) -> Vector) -> Result<Self> {
        let pts: Vec<Vector> = self.vertices().iter().map(f).collect();
        Self::from_points(&pts)
    }

    pub fn scaled(&self, r: f64) -> Result<Self> {
        self.map_points(|v| *v * r)
    }

    pub fn translated(&self, t: &Vector) -> Result<Self> {
        self.map_points(|v| *v + *t)
    }

    /// Facet test; `None` when the polytope carries no facets.
    pub fn contains_by_facets(&self, x: &Vector, tol: f64) -> Option<bool> {
        if !self.has_facets() {
            return None;
        }
        Some(self.facets().iter().all(|f| f.normal.dot(x) <= f.offset + tol))
    }

    /// Same hull-reduced vertex set within `tol`.
    pub fn same_vertices(&self, other: &Polytope, tol: f64) -> bool {
        self.dim == other.dim
            && self.vertices().len() == other.vertices().len()
            && self
                .vertices()
                .iter()
                .all(|v| other.vertices().iter().any(|w| v.approx_eq(w, tol)))
    }

    /// Ordered boundary of a polygon (full-dimensional in the plane, or flat
    /// in space).
    fn polygon_area(&self) -> f64 {
        let vs = self.vertices();
        let m = vs.len();
        if self.dim == 2 {
            let mut a = 0.0;
            for i in 0..m {
                let (p, q) = (vs[i], vs[(i + 1) % m]);
                a += p[0] * q[1] - p[1] * q[0];
            }
            (0.5 * a).abs()
        } else {
            let n = self.plane_normal().expect("flat polygon normal");
            loop_area(vs, &(0..m).collect::<Vec<_>>(), &n)
        }
    }

    fn polygon_perimeter(&self) -> f64 {
        let vs = self.vertices();
        let m = vs.len();
        (0..m).map(|i| vs[i].dist(&vs[(i + 1) % m])).sum()
    }

    /// Intrinsic volumes `V_0 .. V_n` from the facial structure.
    ///
    /// Only available for n <= 3; used as the exact engine for volumes of
    /// parallel bodies `K + tB_n`.
    pub fn intrinsic_volumes_exact(&self) -> Option<Vec<f64>> {
        if self.dim > 3 {
            return None;
        }
        let mut v = vec![0.0; self.dim + 1];
        v[0] = 1.0;
        match self.affine_dim() {
            0 => {}
            1 => v[1] = self.vertices()[0].dist(&self.vertices()[1]),
            2 => {
                v[1] = 0.5 * self.polygon_perimeter();
                v[2] = self.polygon_area();
            }
            _ => {
                let (vol, surface, mean) = self.solid_measures();
                v[1] = mean / PI;
                v[2] = 0.5 * surface;
                v[3] = vol;
            }
        }
        Some(v)
    }

    /// Volume, surface area and the edge-curvature sum `sum l_e theta_e / 2`
    /// of a full-dimensional polytope in R^3.
    fn solid_measures(&self) -> (f64, f64, f64) {
        let vs = self.vertices();
        let mut vol = 0.0;
        let mut surface = 0.0;
        let mut edge_normals: BTreeMap<(usize, usize), Vec<Vector>> = BTreeMap::new();
        for f in self.facets() {
            let a = loop_area(vs, &f.vertices, &f.normal);
            surface += a;
            vol += f.offset * a / 3.0;
            let m = f.vertices.len();
            for k in 0..m {
                let (i, j) = (f.vertices[k], f.vertices[(k + 1) % m]);
                edge_normals.entry((i.min(j), i.max(j))).or_default().push(f.normal);
            }
        }
        let mut mean = 0.0;
        for ((i, j), ns) in &edge_normals {
            if ns.len() == 2 {
                let theta = ns[0].dot(&ns[1]).clamp(-1.0, 1.0).acos();
                mean += vs[*i].dist(&vs[*j]) * theta / 2.0;
            }
        }
        (vol, surface, mean)
    }

    /// Exact Lebesgue volume for n <= 3.
    pub fn volume(&self) -> Option<f64> {
        if self.dim > 3 {
            return None;
        }
        if !self.is_full_dim() {
            return Some(0.0);
        }
        Some(match self.dim {
            1 => (self.vertices()[0][0] - self.vertices()[1][0]).abs(),
            2 => self.polygon_area(),
            _ => self.solid_measures().0,
        })
    }
}

/// Area of a planar polygon in R^3 given by an ordered vertex loop.
pub(crate) fn loop_area(vs: &[Vector], ids: &[usize], normal: &Vector) -> f64 {
    let m = ids.len();
    let mut s = Vector::zeros(3);
    for k in 0..m {
        s += vs[ids[k]].cross(&vs[ids[(k + 1) % m]]);
    }
    0.5 * s.dot(normal).abs()
}
