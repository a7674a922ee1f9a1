use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{is_weakly_unconditional, reflect_invariant, Body, DirectionGrid, Polytope, Vector, MAX_DIM};
use crate::rng;
use super::check::detect_relation;

/// Largest orbit accepted when closing a point set under reflections.
pub const MAX_ORBIT: usize = 4096;

const PREDICATE_TOL: f64 = 1e-9;

/// How the two bodies of a generated pair are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Hull of `±x_1, ..., ±x_k` with standard normal `x_i`.
    SymmetricPolytope,
    /// Boxes `prod [-a_i, b_i]`.
    UnconditionalBox,
    /// Hull of the `{0,1}`-masking orbit of random points.
    WeaklyUnconditional,
    /// Hull of the orbit of random points under the reflection group
    /// generated by the family's normals.
    ReflectionInvariant,
    /// `(K, rK)` with `K` 0-symmetric and `r` uniform in `[1.2, 3]`.
    DilatatePair,
    /// `(K, K)` with `K` 0-symmetric.
    IdenticalPair,
    /// Random polytopes with the origin at the vertex average.
    GenericOriginInterior,
    /// Random polytopes at random offsets; the origin may lie outside.
    GenericPosition,
}

impl Generator {
    pub fn label(&self) -> &'static str {
        match self {
            Generator::SymmetricPolytope => "symmetric_polytope",
            Generator::UnconditionalBox => "unconditional_box",
            Generator::WeaklyUnconditional => "weakly_unconditional",
            Generator::ReflectionInvariant => "reflection_invariant",
            Generator::DilatatePair => "dilatate_pair",
            Generator::IdenticalPair => "identical_pair",
            Generator::GenericOriginInterior => "generic_origin_interior",
            Generator::GenericPosition => "generic_position",
        }
    }

    /// Whether both bodies of every pair contain the origin.
    pub fn contains_origin(&self) -> bool {
        !matches!(self, Generator::GenericPosition)
    }
}

/// A named, seeded family of body pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFamily {
    pub name: String,
    pub generator: Generator,
    pub dimension: usize,
    /// Falls back to a value derived from the experiment seed and the name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub count: usize,
    /// Hyperplane normals for `reflection_invariant`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<Vec<f64>>>,
}

/// How the bodies of a pair are related.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum PairRelation {
    General,
    Identical,
    Dilatate { ratio: f64 },
}

#[derive(Clone, Debug)]
pub struct BodyPair {
    pub id: usize,
    pub k: Body,
    pub l: Body,
    pub relation: PairRelation,
}

impl BodyPair {
    /// Pair with the relation detected from the bodies.
    pub fn new(id: usize, k: Body, l: Body) -> Self {
        let relation = detect_relation(&k, &l);
        Self { id, k, l, relation }
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }
}

impl PairFamily {
    pub fn new(name: &str, generator: Generator, dimension: usize, count: usize) -> Self {
        Self {
            name: name.into(),
            generator,
            dimension,
            seed: None,
            count,
            normals: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_normals(mut self, normals: Vec<Vec<f64>>) -> Self {
        self.normals = Some(normals);
        self
    }

    pub fn effective_seed(&self, default_seed: u64) -> u64 {
        self.seed.unwrap_or_else(|| rng::mix(&[default_seed, rng::tag(&self.name)]))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 || self.dimension > MAX_DIM {
            return Err(Error::UnsupportedDimension(self.dimension));
        }
        if self.name.is_empty() {
            return Err(Error::InvalidArgument("family name is empty".into()));
        }
        match (&self.generator, &self.normals) {
            (Generator::ReflectionInvariant, None) => Err(Error::InvalidArgument(format!(
                "family `{}` needs `normals` for reflection_invariant",
                self.name
            ))),
            (Generator::ReflectionInvariant, Some(ns)) => {
                if ns.is_empty() {
                    return Err(Error::InvalidArgument("empty normal list".into()));
                }
                for v in ns {
                    if v.len() != self.dimension {
                        return Err(Error::DimensionMismatch {
                            expected: self.dimension,
                            found: v.len(),
                        });
                    }
                    if v.iter().all(|c| *c == 0.0) {
                        return Err(Error::ZeroDirection);
                    }
                }
                Ok(())
            }
            (_, Some(_)) => Err(Error::InvalidArgument(format!(
                "`normals` only applies to reflection_invariant (family `{}`)",
                self.name
            ))),
            _ => Ok(()),
        }
    }

    fn normal_vectors(&self) -> Vec<Vector> {
        self.normals
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|v| Vector::new(v))
            .collect()
    }
}

fn point_count(r: &mut ChaCha8Rng, n: usize) -> usize {
    r.random_range(n + 1..=3 * n)
}

fn symmetric_polytope(r: &mut ChaCha8Rng, n: usize) -> Result<Body> {
    let k = point_count(r, n);
    let mut pts = Vec::with_capacity(2 * k);
    for _ in 0..k {
        let x = rng::normal_vector(r, n);
        pts.push(x);
        pts.push(-x);
    }
    Body::polytope(&pts)
}

fn unconditional_box(r: &mut ChaCha8Rng, n: usize) -> Result<Body> {
    let lo: Vec<f64> = (0..n).map(|_| -r.random_range(0.3..2.0)).collect();
    let hi: Vec<f64> = (0..n).map(|_| r.random_range(0.3..2.0)).collect();
    Ok(Body::VPolytope(Polytope::cuboid(&lo, &hi)?))
}

/// Random point with no coordinate close to zero.
fn generic_point(r: &mut ChaCha8Rng, n: usize) -> Vector {
    let mut x = rng::normal_vector(r, n);
    for i in 0..n {
        if x[i].abs() < 0.1 {
            x[i] = 0.1f64.copysign(x[i]);
        }
    }
    x
}

fn weakly_unconditional(r: &mut ChaCha8Rng, n: usize) -> Result<Body> {
    let m = r.random_range(1..=n);
    let mut pts = Vec::new();
    for _ in 0..m {
        let x = generic_point(r, n);
        for mask in 0..(1u32 << n) {
            pts.push(x.masked(mask));
        }
    }
    Body::polytope(&pts)
}

/// Closes `seeds` under the reflections with the given unit normals.
pub fn reflection_orbit(seeds: &[Vector], normals: &[Vector]) -> Result<Vec<Vector>> {
    let units: Vec<Vector> = normals
        .iter()
        .map(|u| u.normalized().ok_or(Error::ZeroDirection))
        .collect::<Result<_>>()?;
    let mut orbit: Vec<Vector> = Vec::new();
    let mut frontier: Vec<Vector> = seeds.to_vec();
    while let Some(x) = frontier.pop() {
        if orbit.iter().any(|y| y.approx_eq(&x, 1e-9)) {
            continue;
        }
        orbit.push(x);
        if orbit.len() > MAX_ORBIT {
            return Err(Error::InvalidArgument(format!(
                "reflection orbit exceeds {MAX_ORBIT} points; the group is not finite"
            )));
        }
        for u in &units {
            frontier.push(x.reflect(u));
        }
    }
    Ok(orbit)
}

fn reflection_invariant(r: &mut ChaCha8Rng, n: usize, normals: &[Vector]) -> Result<Body> {
    let m = r.random_range(1..=n);
    let seeds: Vec<Vector> = (0..m).map(|_| generic_point(r, n)).collect();
    let orbit = reflection_orbit(&seeds, normals)?;
    let mut body = Body::polytope(&orbit)?;
    if !body.as_polytope().is_some_and(Polytope::is_full_dim) {
        // a lower-dimensional orbit (e.g. when the normals do not span);
        // add a small invariant ball-like cloud around the origin
        let extra: Vec<Vector> = (0..n)
            .flat_map(|i| [Vector::unit(n, i) * 0.05, Vector::unit(n, i) * -0.05])
            .collect();
        let mut pts = orbit;
        pts.extend(reflection_orbit(&extra, normals)?);
        body = Body::polytope(&pts)?;
    }
    Ok(body)
}

fn generic_origin_interior(r: &mut ChaCha8Rng, n: usize) -> Result<Body> {
    let k = point_count(r, n);
    let pts: Vec<Vector> = (0..k).map(|_| rng::normal_vector(r, n)).collect();
    let c = crate::geometry::centroid(&pts);
    let shifted: Vec<Vector> = pts.iter().map(|x| *x - c).collect();
    Body::polytope(&shifted)
}

fn generic_position(r: &mut ChaCha8Rng, n: usize) -> Result<Body> {
    let k = point_count(r, n);
    let offset = rng::normal_vector(r, n) * 1.5;
    let pts: Vec<Vector> = (0..k).map(|_| rng::normal_vector(r, n) + offset).collect();
    Body::polytope(&pts)
}

fn full_dim(b: &Body) -> bool {
    match b {
        Body::VPolytope(p) => p.is_full_dim(),
        _ => true,
    }
}

fn origin_interior(b: &Body) -> Result<bool> {
    let grid = DirectionGrid::default_for(b.dim())?;
    Ok(b.origin_interior_on_grid(&grid, 1e-9)?.0)
}

fn is_symmetric(b: &Body) -> Result<bool> {
    match b {
        Body::VPolytope(p) => Ok(p.same_vertices(&p.map_points(|x| -*x)?, PREDICATE_TOL)),
        Body::Ball { center, .. } => Ok(center.max_abs() <= PREDICATE_TOL),
        Body::SupportTable(_) => Err(Error::Unsupported("symmetry test on a support table".into())),
    }
}

fn is_origin_box(b: &Body) -> bool {
    match b {
        Body::VPolytope(p) => crate::measures::as_box(p)
            .is_some_and(|(lo, hi)| (0..lo.dim()).all(|i| lo[i] <= 0.0 && hi[i] >= 0.0)),
        _ => false,
    }
}

/// Checks one body against the family predicate.
fn body_predicate(family: &PairFamily, b: &Body) -> Result<bool> {
    if !full_dim(b) {
        return Ok(false);
    }
    match family.generator {
        Generator::SymmetricPolytope | Generator::DilatatePair | Generator::IdenticalPair => is_symmetric(b),
        Generator::UnconditionalBox => Ok(is_origin_box(b)),
        Generator::WeaklyUnconditional => is_weakly_unconditional(b, PREDICATE_TOL),
        Generator::ReflectionInvariant => reflect_invariant(b, &family.normal_vectors()),
        Generator::GenericOriginInterior => origin_interior(b),
        Generator::GenericPosition => Ok(true),
    }
}

/// Checks a generated pair against the family predicate.
pub fn check_pair(family: &PairFamily, pair: &BodyPair) -> Result<()> {
    for (name, b) in [("K", &pair.k), ("L", &pair.l)] {
        if !body_predicate(family, b)? {
            return Err(Error::Predicate(format!(
                "{} body of pair {} in family `{}` fails the {} predicate",
                name,
                pair.id,
                family.name,
                family.generator.label()
            )));
        }
    }
    match (family.generator, pair.relation, &pair.k, &pair.l) {
        (Generator::IdenticalPair, PairRelation::Identical, Body::VPolytope(a), Body::VPolytope(b))
            if a.same_vertices(b, 0.0) => {}
        (Generator::IdenticalPair, ..) => {
            return Err(Error::Predicate(format!("pair {} is not identical", pair.id)));
        }
        (Generator::DilatatePair, PairRelation::Dilatate { ratio }, Body::VPolytope(a), Body::VPolytope(b)) => {
            if !(1.2..=3.0).contains(&ratio) || !a.scaled(ratio)?.same_vertices(b, PREDICATE_TOL) {
                return Err(Error::Predicate(format!("pair {} is not a dilatate pair", pair.id)));
            }
        }
        (Generator::DilatatePair, ..) => {
            return Err(Error::Predicate(format!("pair {} is not a dilatate pair", pair.id)));
        }
        _ => {}
    }
    Ok(())
}

/// Seeded deterministic pairs of a family; every pair is checked against
/// the family predicate.
pub fn generate_pairs(family: &PairFamily, default_seed: u64) -> Result<Vec<BodyPair>> {
    family.validate()?;
    let n = family.dimension;
    let seed = family.effective_seed(default_seed);
    let normals = family.normal_vectors();
    let mut out = Vec::with_capacity(family.count);
    for id in 0..family.count {
        let mut r = rng::stream(seed, &[rng::tag("pair"), id as u64]);
        let one = |r: &mut ChaCha8Rng| -> Result<Body> {
            match family.generator {
                Generator::SymmetricPolytope | Generator::DilatatePair | Generator::IdenticalPair => {
                    symmetric_polytope(r, n)
                }
                Generator::UnconditionalBox => unconditional_box(r, n),
                Generator::WeaklyUnconditional => weakly_unconditional(r, n),
                Generator::ReflectionInvariant => reflection_invariant(r, n, &normals),
                Generator::GenericOriginInterior => generic_origin_interior(r, n),
                Generator::GenericPosition => generic_position(r, n),
            }
        };
        let pair = match family.generator {
            Generator::IdenticalPair => {
                let k = one(&mut r)?;
                BodyPair {
                    id,
                    l: k.clone(),
                    k,
                    relation: PairRelation::Identical,
                }
            }
            Generator::DilatatePair => {
                let k = one(&mut r)?;
                let ratio = r.random_range(1.2..=3.0);
                BodyPair {
                    id,
                    l: k.scale(ratio)?,
                    k,
                    relation: PairRelation::Dilatate { ratio },
                }
            }
            _ => {
                let k = one(&mut r)?;
                let l = one(&mut r)?;
                BodyPair::new(id, k, l)
            }
        };
        check_pair(family, &pair)?;
        out.push(pair);
    }
    Ok(out)
}
