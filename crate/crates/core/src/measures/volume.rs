use crate::error::{Error, Result};
use crate::geometry::{Body, Polytope};
use crate::rng;
use crate::solver::membership;

use super::density::ball_volume;
use super::estimate::{Estimate, McBudget};

/// Membership tolerance for sampled points.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Exact Lebesgue volume: polytopes in n <= 3 and balls in any dimension.
pub fn volume_exact(k: &Body) -> Result<Estimate> {
    match k {
        Body::VPolytope(p) => p
            .volume()
            .map(Estimate::exact)
            .ok_or_else(|| Error::Unsupported(format!("exact volume in dimension {}", p.dim()))),
        Body::Ball { center, radius } => Ok(Estimate::exact(ball_volume(center.dim()) * radius.powi(center.dim() as i32))),
        Body::SupportTable(_) => Err(Error::Unsupported("exact volume of a support table".into())),
    }
}

/// Hit-or-miss volume over the bounding box.
pub fn volume_mc(k: &Body, budget: &McBudget) -> Result<Estimate> {
    let (lo, hi) = k.bounding_box()?;
    let n = k.dim();
    let mut boxvol = 1.0;
    for i in 0..n {
        boxvol *= hi[i] - lo[i];
    }
    if !(boxvol > 0.0) {
        return Err(Error::InvalidArgument("degenerate bounding box".into()));
    }
    let region = Region::new(k)?;
    let mut err = None;
    let e = budget.mean_of(|r| {
        let x = rng::in_box(r, &lo, &hi);
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
        None => Ok(e.scaled(boxvol)),
    }
}

/// Volume, exact where possible.
pub fn volume(k: &Body, budget: &McBudget) -> Result<Estimate> {
    match volume_exact(k) {
        Ok(e) => Ok(e),
        Err(Error::Unsupported(_)) => volume_mc(k, budget),
        Err(e) => Err(e),
    }
}

/// Membership oracle prepared for repeated queries; support tables are
/// replaced by their outer polytope when one is available.
pub(crate) struct Region {
    body: Body,
}

impl Region {
    pub fn new(k: &Body) -> Result<Self> {
        let body = match k {
            Body::SupportTable(t) if k.dim() <= 3 => Body::VPolytope(t.outer_polytope()?.clone()),
            _ => k.clone(),
        };
        Ok(Self { body })
    }

    pub fn contains(&self, x: &crate::geometry::Vector) -> Result<bool> {
        membership(x, &self.body, MEMBERSHIP_TOL)
    }
}

/// Outer polytope of a support table, or the polytope itself.
pub(crate) fn as_polytope(k: &Body) -> Option<Polytope> {
    match k {
        Body::VPolytope(p) => Some(p.clone()),
        Body::SupportTable(t) => t.outer_polytope().ok().cloned(),
        Body::Ball { .. } => None,
    }
}
