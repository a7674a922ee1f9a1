use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Body, DirectionGrid, Vector};
use crate::measures::{volume_exact, Estimate, McBudget};
use crate::quad;
use crate::rng;
use crate::solver::{gauge_distance, GaugeField};

use super::steiner::{binomial, intrinsic_volumes_exact, polytope_or_body, quermassintegrals_fit, SteinerFit, VolumeEngine};
use super::ufamily::UFamily;

/// Relative truncation error allowed in the Hadwiger-type integrals.
pub const TAIL_REL: f64 = 1e-6;

/// Integration domain `K + R E` of a generalized Wills integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WillsDomain {
    pub radius: f64,
    /// Upper bound on the mass outside `K + R E`.
    pub tail_bound: f64,
    /// Lower bound on the whole integral.
    pub lower_bound: f64,
}

fn inradius(e: &Body) -> Result<f64> {
    let r = match e {
        Body::Ball { center, radius } => radius - center.norm(),
        Body::VPolytope(p) if p.has_facets() => p
            .facets()
            .iter()
            .map(|f| f.offset / f.normal.norm())
            .fold(f64::INFINITY, f64::min),
        _ => {
            let g = DirectionGrid::default_for(e.dim())?;
            e.support_values(&g)?.into_iter().fold(f64::INFINITY, f64::min)
        }
    };
    if r > 0.0 {
        Ok(r)
    } else {
        Err(Error::OriginNotInterior { margin: r })
    }
}

fn volume_upper(e: &Body) -> Result<f64> {
    if let Ok(v) = volume_exact(e) {
        return Ok(v.value);
    }
    let (lo, hi) = e.bounding_box()?;
    Ok((0..e.dim()).map(|i| hi[i] - lo[i]).product())
}

/// Chooses `R` so that `∫_{d_E(x,K) > R} e^{-u} < TAIL_REL` times a lower
/// bound of the integral.
///
/// With `K ⊂ rho E` one has `vol(K + tE) <= vol(E)(rho + t)^n`, which bounds
/// the tail by `vol(E) ∫_R^∞ e^{-u(t)} n (rho+t)^{n-1} dt`; the integral is at
/// least its value for a single point, `vol(E) ∫_0^∞ e^{-u(t)} n t^{n-1} dt`.
pub fn wills_domain(k: &Body, e: &Body, u: &UFamily) -> Result<WillsDomain> {
    let n = k.dim() as i32;
    let rho = k.radius_about(&Vector::zeros(k.dim()))? / inradius(e)?;
    let ve = volume_upper(e)?;
    let tail = |r: f64| {
        ve * quad::integrate_to_infinity(|t| (-u.eval(t)).exp() * n as f64 * (rho + t).powi(n - 1), r, 1e-15)
    };
    let lower = volume_exact(e).map(|v| v.value).unwrap_or(0.0)
        * quad::integrate_to_infinity(|t| (-u.eval(t)).exp() * n as f64 * t.powi(n - 1), 0.0, 1e-15);
    let lower = lower.max(f64::MIN_POSITIVE);
    let mut radius = 0.5;
    let mut tb = tail(radius);
    while tb > TAIL_REL * lower {
        radius *= 1.25;
        tb = tail(radius);
        if radius > 1e6 {
            return Err(Error::Solver("tail radius search diverged".into()));
        }
    }
    Ok(WillsDomain {
        radius,
        tail_bound: tb,
        lower_bound: lower,
    })
}

/// `W_u(K;E) = ∫ e^{-u(d_E(x,K))} dx` by uniform sampling of the bounding
/// box of `K + R E`.
pub fn generalized_wills(k: &Body, e: &Body, u: &UFamily, budget: &McBudget) -> Result<Estimate> {
    u.validate()?;
    if k.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: e.dim(),
        });
    }
    let k = polytope_or_body(k)?;
    let dom = wills_domain(&k, e, u)?;
    let (klo, khi) = k.bounding_box()?;
    let (elo, ehi) = e.bounding_box()?;
    let lo = klo + elo * dom.radius;
    let hi = khi + ehi * dom.radius;
    let boxvol: f64 = (0..k.dim()).map(|i| hi[i] - lo[i]).product();
    let field = GaugeField::new(&k, e).ok();
    let mut err = None;
    let est = budget.mean_of(|r| {
        let x = rng::in_box(r, &lo, &hi);
        let d = match &field {
            Some(f) => f.distance(&x),
            None => gauge_distance(&x, &k, e),
        };
        match d {
            Ok(d) if d <= dom.radius => (-u.eval(d)).exp(),
            Ok(_) => 0.0,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(est.scaled(boxvol)),
    }
}

/// Classical Wills functional `∫ e^{-pi d(x,K)^2} dx` by Monte Carlo.
pub fn wills_hadwiger(k: &Body, budget: &McBudget) -> Result<Estimate> {
    generalized_wills(k, &Body::unit_ball(k.dim()), &UFamily::CLASSICAL, budget)
}

/// Exact classical Wills functional from exact intrinsic volumes.
pub fn wills_exact(k: &Body) -> Option<Estimate> {
    intrinsic_volumes_exact(k).map(|v| Estimate::exact(v.iter().sum()))
}

/// `∫_{u(0)}^∞ u^{-1}(s)^i e^{-s} ds` by adaptive quadrature.
pub fn weight_quadrature(u: &UFamily, i: usize) -> f64 {
    quad::integrate_to_infinity(|s| u.inverse(s).powi(i as i32) * (-s).exp(), u.eval(0.0), 1e-14)
}

/// `sum_i binom(n,i) W_i(K;E) ∫ u^{-1}(s)^i e^{-s} ds` from a Steiner fit.
pub fn weights_identity(fit: &SteinerFit, u: &UFamily) -> Estimate {
    let n = fit.dim();
    let coef: Vec<f64> = (0..=n).map(|i| binomial(n, i) * weight_quadrature(u, i)).collect();
    let (value, se) = fit.linear(&coef);
    let mut e = fit.quermassintegral(0);
    e.value = value;
    if !e.is_exact() {
        e.std_error = se;
    }
    e
}

/// `W_u(K;E)` from exactly known parallel volumes.
pub fn generalized_wills_exact(k: &Body, e: &Body, u: &UFamily) -> Result<Estimate> {
    u.validate()?;
    let fit = quermassintegrals_fit(k, e, None, &VolumeEngine::Exact)?;
    Ok(weights_identity(&fit, u))
}

/// Both sides of the layer-cake identity for `W_u(K;E)`.
#[derive(Clone, Debug, Serialize)]
pub struct WeightsReport {
    pub direct: Estimate,
    pub identity: Estimate,
    pub weights: Vec<f64>,
    /// `(direct - identity) / combined standard error`.
    pub discrepancy_sigma: f64,
}

pub fn weights_identity_check(k: &Body, e: &Body, u: &UFamily, engine: &VolumeEngine, budget: &McBudget) -> Result<WeightsReport> {
    let fit = quermassintegrals_fit(k, e, None, engine)?;
    let identity = weights_identity(&fit, u);
    let direct = generalized_wills(k, e, u, budget)?;
    let weights = (0..=k.dim()).map(|i| weight_quadrature(u, i)).collect();
    let se = direct.combined_error(&identity);
    let diff = direct.value - identity.value;
    Ok(WeightsReport {
        direct,
        identity,
        weights,
        discrepancy_sigma: if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY },
    })
}
