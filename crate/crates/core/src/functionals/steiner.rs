use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{minkowski_sum, Body};
use crate::measures::{ball_volume, volume_exact, Estimate, McBudget};
use crate::rng;
use crate::solver::{gauge_distance, GaugeField};

/// Largest accepted condition number of the scaled Steiner system.
pub const DEFAULT_CONDITION_BOUND: f64 = 1e8;

/// How volumes of parallel bodies are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum VolumeEngine {
    /// Closed forms and exact polytope volumes; fails when none applies.
    Exact,
    /// Hit-or-miss over the bounding box.
    Mc(McBudget),
    /// Exact where possible, Monte Carlo otherwise.
    Auto(McBudget),
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Intrinsic volumes of `rB_n`: `V_j = binom(n,j) kappa_n / kappa_{n-j} r^j`.
pub fn ball_intrinsic_volumes(n: usize, r: f64) -> Vec<f64> {
    (0..=n)
        .map(|j| binomial(n, j) * ball_volume(n) / ball_volume(n - j) * r.powi(j as i32))
        .collect()
}

/// Exact intrinsic volumes of polytopes (n <= 3) and balls.
pub fn intrinsic_volumes_exact(k: &Body) -> Option<Vec<f64>> {
    match k {
        Body::VPolytope(p) => p.intrinsic_volumes_exact(),
        Body::Ball { center, radius } => Some(ball_intrinsic_volumes(center.dim(), *radius)),
        Body::SupportTable(_) => None,
    }
}

fn parallel_volume_exact(k: &Body, e: &Body, t: f64) -> Result<Option<f64>> {
    let n = k.dim();
    if t == 0.0 {
        return Ok(volume_exact(k).ok().map(|v| v.value));
    }
    match (k, e) {
        (_, Body::Ball { radius, .. }) => Ok(intrinsic_volumes_exact(k).map(|v| {
            let s = t * radius;
            (0..=n).map(|j| v[j] * ball_volume(n - j) * s.powi((n - j) as i32)).sum()
        })),
        (Body::VPolytope(_), Body::VPolytope(ep)) if n <= 3 => {
            let sum = minkowski_sum(k, &Body::VPolytope(ep.scaled(t)?), None)?;
            Ok(volume_exact(&sum).ok().map(|v| v.value))
        }
        _ => Ok(None),
    }
}

/// Hit-or-miss volume of `K + tE` through the gauge distance.
fn parallel_volume_mc(k: &Body, e: &Body, t: f64, budget: &McBudget) -> Result<Estimate> {
    let n = k.dim();
    let (klo, khi) = k.bounding_box()?;
    let (elo, ehi) = e.bounding_box()?;
    let lo = klo + elo * t;
    let hi = khi + ehi * t;
    let mut boxvol = 1.0;
    for i in 0..n {
        boxvol *= hi[i] - lo[i];
    }
    if !(boxvol > 0.0) {
        return Ok(Estimate::exact(0.0));
    }
    let field = GaugeField::new(k, e).ok();
    let mut err = None;
    let est = budget.mean_of(|r| {
        let x = rng::in_box(r, &lo, &hi);
        let d = match &field {
            Some(f) => f.distance(&x),
            None => gauge_distance(&x, k, e),
        };
        match d {
            Ok(d) => f64::from(u8::from(d <= t)),
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

/// `vol(K + tE)`.
pub fn parallel_volume(k: &Body, e: &Body, t: f64, engine: &VolumeEngine) -> Result<Estimate> {
    if k.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: e.dim(),
        });
    }
    match engine {
        VolumeEngine::Exact => parallel_volume_exact(k, e, t)?
            .map(Estimate::exact)
            .ok_or_else(|| Error::Unsupported("no exact parallel volume for this pair".into())),
        VolumeEngine::Mc(b) => parallel_volume_mc(k, e, t, b),
        VolumeEngine::Auto(b) => match parallel_volume_exact(k, e, t)? {
            Some(v) => Ok(Estimate::exact(v)),
            None => parallel_volume_mc(k, e, t, b),
        },
    }
}

/// Relative quermassintegrals fitted to `vol(K + tE) = sum binom(n,i) W_i t^i`.
#[derive(Clone, Debug, Serialize)]
pub struct SteinerFit {
    pub radii: Vec<f64>,
    pub volumes: Vec<Estimate>,
    /// `W_0 .. W_n`.
    pub w: Vec<f64>,
    /// Standard errors of `w`.
    pub w_err: Vec<f64>,
    /// Covariance of `w`.
    pub covariance: Vec<Vec<f64>>,
    /// 2-norm condition number of the scaled Vandermonde matrix.
    pub condition: f64,
}

/// Default radii `{1/4, 2/4, ..., (n+1)/4}` times the circumradius of `K`.
pub fn default_radii(k: &Body) -> Result<Vec<f64>> {
    let c = k.interior_point();
    let r = k.radius_about(&c)?;
    let s = if r > 1e-9 { r } else { 1.0 };
    Ok((1..=k.dim() + 1).map(|j| s * j as f64 / 4.0).collect())
}

/// Fits the Steiner polynomial of `K` relative to `E` at `radii`.
pub fn quermassintegrals_fit(k: &Body, e: &Body, radii: Option<&[f64]>, engine: &VolumeEngine) -> Result<SteinerFit> {
    quermassintegrals_fit_bounded(k, e, radii, engine, DEFAULT_CONDITION_BOUND)
}

pub fn quermassintegrals_fit_bounded(
    k: &Body,
    e: &Body,
    radii: Option<&[f64]>,
    engine: &VolumeEngine,
    condition_bound: f64,
) -> Result<SteinerFit> {
    let n = k.dim();
    let radii: Vec<f64> = match radii {
        Some(r) => r.to_vec(),
        None => default_radii(k)?,
    };
    if radii.len() != n + 1 {
        return Err(Error::InvalidArgument(format!("need {} radii, got {}", n + 1, radii.len())));
    }
    let mut sorted = radii.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] <= 0.0 || sorted.windows(2).any(|w| w[1] - w[0] <= 1e-12 * w[1]) {
        return Err(Error::InvalidArgument("radii must be positive and distinct".into()));
    }
    let tau = sorted[n];
    let a = DMatrix::from_fn(n + 1, n + 1, |j, i| (radii[j] / tau).powi(i as i32));
    let sv = a.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition <= condition_bound) {
        return Err(Error::IllConditioned {
            condition,
            bound: condition_bound,
        });
    }
    let volumes = radii
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let eng = match engine {
                VolumeEngine::Mc(b) => VolumeEngine::Mc(b.clone().with_key(&[&b.key[..], &[j as u64]].concat())),
                VolumeEngine::Auto(b) => VolumeEngine::Auto(b.clone().with_key(&[&b.key[..], &[j as u64]].concat())),
                VolumeEngine::Exact => VolumeEngine::Exact,
            };
            parallel_volume(k, e, *t, &eng)
        })
        .collect::<Result<Vec<_>>>()?;
    let inv = a.clone().try_inverse().ok_or(Error::Singular("Steiner system".into()))?;
    let y = DVector::from_iterator(n + 1, volumes.iter().map(|v| v.value));
    let c = &inv * y;
    let sigma = DMatrix::from_diagonal(&DVector::from_iterator(n + 1, volumes.iter().map(|v| v.std_error * v.std_error)));
    let cov_c = &inv * sigma * inv.transpose();
    // c_i = binom(n,i) W_i tau^i
    let scale: Vec<f64> = (0..=n).map(|i| 1.0 / (binomial(n, i) * tau.powi(i as i32))).collect();
    let w: Vec<f64> = (0..=n).map(|i| c[i] * scale[i]).collect();
    let covariance: Vec<Vec<f64>> = (0..=n)
        .map(|i| (0..=n).map(|j| cov_c[(i, j)] * scale[i] * scale[j]).collect())
        .collect();
    let w_err = (0..=n).map(|i| covariance[i][i].max(0.0).sqrt()).collect();
    Ok(SteinerFit {
        radii,
        volumes,
        w,
        w_err,
        covariance,
        condition,
    })
}

impl SteinerFit {
    /// `sum_i coef_i W_i` with its propagated standard error.
    pub fn linear(&self, coef: &[f64]) -> (f64, f64) {
        let v = coef.iter().zip(&self.w).map(|(a, b)| a * b).sum();
        let mut var = 0.0;
        for (i, a) in coef.iter().enumerate() {
            for (j, b) in coef.iter().enumerate() {
                var += a * b * self.covariance[i][j];
            }
        }
        (v, var.max(0.0).sqrt())
    }

    pub fn dim(&self) -> usize {
        self.w.len() - 1
    }

    fn estimate(&self, coef: &[f64]) -> Estimate {
        let (value, se) = self.linear(coef);
        let mc: u64 = self.volumes.iter().map(|v| v.n_samples).sum();
        if self.volumes.iter().all(Estimate::is_exact) {
            Estimate::exact(value)
        } else {
            Estimate {
                value,
                std_error: se,
                n_samples: mc,
                method: crate::measures::Method::Mc,
            }
        }
    }

    /// `W_i` as an estimate.
    pub fn quermassintegral(&self, i: usize) -> Estimate {
        let mut coef = vec![0.0; self.dim() + 1];
        coef[i] = 1.0;
        self.estimate(&coef)
    }
}

/// Intrinsic volumes `V_0 .. V_n`, `V_{n-i} = binom(n,i) W_i / kappa_i`, fitted
/// relative to the unit ball.
#[derive(Clone, Debug, Serialize)]
pub struct IntrinsicVolumes {
    pub values: Vec<Estimate>,
    pub fit: SteinerFit,
}

impl IntrinsicVolumes {
    /// Coefficients of `V_j` in terms of `W_0 .. W_n`.
    fn coef(n: usize, j: usize) -> Vec<f64> {
        let i = n - j;
        let mut c = vec![0.0; n + 1];
        c[i] = binomial(n, i) / ball_volume(i);
        c
    }

    /// Sum of all intrinsic volumes with its propagated error.
    pub fn total(&self) -> Estimate {
        let n = self.fit.dim();
        let mut c = vec![0.0; n + 1];
        for j in 0..=n {
            for (a, b) in c.iter_mut().zip(Self::coef(n, j)) {
                *a += b;
            }
        }
        self.fit.estimate(&c)
    }
}

/// Tolerance on `V_0 = 1` for exact fits.
pub const EULER_TOL: f64 = 1e-6;

pub fn intrinsic_volumes(k: &Body, engine: &VolumeEngine) -> Result<IntrinsicVolumes> {
    let n = k.dim();
    let fit = quermassintegrals_fit(k, &Body::unit_ball(n), None, engine)?;
    let values: Vec<Estimate> = (0..=n).map(|j| fit.estimate(&IntrinsicVolumes::coef(n, j))).collect();
    let v0 = values[0];
    if (v0.value - 1.0).abs() > (3.0 * v0.std_error).max(EULER_TOL) {
        return Err(Error::Solver(format!("Steiner fit gives V_0 = {} (expected 1)", v0.value)));
    }
    Ok(IntrinsicVolumes { values, fit })
}

/// Classical Wills functional as the sum of fitted intrinsic volumes.
pub fn wills_steiner(k: &Body, engine: &VolumeEngine) -> Result<Estimate> {
    Ok(intrinsic_volumes(k, engine)?.total())
}

/// `K` as a body usable by the parallel volume engines.
pub(crate) fn polytope_or_body(k: &Body) -> Result<Body> {
    match k {
        Body::SupportTable(t) => Ok(Body::VPolytope(t.outer_polytope()?.clone())),
        _ => Ok(k.clone()),
    }
}
