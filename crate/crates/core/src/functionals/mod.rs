//! Wills-type functionals, quermassintegrals and intrinsic volumes, and a
//! uniform way to evaluate any supported functional on a body.

mod steiner;
mod ufamily;
mod wills;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use steiner::{
    ball_intrinsic_volumes, binomial, default_radii, intrinsic_volumes, intrinsic_volumes_exact, parallel_volume,
    quermassintegrals_fit, quermassintegrals_fit_bounded, wills_steiner, IntrinsicVolumes, SteinerFit, VolumeEngine,
    DEFAULT_CONDITION_BOUND, EULER_TOL,
};
pub use ufamily::UFamily;
pub use wills::{
    generalized_wills, generalized_wills_exact, weight_quadrature, weights_identity, weights_identity_check,
    wills_domain, wills_exact, wills_hadwiger, WeightsReport, WillsDomain, TAIL_REL,
};

use crate::error::{Error, Result};
use crate::geometry::{polar, Body, BodyLiteral, DirectionGrid, INTERIOR_DELTA};
use crate::measures::{density_measure, Estimate, McBudget, MeasureSpec};

/// A functional on bodies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalSpec {
    Measure { measure: MeasureSpec },
    /// Classical Wills functional, the sum of the intrinsic volumes.
    Wills,
    GeneralizedWills { gauge: BodyLiteral, u: UFamily },
    /// `K -> W_i(K*)`, decreasing under inclusion.
    PolarQuermassintegral { i: usize },
}

/// Evaluation context shared by the functionals of one task.
#[derive(Clone, Debug)]
pub struct EvalContext {
    pub budget: McBudget,
    pub grid: Arc<DirectionGrid>,
}

impl FunctionalSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            FunctionalSpec::Measure { measure } => measure.validate(n),
            FunctionalSpec::Wills => Ok(()),
            FunctionalSpec::GeneralizedWills { gauge, u } => {
                u.validate()?;
                let e = gauge.to_body()?;
                if e.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: e.dim(),
                    });
                }
                Ok(())
            }
            FunctionalSpec::PolarQuermassintegral { i } => {
                if *i >= n {
                    Err(Error::InvalidArgument(format!("polar quermassintegral index {i} must be below {n}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Whether the functional grows under set inclusion.
    pub fn is_increasing(&self) -> bool {
        !matches!(self, FunctionalSpec::PolarQuermassintegral { .. })
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            FunctionalSpec::Measure { measure } => match measure {
                MeasureSpec::Lebesgue => "volume".into(),
                MeasureSpec::Gaussian => "gaussian".into(),
                MeasureSpec::Product { .. } => "product_measure".into(),
                MeasureSpec::Radial { .. } => "radial_measure".into(),
            },
            FunctionalSpec::Wills => "wills".into(),
            FunctionalSpec::GeneralizedWills { .. } => "generalized_wills".into(),
            FunctionalSpec::PolarQuermassintegral { i } => format!("polar_quermassintegral_{i}"),
        }
    }

    /// `F(K)`. Exact engines are used whenever they apply.
    pub fn evaluate(&self, k: &Body, ctx: &EvalContext) -> Result<Estimate> {
        self.validate(k.dim())?;
        match self {
            FunctionalSpec::Measure { measure } => density_measure(k, measure, &ctx.budget),
            FunctionalSpec::Wills => match wills_exact(k) {
                Some(e) => Ok(e),
                None => wills_hadwiger(k, &ctx.budget),
            },
            FunctionalSpec::GeneralizedWills { gauge, u } => {
                let e = gauge.to_body()?;
                match generalized_wills_exact(k, &e, u) {
                    Ok(v) => Ok(v),
                    Err(Error::Unsupported(_)) => generalized_wills(k, &e, u, &ctx.budget),
                    Err(err) => Err(err),
                }
            }
            FunctionalSpec::PolarQuermassintegral { i } => {
                let kp = polar(k, &ctx.grid, INTERIOR_DELTA)?;
                let n = k.dim();
                let fit = quermassintegrals_fit(&kp, &Body::unit_ball(n), None, &VolumeEngine::Auto(ctx.budget.clone()))?;
                Ok(fit.quermassintegral(*i))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polytope;
    use std::f64::consts::PI;

    fn ctx(n: usize) -> EvalContext {
        EvalContext {
            budget: McBudget::new(1, 10_000),
            grid: Arc::new(DirectionGrid::default_for(n).unwrap()),
        }
    }

    #[test]
    fn polar_areas() {
        let f = FunctionalSpec::PolarQuermassintegral { i: 0 };
        let sq = Body::VPolytope(Polytope::cube(2, 1.0).unwrap());
        assert!((f.evaluate(&sq, &ctx(2)).unwrap().value - 2.0).abs() < 1e-9);
        assert!((f.evaluate(&Body::unit_ball(2), &ctx(2)).unwrap().value - PI).abs() < 1e-9);
        let big = sq.scale(2.0).unwrap();
        assert!((f.evaluate(&big, &ctx(2)).unwrap().value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn serde_forms() {
        let s: FunctionalSpec = serde_json::from_str(
            r#"{"kind":"generalized_wills","gauge":{"type":"ball","center":[0,0],"radius":1},"u":{"family":"affine","a":1,"b":1}}"#,
        )
        .unwrap();
        assert_eq!(s.label(), "generalized_wills");
        let m: FunctionalSpec = serde_json::from_str(r#"{"kind":"measure","measure":{"kind":"gaussian"}}"#).unwrap();
        assert!(m.is_increasing());
    }
}
