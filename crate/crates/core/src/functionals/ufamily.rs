use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing profile `u` of a generalized Wills functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum UFamily {
    /// `a t + b`, `a > 0`.
    Affine { a: f64, b: f64 },
    /// `pi t^2 + c`.
    Quadratic { c: f64 },
    /// `t^k`, `k >= 1`.
    Power { k: f64 },
}

impl UFamily {
    /// The classical profile `pi t^2`.
    pub const CLASSICAL: UFamily = UFamily::Quadratic { c: 0.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            UFamily::Affine { a, b } if a > 0.0 && a.is_finite() && b.is_finite() => Ok(()),
            UFamily::Quadratic { c } if c.is_finite() => Ok(()),
            UFamily::Power { k } if k >= 1.0 && k.is_finite() => Ok(()),
            _ => Err(Error::InvalidArgument(format!("{self:?} is not a strictly increasing profile"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            UFamily::Affine { a, b } => a * t + b,
            UFamily::Quadratic { c } => std::f64::consts::PI * t * t + c,
            UFamily::Power { k } => t.powf(k),
        }
    }

    /// `u^{-1}(s)` for `s >= u(0)`.
    pub fn inverse(&self, s: f64) -> f64 {
        let s = s.max(self.eval(0.0));
        match *self {
            UFamily::Affine { a, b } => (s - b) / a,
            UFamily::Quadratic { c } => ((s - c) / std::f64::consts::PI).sqrt(),
            UFamily::Power { k } => s.powf(1.0 / k),
        }
    }

    /// `∫_{u(0)}^∞ u^{-1}(s)^i e^{-s} ds` in closed form.
    pub fn weight(&self, i: usize) -> f64 {
        use statrs::function::gamma::gamma;
        let fi = i as f64;
        match *self {
            UFamily::Affine { a, b } => gamma(fi + 1.0) * (-b).exp() / a.powf(fi),
            UFamily::Quadratic { c } => {
                gamma(fi / 2.0 + 1.0) * (-c).exp() / std::f64::consts::PI.powf(fi / 2.0)
            }
            UFamily::Power { k } => gamma(fi / k + 1.0),
        }
    }

    /// Probes strict increase on a grid of `[0, t_max]`.
    pub fn is_strictly_increasing(&self, t_max: f64, points: usize) -> bool {
        let h = t_max / points as f64;
        (0..points).all(|j| self.eval((j + 1) as f64 * h) > self.eval(j as f64 * h))
    }
}
