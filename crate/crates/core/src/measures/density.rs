use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};
use libm::erf;
use statrs::function::gamma::{gamma, gamma_lr, ln_gamma};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::rng;

/// One-dimensional density of a product measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum AxisDensity {
    /// `N(0, sigma^2)`.
    Gaussian { sigma: f64 },
    /// `e^{-|x|/scale} / (2 scale)`.
    Laplace { scale: f64 },
    /// Indicator of `[lo, hi]` (not normalized).
    Indicator { lo: f64, hi: f64 },
    /// Indicator of `[a0, a1] ∪ [b0, b1]`, a non-convex support.
    TwoIntervals { a: [f64; 2], b: [f64; 2] },
}

/// Density `g(‖x‖)` on `R^n`, normalized to total mass 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialDensity {
    /// `N(0, sigma^2 I)`.
    Gaussian { sigma: f64 },
    /// Proportional to `e^{-‖x‖/scale}`.
    ExpNorm { scale: f64 },
    /// Proportional to `(1 - ‖x‖^2)_+^{1/beta}`.
    PowerCap { beta: f64 },
    /// Proportional to `‖x‖` on the unit ball.
    NormOnBall,
}

/// A measure on `R^n` given by a named density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Lebesgue,
    /// Standard Gaussian measure.
    Gaussian,
    Product { axes: Vec<AxisDensity> },
    Radial { density: RadialDensity },
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the unit ball in `R^n`, `pi^{n/2} / Gamma(n/2 + 1)`.
pub fn ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

impl AxisDensity {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AxisDensity::Gaussian { sigma } => positive("sigma", sigma),
            AxisDensity::Laplace { scale } => positive("scale", scale),
            AxisDensity::Indicator { lo, hi } => positive("interval length", hi - lo),
            AxisDensity::TwoIntervals { a, b } => {
                positive("interval length", a[1] - a[0])?;
                positive("interval length", b[1] - b[0])?;
                if a[1] >= b[0] {
                    return Err(Error::InvalidArgument("two_intervals must be disjoint and ordered".into()));
                }
                Ok(())
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            AxisDensity::Gaussian { sigma } => {
                (-(x * x) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
            }
            AxisDensity::Laplace { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            AxisDensity::Indicator { lo, hi } => f64::from(u8::from(lo <= x && x <= hi)),
            AxisDensity::TwoIntervals { a, b } => {
                f64::from(u8::from((a[0] <= x && x <= a[1]) || (b[0] <= x && x <= b[1])))
            }
        }
    }

    /// Mass of `(-inf, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let clip = |lo: f64, hi: f64| (x.min(hi) - lo).max(0.0);
        match *self {
            AxisDensity::Gaussian { sigma } => std_normal_cdf(x / sigma),
            AxisDensity::Laplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            AxisDensity::Indicator { lo, hi } => clip(lo, hi),
            AxisDensity::TwoIntervals { a, b } => clip(a[0], a[1]) + clip(b[0], b[1]),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match *self {
            AxisDensity::Gaussian { .. } | AxisDensity::Laplace { .. } => 1.0,
            AxisDensity::Indicator { lo, hi } => hi - lo,
            AxisDensity::TwoIntervals { a, b } => a[1] - a[0] + b[1] - b[0],
        }
    }

    /// Draw from the density normalized to mass 1.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            AxisDensity::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            AxisDensity::Laplace { scale } => {
                let e = -(1.0 - rng.random::<f64>()).ln() * scale;
                if rng.random::<bool>() {
                    e
                } else {
                    -e
                }
            }
            AxisDensity::Indicator { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            AxisDensity::TwoIntervals { a, b } => {
                let la = a[1] - a[0];
                let s = rng.random::<f64>() * (la + b[1] - b[0]);
                if s < la {
                    a[0] + s
                } else {
                    b[0] + s - la
                }
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            AxisDensity::Gaussian { .. } | AxisDensity::Laplace { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            AxisDensity::Indicator { lo, hi } => (lo, hi),
            AxisDensity::TwoIntervals { a, b } => (a[0], b[1]),
        }
    }
}

impl RadialDensity {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialDensity::Gaussian { sigma } => positive("sigma", sigma),
            RadialDensity::ExpNorm { scale } => positive("scale", scale),
            RadialDensity::PowerCap { beta } => positive("beta", beta),
            RadialDensity::NormOnBall => Ok(()),
        }
    }

    /// Density value at radius `r` in `R^n`.
    pub fn profile(&self, n: usize, r: f64) -> f64 {
        let nf = n as f64;
        match *self {
            RadialDensity::Gaussian { sigma } => {
                (-(r * r) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).powf(nf / 2.0)
            }
            RadialDensity::ExpNorm { scale } => {
                let z = sphere_area(n) * scale.powf(nf) * ln_gamma(nf).exp();
                (-r / scale).exp() / z
            }
            RadialDensity::PowerCap { beta } => {
                if r >= 1.0 {
                    return 0.0;
                }
                let z = sphere_area(n) * 0.5 * ln_beta(nf / 2.0, 1.0 / beta + 1.0).exp();
                (1.0 - r * r).powf(1.0 / beta) / z
            }
            RadialDensity::NormOnBall => {
                if r > 1.0 {
                    0.0
                } else {
                    r * (nf + 1.0) / sphere_area(n)
                }
            }
        }
    }

    /// Mass of the centred ball of radius `rho`.
    pub fn radial_cdf(&self, n: usize, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let nf = n as f64;
        match *self {
            RadialDensity::Gaussian { sigma } if n == 2 => -(-rho * rho / (2.0 * sigma * sigma)).exp_m1(),
            RadialDensity::Gaussian { sigma } => gamma_lr(nf / 2.0, rho * rho / (2.0 * sigma * sigma)),
            RadialDensity::ExpNorm { scale } if n == 2 => {
                let x = rho / scale;
                -(-x).exp_m1() - x * (-x).exp()
            }
            RadialDensity::ExpNorm { scale } => gamma_lr(nf, rho / scale),
            RadialDensity::PowerCap { beta } => beta_reg(nf / 2.0, 1.0 / beta + 1.0, (rho * rho).min(1.0)),
            RadialDensity::NormOnBall => rho.min(1.0).powf(nf + 1.0),
        }
    }

    /// Draw a point from the density.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vector {
        let nf = n as f64;
        let r = match *self {
            RadialDensity::Gaussian { sigma } => return rng::normal_vector(rng, n) * sigma,
            RadialDensity::ExpNorm { scale } => Gamma::new(nf, scale).expect("validated").sample(rng),
            RadialDensity::PowerCap { beta } => {
                let b: f64 = Beta::new(nf / 2.0, 1.0 / beta + 1.0).expect("validated").sample(rng);
                b.sqrt()
            }
            RadialDensity::NormOnBall => rng.random::<f64>().powf(1.0 / (nf + 1.0)),
        };
        rng::unit_vector(rng, n) * r
    }

    /// Radius beyond which the density vanishes, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            RadialDensity::PowerCap { .. } | RadialDensity::NormOnBall => Some(1.0),
            _ => None,
        }
    }
}

impl MeasureSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            MeasureSpec::Lebesgue | MeasureSpec::Gaussian => Ok(()),
            MeasureSpec::Product { axes } => {
                if axes.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: axes.len(),
                    });
                }
                axes.iter().try_for_each(AxisDensity::validate)
            }
            MeasureSpec::Radial { density } => density.validate(),
        }
    }

    /// The standard Gaussian as a radial density; other variants unchanged.
    pub fn as_radial(&self) -> Option<RadialDensity> {
        match self {
            MeasureSpec::Gaussian => Some(RadialDensity::Gaussian { sigma: 1.0 }),
            MeasureSpec::Radial { density } => Some(density.clone()),
            _ => None,
        }
    }

    pub fn density(&self, x: &Vector) -> f64 {
        let n = x.dim();
        match self {
            MeasureSpec::Lebesgue => 1.0,
            MeasureSpec::Product { axes } => axes.iter().enumerate().map(|(i, a)| a.pdf(x[i])).product(),
            _ => self.as_radial().expect("radial").profile(n, x.norm()),
        }
    }

    /// Total mass, `None` for Lebesgue measure.
    pub fn total_mass(&self) -> Option<f64> {
        match self {
            MeasureSpec::Lebesgue => None,
            MeasureSpec::Product { axes } => Some(axes.iter().map(AxisDensity::total_mass).product()),
            _ => Some(1.0),
        }
    }

    /// Draw from the measure normalized to mass 1; Lebesgue measure draws
    /// from the cube `[-2,2]^n`.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vector {
        match self {
            MeasureSpec::Lebesgue => {
                let c = Vector::zeros(n).map(|_| 2.0);
                rng::in_box(rng, &(c * -1.0), &c)
            }
            MeasureSpec::Product { axes } => {
                let mut v = Vector::zeros(n);
                for (i, a) in axes.iter().enumerate() {
                    v[i] = a.sample(rng);
                }
                v
            }
            _ => self.as_radial().expect("radial").sample(n, rng),
        }
    }

    /// Box containing the support, if bounded.
    pub fn support_box(&self, n: usize) -> Option<(Vector, Vector)> {
        match self {
            MeasureSpec::Product { axes } => {
                let mut lo = Vector::zeros(n);
                let mut hi = Vector::zeros(n);
                for (i, a) in axes.iter().enumerate() {
                    let (l, h) = a.support();
                    if !l.is_finite() || !h.is_finite() {
                        return None;
                    }
                    lo[i] = l;
                    hi[i] = h;
                }
                Some((lo, hi))
            }
            _ => {
                let r = self.as_radial()?.support_radius()?;
                Some((Vector::zeros(n).map(|_| -r), Vector::zeros(n).map(|_| r)))
            }
        }
    }
}

/// Outcome of a density property probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub holds: bool,
    pub probes: usize,
    /// Offending points, at most ten.
    pub witnesses: Vec<Vec<f64>>,
}

impl ProbeReport {
    fn new(probes: usize) -> Self {
        Self {
            holds: true,
            probes,
            witnesses: Vec::new(),
        }
    }

    fn violation(&mut self, w: Vec<f64>) {
        self.holds = false;
        if self.witnesses.len() < 10 {
            self.witnesses.push(w);
        }
    }
}

const PROBE_EPS: f64 = 1e-12;

/// Probes `f(tx) <= f(x)` for `t in (1, t_max]` at points drawn from the measure.
pub fn is_radially_decreasing(spec: &MeasureSpec, n: usize, probes: usize, t_max: f64, seed: u64) -> Result<ProbeReport> {
    spec.validate(n)?;
    let mut r = rng::stream(seed, &[rng::tag("radial-probe")]);
    let mut report = ProbeReport::new(probes);
    for _ in 0..probes {
        let x = spec.sample(n, &mut r);
        let t = 1.0 + (t_max - 1.0) * (1.0 - r.random::<f64>());
        let (fx, ftx) = (spec.density(&x), spec.density(&(x * t)));
        if ftx > fx + PROBE_EPS * fx.max(1.0) {
            let mut w = x.as_slice().to_vec();
            w.push(t);
            report.violation(w);
        }
    }
    Ok(report)
}

/// Concavity class of a density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concavity {
    Log,
    Beta(f64),
}

/// Probes `f((1-l)x + ly) >= M_beta(f(x), f(y); l)` for `x, y` in the support.
pub fn is_beta_concave(spec: &MeasureSpec, n: usize, concavity: Concavity, probes: usize, seed: u64) -> Result<ProbeReport> {
    spec.validate(n)?;
    let mut r = rng::stream(seed, &[rng::tag("concavity-probe")]);
    let mut report = ProbeReport::new(probes);
    for _ in 0..probes {
        let x = spec.sample(n, &mut r);
        let y = spec.sample(n, &mut r);
        let l = r.random::<f64>();
        let (fx, fy) = (spec.density(&x), spec.density(&y));
        if fx <= 0.0 || fy <= 0.0 {
            continue;
        }
        let mean = match concavity {
            Concavity::Log => fx.powf(1.0 - l) * fy.powf(l),
            Concavity::Beta(b) if b == 0.0 => fx.powf(1.0 - l) * fy.powf(l),
            Concavity::Beta(b) => ((1.0 - l) * fx.powf(b) + l * fy.powf(b)).powf(1.0 / b),
        };
        let z = x * (1.0 - l) + y * l;
        let fz = spec.density(&z);
        if fz < mean - 1e-9 * mean.max(1e-300) - PROBE_EPS {
            let mut w = x.as_slice().to_vec();
            w.extend_from_slice(y.as_slice());
            w.push(l);
            report.violation(w);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((ball_volume(2) - PI).abs() < 1e-14);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }

    fn integrate_radial(d: &RadialDensity, n: usize, rho: f64) -> f64 {
        let m = 200_000;
        let h = rho / m as f64;
        (0..m)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                d.profile(n, r) * r.powi(n as i32 - 1)
            })
            .sum::<f64>()
            * h
            * sphere_area(n)
    }

    #[test]
    fn radial_cdf_matches_profile() {
        let fams = [
            RadialDensity::Gaussian { sigma: 1.3 },
            RadialDensity::ExpNorm { scale: 0.7 },
            RadialDensity::PowerCap { beta: 0.5 },
            RadialDensity::NormOnBall,
        ];
        for d in &fams {
            for n in 1..=3 {
                for rho in [0.3, 0.9, 2.5] {
                    let a = integrate_radial(d, n, rho);
                    assert!((a - d.radial_cdf(n, rho)).abs() < 1e-6, "{d:?} n={n} rho={rho}");
                }
            }
        }
    }

    #[test]
    fn axis_cdf_matches_pdf() {
        let fams = [
            AxisDensity::Gaussian { sigma: 0.8 },
            AxisDensity::Laplace { scale: 1.5 },
            AxisDensity::Indicator { lo: -1.0, hi: 0.5 },
        ];
        for a in &fams {
            let (x0, x1) = (-0.7, 1.2);
            let m = 100_000;
            let h = (x1 - x0) / m as f64;
            let s: f64 = (0..m).map(|i| a.pdf(x0 + (i as f64 + 0.5) * h)).sum::<f64>() * h;
            assert!((s - (a.cdf(x1) - a.cdf(x0))).abs() < 1e-4);
        }
    }

    #[test]
    fn radial_decrease_probes() {
        assert!(is_radially_decreasing(&MeasureSpec::Gaussian, 2, 2000, 3.0, 1).unwrap().holds);
        let ind = MeasureSpec::Product {
            axes: vec![AxisDensity::Indicator { lo: -1.0, hi: 1.0 }],
        };
        assert!(is_radially_decreasing(&ind, 1, 2000, 3.0, 1).unwrap().holds);
        let bad = MeasureSpec::Radial {
            density: RadialDensity::NormOnBall,
        };
        let rep = is_radially_decreasing(&bad, 2, 2000, 3.0, 1).unwrap();
        assert!(!rep.holds && !rep.witnesses.is_empty());
    }

    #[test]
    fn concavity_probes() {
        assert!(is_beta_concave(&MeasureSpec::Gaussian, 2, Concavity::Log, 2000, 2).unwrap().holds);
        let cap = MeasureSpec::Radial {
            density: RadialDensity::PowerCap { beta: 0.5 },
        };
        assert!(is_beta_concave(&cap, 2, Concavity::Beta(0.5), 2000, 2).unwrap().holds);
        let two = MeasureSpec::Product {
            axes: vec![AxisDensity::TwoIntervals {
                a: [-2.0, -1.0],
                b: [1.0, 2.0],
            }],
        };
        let rep = is_beta_concave(&two, 1, Concavity::Log, 2000, 2).unwrap();
        assert!(!rep.holds);
    }

    #[test]
    fn spec_serde() {
        let s: MeasureSpec = serde_json::from_str(r#"{"kind":"radial","density":{"family":"power_cap","beta":0.5}}"#).unwrap();
        assert_eq!(s.as_radial(), Some(RadialDensity::PowerCap { beta: 0.5 }));
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"kind":"radial","density":{"family":"cauchy"}}"#).is_err());
    }
}
