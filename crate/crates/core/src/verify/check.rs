use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::functionals::{EvalContext, FunctionalSpec};
use crate::geometry::{minkowski_sum, Body, DirectionGrid, Polytope, Vector};
use crate::measures::{Estimate, McBudget, MeasureSpec, MEMBERSHIP_TOL};
use crate::psum::{firey_combination, lyz_inner_body, mu_star, LyzUnion, MuGrid, PCombinationSpec, DEFAULT_MU_POINTS};
use crate::rng;

use super::family::PairRelation;

/// Default verdict threshold in standard errors.
pub const DEFAULT_SIGMA_K: f64 = 3.0;

/// Default relative noise floor attached to exactly computed values.
pub const DEFAULT_EXACT_REL_TOL: f64 = 1e-9;

/// Vertices used to replace a disc by an inscribed polygon in LYZ slices.
const BALL_POLYGON_2D: usize = 256;

/// Directions used to replace a ball by an inscribed polytope in 3 and 4
/// dimensions.
const BALL_POINTS_HIGH: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `F(combination) >= C M`, for `alpha > 0`.
    Ge,
    /// `F(combination) <= C M`, for `alpha < 0`.
    Le,
}

fn one() -> f64 {
    1.0
}

/// `F((1-lambda).K +_p lambda.L) ≥ C ((1-lambda) F(K)^{p alpha} + lambda F(L)^{p alpha})^{1/(p alpha)}`,
/// reversed when `alpha < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalitySpec {
    pub name: String,
    pub functional: FunctionalSpec,
    pub alpha: f64,
    #[serde(default = "one")]
    pub constant: f64,
    pub p: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Derived from the sign of `alpha` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    /// Names of the pair families the inequality is checked on.
    #[serde(default)]
    pub families: Vec<String>,
}

impl InequalitySpec {
    pub fn new(name: &str, functional: FunctionalSpec, alpha: f64) -> Self {
        Self {
            name: name.into(),
            functional,
            alpha,
            constant: 1.0,
            p: vec![1.0, 1.5, 2.0, 4.0],
            lambda: vec![0.25, 0.5, 0.75],
            direction: None,
            families: Vec::new(),
        }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = c;
        self
    }

    pub fn with_grid(mut self, p: &[f64], lambda: &[f64]) -> Self {
        self.p = p.to_vec();
        self.lambda = lambda.to_vec();
        self
    }

    pub fn with_families(mut self, names: &[&str]) -> Self {
        self.families = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn direction(&self) -> Direction {
        self.direction.unwrap_or(if self.alpha > 0.0 { Direction::Ge } else { Direction::Le })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(format!("inequality `{}`: {m}", self.name)));
        if !(self.alpha.is_finite() && self.alpha != 0.0) {
            return bad("alpha must be finite and nonzero".into());
        }
        let expected = if self.alpha > 0.0 { Direction::Ge } else { Direction::Le };
        if self.direction() != expected {
            return bad(format!("direction {:?} contradicts the sign of alpha", self.direction()));
        }
        if !(self.constant > 0.0 && self.constant.is_finite()) {
            return bad("constant must be positive".into());
        }
        if self.p.is_empty() || self.p.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
            return bad("p values must be finite and at least 1".into());
        }
        if self.lambda.is_empty() || self.lambda.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return bad("lambda values must lie in (0,1)".into());
        }
        if self.functional.is_increasing() != (self.alpha > 0.0) {
            return bad("increasing functionals take alpha > 0 and decreasing ones alpha < 0".into());
        }
        self.functional.validate(n)
    }

    /// Right-hand side with a first-order error from `F(K)` and `F(L)`.
    pub fn rhs(&self, fk: &Estimate, fl: &Estimate, lambda: f64, p: f64) -> Estimate {
        let e = p * self.alpha;
        let m = (1.0 - lambda) * fk.value.powf(e) + lambda * fl.value.powf(e);
        let value = self.constant * m.powf(1.0 / e);
        let common = self.constant * m.powf(1.0 / e - 1.0);
        let dk = common * (1.0 - lambda) * fk.value.powf(e - 1.0);
        let dl = common * lambda * fl.value.powf(e - 1.0);
        let mut out = if fk.is_exact() { *fl } else { *fk };
        out.value = value;
        out.std_error = (dk * fk.std_error).hypot(dl * fl.std_error);
        out.n_samples = fk.n_samples + fl.n_samples;
        out
    }

    /// Whether the configuration is an equality case of the inequality.
    pub fn expects_equality(&self, relation: PairRelation) -> bool {
        match relation {
            PairRelation::Identical => self.constant == 1.0,
            PairRelation::Dilatate { .. } => {
                self.constant == 1.0
                    && matches!(
                        self.functional,
                        FunctionalSpec::Measure {
                            measure: MeasureSpec::Lebesgue
                        } | FunctionalSpec::PolarQuermassintegral { .. }
                    )
            }
            PairRelation::General => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// The check could not be evaluated; the message is in the record.
    Error,
}

impl Verdict {
    pub fn classify(slack: f64, sigma: f64, k: f64, equality_expected: bool) -> Verdict {
        let band = k * sigma;
        if slack.is_nan() {
            Verdict::Error
        } else if slack < -band {
            Verdict::Fail
        } else if slack.abs() <= band && !equality_expected {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }
}

/// Threshold giving the same family-wise one-sided tail as `k` gives for a
/// single comparison, spread over `m` comparisons.
pub fn bonferroni_k(k: f64, m: usize) -> f64 {
    if m <= 1 {
        return k;
    }
    let nd = Normal::standard();
    let tail = 1.0 - nd.cdf(k);
    nd.inverse_cdf(1.0 - tail / m as f64)
}

/// How the left-hand side body was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LhsMethod {
    /// `K = L`, so every combination is `K`.
    Identical,
    /// Exact body: Minkowski combination, or a closed form.
    Exact,
    /// Hull of LYZ slices, contained in the combination.
    InnerHull,
    /// Union of LYZ slices, for sets not containing the origin.
    SliceUnion,
}

/// Both sides of one instance of the inequality.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub f_k: Estimate,
    pub f_l: Estimate,
    pub mu_star: f64,
    pub lhs: Estimate,
    pub lhs_method: LhsMethod,
    /// `F` of the support-table outer body, logged only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_outer: Option<Estimate>,
    pub rhs: Estimate,
    pub slack: f64,
    pub sigma: f64,
    pub slack_in_sigma: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationRecord {
    pub suite: String,
    pub functional: String,
    pub family: String,
    pub generator: String,
    pub pair_id: usize,
    #[serde(flatten)]
    pub relation: PairRelation,
    pub dimension: usize,
    pub lambda: f64,
    pub p: f64,
    pub alpha: f64,
    pub constant: f64,
    pub direction: Direction,
    pub equality_expected: bool,
    #[serde(flatten)]
    pub comparison: Option<Comparison>,
    pub threshold_k: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationRecord {
    pub fn slack(&self) -> Option<f64> {
        self.comparison.as_ref().map(|c| c.slack)
    }

    pub fn slack_in_sigma(&self) -> Option<f64> {
        self.comparison.as_ref().map(|c| c.slack_in_sigma)
    }

    /// Reclassifies with a new threshold.
    pub fn reclassify(&mut self, k: f64) {
        self.threshold_k = k;
        if let Some(c) = &self.comparison {
            self.verdict = Verdict::classify(c.slack, c.sigma, k, self.equality_expected);
        }
    }
}

/// Numerical settings of a check.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub budget: McBudget,
    pub grid: Arc<DirectionGrid>,
    pub mu_points: usize,
    pub sigma_k: f64,
    pub exact_rel_tol: f64,
    /// Also evaluate measures on the outer support-table body.
    pub log_outer: bool,
}

impl CheckOptions {
    pub fn new(dim: usize, seed: u64, n_samples: usize) -> Result<Self> {
        Ok(Self {
            budget: McBudget::new(seed, n_samples),
            grid: Arc::new(DirectionGrid::default_for(dim)?),
            mu_points: DEFAULT_MU_POINTS,
            sigma_k: DEFAULT_SIGMA_K,
            exact_rel_tol: DEFAULT_EXACT_REL_TOL,
            log_outer: true,
        })
    }

    pub fn context(&self) -> EvalContext {
        EvalContext {
            budget: self.budget.clone(),
            grid: self.grid.clone(),
        }
    }
}

/// Identical bodies, dilatates about the origin, or neither.
pub fn detect_relation(k: &Body, l: &Body) -> PairRelation {
    match (k, l) {
        (Body::VPolytope(a), Body::VPolytope(b)) => {
            if a.same_vertices(b, 0.0) {
                return PairRelation::Identical;
            }
            let ra = a.radius_about(&Vector::zeros(a.dim()));
            let rb = b.radius_about(&Vector::zeros(b.dim()));
            if ra > 0.0 {
                let r = rb / ra;
                if let Ok(s) = a.scaled(r) {
                    if r != 1.0 && s.same_vertices(b, 1e-12 * rb.max(1.0)) {
                        return PairRelation::Dilatate { ratio: r };
                    }
                }
            }
            PairRelation::General
        }
        (Body::Ball { center: c1, radius: r1 }, Body::Ball { center: c2, radius: r2 }) => {
            if c1 == c2 && r1 == r2 {
                PairRelation::Identical
            } else if c1.max_abs() == 0.0 && c2.max_abs() == 0.0 {
                PairRelation::Dilatate { ratio: r2 / r1 }
            } else {
                PairRelation::General
            }
        }
        _ => PairRelation::General,
    }
}

/// Inscribed polytope replacing a ball as an LYZ generator set.
fn generator_body(b: &Body) -> Result<Body> {
    match b {
        Body::Ball { center, radius } => {
            let n = b.dim();
            match n {
                1 => Body::polytope(&[*center - Vector::new(&[*radius]), *center + Vector::new(&[*radius])]),
                2 => Ok(Body::VPolytope(Polytope::regular_polygon(*center, *radius, BALL_POLYGON_2D)?)),
                _ => {
                    let g = DirectionGrid::new(n, BALL_POINTS_HIGH, 0)?;
                    let pts: Vec<Vector> = g.directions().iter().map(|u| *center + *u * *radius).collect();
                    Body::polytope(&pts)
                }
            }
        }
        _ => Ok(b.clone()),
    }
}

fn contains_origin(b: &Body) -> Result<bool> {
    crate::solver::membership(&Vector::zeros(b.dim()), b, MEMBERSHIP_TOL)
}

/// `F` of a slice union by hit-or-miss over its bounding box.
fn union_functional(union: &LyzUnion, f: &FunctionalSpec, budget: &McBudget) -> Result<Estimate> {
    let measure = match f {
        FunctionalSpec::Measure { measure } => measure,
        _ => {
            return Err(Error::Unsupported(format!(
                "{} of a non-convex slice union",
                f.label()
            )))
        }
    };
    let (lo, hi) = union.bounding_box();
    let boxvol: f64 = (0..lo.dim()).map(|i| hi[i] - lo[i]).product();
    if !(boxvol > 0.0) {
        return Err(Error::InvalidArgument("degenerate slice union".into()));
    }
    let mut err = None;
    let est = budget.mean_of(|r| {
        let x = rng::in_box(r, &lo, &hi);
        match union.contains(&x, MEMBERSHIP_TOL) {
            Ok(true) => measure.density(&x),
            Ok(false) => 0.0,
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

/// Compares both sides for given values of `F(K)` and `F(L)`.
#[allow(clippy::too_many_arguments)]
pub fn compare(
    spec: &InequalitySpec,
    k: &Body,
    l: &Body,
    relation: PairRelation,
    lambda: f64,
    p: f64,
    f_k: Estimate,
    f_l: Estimate,
    opts: &CheckOptions,
) -> Result<Comparison> {
    if !(f_k.value > 0.0 && f_l.value > 0.0) {
        return Err(Error::NotAdmissible);
    }
    let pc = PCombinationSpec::new(p, lambda)?;
    let mu = mu_star(lambda, f_k.value, f_l.value, p, spec.alpha);
    let ctx = opts.context();
    let mut lhs_outer = None;
    let (lhs, lhs_method) = if relation == PairRelation::Identical {
        (spec.functional.evaluate(k, &ctx)?, LhsMethod::Identical)
    } else if p == 1.0 {
        let body = minkowski_sum(&k.scale(1.0 - lambda)?, &l.scale(lambda)?, Some(&opts.grid))?;
        if matches!(body, Body::SupportTable(_)) {
            let inner = minkowski_sum(
                &generator_body(k)?.scale(1.0 - lambda)?,
                &generator_body(l)?.scale(lambda)?,
                None,
            )?;
            if opts.log_outer && matches!(spec.functional, FunctionalSpec::Measure { .. }) {
                lhs_outer = Some(spec.functional.evaluate(&body, &ctx)?);
            }
            (spec.functional.evaluate(&inner, &ctx)?, LhsMethod::InnerHull)
        } else {
            (spec.functional.evaluate(&body, &ctx)?, LhsMethod::Exact)
        }
    } else if contains_origin(k)? && contains_origin(l)? {
        let firey = firey_combination(k, l, &pc, &opts.grid)?;
        if matches!(firey, Body::SupportTable(_)) {
            let mu_grid = MuGrid::uniform(opts.mu_points)?.with_point(mu);
            let inner = lyz_inner_body(&generator_body(k)?, &generator_body(l)?, &pc, &mu_grid, &opts.grid)?;
            if opts.log_outer && matches!(spec.functional, FunctionalSpec::Measure { .. }) {
                lhs_outer = Some(spec.functional.evaluate(&firey, &ctx)?);
            }
            (spec.functional.evaluate(&inner, &ctx)?, LhsMethod::InnerHull)
        } else {
            (spec.functional.evaluate(&firey, &ctx)?, LhsMethod::Exact)
        }
    } else {
        let mu_grid = MuGrid::uniform(opts.mu_points)?.with_point(mu);
        let union = LyzUnion::new(&generator_body(k)?, &generator_body(l)?, &pc, &mu_grid, &opts.grid)?;
        (union_functional(&union, &spec.functional, &opts.budget)?, LhsMethod::SliceUnion)
    };
    let rhs = spec.rhs(&f_k, &f_l, lambda, p);
    let slack = match spec.direction() {
        Direction::Ge => lhs.value - rhs.value,
        Direction::Le => rhs.value - lhs.value,
    };
    let floor = opts.exact_rel_tol * lhs.value.abs().max(rhs.value.abs());
    let sigma = lhs.combined_error(&rhs).hypot(floor);
    let slack_in_sigma = if sigma > 0.0 { slack / sigma } else { 0.0 };
    Ok(Comparison {
        f_k,
        f_l,
        mu_star: mu,
        lhs,
        lhs_method,
        lhs_outer,
        rhs,
        slack,
        sigma,
        slack_in_sigma,
    })
}

/// Record skeleton for a standalone check.
fn standalone_record(spec: &InequalitySpec, n: usize, relation: PairRelation, lambda: f64, p: f64, k: f64) -> VerificationRecord {
    VerificationRecord {
        suite: spec.name.clone(),
        functional: spec.functional.label(),
        family: String::new(),
        generator: String::new(),
        pair_id: 0,
        relation,
        dimension: n,
        lambda,
        p,
        alpha: spec.alpha,
        constant: spec.constant,
        direction: spec.direction(),
        equality_expected: spec.expects_equality(relation),
        comparison: None,
        threshold_k: k,
        verdict: Verdict::Error,
        error: None,
    }
}

/// Evaluates `F(K)` and `F(L)` with common random numbers.
pub fn evaluate_pair(spec: &InequalitySpec, k: &Body, l: &Body, opts: &CheckOptions) -> Result<(Estimate, Estimate)> {
    let ctx = opts.context();
    Ok((spec.functional.evaluate(k, &ctx)?, spec.functional.evaluate(l, &ctx)?))
}

/// One instance of the inequality at `(lambda, p)` for the pair `(K, L)`.
pub fn check_lp_bm(spec: &InequalitySpec, k: &Body, l: &Body, lambda: f64, p: f64, opts: &CheckOptions) -> Result<VerificationRecord> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: l.dim(),
        });
    }
    spec.validate(k.dim())?;
    let relation = detect_relation(k, l);
    let (fk, fl) = evaluate_pair(spec, k, l, opts)?;
    let c = compare(spec, k, l, relation, lambda, p, fk, fl, opts)?;
    let mut rec = standalone_record(spec, k.dim(), relation, lambda, p, opts.sigma_k);
    rec.comparison = Some(c);
    rec.reclassify(opts.sigma_k);
    Ok(rec)
}

/// The Minkowski (`p = 1`) instance.
pub fn check_minkowski_bm(spec: &InequalitySpec, k: &Body, l: &Body, lambda: f64, opts: &CheckOptions) -> Result<VerificationRecord> {
    check_lp_bm(spec, k, l, lambda, 1.0, opts)
}

/// `W_i(K*)`-form inequality with `alpha = -1/(n-i)`.
pub fn polar_spec(i: usize, n: usize) -> InequalitySpec {
    InequalitySpec::new(
        &format!("polar_quermassintegral_{i}"),
        FunctionalSpec::PolarQuermassintegral { i },
        -1.0 / (n - i) as f64,
    )
}

/// The polar inequality at `p`, together with its `p = 1` base case.
pub fn check_polar_lp_bm(
    i: usize,
    k: &Body,
    l: &Body,
    p: f64,
    lambda: f64,
    opts: &CheckOptions,
) -> Result<(VerificationRecord, VerificationRecord)> {
    let n = k.dim();
    if i >= n {
        return Err(Error::InvalidArgument(format!("index {i} must be below the dimension {n}")));
    }
    let spec = polar_spec(i, n);
    let main = check_lp_bm(&spec, k, l, lambda, p, opts)?;
    let base = check_lp_bm(&spec, k, l, lambda, 1.0, opts)?;
    Ok((main, base))
}

/// Slack scan of one pair over a `(lambda, p)` grid.
#[derive(Clone, Debug, Serialize)]
pub struct EqualityProbe {
    pub relation: PairRelation,
    pub equality_expected: bool,
    pub records: Vec<VerificationRecord>,
    /// `(lambda, p, slack_in_sigma)` at the smallest slack.
    pub min_slack: (f64, f64, f64),
    /// Every `|slack| <= k sigma`.
    pub within_noise: bool,
    /// Every slack with `p > 1` exceeds `k sigma`.
    pub strictly_positive: bool,
}

impl EqualityProbe {
    /// Whether the scan agrees with the expected equality behaviour.
    pub fn consistent(&self) -> bool {
        if self.equality_expected {
            self.within_noise
        } else {
            self.strictly_positive
        }
    }
}

pub fn equality_probe(
    spec: &InequalitySpec,
    k: &Body,
    l: &Body,
    lambdas: &[f64],
    ps: &[f64],
    opts: &CheckOptions,
) -> Result<EqualityProbe> {
    spec.validate(k.dim())?;
    let relation = detect_relation(k, l);
    let (fk, fl) = evaluate_pair(spec, k, l, opts)?;
    let kk = opts.sigma_k;
    let mut records = Vec::new();
    for &lambda in lambdas {
        for &p in ps {
            let c = compare(spec, k, l, relation, lambda, p, fk, fl, opts)?;
            let mut rec = standalone_record(spec, k.dim(), relation, lambda, p, kk);
            rec.comparison = Some(c);
            rec.reclassify(kk);
            records.push(rec);
        }
    }
    if records.is_empty() {
        return Err(Error::Empty("probe grid"));
    }
    let mut min_slack = (f64::NAN, f64::NAN, f64::INFINITY);
    let mut within_noise = true;
    let mut strictly_positive = true;
    for r in &records {
        let c = r.comparison.as_ref().expect("probe records carry comparisons");
        if c.slack_in_sigma < min_slack.2 {
            min_slack = (r.lambda, r.p, c.slack_in_sigma);
        }
        within_noise &= c.slack.abs() <= kk * c.sigma;
        if r.p > 1.0 {
            strictly_positive &= c.slack > kk * c.sigma;
        }
    }
    Ok(EqualityProbe {
        relation,
        equality_expected: spec.expects_equality(relation),
        records,
        min_slack,
        within_noise,
        strictly_positive,
    })
}

/// `((1-lambda) a^e + lambda b^e)^{1/e}`.
pub fn power_mean(a: f64, b: f64, lambda: f64, e: f64) -> f64 {
    ((1.0 - lambda) * a.powf(e) + lambda * b.powf(e)).powf(1.0 / e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::UFamily;
    use crate::geometry::BodyLiteral;
    use std::f64::consts::PI;

    fn square() -> Body {
        Body::VPolytope(Polytope::cube(2, 1.0).unwrap())
    }

    fn gaussian() -> FunctionalSpec {
        FunctionalSpec::Measure {
            measure: MeasureSpec::Gaussian,
        }
    }

    fn volume() -> FunctionalSpec {
        FunctionalSpec::Measure {
            measure: MeasureSpec::Lebesgue,
        }
    }

    fn opts(n: usize) -> CheckOptions {
        CheckOptions::new(n, 5, 100_000).unwrap()
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(Verdict::classify(-1.0, 0.1, 3.0, false), Verdict::Fail);
        assert_eq!(Verdict::classify(0.2, 0.1, 3.0, false), Verdict::Inconclusive);
        assert_eq!(Verdict::classify(0.2, 0.1, 3.0, true), Verdict::Pass);
        assert_eq!(Verdict::classify(0.4, 0.1, 3.0, false), Verdict::Pass);
        assert_eq!(Verdict::classify(-0.3, 0.1, 3.0, false), Verdict::Inconclusive);
        assert_eq!(bonferroni_k(3.0, 1), 3.0);
        let k = bonferroni_k(3.0, 100);
        assert!(k > 4.0 && k < 4.5);
    }

    #[test]
    fn spec_validation() {
        assert!(InequalitySpec::new("v", volume(), 0.5).validate(2).is_ok());
        assert!(InequalitySpec::new("v", volume(), 0.0).validate(2).is_err());
        assert!(InequalitySpec::new("v", volume(), -0.5).validate(2).is_err());
        let mut s = polar_spec(0, 2);
        assert!(s.validate(2).is_ok());
        s.direction = Some(Direction::Ge);
        assert!(s.validate(2).is_err());
        let s = InequalitySpec::new("v", volume(), 0.5).with_grid(&[0.5], &[0.5]);
        assert!(s.validate(2).is_err());
    }

    #[test]
    fn rhs_error_propagation() {
        let s = InequalitySpec::new("v", volume(), 0.5);
        let a = Estimate::from_moments(2.0, 0.01, 1);
        let b = Estimate::exact(3.0);
        let r = s.rhs(&a, &b, 0.5, 2.0);
        assert!((r.value - 2.5).abs() < 1e-14);
        // d/da of (a + b)/2 is 1/2
        assert!((r.std_error - 0.05).abs() < 1e-12);
    }

    #[test]
    fn gaussian_minkowski_identical_square() {
        let s = InequalitySpec::new("g", gaussian(), 0.5);
        let r = check_minkowski_bm(&s, &square(), &square(), 0.5, &opts(2)).unwrap();
        let c = r.comparison.as_ref().unwrap();
        assert_eq!(c.lhs_method, LhsMethod::Identical);
        assert!(c.slack.abs() <= 3.0 * c.sigma);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn volume_minkowski_random_polytopes() {
        let s = InequalitySpec::new("v", volume(), 1.0 / 3.0);
        let mut r = rng::stream(9, &[]);
        for _ in 0..5 {
            let k = Body::polytope(&(0..6).map(|_| rng::normal_vector(&mut r, 3)).collect::<Vec<_>>()).unwrap();
            let l = Body::polytope(&(0..7).map(|_| rng::normal_vector(&mut r, 3) * 2.0).collect::<Vec<_>>()).unwrap();
            let rec = check_minkowski_bm(&s, &k, &l, 0.3, &opts(3)).unwrap();
            assert_eq!(rec.verdict, Verdict::Pass);
            assert_eq!(rec.comparison.unwrap().lhs_method, LhsMethod::Exact);
        }
    }

    #[test]
    fn gaussian_lp_square_and_diamond() {
        let s = InequalitySpec::new("g", gaussian(), 0.5);
        let l = Body::polytope(&[
            Vector::new(&[1.5, 0.0]),
            Vector::new(&[-1.5, 0.0]),
            Vector::new(&[0.0, 0.7]),
            Vector::new(&[0.0, -0.7]),
        ])
        .unwrap();
        let rec = check_lp_bm(&s, &square(), &l, 0.5, 2.0, &opts(2)).unwrap();
        assert_eq!(rec.verdict, Verdict::Pass);
        let c = rec.comparison.unwrap();
        assert_eq!(c.lhs_method, LhsMethod::InnerHull);
        assert!(c.lhs.value <= c.lhs_outer.unwrap().value + 1e-12);
    }

    #[test]
    fn volume_slice_union_off_origin() {
        let s = InequalitySpec::new("v", volume(), 0.5);
        let k = Body::VPolytope(Polytope::cuboid(&[1.0, 1.0], &[2.0, 1.5]).unwrap());
        let l = Body::polytope(&[Vector::new(&[-3.0, 0.0]), Vector::new(&[-2.0, 0.0]), Vector::new(&[-2.5, 1.0])]).unwrap();
        let mut o = opts(2);
        o.mu_points = 64;
        o.budget = o.budget.with_samples(20_000);
        let rec = check_lp_bm(&s, &k, &l, 0.5, 2.0, &o).unwrap();
        assert_eq!(rec.comparison.as_ref().unwrap().lhs_method, LhsMethod::SliceUnion);
        assert_eq!(rec.verdict, Verdict::Pass);
    }

    #[test]
    fn polar_examples() {
        let o = opts(2);
        let (main, base) = check_polar_lp_bm(0, &square(), &Body::unit_ball(2), 2.0, 0.5, &o).unwrap();
        assert_eq!(main.verdict, Verdict::Pass);
        assert_eq!(base.verdict, Verdict::Pass);
        let c = main.comparison.unwrap();
        assert!((c.f_k.value - 2.0).abs() < 1e-9 && (c.f_l.value - PI).abs() < 1e-9);
        let (m2, b2) = check_polar_lp_bm(0, &Body::unit_ball(2), &Body::unit_ball(2), 2.0, 0.5, &o).unwrap();
        assert!(m2.comparison.unwrap().slack.abs() < 1e-9 && b2.verdict == Verdict::Pass);
        let k = square();
        let l = k.scale(2.0).unwrap();
        let (m3, b3) = check_polar_lp_bm(1, &k, &l, 2.0, 0.3, &o).unwrap();
        assert!(m3.equality_expected);
        assert_eq!(m3.verdict, Verdict::Pass);
        assert!(b3.comparison.unwrap().slack.abs() < 1e-8);
    }

    #[test]
    fn probes() {
        let o = opts(2);
        let g = InequalitySpec::new("g", gaussian(), 0.5);
        let same = equality_probe(&g, &square(), &square(), &[0.25, 0.5], &[1.0, 2.0], &o).unwrap();
        assert!(same.equality_expected && same.within_noise && same.consistent());
        let dil = equality_probe(&g, &square(), &square().scale(2.0).unwrap(), &[0.5], &[2.0], &o).unwrap();
        assert!(!dil.equality_expected && dil.strictly_positive);
        let w = InequalitySpec::new("w", FunctionalSpec::Wills, 0.5).with_constant(0.5);
        let wp = equality_probe(&w, &square(), &square(), &[0.5], &[2.0], &o).unwrap();
        assert!(!wp.equality_expected && wp.strictly_positive);
    }

    #[test]
    fn generalized_wills_instance() {
        let f = FunctionalSpec::GeneralizedWills {
            gauge: BodyLiteral::from_body(&square()).unwrap(),
            u: UFamily::Affine { a: 1.0, b: 0.0 },
        };
        let s = InequalitySpec::new("gw", f, 0.5).with_constant(0.5);
        let l = Body::VPolytope(Polytope::cuboid(&[-0.5, -2.0], &[0.3, 1.0]).unwrap());
        let rec = check_lp_bm(&s, &square(), &l, 0.25, 1.5, &opts(2)).unwrap();
        assert_eq!(rec.verdict, Verdict::Pass);
    }

    #[test]
    fn power_mean_monotone_in_exponent() {
        let (a, b) = (0.3, 2.0);
        for alpha in [0.5, -0.5] {
            let mut prev = power_mean(a, b, 0.4, alpha);
            for j in 1..50 {
                let m = power_mean(a, b, 0.4, (1.0 + j as f64 * 0.2) * alpha);
                if alpha > 0.0 {
                    assert!(m >= prev - 1e-15);
                } else {
                    assert!(m <= prev + 1e-15);
                }
                prev = m;
            }
        }
    }

    #[test]
    fn relations() {
        assert_eq!(detect_relation(&square(), &square()), PairRelation::Identical);
        match detect_relation(&square(), &square().scale(1.7).unwrap()) {
            PairRelation::Dilatate { ratio } => assert!((ratio - 1.7).abs() < 1e-12),
            r => panic!("{r:?}"),
        }
        assert_eq!(detect_relation(&square(), &Body::unit_ball(2)), PairRelation::General);
    }
}
