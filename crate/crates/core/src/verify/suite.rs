use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::DirectionGrid;
use crate::measures::McBudget;
use crate::psum::DEFAULT_MU_POINTS;
use crate::rng;

use super::check::{
    bonferroni_k, compare, evaluate_pair, CheckOptions, InequalitySpec, Verdict, VerificationRecord, DEFAULT_EXACT_REL_TOL,
    DEFAULT_SIGMA_K,
};
use super::family::{BodyPair, PairFamily, PairRelation};

/// Numerical settings shared by the instances of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSettings {
    pub seed: u64,
    pub n_samples: usize,
    pub shards: usize,
    /// Direction-grid resolution; the dimension default when absent.
    pub grid_m: Option<usize>,
    pub mu_points: usize,
    pub sigma_k: f64,
    pub exact_rel_tol: f64,
    pub bonferroni: bool,
    pub log_outer: bool,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        Self {
            seed: 0,
            n_samples: 100_000,
            shards: 4,
            grid_m: None,
            mu_points: DEFAULT_MU_POINTS,
            sigma_k: DEFAULT_SIGMA_K,
            exact_rel_tol: DEFAULT_EXACT_REL_TOL,
            bonferroni: true,
            log_outer: true,
        }
    }
}

impl SuiteSettings {
    pub fn grid(&self, dim: usize) -> Result<Arc<DirectionGrid>> {
        Ok(Arc::new(match self.grid_m {
            Some(m) => DirectionGrid::new(dim, m, 0)?,
            None => DirectionGrid::default_for(dim)?,
        }))
    }

    fn options(&self, grid: Arc<DirectionGrid>, key: &[u64]) -> CheckOptions {
        CheckOptions {
            budget: McBudget::new(self.seed, self.n_samples).with_shards(self.shards).with_key(key),
            grid,
            mu_points: self.mu_points,
            sigma_k: self.sigma_k,
            exact_rel_tol: self.exact_rel_tol,
            log_outer: self.log_outer,
        }
    }
}

/// A family with its generated pairs.
#[derive(Clone, Debug)]
pub struct FamilyPairs {
    pub family: PairFamily,
    pub pairs: Vec<BodyPair>,
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: String,
    pub threshold_k: f64,
    pub records: Vec<VerificationRecord>,
}

/// Per-suite counts and slack statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub functional: String,
    pub records: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub error: usize,
    pub threshold_k: f64,
    pub min_slack_in_sigma: Option<f64>,
    pub median_slack_non_identical: Option<f64>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

impl SuiteResult {
    pub fn summary(&self) -> SuiteSummary {
        let count = |v: Verdict| self.records.iter().filter(|r| r.verdict == v).count();
        let min_slack_in_sigma = self
            .records
            .iter()
            .filter_map(VerificationRecord::slack_in_sigma)
            .reduce(f64::min);
        let non_identical = self
            .records
            .iter()
            .filter(|r| r.relation != PairRelation::Identical)
            .filter_map(VerificationRecord::slack)
            .collect();
        SuiteSummary {
            suite: self.name.clone(),
            functional: self.records.first().map(|r| r.functional.clone()).unwrap_or_default(),
            records: self.records.len(),
            pass: count(Verdict::Pass),
            fail: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
            error: count(Verdict::Error),
            threshold_k: self.threshold_k,
            min_slack_in_sigma,
            median_slack_non_identical: median(non_identical),
        }
    }

    pub fn has_fail(&self) -> bool {
        self.records.iter().any(|r| r.verdict == Verdict::Fail)
    }
}

/// Number of `(pair, lambda, p)` instances of a suite.
pub fn task_count(spec: &InequalitySpec, families: &[FamilyPairs]) -> usize {
    families.iter().map(|f| f.pairs.len()).sum::<usize>() * spec.p.len() * spec.lambda.len()
}

fn pair_records(spec: &InequalitySpec, fam: &PairFamily, pair: &BodyPair, settings: &SuiteSettings) -> Vec<VerificationRecord> {
    let n = pair.dim();
    let key = [rng::tag(&spec.name), rng::tag(&fam.name), pair.id as u64];
    let template = |lambda: f64, p: f64| VerificationRecord {
        suite: spec.name.clone(),
        functional: spec.functional.label(),
        family: fam.name.clone(),
        generator: fam.generator.label().into(),
        pair_id: pair.id,
        relation: pair.relation,
        dimension: n,
        lambda,
        p,
        alpha: spec.alpha,
        constant: spec.constant,
        direction: spec.direction(),
        equality_expected: spec.expects_equality(pair.relation),
        comparison: None,
        threshold_k: settings.sigma_k,
        verdict: Verdict::Error,
        error: None,
    };
    let instances: Vec<(f64, f64)> = spec
        .lambda
        .iter()
        .flat_map(|&lambda| spec.p.iter().map(move |&p| (lambda, p)))
        .collect();
    let prepared = spec
        .validate(n)
        .and_then(|_| settings.grid(n))
        .map(|grid| settings.options(grid, &key))
        .and_then(|opts| evaluate_pair(spec, &pair.k, &pair.l, &opts).map(|v| (opts, v)));
    let (opts, (fk, fl)) = match prepared {
        Ok(v) => v,
        Err(e) => {
            let msg = e.to_string();
            return instances
                .iter()
                .map(|&(lambda, p)| VerificationRecord {
                    error: Some(msg.clone()),
                    ..template(lambda, p)
                })
                .collect();
        }
    };
    instances
        .par_iter()
        .map(|&(lambda, p)| {
            let mut rec = template(lambda, p);
            match compare(spec, &pair.k, &pair.l, pair.relation, lambda, p, fk, fl, &opts) {
                Ok(c) => {
                    rec.comparison = Some(c);
                    rec.reclassify(settings.sigma_k);
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect()
}

/// Runs one inequality over the given families. Records are ordered by
/// family, pair, lambda and p; the verdict threshold is Bonferroni-adjusted
/// over the evaluated records when enabled.
pub fn run_suite(spec: &InequalitySpec, families: &[FamilyPairs], settings: &SuiteSettings) -> SuiteResult {
    let jobs: Vec<(&PairFamily, &BodyPair)> = families
        .iter()
        .flat_map(|f| f.pairs.iter().map(move |p| (&f.family, p)))
        .collect();
    let mut records: Vec<VerificationRecord> = jobs
        .par_iter()
        .map(|(fam, pair)| pair_records(spec, fam, pair, settings))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let evaluated = records.iter().filter(|r| r.comparison.is_some()).count();
    let k = if settings.bonferroni {
        bonferroni_k(settings.sigma_k, evaluated)
    } else {
        settings.sigma_k
    };
    for r in &mut records {
        r.reclassify(k);
    }
    SuiteResult {
        name: spec.name.clone(),
        threshold_k: k,
        records,
    }
}

/// Fail counts by suite name.
pub fn fail_counts(results: &[SuiteResult]) -> BTreeMap<String, usize> {
    results.iter().map(|r| (r.name.clone(), r.summary().fail)).collect()
}
