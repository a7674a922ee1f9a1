//! Checking Brunn-Minkowski type inequalities on generated pairs of bodies.

mod check;
mod family;
mod suite;

pub use check::{
    bonferroni_k, check_lp_bm, check_minkowski_bm, check_polar_lp_bm, compare, detect_relation, equality_probe,
    evaluate_pair, polar_spec, power_mean, CheckOptions, Comparison, Direction, EqualityProbe, InequalitySpec, LhsMethod,
    Verdict, VerificationRecord, DEFAULT_EXACT_REL_TOL, DEFAULT_SIGMA_K,
};
pub use family::{check_pair, generate_pairs, reflection_orbit, BodyPair, Generator, PairFamily, PairRelation, MAX_ORBIT};
pub use suite::{fail_counts, run_suite, task_count, FamilyPairs, SuiteResult, SuiteSettings, SuiteSummary};
