//! Declarative experiments: configuration, execution and reports.

mod config;

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

pub use config::{ExperimentConfig, Outputs, Sampling, Tolerances};

use crate::error::{Error, Result};
use crate::verify::{generate_pairs, run_suite, task_count, FamilyPairs, SuiteResult, SuiteSummary, VerificationRecord};

/// Code version written into every report row.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Exit code when every suite ran and none failed.
pub const EXIT_OK: i32 = 0;
/// Exit code for configuration and runtime errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit code when at least one record failed.
pub const EXIT_FAIL: i32 = 2;

/// Command-line overrides applied on top of a loaded configuration.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.n_samples {
            cfg.sampling.n_samples = n;
        }
        if let Some(d) = &self.out_dir {
            cfg.outputs.dir = d.to_string_lossy().into_owned();
        }
        cfg.validate()
    }
}

/// One line of the JSON-lines report.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRow<'a> {
    pub fingerprint: &'a str,
    pub version: &'a str,
    pub seed: u64,
    #[serde(flatten)]
    pub record: &'a VerificationRecord,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub fingerprint: String,
    pub suites: Vec<SuiteResult>,
    pub report_path: PathBuf,
    pub summary_path: PathBuf,
}

impl RunOutcome {
    pub fn summaries(&self) -> Vec<SuiteSummary> {
        self.suites.iter().map(SuiteResult::summary).collect()
    }

    pub fn records(&self) -> usize {
        self.suites.iter().map(|s| s.records.len()).sum()
    }

    pub fn has_fail(&self) -> bool {
        self.suites.iter().any(SuiteResult::has_fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.has_fail() {
            EXIT_FAIL
        } else {
            EXIT_OK
        }
    }
}

/// Loads a configuration and applies overrides.
pub fn load(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

fn generate_all(cfg: &ExperimentConfig) -> Result<Vec<FamilyPairs>> {
    cfg.families
        .iter()
        .map(|f| {
            Ok(FamilyPairs {
                family: f.clone(),
                pairs: generate_pairs(f, cfg.seed)?,
            })
        })
        .collect()
}

fn selected<'a>(all: &'a [FamilyPairs], names: &[String]) -> Vec<FamilyPairs> {
    names
        .iter()
        .filter_map(|n| all.iter().find(|f| &f.family.name == n))
        .cloned()
        .collect()
}

fn write_summary(path: &Path, summaries: &[SuiteSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for s in summaries {
        w.serialize(s).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

/// Executes every suite of the configuration, streaming rows to the
/// JSON-lines report and writing the CSV summary at the end.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    run_with_progress(cfg, |_, _| {})
}

/// As [`run`], calling `progress` after each suite with its wall time.
pub fn run_with_progress(cfg: &ExperimentConfig, mut progress: impl FnMut(&SuiteResult, Duration)) -> Result<RunOutcome> {
    cfg.validate()?;
    let fingerprint = cfg.fingerprint();
    let dir = PathBuf::from(&cfg.outputs.dir);
    fs::create_dir_all(&dir)?;
    let report_path = dir.join(&cfg.outputs.report);
    let summary_path = dir.join(&cfg.outputs.summary);
    let families = generate_all(cfg)?;
    let settings = cfg.settings();
    let mut out = BufWriter::new(File::create(&report_path)?);
    let mut suites = Vec::with_capacity(cfg.inequalities.len());
    for spec in &cfg.inequalities {
        let fams = selected(&families, &spec.families);
        let started = Instant::now();
        let result = run_suite(spec, &fams, &settings);
        progress(&result, started.elapsed());
        for record in &result.records {
            let row = ReportRow {
                fingerprint: &fingerprint,
                version: VERSION,
                seed: cfg.seed,
                record,
            };
            serde_json::to_writer(&mut out, &row).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        suites.push(result);
    }
    let outcome = RunOutcome {
        fingerprint,
        suites,
        report_path,
        summary_path,
    };
    write_summary(&outcome.summary_path, &outcome.summaries())?;
    Ok(outcome)
}

/// Human-readable plan of a configuration; nothing is executed.
pub fn describe(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fingerprint {}", cfg.fingerprint());
    let _ = writeln!(
        s,
        "seed {}, {} samples per Monte Carlo estimate in {} shards, threshold {} sigma{}",
        cfg.seed,
        cfg.sampling.n_samples,
        cfg.sampling.shards,
        cfg.tolerances.sigma_k,
        if cfg.tolerances.bonferroni { " (Bonferroni-adjusted per suite)" } else { "" }
    );
    let _ = writeln!(s, "families: {}", cfg.families.len());
    for f in &cfg.families {
        let _ = writeln!(s, "  {:<28} {:<24} n={} pairs={}", f.name, f.generator.label(), f.dimension, f.count);
    }
    let _ = writeln!(s, "suites: {}", cfg.inequalities.len());
    let mut total = 0usize;
    for q in &cfg.inequalities {
        let tasks: usize = q
            .families
            .iter()
            .filter_map(|n| cfg.family(n))
            .map(|f| f.count)
            .sum::<usize>()
            * q.p.len()
            * q.lambda.len();
        total += tasks;
        let _ = writeln!(
            s,
            "  {:<28} {:<26} alpha={:.6} C={:.6} {:?} p={:?} lambda={:?} families={:?} tasks={}",
            q.name,
            q.functional.label(),
            q.alpha,
            q.constant,
            q.direction(),
            q.p,
            q.lambda,
            q.families,
            tasks
        );
    }
    let _ = writeln!(s, "total tasks: {total}");
    let _ = writeln!(
        s,
        "sample budget: at most {} Monte Carlo samples (exact engines use none)",
        (total as u128) * 3 * cfg.sampling.n_samples as u128
    );
    let _ = writeln!(s, "admissibility is certified on the tested lambda grid only (grid-admissible)");
    let _ = writeln!(s, "outputs: {}/{{{}, {}}}", cfg.outputs.dir, cfg.outputs.report, cfg.outputs.summary);
    s
}

/// Number of tasks a configuration schedules.
pub fn planned_tasks(cfg: &ExperimentConfig) -> Result<usize> {
    let families = generate_all(cfg)?;
    Ok(cfg
        .inequalities
        .iter()
        .map(|q| task_count(q, &selected(&families, &q.families)))
        .sum())
}
