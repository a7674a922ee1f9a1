use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::psum::DEFAULT_MU_POINTS;
use crate::verify::{InequalitySpec, PairFamily, SuiteSettings, DEFAULT_EXACT_REL_TOL, DEFAULT_SIGMA_K};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub n_samples: usize,
    #[serde(default = "default_shards")]
    pub shards: usize,
}

fn default_shards() -> usize {
    4
}

fn default_sigma_k() -> f64 {
    DEFAULT_SIGMA_K
}

fn default_mu_grid() -> usize {
    DEFAULT_MU_POINTS
}

fn default_exact_rel_tol() -> f64 {
    DEFAULT_EXACT_REL_TOL
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_sigma_k")]
    pub sigma_k: f64,
    /// Direction-grid resolution; per-dimension default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    #[serde(default = "default_mu_grid")]
    pub mu_grid: usize,
    #[serde(default = "default_exact_rel_tol")]
    pub exact_rel_tol: f64,
    #[serde(default = "yes")]
    pub bonferroni: bool,
    #[serde(default = "yes")]
    pub log_outer: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sigma_k: DEFAULT_SIGMA_K,
            grid_m: None,
            mu_grid: DEFAULT_MU_POINTS,
            exact_rel_tol: DEFAULT_EXACT_REL_TOL,
            bonferroni: true,
            log_outer: true,
        }
    }
}

fn default_dir() -> String {
    "out".into()
}

fn default_report() -> String {
    "report.jsonl".into()
}

fn default_summary() -> String {
    "summary.csv".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            report: default_report(),
            summary: default_summary(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// When set, every family must have this dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub families: Vec<PairFamily>,
    #[serde(default)]
    pub inequalities: Vec<InequalitySpec>,
    pub sampling: Sampling,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            config_error(path, format!("{inner}"))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn family(&self, name: &str) -> Option<&PairFamily> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sampling.n_samples == 0 {
            return Err(config_error("sampling.n_samples", "must be positive"));
        }
        if self.sampling.shards == 0 {
            return Err(config_error("sampling.shards", "must be positive"));
        }
        let t = &self.tolerances;
        if !(t.sigma_k > 0.0 && t.sigma_k.is_finite()) {
            return Err(config_error("tolerances.sigma_k", "must be positive"));
        }
        if t.mu_grid < 2 {
            return Err(config_error("tolerances.mu_grid", "needs at least two points"));
        }
        if !(t.exact_rel_tol >= 0.0 && t.exact_rel_tol < 1e-3) {
            return Err(config_error("tolerances.exact_rel_tol", "must lie in [0, 1e-3)"));
        }
        let mut names = BTreeSet::new();
        for (i, f) in self.families.iter().enumerate() {
            if !names.insert(f.name.as_str()) {
                return Err(config_error(format!("families[{i}].name"), format!("duplicate family `{}`", f.name)));
            }
            f.validate().map_err(|e| config_error(format!("families[{i}]"), e.to_string()))?;
            if let Some(n) = self.dimension {
                if f.dimension != n {
                    return Err(config_error(
                        format!("families[{i}].dimension"),
                        format!("{} differs from the experiment dimension {n}", f.dimension),
                    ));
                }
            }
            if let Some(m) = t.grid_m {
                if f.dimension > 1 && m < 2 * f.dimension {
                    return Err(config_error("tolerances.grid_m", format!("too small for dimension {}", f.dimension)));
                }
            }
        }
        let mut suites = BTreeSet::new();
        for (i, q) in self.inequalities.iter().enumerate() {
            if !suites.insert(q.name.as_str()) {
                return Err(config_error(format!("inequalities[{i}].name"), format!("duplicate inequality `{}`", q.name)));
            }
            for (j, name) in q.families.iter().enumerate() {
                let fam = self.family(name).ok_or_else(|| {
                    config_error(format!("inequalities[{i}].families[{j}]"), format!("unknown family `{name}`"))
                })?;
                q.validate(fam.dimension).map_err(|e| config_error(format!("inequalities[{i}]"), e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Copy with families sorted by name and every name list sorted, so
    /// that semantically equal documents agree.
    pub fn canonical(&self) -> Self {
        let mut c = self.clone();
        c.families.sort_by(|a, b| a.name.cmp(&b.name));
        for q in &mut c.inequalities {
            q.families.sort();
        }
        c
    }

    /// Hex SHA-256 of the canonical JSON form without the output section.
    /// Object keys are sorted by the JSON value model.
    pub fn fingerprint(&self) -> String {
        let mut value = serde_json::to_value(self.canonical()).expect("config serializes");
        if let Some(m) = value.as_object_mut() {
            m.remove("outputs");
        }
        let text = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn settings(&self) -> SuiteSettings {
        SuiteSettings {
            seed: self.seed,
            n_samples: self.sampling.n_samples,
            shards: self.sampling.shards,
            grid_m: self.tolerances.grid_m,
            mu_points: self.tolerances.mu_grid,
            sigma_k: self.tolerances.sigma_k,
            exact_rel_tol: self.tolerances.exact_rel_tol,
            bonferroni: self.tolerances.bonferroni,
            log_outer: self.tolerances.log_outer,
        }
    }
}
