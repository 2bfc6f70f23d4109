//! Run configuration, readable from JSON. Command-line flags override
//! individual fields.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Family, Seed};
use crate::models::ModelKind;
use crate::optim::OptimSettings;
use crate::oracle::{EvidenceGrid, OracleError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("parsing config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<OracleError> for ConfigError {
    fn from(e: OracleError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Seed,
    pub n_dists: usize,
    pub family: Family,
    pub grid: EvidenceGrid,
    pub models: Vec<ModelKind>,
    pub optim: OptimSettings,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: Seed(0),
            n_dists: 109,
            family: Family::Uniform,
            grid: EvidenceGrid::default(),
            models: ModelKind::FITTED.to_vec(),
            optim: OptimSettings::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_owned(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_dists == 0 {
            return Err(ConfigError::Invalid("n_dists must be at least 1".into()));
        }
        let o = &self.optim;
        if o.n_starts == 0
            || o.max_iters == 0
            || !(o.grad_tol > 0.0 && o.obj_rel_tol > 0.0 && o.fd_step > 0.0)
        {
            return Err(ConfigError::Invalid("optimizer settings must be positive".into()));
        }
        if self.models.is_empty() {
            return Err(ConfigError::Invalid("model list is empty".into()));
        }
        Ok(())
    }
}

/// Parses a comma-separated list of grid levels, e.g. `.001,.25,.5`.
pub fn parse_grid(s: &str) -> Result<EvidenceGrid, ConfigError> {
    let levels = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| ConfigError::Invalid(format!("grid level {t:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvidenceGrid::new(levels)?)
}

/// Parses a comma-separated model list, e.g. `LINR,WRST,INDP`.
pub fn parse_models(s: &str) -> Result<Vec<ModelKind>, ConfigError> {
    s.split(',').map(|t| t.parse::<ModelKind>().map_err(ConfigError::Invalid)).collect()
}
