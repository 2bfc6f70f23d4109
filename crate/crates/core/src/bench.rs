//! Experiment orchestration and η scoring.
//!
//! For each distribution the standard vector is computed once, every
//! requested model is fit to it, and each fitted `ε` is rescaled against
//! three reference models on the same distribution: BST (`ε = 0`, η = +1),
//! LINR (η = 0) and WRST (η = −1).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{JointDist, Seed};
use crate::models::{true_params_indp, true_params_prsp, ModelKind, ModelParams};
use crate::optim::{fit_with_warm_start, FitResult, OptimSettings};
use crate::oracle::{standard_vector, EvidenceGrid};

/// Below this `ε_LINR` the distribution is trivially fit and η is undefined.
pub const DEGENERATE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("model list must include {0}")]
    MissingReference(ModelKind),
    #[error("no distributions to benchmark")]
    NoDistributions,
    #[error("need at least 2 usable reports to aggregate, {model} has {got}")]
    TooFewReports { model: ModelKind, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaScore {
    /// In [−1, 1]; NaN when degenerate.
    pub value: f64,
    pub clamped: bool,
    pub degenerate: bool,
}

impl EtaScore {
    pub fn degenerate() -> Self {
        Self { value: f64::NAN, clamped: false, degenerate: true }
    }
}

/// Normalized accuracy of a model with error `eps_x`, given the linear and
/// constant baselines on the same distribution. The best possible model has
/// `ε = 0`.
pub fn eta(eps_x: f64, eps_linr: f64, eps_wrst: f64) -> EtaScore {
    if eps_linr < DEGENERATE_EPS {
        return EtaScore::degenerate();
    }
    let raw = if eps_x <= eps_linr {
        (eps_linr - eps_x) / eps_linr
    } else {
        let mut denom = eps_linr - eps_wrst;
        if denom.abs() < 1e-12 {
            denom = -1e-12;
        }
        (eps_x - eps_linr) / denom
    };
    let value = raw.clamp(-1.0, 1.0);
    EtaScore { value, clamped: value != raw, degenerate: false }
}

/// Fit outcome for one model on one distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub kind: ModelKind,
    pub result: Result<ModelFit, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub params: ModelParams,
    pub epsilon: f64,
    pub eta: EtaScore,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistReport {
    pub dist_id: usize,
    /// One entry per requested model, in request order.
    pub models: Vec<ModelOutcome>,
    pub eps_linr: f64,
    pub eps_wrst: f64,
    pub degenerate: bool,
    /// Set when the whole distribution failed (e.g. the oracle did not converge).
    pub failure: Option<String>,
}

impl DistReport {
    pub fn fit(&self, kind: ModelKind) -> Option<&ModelFit> {
        self.models.iter().find(|m| m.kind == kind)?.result.as_ref().ok()
    }
}

/// Benchmarks every distribution in `dists`. Distribution `k` fits its
/// models with seeds derived from `seed.derive(k)`, so the reports do not
/// depend on how the work is scheduled. Runs on the current rayon pool.
pub fn run_bench(
    dists: &[JointDist],
    kinds: &[ModelKind],
    grid: &EvidenceGrid,
    settings: &OptimSettings,
    seed: Seed,
) -> Result<Vec<DistReport>, BenchError> {
    for required in [ModelKind::Linr, ModelKind::Wrst] {
        if !kinds.contains(&required) {
            return Err(BenchError::MissingReference(required));
        }
    }
    if dists.is_empty() {
        return Err(BenchError::NoDistributions);
    }
    Ok(dists
        .par_iter()
        .enumerate()
        .map(|(k, d)| bench_one(k, d, kinds, grid, settings, seed.derive(k as u64)))
        .collect())
}

fn bench_one(
    dist_id: usize,
    d: &JointDist,
    kinds: &[ModelKind],
    grid: &EvidenceGrid,
    settings: &OptimSettings,
    seed: Seed,
) -> DistReport {
    let failed = |msg: String| DistReport {
        dist_id,
        models: kinds.iter().map(|&kind| ModelOutcome { kind, result: Err(msg.clone()) }).collect(),
        eps_linr: f64::NAN,
        eps_wrst: f64::NAN,
        degenerate: false,
        failure: Some(msg),
    };
    let targets = match standard_vector(d, grid) {
        Ok(t) => t,
        Err(e) => return failed(format!("standard vector: {e}")),
    };

    let fits: Vec<(ModelKind, Result<FitResult, String>)> = kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let result = if kind == ModelKind::Bst {
                Ok(FitResult {
                    params: ModelParams::bst(),
                    epsilon: 0.0,
                    iterations: 0,
                    converged: true,
                    start_index: 0,
                })
            } else {
                let warm = match kind {
                    ModelKind::Indp => true_params_indp(d).ok(),
                    ModelKind::Prsp => true_params_prsp(d).ok(),
                    _ => None,
                };
                fit_with_warm_start(kind, &targets, settings, seed.derive(i as u64), warm.as_ref())
                    .map_err(|e| e.to_string())
            };
            (kind, result)
        })
        .collect();

    let eps_of =
        |kind| fits.iter().find(|(k, _)| *k == kind).and_then(|(_, r)| r.as_ref().ok()).map(|r| r.epsilon);
    let (eps_linr, eps_wrst) = match (eps_of(ModelKind::Linr), eps_of(ModelKind::Wrst)) {
        (Some(l), Some(w)) => (l, w),
        _ => return failed("reference fit (LINR or WRST) failed".into()),
    };
    let degenerate = eps_linr < DEGENERATE_EPS;

    let models = fits
        .into_iter()
        .map(|(kind, result)| ModelOutcome {
            kind,
            result: result.map(|r| ModelFit {
                eta: eta(r.epsilon, eps_linr, eps_wrst),
                epsilon: r.epsilon,
                params: r.params,
                converged: r.converged,
                iterations: r.iterations,
            }),
        })
        .collect();

    DistReport { dist_id, models, eps_linr, eps_wrst, degenerate, failure: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub mu: f64,
    /// Sample standard deviation (`n − 1` denominator).
    pub sigma: f64,
    /// Infinite when `sigma` is zero, NaN for `0 / 0`.
    pub mu_over_sigma: f64,
    pub n_included: usize,
    pub n_degenerate: usize,
}

/// Per-model η statistics, keyed in [`ModelKind`] order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SummaryTable {
    pub models: BTreeMap<ModelKind, ModelSummary>,
}

impl SummaryTable {
    pub fn get(&self, kind: ModelKind) -> Option<&ModelSummary> {
        self.models.get(&kind)
    }

    /// Two-row μ / σ layout, one column per model.
    pub fn render(&self) -> String {
        let mut out = format!("{:<6}", "");
        for kind in self.models.keys() {
            out += &format!("{:>10}", kind.name());
        }
        type Column = fn(&ModelSummary) -> f64;
        let rows: [(&str, Column); 3] =
            [("mu", |s| s.mu), ("sigma", |s| s.sigma), ("mu/sig", |s| s.mu_over_sigma)];
        for (label, get) in rows {
            out += &format!("\n{label:<6}");
            for s in self.models.values() {
                out += &format!("{:>10.4}", get(s));
            }
        }
        let counts: Vec<String> = self
            .models
            .iter()
            .map(|(k, s)| format!("{k}: {} used, {} excluded", s.n_included, s.n_degenerate))
            .collect();
        out += &format!("\n({})", counts.join("; "));
        out
    }
}

/// Aggregates η per model over non-degenerate reports. Distributions where
/// the model failed (or the whole distribution failed) are counted with the
/// degenerate ones.
pub fn summarize(reports: &[DistReport]) -> Result<SummaryTable, BenchError> {
    let mut kinds: Vec<ModelKind> = reports.iter().flat_map(|r| r.models.iter().map(|m| m.kind)).collect();
    kinds.sort();
    kinds.dedup();

    let mut table = SummaryTable::default();
    for kind in kinds {
        let values: Vec<f64> = reports
            .iter()
            .filter_map(|r| r.fit(kind))
            .filter(|f| !f.eta.degenerate)
            .map(|f| f.eta.value)
            .collect();
        let n = values.len();
        if n < 2 {
            return Err(BenchError::TooFewReports { model: kind, got: n });
        }
        let mu = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sigma = var.sqrt();
        table.models.insert(
            kind,
            ModelSummary {
                mu,
                sigma,
                mu_over_sigma: mu / sigma,
                n_included: n,
                n_degenerate: reports.len() - n,
            },
        );
    }
    Ok(table)
}
