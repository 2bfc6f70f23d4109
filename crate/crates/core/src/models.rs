//! Prediction models for `P(C)` after soft evidence on E1 and E2.
//!
//! | kind | parameters | rule |
//! |------|------------|------|
//! | LINR | `a1, a2, b` | `a1·e1 + a2·e2 + b` (not clipped) |
//! | INDP | `b00, b01, b10, b11` | bilinear blend of the four cell conditionals |
//! | PRSP | `pC, pE1, P(C|E1), P(C|¬E1), pE2, P(C|E2), P(C|¬E2)` | PROSPECTOR-style odds combination |
//! | PWR  | `a1, a2, b` | `logit c = a1·logit e1 + a2·logit e2 + b` |
//! | WRST | `c` | constant |
//! | BST  | none | the standard answer itself |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DistError, Event, JointDist};
use crate::oracle::EvidencePair;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{kind} takes {expected} parameters, got {got}")]
    WrongDimension { kind: ModelKind, expected: usize, got: usize },
    #[error("{kind} parameter {index} = {value} is out of range")]
    OutOfRange { kind: ModelKind, index: usize, value: f64 },
    #[error("{kind} is undefined at e1 = {e1}, e2 = {e2}: {reason}")]
    Domain { kind: ModelKind, e1: f64, e2: f64, reason: &'static str },
    #[error("BST has no parameters; it is scored directly against the standard vector")]
    NoPrediction,
    #[error(transparent)]
    Dist(#[from] DistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "LINR")]
    Linr,
    #[serde(rename = "INDP")]
    Indp,
    #[serde(rename = "PRSP")]
    Prsp,
    #[serde(rename = "PWR")]
    Pwr,
    #[serde(rename = "WRST")]
    Wrst,
    #[serde(rename = "BST")]
    Bst,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] =
        [ModelKind::Linr, ModelKind::Indp, ModelKind::Prsp, ModelKind::Pwr, ModelKind::Wrst, ModelKind::Bst];

    /// The five models fit by a default benchmark run.
    pub const FITTED: [ModelKind; 5] =
        [ModelKind::Linr, ModelKind::Wrst, ModelKind::Indp, ModelKind::Prsp, ModelKind::Pwr];

    pub const fn dimension(self) -> usize {
        match self {
            ModelKind::Linr | ModelKind::Pwr => 3,
            ModelKind::Indp => 4,
            ModelKind::Prsp => 7,
            ModelKind::Wrst => 1,
            ModelKind::Bst => 0,
        }
    }

    /// Whether every parameter is a probability (searched through a logistic map).
    pub const fn is_bounded(self) -> bool {
        matches!(self, ModelKind::Indp | ModelKind::Prsp)
    }

    pub const fn name(self) -> &'static str {
        match self {
            ModelKind::Linr => "LINR",
            ModelKind::Indp => "INDP",
            ModelKind::Prsp => "PRSP",
            ModelKind::Pwr => "PWR",
            ModelKind::Wrst => "WRST",
            ModelKind::Bst => "BST",
        }
    }

    /// Evaluates the model on raw parameter values without range checks.
    /// `values` must have length [`ModelKind::dimension`].
    pub fn predict_raw(self, values: &[f64], ev: EvidencePair) -> Result<f64, ModelError> {
        match self {
            ModelKind::Linr => Ok(values[0] * ev.e1 + values[1] * ev.e2 + values[2]),
            ModelKind::Indp => Ok(indp(values, ev)),
            ModelKind::Prsp => prsp(values, ev),
            ModelKind::Pwr => pwr(values, ev),
            ModelKind::Wrst => Ok(values[0]),
            ModelKind::Bst => Err(ModelError::NoPrediction),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown model {s:?}"))
    }
}

/// A model together with a validated parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    kind: ModelKind,
    values: Vec<f64>,
}

impl ModelParams {
    pub fn new(kind: ModelKind, values: Vec<f64>) -> Result<Self, ModelError> {
        let expected = kind.dimension();
        if values.len() != expected {
            return Err(ModelError::WrongDimension { kind, expected, got: values.len() });
        }
        for (index, &value) in values.iter().enumerate() {
            let ok = match kind {
                ModelKind::Indp => (0.0..=1.0).contains(&value),
                ModelKind::Prsp => value > 0.0 && value < 1.0,
                _ => value.is_finite(),
            };
            if !ok {
                return Err(ModelError::OutOfRange { kind, index, value });
            }
        }
        Ok(Self { kind, values })
    }

    pub fn linr(a1: f64, a2: f64, b: f64) -> Result<Self, ModelError> {
        Self::new(ModelKind::Linr, vec![a1, a2, b])
    }

    pub fn indp(b00: f64, b01: f64, b10: f64, b11: f64) -> Result<Self, ModelError> {
        Self::new(ModelKind::Indp, vec![b00, b01, b10, b11])
    }

    pub fn pwr(a1: f64, a2: f64, b: f64) -> Result<Self, ModelError> {
        Self::new(ModelKind::Pwr, vec![a1, a2, b])
    }

    pub fn wrst(c: f64) -> Result<Self, ModelError> {
        Self::new(ModelKind::Wrst, vec![c])
    }

    pub fn bst() -> Self {
        Self { kind: ModelKind::Bst, values: Vec::new() }
    }

    /// Parameters under which the model predicts `c` for every evidence
    /// pair. `c` must lie in (0, 1) for PRSP and PWR.
    pub fn constant(kind: ModelKind, c: f64) -> Result<Self, ModelError> {
        let values = match kind {
            ModelKind::Linr => vec![0.0, 0.0, c],
            ModelKind::Pwr => vec![0.0, 0.0, logit(c)],
            ModelKind::Indp => vec![c; 4],
            ModelKind::Prsp => vec![c, 0.5, c, c, 0.5, c, c],
            ModelKind::Wrst => vec![c],
            ModelKind::Bst => return Err(ModelError::NoPrediction),
        };
        Self::new(kind, values)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn predict(&self, ev: EvidencePair) -> Result<f64, ModelError> {
        self.kind.predict_raw(&self.values, ev)
    }
}

pub fn predict_linr(p: &ModelParams, ev: EvidencePair) -> f64 {
    debug_assert_eq!(p.kind, ModelKind::Linr);
    p.values[0] * ev.e1 + p.values[1] * ev.e2 + p.values[2]
}

pub fn predict_indp(p: &ModelParams, ev: EvidencePair) -> f64 {
    debug_assert_eq!(p.kind, ModelKind::Indp);
    indp(&p.values, ev)
}

pub fn predict_prsp(p: &ModelParams, ev: EvidencePair) -> Result<f64, ModelError> {
    debug_assert_eq!(p.kind, ModelKind::Prsp);
    prsp(&p.values, ev)
}

pub fn predict_pwr(p: &ModelParams, ev: EvidencePair) -> Result<f64, ModelError> {
    debug_assert_eq!(p.kind, ModelKind::Pwr);
    pwr(&p.values, ev)
}

pub fn predict_wrst(p: &ModelParams, _ev: EvidencePair) -> f64 {
    debug_assert_eq!(p.kind, ModelKind::Wrst);
    p.values[0]
}

/// INDP parameters read off `d`: `b_ij = P(C | E1=i, E2=j)`.
pub fn true_params_indp(d: &JointDist) -> Result<ModelParams, ModelError> {
    let mut values = Vec::with_capacity(4);
    for (e1, e2) in [(false, false), (false, true), (true, false), (true, true)] {
        values.push(d.condition_c(e1, e2)?);
    }
    ModelParams::new(ModelKind::Indp, values)
}

/// PRSP parameters read off `d`: the prior of C, and for each evidence
/// event its prior and the two conditionals of C.
pub fn true_params_prsp(d: &JointDist) -> Result<ModelParams, ModelError> {
    let mut values = vec![d.marginal(Event::C)];
    for e in [Event::E1, Event::E2] {
        values.push(d.marginal(e));
        values.push(d.conditional(Event::C, e, true)?);
        values.push(d.conditional(Event::C, e, false)?);
    }
    ModelParams::new(ModelKind::Prsp, values)
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let z = x.exp();
        z / (1.0 + z)
    }
}

fn indp(b: &[f64], ev: EvidencePair) -> f64 {
    let (e1, e2) = (ev.e1, ev.e2);
    b[0] * (1.0 - e1) * (1.0 - e2) + b[1] * (1.0 - e1) * e2 + b[2] * e1 * (1.0 - e2) + b[3] * e1 * e2
}

/// Piecewise-linear single-rule posterior: `P(C|¬E)` at `e = 0`, the prior at
/// `e = pE`, `P(C|E)` at `e = 1`.
fn prsp_rule(p_c: f64, p_e: f64, q_given_e: f64, q_given_not_e: f64, e: f64) -> f64 {
    if e <= p_e {
        q_given_not_e + (e / p_e) * (p_c - q_given_not_e)
    } else {
        p_c + ((e - p_e) / (1.0 - p_e)) * (q_given_e - p_c)
    }
}

fn prsp(v: &[f64], ev: EvidencePair) -> Result<f64, ModelError> {
    let p_c = v[0];
    let p1 = prsp_rule(p_c, v[1], v[2], v[3], ev.e1);
    let p2 = prsp_rule(p_c, v[4], v[5], v[6], ev.e2);
    for p in [p_c, p1, p2] {
        if !(p > 0.0 && p < 1.0) {
            return Err(ModelError::Domain {
                kind: ModelKind::Prsp,
                e1: ev.e1,
                e2: ev.e2,
                reason: "rule posterior at 0 or 1",
            });
        }
    }
    // prior odds times the two likelihood-ratio multipliers
    let odds = |p: f64| p / (1.0 - p);
    let o = odds(p1) * odds(p2) / odds(p_c);
    Ok(if o.is_infinite() { 1.0 } else { o / (1.0 + o) })
}

fn pwr(v: &[f64], ev: EvidencePair) -> Result<f64, ModelError> {
    for e in [ev.e1, ev.e2] {
        if !(e > 0.0 && e < 1.0) {
            return Err(ModelError::Domain {
                kind: ModelKind::Pwr,
                e1: ev.e1,
                e2: ev.e2,
                reason: "log-odds of certain evidence is infinite",
            });
        }
    }
    Ok(sigmoid(v[0] * logit(ev.e1) + v[1] * logit(ev.e2) + v[2]))
}
