//! Minimum cross-entropy updating on soft evidence.
//!
//! Given a prior [`JointDist`] and target marginals for E1 and E2, the
//! posterior is the I-projection of the prior onto the set of distributions
//! with those marginals. It is computed by iterative proportional fitting:
//! rescale the E1 blocks, rescale the E2 blocks, repeat. The fixed point is an
//! exponential tilt `atom'(x) = atom(x)·a^[E1(x)]·b^[E2(x)]`, so the
//! conditional of C within each `(E1, E2)` cell is never changed and only the
//! cell masses move.
//!
//! Hard evidence (0 or 1) zeroes a block outright, which makes the update
//! coincide with ordinary conditioning.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Event, JointDist};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

/// Evidence levels scanned independently for E1 and E2.
pub const DEFAULT_LEVELS: [f64; 5] = [0.001, 0.25, 0.5, 0.75, 0.999];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("evidence {name} = {value} must lie in [0, 1]")]
    EvidenceOutOfRange { name: &'static str, value: f64 },
    #[error(
        "infeasible evidence: target P({event:?}) = {target} but the prior gives P({event:?}) = {prior}"
    )]
    Infeasible { event: Event, target: f64, prior: f64 },
    #[error("proportional fitting did not converge in {sweeps} sweeps (residual {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },
    #[error("invalid evidence grid: {0}")]
    InvalidGrid(String),
}

/// Target posterior probabilities for E1 and E2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidencePair {
    pub e1: f64,
    pub e2: f64,
}

impl EvidencePair {
    pub fn new(e1: f64, e2: f64) -> Result<Self, OracleError> {
        for (name, value) in [("e1", e1), ("e2", e2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(OracleError::EvidenceOutOfRange { name, value });
            }
        }
        Ok(Self { e1, e2 })
    }

    pub fn target(&self, event: Event) -> f64 {
        match event {
            Event::E1 => self.e1,
            Event::E2 => self.e2,
            Event::C => panic!("no evidence target for the conclusion"),
        }
    }
}

/// Strictly increasing probability levels; the benchmark scans their
/// Cartesian square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EvidenceGrid {
    levels: Vec<f64>,
}

impl EvidenceGrid {
    pub fn new(levels: Vec<f64>) -> Result<Self, OracleError> {
        if levels.is_empty() {
            return Err(OracleError::InvalidGrid("no levels".into()));
        }
        if let Some(bad) = levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(OracleError::InvalidGrid(format!("level {bad} outside [0, 1]")));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OracleError::InvalidGrid("levels must be strictly increasing".into()));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Row-major evidence pairs: E1 level outer, E2 level inner.
    pub fn pairs(&self) -> impl Iterator<Item = EvidencePair> + '_ {
        self.levels.iter().flat_map(move |&e1| self.levels.iter().map(move |&e2| EvidencePair { e1, e2 }))
    }

    pub fn len(&self) -> usize {
        self.levels.len() * self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl Default for EvidenceGrid {
    fn default() -> Self {
        Self { levels: DEFAULT_LEVELS.to_vec() }
    }
}

impl TryFrom<Vec<f64>> for EvidenceGrid {
    type Error = OracleError;

    fn try_from(levels: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(levels)
    }
}

impl From<EvidenceGrid> for Vec<f64> {
    fn from(grid: EvidenceGrid) -> Self {
        grid.levels
    }
}

/// Which evidence event is rescaled first in each sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    #[default]
    E1First,
    E2First,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpfSettings {
    pub tol: f64,
    pub max_sweeps: usize,
    pub order: SweepOrder,
}

impl Default for IpfSettings {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_sweeps: DEFAULT_MAX_SWEEPS, order: SweepOrder::E1First }
    }
}

/// Converged posterior together with the number of sweeps it took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub dist: JointDist,
    pub sweeps: usize,
}

/// Minimum cross-entropy posterior of `d` with `P(E1) = ev.e1` and
/// `P(E2) = ev.e2`.
pub fn mce_update(
    d: &JointDist,
    ev: EvidencePair,
    tol: f64,
    max_sweeps: usize,
) -> Result<JointDist, OracleError> {
    let settings = IpfSettings { tol, max_sweeps, ..IpfSettings::default() };
    mce_update_with(d, ev, &settings).map(|p| p.dist)
}

pub fn mce_update_with(
    d: &JointDist,
    ev: EvidencePair,
    settings: &IpfSettings,
) -> Result<Posterior, OracleError> {
    let ev = EvidencePair::new(ev.e1, ev.e2)?;
    for event in [Event::E1, Event::E2] {
        check_feasible(d, event, ev.target(event))?;
    }
    let (first, second) = match settings.order {
        SweepOrder::E1First => (Event::E1, Event::E2),
        SweepOrder::E2First => (Event::E2, Event::E1),
    };

    let mut atoms = *d.atoms();
    let mut residual = f64::INFINITY;
    for sweep in 1..=settings.max_sweeps {
        rescale(&mut atoms, first, ev.target(first), d)?;
        rescale(&mut atoms, second, ev.target(second), d)?;
        residual = [first, second]
            .iter()
            .map(|&e| (block_mass(&atoms, e, true) - ev.target(e)).abs())
            .fold(0.0, f64::max);
        if residual <= settings.tol {
            return Ok(Posterior { dist: JointDist::normalized(atoms), sweeps: sweep });
        }
    }
    Err(OracleError::NotConverged { sweeps: settings.max_sweeps, residual })
}

/// `P(C)` under the minimum cross-entropy posterior, with default settings.
pub fn standard_answer(d: &JointDist, ev: EvidencePair) -> Result<f64, OracleError> {
    let post = mce_update(d, ev, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
    Ok(post.marginal(Event::C))
}

/// One grid point of a standard vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub evidence: EvidencePair,
    pub value: f64,
}

/// Standard answers at every grid point, in [`EvidenceGrid::pairs`] order.
pub fn standard_vector(d: &JointDist, grid: &EvidenceGrid) -> Result<Vec<Target>, OracleError> {
    grid.pairs().map(|evidence| Ok(Target { evidence, value: standard_answer(d, evidence)? })).collect()
}

fn check_feasible(d: &JointDist, event: Event, target: f64) -> Result<(), OracleError> {
    let prior = d.marginal(event);
    let reachable = (target <= 0.0 || prior > 0.0) && (target >= 1.0 || prior < 1.0);
    if reachable {
        Ok(())
    } else {
        Err(OracleError::Infeasible { event, target, prior })
    }
}

fn block_mass(atoms: &[f64; 8], event: Event, value: bool) -> f64 {
    (0..8).filter(|&i| event.holds(i) == value).map(|i| atoms[i]).sum()
}

fn rescale(atoms: &mut [f64; 8], event: Event, target: f64, prior: &JointDist) -> Result<(), OracleError> {
    let mass_true = block_mass(atoms, event, true);
    let mass_false = block_mass(atoms, event, false);
    let infeasible = || OracleError::Infeasible { event, target, prior: prior.marginal(event) };
    let scale_true = match (target > 0.0, mass_true > 0.0) {
        (true, true) => target / mass_true,
        (true, false) => return Err(infeasible()),
        (false, _) => 0.0,
    };
    let scale_false = match (target < 1.0, mass_false > 0.0) {
        (true, true) => (1.0 - target) / mass_false,
        (true, false) => return Err(infeasible()),
        (false, _) => 0.0,
    };
    for (i, a) in atoms.iter_mut().enumerate() {
        *a *= if event.holds(i) { scale_true } else { scale_false };
    }
    Ok(())
}
