//! Joint distributions over two evidence events and one conclusion.
//!
//! Atoms are indexed `i = 4·[E1] + 2·[E2] + [C]`, so atom 5 is
//! `(E1=true, E2=false, C=true)`. Every file format in the crate uses the
//! same ordering.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest deviation of the atom sum from 1 that `JointDist::new` will
/// silently renormalize.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Bounds for the five conditional-independence parameters drawn by
/// [`sample_cond_indep`].
pub const COND_INDEP_RANGE: (f64, f64) = (0.01, 0.99);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("atom {index} is {value}, atoms must be finite and non-negative")]
    NegativeAtom { index: usize, value: f64 },
    #[error("atoms sum to {sum}, expected 1 (tolerance {RENORMALIZE_TOLERANCE:e})")]
    NotNormalized { sum: f64 },
    #[error("parameter {name} = {value} must lie strictly inside (0, 1)")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("conditioning cell (E1={e1}, E2={e2}) has zero probability")]
    ZeroCell { e1: bool, e2: bool },
    #[error("conditioning event {event:?}={value} has zero probability")]
    ZeroEvent { event: Event, value: bool },
}

/// One of the three binary events of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Event {
    E1,
    E2,
    C,
}

impl Event {
    /// Bit selecting this event in an atom index.
    pub const fn mask(self) -> usize {
        match self {
            Event::E1 => 4,
            Event::E2 => 2,
            Event::C => 1,
        }
    }

    pub const fn holds(self, atom: usize) -> bool {
        atom & self.mask() != 0
    }
}

/// Atom index for a truth assignment of `(E1, E2, C)`.
pub const fn atom_index(e1: bool, e2: bool, c: bool) -> usize {
    (e1 as usize) << 2 | (e2 as usize) << 1 | c as usize
}

/// Reproducibility seed. Sub-seeds for independent work items are derived
/// with [`Seed::derive`], so generation order never affects results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Deterministic sub-seed for stream `k`, mixed with splitmix64.
    pub fn derive(self, k: u64) -> Seed {
        let mut z = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Probability mass over the eight atoms of `(E1, E2, C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDist {
    atoms: [f64; 8],
}

impl JointDist {
    /// Validates the atoms. A sum within 1e-12 of one is kept verbatim; a
    /// sum off by at most [`RENORMALIZE_TOLERANCE`] is renormalized.
    pub fn new(atoms: [f64; 8]) -> Result<Self, DistError> {
        for (index, &value) in atoms.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(DistError::NegativeAtom { index, value });
            }
        }
        let sum: f64 = atoms.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(DistError::NotNormalized { sum });
        }
        if (sum - 1.0).abs() <= 1e-12 {
            Ok(Self { atoms })
        } else {
            Ok(Self::normalized(atoms))
        }
    }

    pub fn uniform() -> Self {
        Self { atoms: [0.125; 8] }
    }

    /// Point mass on a single atom.
    pub fn point_mass(index: usize) -> Self {
        let mut atoms = [0.0; 8];
        atoms[index] = 1.0;
        Self { atoms }
    }

    // Caller guarantees non-negative atoms with a positive sum.
    pub(crate) fn normalized(mut atoms: [f64; 8]) -> Self {
        let sum: f64 = atoms.iter().sum();
        if sum != 1.0 {
            atoms.iter_mut().for_each(|a| *a /= sum);
        }
        Self { atoms }
    }

    pub fn atoms(&self) -> &[f64; 8] {
        &self.atoms
    }

    pub fn atom(&self, e1: bool, e2: bool, c: bool) -> f64 {
        self.atoms[atom_index(e1, e2, c)]
    }

    /// `P(event = true)`.
    pub fn marginal(&self, event: Event) -> f64 {
        self.mass_where(|i| event.holds(i))
    }

    /// `P(E1 = e1, E2 = e2)`, summed over C.
    pub fn cell(&self, e1: bool, e2: bool) -> f64 {
        self.atom(e1, e2, false) + self.atom(e1, e2, true)
    }

    /// `P(C = true | E1 = e1, E2 = e2)`.
    pub fn condition_c(&self, e1: bool, e2: bool) -> Result<f64, DistError> {
        let cell = self.cell(e1, e2);
        if cell <= 0.0 {
            return Err(DistError::ZeroCell { e1, e2 });
        }
        Ok(self.atom(e1, e2, true) / cell)
    }

    /// `P(event = true | given = value)`.
    pub fn conditional(&self, event: Event, given: Event, value: bool) -> Result<f64, DistError> {
        let denom = self.mass_where(|i| given.holds(i) == value);
        if denom <= 0.0 {
            return Err(DistError::ZeroEvent { event: given, value });
        }
        Ok(self.mass_where(|i| given.holds(i) == value && event.holds(i)) / denom)
    }

    fn mass_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        (0..8).filter(|&i| pred(i)).map(|i| self.atoms[i]).sum()
    }
}

/// Prior of C plus the class-conditional probabilities of each evidence
/// event. Expanding these yields a distribution in which E1 and E2 are
/// independent given C and given not-C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondIndepParams {
    pub p_c: f64,
    pub p_e1_given_c: f64,
    pub p_e1_given_not_c: f64,
    pub p_e2_given_c: f64,
    pub p_e2_given_not_c: f64,
}

impl CondIndepParams {
    pub fn new(
        p_c: f64,
        p_e1_given_c: f64,
        p_e1_given_not_c: f64,
        p_e2_given_c: f64,
        p_e2_given_not_c: f64,
    ) -> Result<Self, DistError> {
        let named = [
            ("p_c", p_c),
            ("p_e1_given_c", p_e1_given_c),
            ("p_e1_given_not_c", p_e1_given_not_c),
            ("p_e2_given_c", p_e2_given_c),
            ("p_e2_given_not_c", p_e2_given_not_c),
        ];
        for (name, value) in named {
            if !(value > 0.0 && value < 1.0) {
                return Err(DistError::ParamOutOfRange { name, value });
            }
        }
        Ok(Self { p_c, p_e1_given_c, p_e1_given_not_c, p_e2_given_c, p_e2_given_not_c })
    }

    /// Recovers the five parameters from any distribution with `0 < P(C) < 1`.
    pub fn extract(d: &JointDist) -> Result<Self, DistError> {
        Ok(Self {
            p_c: d.marginal(Event::C),
            p_e1_given_c: d.conditional(Event::E1, Event::C, true)?,
            p_e1_given_not_c: d.conditional(Event::E1, Event::C, false)?,
            p_e2_given_c: d.conditional(Event::E2, Event::C, true)?,
            p_e2_given_not_c: d.conditional(Event::E2, Event::C, false)?,
        })
    }

    pub fn expand(&self) -> JointDist {
        let mut atoms = [0.0; 8];
        for (i, atom) in atoms.iter_mut().enumerate() {
            let c = Event::C.holds(i);
            let (pc, pe1, pe2) = if c {
                (self.p_c, self.p_e1_given_c, self.p_e2_given_c)
            } else {
                (1.0 - self.p_c, self.p_e1_given_not_c, self.p_e2_given_not_c)
            };
            let f1 = if Event::E1.holds(i) { pe1 } else { 1.0 - pe1 };
            let f2 = if Event::E2.holds(i) { pe2 } else { 1.0 - pe2 };
            *atom = pc * f1 * f2;
        }
        JointDist::normalized(atoms)
    }
}

/// The two distribution families used by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Uniform over the 7-simplex.
    Uniform,
    /// Conditionally independent evidence given C.
    CondIndep,
}

impl Family {
    pub fn sample(self, seed: Seed, n: usize) -> Vec<JointDist> {
        match self {
            Family::Uniform => sample_uniform(seed, n),
            Family::CondIndep => sample_cond_indep(seed, n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::CondIndep => "cond_indep",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Family::Uniform),
            "cond_indep" => Ok(Family::CondIndep),
            other => Err(format!("unknown family {other:?}, expected \"uniform\" or \"cond_indep\"")),
        }
    }
}

/// Draws `n` distributions uniformly from the 7-simplex: eight unit
/// exponentials, normalized. Distribution `k` uses sub-seed `seed.derive(k)`.
pub fn sample_uniform(seed: Seed, n: usize) -> Vec<JointDist> {
    (0..n as u64)
        .map(|k| {
            let mut rng = seed.derive(k).rng();
            let mut atoms = [0.0; 8];
            for a in atoms.iter_mut() {
                *a = rng.sample::<f64, _>(Exp1);
            }
            JointDist::normalized(atoms)
        })
        .collect()
}

/// Draws `n` conditionally independent distributions, each parameter
/// uniform on [`COND_INDEP_RANGE`].
pub fn sample_cond_indep(seed: Seed, n: usize) -> Vec<JointDist> {
    let (lo, hi) = COND_INDEP_RANGE;
    (0..n as u64)
        .map(|k| {
            let mut rng = seed.derive(k).rng();
            let mut draw = || rng.random_range(lo..=hi);
            CondIndepParams {
                p_c: draw(),
                p_e1_given_c: draw(),
                p_e1_given_not_c: draw(),
                p_e2_given_c: draw(),
                p_e2_given_not_c: draw(),
            }
            .expand()
        })
        .collect()
}
