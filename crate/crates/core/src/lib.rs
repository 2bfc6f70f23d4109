//! Accuracy benchmark for uncertain-inference combination rules.
//!
//! Each inference problem is a joint distribution over two evidence events
//! `E1`, `E2` and a conclusion `C`. Soft evidence fixes new marginals for
//! `E1` and `E2`; the reference answer for `P(C)` is the minimum
//! cross-entropy posterior ([`oracle`]). Combination rules ([`models`]) are
//! fit to that reference over a 5×5 evidence grid ([`optim`]) and their
//! residual errors are rescaled into η scores ([`bench`]).
//!
//! ```
//! use uis_bench::dist::CondIndepParams;
//! use uis_bench::oracle::{standard_answer, EvidencePair};
//!
//! let d = CondIndepParams::new(0.5, 0.8, 0.2, 0.8, 0.2).unwrap().expand();
//! let c = standard_answer(&d, EvidencePair::new(1.0, 1.0).unwrap()).unwrap();
//! assert!((c - 16.0 / 17.0).abs() < 1e-12);
//! ```

pub mod bench;
pub mod config;
pub mod dist;
pub mod io;
pub mod models;
pub mod optim;
pub mod oracle;
