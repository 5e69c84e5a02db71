//! Interpreter and solvers for logic programs with aggregates.
//!
//! Programs are parsed into [`model::Program`], grounded with
//! [`grounder::ground_alog`] (set names keep their bound variables) or
//! [`grounder::ground_flog`] (set names expanded into ground sets), and then
//! evaluated under one of three semantics:
//!
//! * [`alog`]: reduct-based answer sets where an aggregate may not be used to
//!   justify membership of an element of its own set,
//! * [`flog`]: minimal models of the body-satisfaction reduct,
//! * [`slog`]: least fixpoints of the conditional-satisfaction operator.
//!
//! [`asolver`] implements a propagation/backtracking solver for the first
//! semantics and [`analysis`] holds stratification, compatibility and
//! cross-semantics comparison utilities.

pub mod alog;
pub mod analysis;
pub mod asolver;
mod error;
pub mod flog;
pub mod gen;
pub mod grounder;
pub mod model;
pub mod parser;
pub mod slog;

pub use error::{Error, EvalError, Result};

/// Size caps for the exponential checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest candidate set whose minimality is checked by subset search.
    pub max_minimality_atoms: usize,
    /// Largest number of undecided atoms a completion enumeration may range over.
    pub max_completion_atoms: usize,
    /// Largest number of candidate sets an enumeration may visit.
    pub max_candidates: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_minimality_atoms: 20,
            max_completion_atoms: 16,
            max_candidates: 1 << 20,
        }
    }
}

impl Limits {
    /// Errors unless `2^atoms` candidates fit under `max_candidates`.
    pub(crate) fn check_candidates(&self, atoms: usize) -> Result<()> {
        let fits = atoms < usize::BITS as usize && (1usize << atoms) <= self.max_candidates;
        if fits {
            Ok(())
        } else {
            Err(Error::CapExceeded {
                what: "candidate enumeration",
                size: atoms,
                cap: self.max_candidates.max(1).ilog2() as usize,
            })
        }
    }
}
