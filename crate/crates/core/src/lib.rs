//! Tavis-Cummings dynamics on truncated Fock space: the collective
//! atom-field interaction matrices, their closed-form evolution operators
//! for one to three atoms, and an operator-valued (quantum) diagonalization
//! `B = U D U†` whose unitary factor consists of `N` and `a†` alone.
//!
//! Everything numerical is cross-checked against a dense
//! eigendecomposition oracle on the truncated space; see [`verify`] for the
//! identity suite and its machine-readable report.

pub mod error;
pub mod evolve;
pub mod fock;
pub mod model;
pub mod opalg;
pub mod qdm;
pub mod verify;

pub use error::{Error, Result};
