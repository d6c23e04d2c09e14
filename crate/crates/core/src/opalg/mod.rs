//! Normal-ordered operator algebra over `{a, a†, N}` and operator-valued
//! matrices.
//!
//! Everything downstream computes in this substrate: number functions are
//! evaluable black boxes (no symbolic simplification), operator entries keep
//! a canonical normal form with raising powers left of their coefficient
//! function and lowering powers right of theirs, and equality is decided by
//! pointwise evaluation over a finite range of `n`.
//!
//! All values are immutable after construction and freely shareable across
//! threads.

mod entry;
mod matrix;
mod number_function;

pub use entry::OperatorEntry;
pub use matrix::{ket_distance, ket_norm, Ket, QuantumMatrix, SubspaceProfile};
pub use number_function::NumberFunction;
