use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::entry::OperatorEntry;
use crate::error::{Error, Result};

/// A finite square matrix whose entries are operators on Fock space.
#[derive(Clone)]
pub struct QuantumMatrix {
    dim: usize,
    entries: Vec<OperatorEntry>,
}

/// Sparse atom-field ket: amplitudes keyed by `(component, fock level)`.
pub type Ket = BTreeMap<(usize, u64), C64>;

pub fn ket_norm(k: &Ket) -> f64 {
    k.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖x - y‖` for sparse kets.
pub fn ket_distance(x: &Ket, y: &Ket) -> f64 {
    let mut keys: Vec<_> = x.keys().chain(y.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter()
        .map(|k| {
            let a = x.get(k).copied().unwrap_or(C64::ZERO);
            let b = y.get(k).copied().unwrap_or(C64::ZERO);
            (a - b).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

impl QuantumMatrix {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim, entries: vec![OperatorEntry::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m[(i, i)] = OperatorEntry::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<OperatorEntry>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must form a square grid");
        Self { dim, entries: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &OperatorEntry {
        &self.entries[row * self.dim + col]
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = OperatorEntry::zero();
                for k in 0..self.dim {
                    let x = self.entry(i, k);
                    let y = other.entry(k, j);
                    if x.is_structurally_zero() || y.is_structurally_zero() {
                        continue;
                    }
                    acc = acc.add(&x.multiply(y));
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self.entry(i, j).add(other.entry(i, j));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.scale(c);
        }
        out
    }

    /// Conjugate transpose with entry adjoints; an involution.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self.entry(j, i).adjoint();
            }
        }
        out
    }

    pub fn map_entries<F>(&self, f: F) -> Self
    where
        F: Fn(usize, usize, &OperatorEntry) -> OperatorEntry,
    {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = f(i, j, self.entry(i, j));
            }
        }
        out
    }

    /// Block-diagonal direct sum, in argument order.
    pub fn direct_sum(blocks: &[Self]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut out = Self::zero(dim);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    out[(off + i, off + j)] = b.entry(i, j).clone();
                }
            }
            off += b.dim;
        }
        out
    }

    /// `T† M T` for a scalar (real) matrix `T`; scalars commute with every
    /// entry, so this is plain bilinear recombination.
    pub fn conjugate_by_scalar(&self, t: &DMatrix<f64>) -> Result<Self> {
        if t.nrows() != self.dim || t.ncols() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: t.nrows() });
        }
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = OperatorEntry::zero();
                for k in 0..self.dim {
                    let tki = t[(k, i)];
                    if tki == 0.0 {
                        continue;
                    }
                    for l in 0..self.dim {
                        let tlj = t[(l, j)];
                        if tlj == 0.0 || self.entry(k, l).is_structurally_zero() {
                            continue;
                        }
                        acc = acc.add(&self.entry(k, l).scale(C64::new(tki * tlj, 0.0)));
                    }
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// `T M T†` for a scalar (real) matrix `T`.
    pub fn conjugate_by_scalar_transposed(&self, t: &DMatrix<f64>) -> Result<Self> {
        self.conjugate_by_scalar(&t.transpose())
    }

    /// Exact application to the basis ket `|component, n⟩`.
    pub fn apply_basis_ket(&self, component: usize, n: u64) -> Ket {
        let mut ket = Ket::new();
        ket.insert((component, n), C64::ONE);
        self.apply_ket(&ket)
    }

    /// Exact application to a sparse ket (no truncation).
    pub fn apply_ket(&self, ket: &Ket) -> Ket {
        let mut out = Ket::new();
        for (&(c, n), &amp) in ket {
            for r in 0..self.dim {
                let e = self.entry(r, c);
                if e.is_structurally_zero() {
                    continue;
                }
                for (m, a) in e.apply(n) {
                    let v = out.entry((r, m)).or_insert(C64::ZERO);
                    *v += a * amp;
                }
            }
        }
        out.retain(|_, v| *v != C64::ZERO);
        out
    }

    /// Entrywise pointwise-coefficient comparison over `n = 0..=max_n`.
    pub fn max_coefficient_diff(&self, other: &Self, max_n: u64) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max(self.entry(i, j).max_coefficient_diff(other.entry(i, j), max_n));
            }
        }
        worst
    }

    /// Drops ladder terms that vanish pointwise; see
    /// [`OperatorEntry::pruned`].
    pub fn pruned(&self, max_n: u64, tol: f64) -> Self {
        self.map_entries(|_, _, e| e.pruned(max_n, tol))
    }
}

impl std::ops::Index<(usize, usize)> for QuantumMatrix {
    type Output = OperatorEntry;
    fn index(&self, (i, j): (usize, usize)) -> &OperatorEntry {
        self.entry(i, j)
    }
}

impl std::ops::IndexMut<(usize, usize)> for QuantumMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut OperatorEntry {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Display for QuantumMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> =
                (0..self.dim).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "[ {} ]", row.join(" , "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for QuantumMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuantumMatrix(dim={})", self.dim)
    }
}

/// Per-component Fock floors `(k_1, ..., k_J)`: component `i` is restricted
/// to the subspace spanned by `{|k_i⟩, |k_i+1⟩, ...}`. Used to state on which
/// domain an isometry acts unitarily.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceProfile {
    floors: Vec<u64>,
}

impl SubspaceProfile {
    pub fn new(floors: Vec<u64>) -> Self {
        assert!(!floors.is_empty());
        Self { floors }
    }

    /// The unrestricted profile `H ⊕ H ⊕ ... ⊕ H`.
    pub fn full(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// The staircase profile `H ⊕ H_1 ⊕ ... ⊕ H_{J-1}`.
    pub fn staircase(dim: usize) -> Self {
        Self::new((0..dim as u64).collect())
    }

    pub fn dim(&self) -> usize {
        self.floors.len()
    }

    pub fn floors(&self) -> &[u64] {
        &self.floors
    }

    pub fn contains(&self, component: usize, n: u64) -> bool {
        n >= self.floors[component]
    }

    /// Basis kets `(component, n)` of the profile with `n <= max_n`.
    pub fn basis_kets(&self, max_n: u64) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for (c, &floor) in self.floors.iter().enumerate() {
            for n in floor..=max_n {
                out.push((c, n));
            }
        }
        out
    }
}

impl fmt::Display for SubspaceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .floors
            .iter()
            .map(|&k| if k == 0 { "H".to_string() } else { format!("H_{}", k) })
            .collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::NumberFunction;

    fn one_atom_interaction() -> QuantumMatrix {
        QuantumMatrix::from_rows(vec![
            vec![OperatorEntry::zero(), OperatorEntry::annihilator(C64::ONE)],
            vec![OperatorEntry::creator(C64::ONE), OperatorEntry::zero()],
        ])
    }

    #[test]
    fn one_atom_square_is_diag_n_plus_one_n() {
        let a = one_atom_interaction();
        let sq = a.multiply(&a).unwrap();
        let expected = QuantumMatrix::from_rows(vec![
            vec![
                OperatorEntry::diagonal(NumberFunction::from_real("N+1", |n| (n + 1) as f64)),
                OperatorEntry::zero(),
            ],
            vec![OperatorEntry::zero(), OperatorEntry::diagonal(NumberFunction::number())],
        ]);
        assert!(sq.max_coefficient_diff(&expected, 50) <= 1e-12);
    }

    #[test]
    fn multiply_by_identity_is_identity() {
        let a = one_atom_interaction();
        let id = QuantumMatrix::identity(2);
        let prod = a.multiply(&id).unwrap();
        assert!(prod.max_coefficient_diff(&a, 50) == 0.0);
    }

    #[test]
    fn adjoint_is_involution_and_swaps_corners() {
        let a = one_atom_interaction();
        let adj = a.adjoint();
        // A1 is Hermitian.
        assert!(adj.max_coefficient_diff(&a, 50) <= 1e-15);
        // The upper-right `a` maps to a lower-left `a†`.
        let lower_left = adj.entry(1, 0);
        assert_eq!(lower_left.apply(0), OperatorEntry::creator(C64::ONE).apply(0));
        assert!(a.adjoint().adjoint().max_coefficient_diff(&a, 50) == 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = one_atom_interaction();
        let b = QuantumMatrix::identity(3);
        assert!(matches!(a.multiply(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn basis_ket_application_matches_entry_apply() {
        let a = one_atom_interaction();
        let out = a.apply_basis_ket(0, 3);
        // a† from the lower-left entry: |1, 4⟩ with amplitude 2.
        assert_eq!(out.len(), 1);
        assert!((out[&(1, 4)] - C64::new(2.0, 0.0)).norm() <= 1e-15);
    }
}
