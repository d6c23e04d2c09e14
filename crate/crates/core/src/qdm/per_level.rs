use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::opalg::{NumberFunction, OperatorEntry, QuantumMatrix};

use super::ReducedHermitian;

const INITIAL_LEVELS: u64 = 63;
const DEGENERACY_GAP: f64 = 1e-9;
const SIGNIFICANT: f64 = 1e-9;

/// Per-Fock-level eigendecompositions of the reduced Hermitian matrix,
/// tabulated on demand and packaged as number functions.
///
/// Convention: eigenvalues sorted descending; each eigenvector's first
/// component of significant magnitude is made positive. Degenerate levels
/// are reported as errors rather than silently picking a basis.
#[derive(Clone)]
pub struct PerLevelTable {
    inner: Arc<Inner>,
}

struct Inner {
    reduced: ReducedHermitian,
    cache: Mutex<HashMap<u64, Level>>,
}

#[derive(Clone)]
struct Level {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl PerLevelTable {
    /// Eagerly solves the initial level range so degeneracies surface as
    /// errors; later levels extend the table on demand.
    pub fn build(reduced: &ReducedHermitian) -> Result<Self> {
        let table = Self {
            inner: Arc::new(Inner {
                reduced: reduced.clone(),
                cache: Mutex::new(HashMap::new()),
            }),
        };
        for n in 0..=INITIAL_LEVELS {
            table.level(n)?;
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.inner.reduced.dim()
    }

    fn level(&self, n: u64) -> Result<Level> {
        if let Some(level) = self.inner.cache.lock().unwrap().get(&n) {
            return Ok(level.clone());
        }
        let level = solve_level(&self.inner.reduced, n)?;
        self.inner.cache.lock().unwrap().insert(n, level.clone());
        Ok(level)
    }

    pub fn eigenvalue(&self, index: usize, n: u64) -> f64 {
        self.level(n).expect("per-level eigensolve").values[index]
    }

    pub fn eigenvector_component(&self, row: usize, index: usize, n: u64) -> f64 {
        self.level(n).expect("per-level eigensolve").vectors[(row, index)]
    }

    /// `U₂` as a matrix of tabulated number functions.
    pub fn u2_matrix(&self) -> QuantumMatrix {
        let dim = self.dim();
        let mut m = QuantumMatrix::zero(dim);
        for row in 0..dim {
            for col in 0..dim {
                let table = self.clone();
                m[(row, col)] = OperatorEntry::diagonal(NumberFunction::from_real(
                    format!("u2[{row}][{col}]"),
                    move |n| table.eigenvector_component(row, col, n),
                ));
            }
        }
        m
    }

    /// `D` as a diagonal matrix of tabulated eigenvalue functions.
    pub fn d_matrix(&self) -> QuantumMatrix {
        let dim = self.dim();
        let mut m = QuantumMatrix::zero(dim);
        for i in 0..dim {
            let table = self.clone();
            m[(i, i)] = OperatorEntry::diagonal(NumberFunction::from_real(
                format!("d[{i}]"),
                move |n| table.eigenvalue(i, n),
            ));
        }
        m
    }
}

fn solve_level(reduced: &ReducedHermitian, n: u64) -> Result<Level> {
    let m = reduced.level_matrix(n);
    let eig = m.symmetric_eigen();
    let dim = reduced.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    for pair in values.windows(2) {
        if (pair[0] - pair[1]).abs() < DEGENERACY_GAP {
            return Err(Error::DegenerateEigenvalues { level: n, a: pair[0], b: pair[1] });
        }
    }
    let mut vectors = DMatrix::<f64>::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let lead = (0..dim).find(|&i| v[i].abs() > SIGNIFICANT).unwrap_or(0);
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        for row in 0..dim {
            vectors[(row, col)] = sign * v[row];
        }
    }
    Ok(Level { values, vectors })
}
