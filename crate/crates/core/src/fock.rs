//! Truncated-Fock-space dense backend.
//!
//! Quantum matrices are realized as finite complex matrices over the basis
//! `|component, n⟩` with `n = 0..=cutoff`, Hermitian interactions are
//! exponentiated by eigendecomposition, and comparisons are restricted to a
//! truncation-safe interior band.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::opalg::QuantumMatrix;

const HERMITICITY_TOL: f64 = 1e-12;

/// Dense realization of a [`QuantumMatrix`] on the truncated Fock space.
///
/// Basis ordering is component-major: `index(i, n) = i*(cutoff+1) + n`.
/// The ladder operators are truncated hard at the cutoff (`a†|N_max⟩ = 0`);
/// amplitudes that would leave the truncation are dropped and accounted for
/// in `truncation_loss`.
#[derive(Clone, Debug)]
pub struct FockRealization {
    cutoff: usize,
    blockdim: usize,
    matrix: DMatrix<C64>,
    truncation_loss: f64,
}

impl FockRealization {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn blockdim(&self) -> usize {
        self.blockdim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Largest dropped amplitude magnitude, zero when nothing left the
    /// truncation.
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn index(&self, component: usize, n: usize) -> usize {
        component * (self.cutoff + 1) + n
    }

    pub fn from_matrix(cutoff: usize, blockdim: usize, matrix: DMatrix<C64>) -> Self {
        assert_eq!(matrix.nrows(), blockdim * (cutoff + 1));
        assert_eq!(matrix.ncols(), matrix.nrows());
        Self { cutoff, blockdim, matrix, truncation_loss: 0.0 }
    }

    pub fn identity(cutoff: usize, blockdim: usize) -> Self {
        let size = blockdim * (cutoff + 1);
        Self::from_matrix(cutoff, blockdim, DMatrix::identity(size, size))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            cutoff: self.cutoff,
            blockdim: self.blockdim,
            matrix: &self.matrix * &other.matrix,
            truncation_loss: self.truncation_loss.max(other.truncation_loss),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            cutoff: self.cutoff,
            blockdim: self.blockdim,
            matrix: self.matrix.adjoint(),
            truncation_loss: self.truncation_loss,
        }
    }

    /// `max |M - M†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - &adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |M M† - 1|` over all entries (not interior-masked).
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let prod = &self.matrix * self.matrix.adjoint();
        let id = DMatrix::<C64>::identity(n, n);
        (prod - id).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.cutoff != other.cutoff || self.blockdim != other.blockdim {
            return Err(Error::DimensionMismatch {
                left: self.matrix.nrows(),
                right: other.matrix.nrows(),
            });
        }
        Ok(())
    }
}

/// Expands every operator entry over `n = 0..=cutoff`.
pub fn realize(m: &QuantumMatrix, cutoff: usize) -> Result<FockRealization> {
    if cutoff < 4 {
        return Err(Error::CutoffTooSmall { cutoff, min: 4 });
    }
    let levels = cutoff + 1;
    let dim = m.dim();
    let size = dim * levels;
    let mut out = DMatrix::<C64>::zeros(size, size);
    let mut loss: f64 = 0.0;
    for col_comp in 0..dim {
        for row_comp in 0..dim {
            let e = m.entry(row_comp, col_comp);
            if e.is_structurally_zero() {
                continue;
            }
            for n in 0..levels {
                for (target, amp) in e.apply(n as u64) {
                    let t = target as usize;
                    if t < levels {
                        out[(row_comp * levels + t, col_comp * levels + n)] += amp;
                    } else {
                        loss = loss.max(amp.norm());
                    }
                }
            }
        }
    }
    Ok(FockRealization { cutoff, blockdim: dim, matrix: out, truncation_loss: loss })
}

/// `e^{i·scale·H}` for Hermitian `H`, by eigendecomposition.
pub fn expm_hermitian(h: &FockRealization, scale: f64) -> Result<FockRealization> {
    let defect = h.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NonHermitian { defect, tolerance: HERMITICITY_TOL });
    }
    let eig = h.matrix.clone().symmetric_eigen();
    let n = h.matrix.nrows();
    let mut out = DMatrix::<C64>::zeros(n, n);
    // V diag(e^{i s λ}) V†
    for k in 0..n {
        let phase = C64::from_polar(1.0, scale * eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        for i in 0..n {
            let vi = v[i] * phase;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    Ok(FockRealization {
        cutoff: h.cutoff,
        blockdim: h.blockdim,
        matrix: out,
        truncation_loss: h.truncation_loss,
    })
}

/// Maximum absolute entry difference over rows and columns whose Fock index
/// lies in `[margin, cutoff - margin]`; the truncation-corrupted border is
/// ignored.
pub fn interior_compare(x: &FockRealization, y: &FockRealization, margin: usize) -> Result<f64> {
    x.check_compatible(y)?;
    if 2 * margin >= x.cutoff {
        return Err(Error::MarginTooLarge { margin, cutoff: x.cutoff });
    }
    let levels = x.cutoff + 1;
    let trusted: Vec<usize> = (0..x.blockdim)
        .flat_map(|c| (margin..=x.cutoff - margin).map(move |n| c * levels + n))
        .collect();
    let mut worst: f64 = 0.0;
    for &i in &trusted {
        for &j in &trusted {
            worst = worst.max((x.matrix[(i, j)] - y.matrix[(i, j)]).norm());
        }
    }
    Ok(worst)
}

/// Interior unitarity defect: `max |E E† - 1|` restricted to trusted rows
/// and columns.
pub fn interior_unitarity_defect(e: &FockRealization, margin: usize) -> Result<f64> {
    let prod = e.mul(&e.adjoint())?;
    let id = FockRealization::identity(e.cutoff, e.blockdim);
    interior_compare(&prod, &id, margin)
}

/// Largest matrix element connecting different excitation sectors, within
/// the interior band. `spin_excitation[i]` is the excitation carried by
/// component `i`, so basis state `(i, n)` sits in sector
/// `spin_excitation[i] + n`.
pub fn sector_offdiagonal_max(
    m: &FockRealization,
    spin_excitation: &[u32],
    margin: usize,
) -> Result<f64> {
    assert_eq!(spin_excitation.len(), m.blockdim);
    if 2 * margin >= m.cutoff {
        return Err(Error::MarginTooLarge { margin, cutoff: m.cutoff });
    }
    let levels = m.cutoff + 1;
    let mut worst: f64 = 0.0;
    for (ci, &exc_i) in spin_excitation.iter().enumerate() {
        for ni in margin..=m.cutoff - margin {
            let ei = exc_i as usize + ni;
            for (cj, &exc_j) in spin_excitation.iter().enumerate() {
                for nj in margin..=m.cutoff - margin {
                    let ej = exc_j as usize + nj;
                    if ei != ej {
                        worst = worst.max(m.matrix[(ci * levels + ni, cj * levels + nj)].norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Eigenvalues of the restriction of `m` to the excitation sector
/// `excitation`, ascending. Only meaningful for Hermitian realizations.
pub fn sector_eigenvalues(
    m: &FockRealization,
    spin_excitation: &[u32],
    excitation: usize,
) -> Vec<f64> {
    assert_eq!(spin_excitation.len(), m.blockdim);
    let levels = m.cutoff + 1;
    let states: Vec<usize> = (0..m.blockdim)
        .filter_map(|c| {
            let spin = spin_excitation[c] as usize;
            (excitation >= spin && excitation - spin <= m.cutoff)
                .then(|| c * levels + (excitation - spin))
        })
        .collect();
    let k = states.len();
    let mut sub = DMatrix::<C64>::zeros(k, k);
    for (i, &si) in states.iter().enumerate() {
        for (j, &sj) in states.iter().enumerate() {
            sub[(i, j)] = m.matrix[(si, sj)];
        }
    }
    let mut vals: Vec<f64> = sub.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}
