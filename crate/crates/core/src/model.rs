//! Builders for the Tavis-Cummings interaction: collective spin operators,
//! the interaction matrices `A_n` for one to three atoms, the tridiagonal
//! spin-j blocks `B_j`, and the fixed orthogonal intertwiners that decompose
//! `A_n` into a direct sum of blocks.
//!
//! The atom basis is the binary tensor order with atom 1 as the leftmost
//! factor; bit 0 of a component index means that atom is excited.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::opalg::{NumberFunction, OperatorEntry, QuantumMatrix};

/// Number of atoms; the interaction matrix has dimension `L = 2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomCount {
    One,
    Two,
    Three,
}

impl AtomCount {
    pub fn new(n: u32) -> Result<Self> {
        match n {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            other => Err(Error::UnsupportedAtomCount(other)),
        }
    }

    pub fn count(self) -> usize {
        match self {
            Self::One => 1,
            Self::Two => 2,
            Self::Three => 3,
        }
    }

    /// `L = 2^n`.
    pub fn dim(self) -> usize {
        1 << self.count()
    }
}

impl fmt::Display for AtomCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}

/// Half-integer spin, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    /// Spin from doubled value; `Spin::from_twice(3)` is j = 3/2.
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let j: f64 = s.parse().map_err(|_| Error::InvalidSpin(s.to_string()))?;
        let twice = 2.0 * j;
        if twice < 1.0 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(s.to_string()));
        }
        Ok(Self { twice: twice.round() as u32 })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Block dimension `J = 2j + 1`.
    pub fn block_dim(self) -> usize {
        self.twice as usize + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Collective spin operators `S± = Σ σ±_i`, `S3 = (1/2) Σ σ3_i` on the
/// `2^n`-dimensional atom space.
#[derive(Clone, Debug)]
pub struct CollectiveSpin {
    pub s_plus: DMatrix<f64>,
    pub s_minus: DMatrix<f64>,
    pub s_3: DMatrix<f64>,
}

impl CollectiveSpin {
    pub fn new(n: AtomCount) -> Self {
        let atoms = n.count();
        let dim = n.dim();
        let mut s_plus = DMatrix::<f64>::zeros(dim, dim);
        let mut s_3 = DMatrix::<f64>::zeros(dim, dim);
        for state in 0..dim {
            let excited = atoms - (state & (dim - 1)).count_ones() as usize;
            s_3[(state, state)] = excited as f64 - atoms as f64 / 2.0;
            for atom in 0..atoms {
                let bit = 1 << (atoms - 1 - atom);
                if state & bit != 0 {
                    // σ+ on this atom: ground -> excited flips the bit off.
                    s_plus[(state & !bit, state)] = 1.0;
                }
            }
        }
        let s_minus = s_plus.transpose();
        Self { s_plus, s_minus, s_3 }
    }

    /// `max |[X,Y] - Z|` over the three su(2) relations
    /// `[S3,S±] = ±S±`, `[S+,S-] = 2 S3`.
    pub fn su2_defect(&self) -> f64 {
        let comm = |x: &DMatrix<f64>, y: &DMatrix<f64>| x * y - y * x;
        let d1 = comm(&self.s_3, &self.s_plus) - &self.s_plus;
        let d2 = comm(&self.s_3, &self.s_minus) + &self.s_minus;
        let d3 = comm(&self.s_plus, &self.s_minus) - 2.0 * &self.s_3;
        d1.iter()
            .chain(d2.iter())
            .chain(d3.iter())
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

/// The interaction matrix `A_n = S+ ⊗ a + S- ⊗ a†`.
pub fn build_a(n: AtomCount) -> QuantumMatrix {
    let spin = CollectiveSpin::new(n);
    let dim = n.dim();
    let mut m = QuantumMatrix::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let up = spin.s_plus[(i, j)];
            let down = spin.s_minus[(i, j)];
            let mut e = OperatorEntry::zero();
            if up != 0.0 {
                e = e.add(&OperatorEntry::annihilator(C64::new(up, 0.0)));
            }
            if down != 0.0 {
                e = e.add(&OperatorEntry::creator(C64::new(down, 0.0)));
            }
            m[(i, j)] = e;
        }
    }
    m
}

/// Excitation carried by each component of `A_n`: the number of excited
/// atoms. Together with the photon number this labels the conserved sectors.
pub fn atom_excitations(n: AtomCount) -> Vec<u32> {
    let atoms = n.count() as u32;
    (0..n.dim()).map(|state| atoms - (state as u32).count_ones()).collect()
}

/// Diagonal of `S3` in basis order (half-integer eigenvalues).
pub fn s3_eigenvalues(n: AtomCount) -> Vec<f64> {
    let atoms = n.count();
    (0..n.dim())
        .map(|state| (atoms - (state as u32).count_ones() as usize) as f64 - atoms as f64 / 2.0)
        .collect()
}

/// The spin-j block: tridiagonal with superdiagonal `√((J-k)k)·a` for
/// `k = 1..J-1` and the adjoints below.
#[derive(Clone, Debug)]
pub struct SpinBlock {
    j: Spin,
    matrix: QuantumMatrix,
}

impl SpinBlock {
    pub fn j(&self) -> Spin {
        self.j
    }

    pub fn block_dim(&self) -> usize {
        self.j.block_dim()
    }

    pub fn matrix(&self) -> &QuantumMatrix {
        &self.matrix
    }

    /// Superdiagonal coefficients `√((J-k)k)`, `k = 1..J-1`.
    pub fn superdiagonal_coefficients(&self) -> Vec<f64> {
        let j_dim = self.block_dim();
        (1..j_dim).map(|k| (((j_dim - k) * k) as f64).sqrt()).collect()
    }

    /// Excitation carried by each block component: `J-1-k` for row `k`.
    pub fn excitations(&self) -> Vec<u32> {
        let j_dim = self.block_dim() as u32;
        (0..j_dim).map(|k| j_dim - 1 - k).collect()
    }

    fn unchecked(j: Spin) -> Self {
        let j_dim = j.block_dim();
        let mut m = QuantumMatrix::zero(j_dim);
        for k in 1..j_dim {
            let c = (((j_dim - k) * k) as f64).sqrt();
            m[(k - 1, k)] = OperatorEntry::annihilator(C64::new(c, 0.0));
            m[(k, k - 1)] = OperatorEntry::creator(C64::new(c, 0.0));
        }
        Self { j, matrix: m }
    }
}

/// Builds `B_j` for `j >= 1/2`.
pub fn build_spin_block(j: Spin) -> Result<SpinBlock> {
    if j.twice() < 1 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    Ok(SpinBlock::unchecked(j))
}

/// `T† A_n T = ⊕ blocks`, with `T` real orthogonal.
///
/// For two atoms the leading block is the spin-0 singlet (a scalar zero);
/// for three atoms the blocks are two spin-1/2 copies and one spin-3/2.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub n: AtomCount,
    pub t: DMatrix<f64>,
    pub blocks: Vec<SpinBlock>,
}

impl Decomposition {
    /// The direct sum of the blocks as one quantum matrix.
    pub fn block_sum(&self) -> QuantumMatrix {
        let mats: Vec<QuantumMatrix> = self.blocks.iter().map(|b| b.matrix.clone()).collect();
        QuantumMatrix::direct_sum(&mats)
    }

    /// `max |TᵀT - 1|` and `max |TTᵀ - 1|` combined.
    pub fn orthogonality_defect(&self) -> f64 {
        let dim = self.t.nrows();
        let id = DMatrix::<f64>::identity(dim, dim);
        let d1 = self.t.transpose() * &self.t - &id;
        let d2 = &self.t * self.t.transpose() - &id;
        d1.iter().chain(d2.iter()).map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// `T† A_n T` computed in the operator algebra.
    pub fn conjugated_interaction(&self) -> Result<QuantumMatrix> {
        build_a(self.n).conjugate_by_scalar(&self.t)
    }
}

/// The fixed intertwiners; only two and three atoms need one.
pub fn build_decomposition(n: AtomCount) -> Result<Decomposition> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match n {
        AtomCount::One => Err(Error::UnsupportedAtomCount(1)),
        AtomCount::Two => {
            #[rustfmt::skip]
            let t = DMatrix::from_row_slice(4, 4, &[
                0.0, 1.0, 0.0, 0.0,
                  r, 0.0,   r, 0.0,
                 -r, 0.0,   r, 0.0,
                0.0, 0.0, 0.0, 1.0,
            ]);
            let blocks = vec![
                SpinBlock::unchecked(Spin::from_twice(0)),
                SpinBlock::unchecked(Spin::from_twice(2)),
            ];
            Ok(Decomposition { n, t, blocks })
        }
        AtomCount::Three => {
            let s6 = 1.0 / 6f64.sqrt();
            let s3 = 1.0 / 3f64.sqrt();
            let s23 = 2f64.sqrt() / 3f64.sqrt();
            #[rustfmt::skip]
            let t = DMatrix::from_row_slice(8, 8, &[
                0.0, 0.0,  0.0,  0.0, 1.0, 0.0, 0.0, 0.0,
                  r, 0.0,   s6,  0.0, 0.0,  s3, 0.0, 0.0,
                 -r, 0.0,   s6,  0.0, 0.0,  s3, 0.0, 0.0,
                0.0, 0.0,  0.0,  s23, 0.0, 0.0,  s3, 0.0,
                0.0, 0.0, -s23,  0.0, 0.0,  s3, 0.0, 0.0,
                0.0,   r,  0.0,  -s6, 0.0, 0.0,  s3, 0.0,
                0.0,  -r,  0.0,  -s6, 0.0, 0.0,  s3, 0.0,
                0.0, 0.0,  0.0,  0.0, 0.0, 0.0, 0.0, 1.0,
            ]);
            let blocks = vec![
                SpinBlock::unchecked(Spin::from_twice(1)),
                SpinBlock::unchecked(Spin::from_twice(1)),
                SpinBlock::unchecked(Spin::from_twice(3)),
            ];
            Ok(Decomposition { n, t, blocks })
        }
    }
}

/// Free-evolution phase factors at time `t`: the diagonal atomic unitary
/// `e^{-itω S3}` and the field phase rule `n -> e^{-itωn}`.
#[derive(Clone, Debug)]
pub struct PhaseFactors {
    pub atom: Vec<C64>,
    pub field: NumberFunction,
}

pub fn build_hamiltonian_phases(n: AtomCount, omega: f64, t: f64) -> PhaseFactors {
    let atom = s3_eigenvalues(n)
        .into_iter()
        .map(|s| C64::from_polar(1.0, -t * omega * s))
        .collect();
    let w = t * omega;
    let field = NumberFunction::new("exp(-itωN)", move |m| C64::from_polar(1.0, -w * m as f64));
    PhaseFactors { atom, field }
}
