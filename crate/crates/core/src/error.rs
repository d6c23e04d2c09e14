use thiserror::Error;

/// Errors produced by matrix construction, realization, and diagonalization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max |M - M†| = {defect:.3e} exceeds {tolerance:.1e}")]
    NonHermitian { defect: f64, tolerance: f64 },

    #[error("Fock cutoff {cutoff} is too small (need at least {min})")]
    CutoffTooSmall { cutoff: usize, min: usize },

    #[error("interior margin {margin} must be smaller than half the cutoff {cutoff}")]
    MarginTooLarge { margin: usize, cutoff: usize },

    #[error("unsupported atom count {0} (supported: 1, 2, 3)")]
    UnsupportedAtomCount(u32),

    #[error("invalid spin {0} (need a half-integer j >= 1/2)")]
    InvalidSpin(String),

    #[error("classical substitution is undefined at z = 0")]
    ZeroClassicalArgument,

    #[error("classical diagonalization residual {residual:.3e} exceeds {tolerance:.1e}")]
    ClassicalResidual { residual: f64, tolerance: f64 },

    #[error(
        "entry ({row},{col}) keeps a ladder residue of magnitude {max_abs:.3e}; \
         expected a pure function of the number operator"
    )]
    LadderResidue { row: usize, col: usize, max_abs: f64 },

    #[error("eigenvalues {a:.6} and {b:.6} at level {level} are too close to fix a sign convention")]
    DegenerateEigenvalues { level: u64, a: f64, b: f64 },

    #[error("closed-form diagonalization is only available for j in {{1/2, 1, 3/2}}, got {0}")]
    NoClosedForm(String),

    #[error("initial state leaves mass {mass:.3e} above the truncation-safe region (limit {limit:.1e})")]
    TruncationMass { mass: f64, limit: f64 },

    #[error("Fock level {level} exceeds the truncation-safe region (cutoff {cutoff}, margin {margin})")]
    FockLevelTooHigh { level: u64, cutoff: usize, margin: usize },

    #[error("invalid state spec: {0}")]
    InvalidStateSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
