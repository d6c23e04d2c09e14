//! Closed-form diagonalization of the spin-3/2 block.
//!
//! The unitary is assembled from two auxiliary functions β and γ built out
//! of square-root combinations of neighboring Fock levels, and the diagonal
//! carries `±√λ±(N+2)`. Half the entries follow from the other half through
//! fixed sign symmetries, which are enforced structurally here.

use crate::evolve::spectral::{lambda_minus, lambda_plus};
use crate::model::Spin;
use crate::opalg::{NumberFunction, OperatorEntry, QuantumMatrix, SubspaceProfile};

use super::DiagonalizationResult;

/// The scalar building blocks at one Fock level.
#[derive(Clone, Copy, Debug)]
pub struct ThreeAtomFunctions {
    pub x: f64,
    pub y: f64,
    pub b: f64,
    pub c: f64,
    pub mu: f64,
    pub nu: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ThreeAtomFunctions {
    pub fn at(n: f64) -> Self {
        let r1 = (n + 1.0).sqrt();
        let r2 = (n + 2.0).sqrt();
        let r3 = (n + 3.0).sqrt();
        let s3 = 3f64.sqrt();
        let x = 3.0 * r1 + 6.0 * r2 + 3.0 * r3;
        let y = 3.0 * r1 - 2.0 * r2 + 3.0 * r3;
        let b = 2.0 * s3 * (r1 - r3);
        let c = s3 * (r1 - 2.0 * r2 + r3);
        // b < 0 and c < 0 strictly for every n >= 0 (√ is increasing and
        // strictly concave), so β and γ are always defined.
        assert!(b != 0.0 && c != 0.0, "degenerate denominators at n = {n}");
        let mu = 4.0 * lambda_plus(n + 2.0).sqrt();
        let nu = 4.0 * lambda_minus(n + 2.0).sqrt();
        let beta = (mu - nu - (x - y)) / (2.0 * b);
        let gamma = (mu + nu - (x + y)) / (2.0 * c);
        Self { x, y, b, c, mu, nu, beta, gamma }
    }

    /// `1/√((1+β²)(1+γ²))`.
    pub fn normalizer(&self) -> f64 {
        1.0 / ((1.0 + self.beta * self.beta) * (1.0 + self.gamma * self.gamma)).sqrt()
    }

    /// First-row entries `u₁₁`, `u₁₂` (pure functions).
    pub fn u11(&self) -> f64 {
        0.25 * (2f64.sqrt() * (1.0 - self.beta * self.gamma)
            + 6f64.sqrt() * (self.beta + self.gamma))
            * self.normalizer()
    }

    pub fn u12(&self) -> f64 {
        0.25 * (6f64.sqrt() * (1.0 - self.beta * self.gamma)
            - 2f64.sqrt() * (self.beta + self.gamma))
            * self.normalizer()
    }

    /// Second-row coefficients before the `1/√(N+1)` ladder normalization.
    fn row2_first(&self) -> f64 {
        0.25 * (6f64.sqrt() * (1.0 + self.beta * self.gamma)
            + 2f64.sqrt() * (self.beta - self.gamma))
            * self.normalizer()
    }

    fn row2_second(&self) -> f64 {
        0.25 * (2f64.sqrt() * (1.0 + self.beta * self.gamma)
            - 6f64.sqrt() * (self.beta - self.gamma))
            * self.normalizer()
    }

    fn row3_first(&self) -> f64 {
        0.25 * (6f64.sqrt() * (1.0 - self.beta * self.gamma)
            - 2f64.sqrt() * (self.beta + self.gamma))
            * self.normalizer()
    }

    fn row3_second(&self) -> f64 {
        -0.25
            * (2f64.sqrt() * (1.0 - self.beta * self.gamma)
                + 6f64.sqrt() * (self.beta + self.gamma))
            * self.normalizer()
    }

    fn row4_first(&self) -> f64 {
        0.25 * (2f64.sqrt() * (1.0 + self.beta * self.gamma)
            - 6f64.sqrt() * (self.beta - self.gamma))
            * self.normalizer()
    }

    fn row4_second(&self) -> f64 {
        -0.25
            * (6f64.sqrt() * (1.0 + self.beta * self.gamma)
                + 2f64.sqrt() * (self.beta - self.gamma))
            * self.normalizer()
    }
}

fn ladder_root(n: u64, p: u32) -> f64 {
    let mut prod = 1.0;
    for l in 1..=p as u64 {
        prod *= (n + l) as f64;
    }
    prod.sqrt()
}

fn raising_entry(p: u32, label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> OperatorEntry {
    OperatorEntry::raising(
        p,
        NumberFunction::from_real(label, move |n| f(n as f64) / ladder_root(n, p)),
    )
}

/// `B_{3/2} = U D U†` with the printed β/γ construction and
/// `D = diag(√λ₊(N+2), √λ₋(N+2), -√λ₋(N+2), -√λ₊(N+2))`.
pub fn three_atom_diagonalization() -> DiagonalizationResult {
    let mut u = QuantumMatrix::zero(4);

    u[(0, 0)] = OperatorEntry::diagonal(NumberFunction::from_real("u11", |n| {
        ThreeAtomFunctions::at(n as f64).u11()
    }));
    u[(0, 1)] = OperatorEntry::diagonal(NumberFunction::from_real("u12", |n| {
        ThreeAtomFunctions::at(n as f64).u12()
    }));
    // u13 = u12, u14 = -u11
    u[(0, 2)] = OperatorEntry::diagonal(NumberFunction::from_real("u12", |n| {
        ThreeAtomFunctions::at(n as f64).u12()
    }));
    u[(0, 3)] = OperatorEntry::diagonal(NumberFunction::from_real("-u11", |n| {
        -ThreeAtomFunctions::at(n as f64).u11()
    }));

    u[(1, 0)] = raising_entry(1, "u21", |n| ThreeAtomFunctions::at(n).row2_first());
    u[(1, 1)] = raising_entry(1, "u22", |n| ThreeAtomFunctions::at(n).row2_second());
    // u23 = -u22, u24 = u21
    u[(1, 2)] = raising_entry(1, "-u22", |n| -ThreeAtomFunctions::at(n).row2_second());
    u[(1, 3)] = raising_entry(1, "u21", |n| ThreeAtomFunctions::at(n).row2_first());

    u[(2, 0)] = raising_entry(2, "u31", |n| ThreeAtomFunctions::at(n).row3_first());
    u[(2, 1)] = raising_entry(2, "u32", |n| ThreeAtomFunctions::at(n).row3_second());
    // u33 = u32, u34 = -u31
    u[(2, 2)] = raising_entry(2, "u32", |n| ThreeAtomFunctions::at(n).row3_second());
    u[(2, 3)] = raising_entry(2, "-u31", |n| -ThreeAtomFunctions::at(n).row3_first());

    u[(3, 0)] = raising_entry(3, "u41", |n| ThreeAtomFunctions::at(n).row4_first());
    u[(3, 1)] = raising_entry(3, "u42", |n| ThreeAtomFunctions::at(n).row4_second());
    // u43 = -u42, u44 = u41
    u[(3, 2)] = raising_entry(3, "-u42", |n| -ThreeAtomFunctions::at(n).row4_second());
    u[(3, 3)] = raising_entry(3, "u41", |n| ThreeAtomFunctions::at(n).row4_first());

    let mut d = QuantumMatrix::zero(4);
    d[(0, 0)] = OperatorEntry::diagonal(NumberFunction::from_real("sqrt(lambda+(N+2))", |n| {
        lambda_plus(n as f64 + 2.0).sqrt()
    }));
    d[(1, 1)] = OperatorEntry::diagonal(NumberFunction::from_real("sqrt(lambda-(N+2))", |n| {
        lambda_minus(n as f64 + 2.0).sqrt()
    }));
    d[(2, 2)] = OperatorEntry::diagonal(NumberFunction::from_real("-sqrt(lambda-(N+2))", |n| {
        -lambda_minus(n as f64 + 2.0).sqrt()
    }));
    d[(3, 3)] = OperatorEntry::diagonal(NumberFunction::from_real("-sqrt(lambda+(N+2))", |n| {
        -lambda_plus(n as f64 + 2.0).sqrt()
    }));

    DiagonalizationResult {
        j: Spin::from_twice(3),
        u,
        d,
        domain: SubspaceProfile::full(4),
        range: SubspaceProfile::staircase(4),
    }
}
