//! Executable identity suite: every structural identity behind the closed
//! forms runs as a named, tolerance-checked test, and the results serialize
//! to a fixed JSON report.
//!
//! Checks are deterministic: the only randomness (random operator entries
//! and random classical arguments) is driven by the seed recorded in the
//! report. The registry order is fixed regardless of execution order.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::evolve::{
    self, evolve_state, interaction_exponential, spectral, AtomLevel, FieldState, InitialState,
};
use crate::fock::{
    expm_hermitian, interior_compare, realize, sector_eigenvalues, sector_offdiagonal_max,
    FockRealization,
};
use crate::model::{
    atom_excitations, build_a, build_decomposition, build_spin_block, AtomCount, CollectiveSpin,
    Spin,
};
use crate::opalg::{
    ket_distance, Ket, NumberFunction, OperatorEntry, QuantumMatrix, SubspaceProfile,
};
use crate::qdm::{
    classical_eigensystem, classicalize, diagonalize, quantize, reduce, reduced_formula,
    three_atom_diagonalization, Mode, ThreeAtomFunctions,
};

/// Suite configuration. Exact-algebra identities default to 1e-12,
/// oracle comparisons against the dense exponential to 1e-9.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub cutoff: usize,
    pub margin: usize,
    pub tol_exact: f64,
    pub tol_oracle: f64,
    /// Replaces every tolerance when set (mainly to demonstrate failures).
    pub tol_override: Option<f64>,
    pub tg_values: Vec<f64>,
    pub seed: u64,
    /// Substring filter on check names.
    pub only: Option<String>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            cutoff: 40,
            margin: 6,
            tol_exact: 1e-12,
            tol_oracle: 1e-9,
            tol_override: None,
            tg_values: vec![0.3, 0.7, 1.3, 2.9],
            seed: 20040607,
            only: None,
        }
    }
}

/// One named identity with its measured residual.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub paper_anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub cutoff: usize,
    pub margin: usize,
    pub params: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub checks: Vec<IdentityCheck>,
    pub all_pass: bool,
    pub cutoff: usize,
    pub margin: usize,
    pub seed: u64,
}

impl Report {
    /// Fixed-schema JSON: per-check keys exactly
    /// `{name, paper_anchor, residual, tolerance, pass, cutoff, margin, params}`,
    /// floating-point values with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"all_pass\": {},\n", self.all_pass));
        out.push_str(&format!("  \"cutoff\": {},\n", self.cutoff));
        out.push_str(&format!("  \"margin\": {},\n", self.margin));
        out.push_str(&format!("  \"seed\": {},\n", self.seed));
        out.push_str("  \"checks\": [\n");
        for (i, check) in self.checks.iter().enumerate() {
            out.push_str("    {");
            out.push_str(&format!("\"name\": \"{}\", ", escape(&check.name)));
            out.push_str(&format!("\"paper_anchor\": \"{}\", ", escape(&check.paper_anchor)));
            out.push_str(&format!("\"residual\": {}, ", fmt_f64(check.residual)));
            out.push_str(&format!("\"tolerance\": {}, ", fmt_f64(check.tolerance)));
            out.push_str(&format!("\"pass\": {}, ", check.pass));
            out.push_str(&format!("\"cutoff\": {}, ", check.cutoff));
            out.push_str(&format!("\"margin\": {}, ", check.margin));
            out.push_str("\"params\": {");
            for (k, (key, value)) in check.params.iter().enumerate() {
                out.push_str(&format!("\"{}\": \"{}\"", escape(key), escape(value)));
                if k + 1 < check.params.len() {
                    out.push_str(", ");
                }
            }
            out.push_str("}}");
            out.push_str(if i + 1 < self.checks.len() { ",\n" } else { "\n" });
        }
        out.push_str("  ]\n}\n");
        out
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

enum Tol {
    Exact,
    Oracle,
    Fixed(f64),
}

struct Outcome {
    residual: f64,
    params: Vec<(String, String)>,
}

impl Outcome {
    fn new(residual: f64) -> Self {
        Self { residual, params: Vec::new() }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }
}

/// Runs the full registry (honoring the `only` filter) in fixed order.
pub fn run_suite(config: &CheckConfig) -> Result<Report> {
    type Runner = fn(&CheckConfig) -> Result<Outcome>;
    let registry: Vec<(&str, &str, Tol, Runner)> = vec![
        (
            "one_atom_square_identity",
            "A1^2 = diag(N+1, N)",
            Tol::Exact,
            check_one_atom_square,
        ),
        (
            "two_atom_cube_identity",
            "B1^3 = diag(2(2N+3), 2(2N+1), 2(2N-1)) B1",
            Tol::Exact,
            check_two_atom_cube,
        ),
        (
            "normal_ordering_soundness",
            "matrix(x*y) = matrix(x)*matrix(y) for random normal-form entries",
            Tol::Exact,
            check_normal_ordering,
        ),
        (
            "adjoint_soundness",
            "matrix(adj(x)) = matrix(x)^dagger",
            Tol::Exact,
            check_adjoint_soundness,
        ),
        (
            "entry_associativity",
            "(xy)z = x(yz) realized on the interior",
            Tol::Fixed(1e-10),
            check_associativity,
        ),
        (
            "su2_commutators",
            "[S3,S±] = ±S±, [S+,S-] = 2 S3",
            Tol::Exact,
            check_su2,
        ),
        (
            "interaction_from_collective_spin",
            "A_n = S+ x a + S- x a-dagger",
            Tol::Exact,
            check_interaction_tie,
        ),
        (
            "intertwiner_orthogonality",
            "T^T T = T T^T = 1",
            Tol::Fixed(1e-15),
            check_intertwiner_orthogonality,
        ),
        (
            "decomposition_conjugation",
            "T-dagger A_n T = direct sum of spin blocks",
            Tol::Exact,
            check_decomposition,
        ),
        (
            "spin_block_hermiticity",
            "adj(B_j) = B_j",
            Tol::Exact,
            check_block_hermiticity,
        ),
        (
            "expm_unitarity",
            "e^{-itgA} unitary on the full truncation",
            Tol::Fixed(1e-10),
            check_expm_unitarity,
        ),
        (
            "sector_preservation",
            "e^{-itgA} conserves total excitation",
            Tol::Exact,
            check_sector_preservation,
        ),
        (
            "b1_sector_spectrum",
            "B1 sector eigenvalues {0, ±sqrt(2(2m+1))}",
            Tol::Fixed(1e-10),
            check_b1_spectrum,
        ),
        (
            "classical_x_orthogonality",
            "X^T X = 1 for J = 2..8",
            Tol::Exact,
            check_x_orthogonality,
        ),
        (
            "classical_eigen_recursion",
            "C(z) w_i = (J-2i+1)|z| w_i",
            Tol::Exact,
            check_eigen_recursion,
        ),
        (
            "isometry_subspace_identities",
            "U1-dagger U1 = 1 everywhere; U1 U1-dagger = 1 on the staircase",
            Tol::Exact,
            check_isometry,
        ),
        (
            "reduction_purity",
            "U1-dagger B U1 has pure number-function entries",
            Tol::Exact,
            check_reduction_purity,
        ),
        (
            "reduction_formula",
            "r_ki = sum sqrt((J-l+1)(l-1)) (x_(l-1)k x_li + x_lk x_(l-1)i) sqrt(N+l-1)",
            Tol::Exact,
            check_reduction_formula,
        ),
        (
            "qdm_reconstruction_closed",
            "B_j = U D U-dagger for j in {1/2, 1, 3/2}",
            Tol::Oracle,
            check_reconstruction_closed,
        ),
        (
            "qdm_reconstruction_per_level",
            "B_2 = U D U-dagger with per-level eigensolve",
            Tol::Oracle,
            check_reconstruction_per_level,
        ),
        (
            "qdm_unitarity_profiles",
            "U-dagger U = 1 on domain; U U-dagger = 1 on range",
            Tol::Exact,
            check_qdm_unitarity,
        ),
        (
            "closed_vs_per_level",
            "closed-form and per-level D agree for j = 1",
            Tol::Fixed(1e-10),
            check_modes_agree,
        ),
        (
            "oracle_equivalence_one",
            "closed form e^{-itgA_1} vs dense exponential",
            Tol::Oracle,
            check_oracle_one,
        ),
        (
            "oracle_equivalence_two",
            "closed form e^{-itgA_2} vs dense exponential",
            Tol::Oracle,
            check_oracle_two,
        ),
        (
            "oracle_equivalence_three",
            "closed form e^{-itgA_3} vs dense exponential",
            Tol::Oracle,
            check_oracle_three,
        ),
        (
            "propagator_group_property",
            "E(t1+t2) = E(t1) E(t2)",
            Tol::Oracle,
            check_group_property,
        ),
        (
            "propagator_time_reversal",
            "E(t)-dagger = E(-t)",
            Tol::Fixed(1e-10),
            check_time_reversal,
        ),
        (
            "excitation_conservation",
            "evolved states keep their excitation distribution",
            Tol::Fixed(1e-10),
            check_excitation_conservation,
        ),
        (
            "triple_agreement_one",
            "U e^{-itgD} U-dagger = closed form = oracle (one atom)",
            Tol::Oracle,
            check_triple_one,
        ),
        (
            "triple_agreement_two",
            "U e^{-itgD} U-dagger = closed form = oracle (two atoms)",
            Tol::Oracle,
            check_triple_two,
        ),
        (
            "triple_agreement_three",
            "U e^{-itgD} U-dagger = closed form = oracle (three atoms)",
            Tol::Oracle,
            check_triple_three,
        ),
        (
            "two_atom_corner_entry",
            "(1,1) of U e^{-itgD} U-dagger = 1 + (2N+2)/(2N+3) f(N+1)",
            Tol::Fixed(1e-11),
            check_two_atom_corner,
        ),
        (
            "spin32_beta_gamma_relations",
            "beta + 1/beta = (mu-nu)/b and companions",
            Tol::Fixed(1e-11),
            check_beta_gamma_relations,
        ),
        (
            "spin32_entry11_squares",
            "2 u11^2 = v+(N+2)/(2 sqrt(d(N+2))), 2 u12^2 = -v-(N+2)/(2 sqrt(d(N+2)))",
            Tol::Fixed(1e-11),
            check_entry11_squares,
        ),
        (
            "spin32_entry11_assembled",
            "2 u11^2 cos(tg mu/4) + 2 u12^2 cos(tg nu/4) = f2(N+2)",
            Tol::Fixed(1e-11),
            check_entry11_assembled,
        ),
        (
            "spin32_u_symmetries",
            "u13 = u12, u14 = -u11, u23 = -u22, u24 = u21, ...",
            Tol::Exact,
            check_u_symmetries,
        ),
        (
            "phase_dressing_shifted_diagonal",
            "U0~-dagger D U0~ = diag(sqrt(2(2N+1)), 0, -sqrt(2(2N+1))) above the vacuum",
            Tol::Exact,
            check_dressed_diagonal,
        ),
        (
            "phase_dressing_reconstruction",
            "B1 = U~ D~ U~-dagger",
            Tol::Fixed(1e-10),
            check_dressed_reconstruction,
        ),
        (
            "phase_dressing_domain_range",
            "U~-dagger U~ = 1 on H+H1+H; U~ U~-dagger = 1 on H+H+H1",
            Tol::Exact,
            check_dressed_profiles,
        ),
        (
            "phase_dressing_diagonal_differs",
            "D~(n) != D(n) for every n <= 30",
            Tol::Fixed(0.0),
            check_dressed_differs,
        ),
        (
            "vacuum_rabi_oscillation",
            "P_e(t) = cos^2(gt) from |excited, vacuum>",
            Tol::Fixed(1e-10),
            check_vacuum_rabi,
        ),
        (
            "ground_state_stationary",
            "|ground, vacuum> is stationary",
            Tol::Fixed(1e-12),
            check_ground_stationary,
        ),
        (
            "evolution_norm_conservation",
            "norm preserved for Fock and coherent initial states",
            Tol::Fixed(1e-9),
            check_norm_conservation,
        ),
    ];

    let mut checks = Vec::new();
    for (name, anchor, tol, runner) in registry {
        if let Some(filter) = &config.only {
            if !name.contains(filter.as_str()) {
                continue;
            }
        }
        let tolerance = config.tol_override.unwrap_or(match tol {
            Tol::Exact => config.tol_exact,
            Tol::Oracle => config.tol_oracle,
            Tol::Fixed(t) => t,
        });
        let outcome = runner(config)?;
        checks.push(IdentityCheck {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            residual: outcome.residual,
            tolerance,
            pass: outcome.residual <= tolerance,
            cutoff: config.cutoff,
            margin: config.margin,
            params: outcome.params,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        checks,
        all_pass,
        cutoff: config.cutoff,
        margin: config.margin,
        seed: config.seed,
    })
}

fn oracle_exponential(n: AtomCount, tg: f64, cutoff: usize) -> Result<FockRealization> {
    let h = realize(&build_a(n), cutoff)?;
    expm_hermitian(&h, -tg)
}

/// Interior margin for comparisons whose expressions move up to `spread`
/// photons: at least that wide, so trusted columns keep their excitation
/// sector intact under the cutoff. `None` when the cutoff leaves no valid
/// interior at that width.
fn effective_margin(config: &CheckConfig, spread: usize) -> Option<usize> {
    let margin = config.margin.max(spread);
    (2 * margin < config.cutoff).then_some(margin)
}

fn required_margin(config: &CheckConfig, spread: usize) -> Result<usize> {
    effective_margin(config, spread).ok_or(crate::error::Error::MarginTooLarge {
        margin: config.margin.max(spread),
        cutoff: config.cutoff,
    })
}

fn one_atom_matrix() -> QuantumMatrix {
    build_a(AtomCount::One)
}

fn spin_one_block() -> QuantumMatrix {
    build_spin_block(Spin::from_twice(2)).expect("spin-1 block").matrix().clone()
}

// --- operator algebra -------------------------------------------------

fn check_one_atom_square(_: &CheckConfig) -> Result<Outcome> {
    let a = one_atom_matrix();
    let sq = a.multiply(&a)?;
    let mut expected = QuantumMatrix::zero(2);
    expected[(0, 0)] =
        OperatorEntry::diagonal(NumberFunction::from_real("N+1", |n| (n + 1) as f64));
    expected[(1, 1)] = OperatorEntry::diagonal(NumberFunction::number());
    Ok(Outcome::new(sq.max_coefficient_diff(&expected, 50)).with("n_range", "0..=50"))
}

fn check_two_atom_cube(_: &CheckConfig) -> Result<Outcome> {
    let b = spin_one_block();
    let cube = b.multiply(&b)?.multiply(&b)?;
    let mut d = QuantumMatrix::zero(3);
    for (i, off) in [(0usize, 3.0f64), (1, 1.0), (2, -1.0)] {
        d[(i, i)] = OperatorEntry::diagonal(NumberFunction::from_real(
            format!("2(2N+{off})"),
            move |n| 2.0 * (2.0 * n as f64 + off),
        ));
    }
    let rhs = d.multiply(&b)?;
    Ok(Outcome::new(cube.max_coefficient_diff(&rhs, 50)).with("n_range", "0..=50"))
}

fn random_function(rng: &mut ChaCha8Rng) -> NumberFunction {
    let c: Vec<C64> = (0..3)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let (c0, c1, c2) = (c[0], c[1], c[2]);
    NumberFunction::new("random-poly", move |n| {
        let x = n as f64 / 8.0;
        c0 + c1 * x + c2 * x * x
    })
}

fn random_entry(rng: &mut ChaCha8Rng, max_power: u32) -> OperatorEntry {
    let mut e = OperatorEntry::diagonal(random_function(rng));
    for p in 1..=max_power {
        if rng.gen_bool(0.6) {
            e = e.add(&OperatorEntry::raising(p, random_function(rng)));
        }
        if rng.gen_bool(0.6) {
            e = e.add(&OperatorEntry::lowering(random_function(rng), p));
        }
    }
    e
}

fn entry_as_matrix(e: &OperatorEntry, cutoff: usize) -> Result<FockRealization> {
    let mut m = QuantumMatrix::zero(1);
    m[(0, 0)] = e.clone();
    realize(&m, cutoff)
}

/// Interior difference normalized by the working magnitude of the
/// reference, so tolerances stay meaningful for random entries whose
/// products reach large values.
fn relative_interior_compare(
    a: &FockRealization,
    b: &FockRealization,
    margin: usize,
) -> Result<f64> {
    let diff = interior_compare(a, b, margin)?;
    let scale = a.matrix().iter().map(|c| c.norm()).fold(1.0, f64::max);
    Ok(diff / scale)
}

fn check_normal_ordering(config: &CheckConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cutoff = 30;
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let x = random_entry(&mut rng, 3);
        let y = random_entry(&mut rng, 3);
        let direct = entry_as_matrix(&x.multiply(&y), cutoff)?;
        let indirect = entry_as_matrix(&x, cutoff)?.mul(&entry_as_matrix(&y, cutoff)?)?;
        worst = worst.max(relative_interior_compare(&direct, &indirect, 8)?);
    }
    Ok(Outcome::new(worst)
        .with("pairs", 40)
        .with("cutoff", cutoff)
        .with("seed", config.seed))
}

fn check_adjoint_soundness(config: &CheckConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xadf0);
    let cutoff = 30;
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let x = random_entry(&mut rng, 3);
        let direct = entry_as_matrix(&x.adjoint(), cutoff)?;
        let indirect = entry_as_matrix(&x, cutoff)?.adjoint();
        worst = worst.max(relative_interior_compare(&direct, &indirect, 4)?);
    }
    Ok(Outcome::new(worst).with("entries", 40).with("seed", config.seed))
}

fn check_associativity(config: &CheckConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xa550);
    let cutoff = 30;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = random_entry(&mut rng, 2);
        let y = random_entry(&mut rng, 2);
        let z = random_entry(&mut rng, 2);
        let left = entry_as_matrix(&x.multiply(&y).multiply(&z), cutoff)?;
        let right = entry_as_matrix(&x.multiply(&y.multiply(&z)), cutoff)?;
        worst = worst.max(relative_interior_compare(&left, &right, 8)?);
    }
    Ok(Outcome::new(worst).with("triples", 100).with("seed", config.seed))
}

// --- model -------------------------------------------------------------

fn check_su2(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in [AtomCount::One, AtomCount::Two, AtomCount::Three] {
        worst = worst.max(CollectiveSpin::new(n).su2_defect());
    }
    Ok(Outcome::new(worst))
}

fn check_interaction_tie(config: &CheckConfig) -> Result<Outcome> {
    // Realize A_n and compare against the explicit Kronecker assembly.
    let cutoff = config.cutoff.min(20);
    let levels = cutoff + 1;
    let mut worst: f64 = 0.0;
    for n in [AtomCount::One, AtomCount::Two, AtomCount::Three] {
        let spin = CollectiveSpin::new(n);
        let dim = n.dim();
        let mut dense = nalgebra::DMatrix::<C64>::zeros(dim * levels, dim * levels);
        for i in 0..dim {
            for j in 0..dim {
                for m in 0..levels - 1 {
                    dense[(i * levels + m, j * levels + m + 1)] +=
                        C64::new(spin.s_plus[(i, j)] * ((m + 1) as f64).sqrt(), 0.0);
                    dense[(i * levels + m + 1, j * levels + m)] +=
                        C64::new(spin.s_minus[(i, j)] * ((m + 1) as f64).sqrt(), 0.0);
                }
            }
        }
        let direct = realize(&build_a(n), cutoff)?;
        let diff =
            (direct.matrix() - &dense).iter().map(|c| c.norm()).fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    Ok(Outcome::new(worst).with("cutoff", cutoff))
}

fn check_intertwiner_orthogonality(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in [AtomCount::Two, AtomCount::Three] {
        worst = worst.max(build_decomposition(n)?.orthogonality_defect());
    }
    Ok(Outcome::new(worst))
}

fn check_decomposition(config: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in [AtomCount::Two, AtomCount::Three] {
        let d = build_decomposition(n)?;
        let lhs = realize(&d.conjugated_interaction()?, config.cutoff)?;
        let rhs = realize(&d.block_sum(), config.cutoff)?;
        worst = worst.max(interior_compare(&lhs, &rhs, required_margin(config, 1)?)?);
    }
    Ok(Outcome::new(worst))
}

fn check_block_hermiticity(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for twice in 1..=8u32 {
        let b = build_spin_block(Spin::from_twice(twice))?;
        worst = worst.max(b.matrix().adjoint().max_coefficient_diff(b.matrix(), 40));
    }
    Ok(Outcome::new(worst).with("j_range", "1/2..=4"))
}

// --- fock --------------------------------------------------------------

fn check_expm_unitarity(config: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in [AtomCount::One, AtomCount::Two, AtomCount::Three] {
        let e = oracle_exponential(n, 1.3, config.cutoff)?;
        worst = worst.max(e.unitarity_defect());
    }
    Ok(Outcome::new(worst).with("tg", 1.3))
}

fn check_sector_preservation(config: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in [AtomCount::One, AtomCount::Two, AtomCount::Three] {
        let e = oracle_exponential(n, 1.3, config.cutoff)?;
        let margin = required_margin(config, n.count())?;
        worst = worst.max(sector_offdiagonal_max(&e, &atom_excitations(n), margin)?);
    }
    Ok(Outcome::new(worst).with("tg", 1.3))
}

fn check_b1_spectrum(config: &CheckConfig) -> Result<Outcome> {
    let b = realize(&spin_one_block(), config.cutoff)?;
    let excitations = [2u32, 1, 0];
    let mut worst: f64 = 0.0;
    // Full sectors: label m is the photon number of the middle component.
    for m in 1..=(config.cutoff - config.margin).saturating_sub(1) {
        let vals = sector_eigenvalues(&b, &excitations, m + 1);
        let expected = (2.0 * (2.0 * m as f64 + 1.0)).sqrt();
        assert_eq!(vals.len(), 3);
        worst = worst.max((vals[0] + expected).abs());
        worst = worst.max(vals[1].abs());
        worst = worst.max((vals[2] - expected).abs());
    }
    Ok(Outcome::new(worst).with("sectors", format!("m = 1..={}", config.cutoff - config.margin - 1)))
}

// --- classical stage ----------------------------------------------------

fn check_x_orthogonality(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for j_dim in 2..=8 {
        worst = worst.max(classical_eigensystem(j_dim).orthogonality_defect());
    }
    Ok(Outcome::new(worst).with("j_dim", "2..=8"))
}

fn check_eigen_recursion(config: &CheckConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x51c);
    let mut worst: f64 = 0.0;
    for twice in 1..=7u32 {
        for _ in 0..4 {
            let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if z.norm() < 1e-3 {
                continue;
            }
            let out = classicalize(Spin::from_twice(twice), z)?;
            worst = worst.max(out.eigen_residual());
            worst = worst.max(out.reconstruction_residual());
        }
    }
    Ok(Outcome::new(worst).with("seed", config.seed).with("j_range", "1/2..=7/2"))
}

fn profile_identity_defect(
    product: &QuantumMatrix,
    profile: &SubspaceProfile,
    max_n: u64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for (c, n) in profile.basis_kets(max_n) {
        let mut expected = Ket::new();
        expected.insert((c, n), C64::ONE);
        worst = worst.max(ket_distance(&product.apply_basis_ket(c, n), &expected));
    }
    worst
}

fn check_isometry(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for j_dim in 2..=5usize {
        let iso = quantize(&classical_eigensystem(j_dim));
        let left = iso.u1.adjoint().multiply(&iso.u1)?;
        let right = iso.u1.multiply(&iso.u1.adjoint())?;
        worst = worst.max(profile_identity_defect(&left, &iso.domain, 20));
        worst = worst.max(profile_identity_defect(&right, &iso.range, 20));
    }
    Ok(Outcome::new(worst).with("j_dim", "2..=5").with("levels", "0..=20"))
}

fn check_reduction_purity(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for twice in 1..=5u32 {
        let j = Spin::from_twice(twice);
        let block = build_spin_block(j)?;
        let iso = quantize(&classical_eigensystem(j.block_dim()));
        let raw = iso.u1.adjoint().multiply(block.matrix())?.multiply(&iso.u1)?;
        for i in 0..raw.dim() {
            for k in 0..raw.dim() {
                worst = worst.max(raw.entry(i, k).max_ladder_residue(50));
            }
        }
    }
    Ok(Outcome::new(worst).with("j_range", "1/2..=5/2"))
}

fn check_reduction_formula(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for twice in 1..=5u32 {
        let j = Spin::from_twice(twice);
        let block = build_spin_block(j)?;
        let es = classical_eigensystem(j.block_dim());
        let reduced = reduce(&block, &quantize(&es))?;
        worst = worst.max(reduced.matrix().max_coefficient_diff(&reduced_formula(&es), 50));
    }
    Ok(Outcome::new(worst).with("j_range", "1/2..=5/2"))
}

// --- quantum diagonalization --------------------------------------------

/// Reconstruction residual, measured two ways: exact action on the
/// staircase domain (where the factorization is an identity), and, when
/// the cutoff leaves room for a wide enough interior, a realized interior
/// comparison.
fn reconstruction_residual(
    result: &crate::qdm::DiagonalizationResult,
    config: &CheckConfig,
) -> Result<(f64, bool)> {
    let block = build_spin_block(result.j)?;
    let rebuilt = result.reconstruct()?;
    let mut worst = 0.0f64;
    for (c, n) in result.range.basis_kets(20) {
        worst = worst.max(ket_distance(
            &rebuilt.apply_basis_ket(c, n),
            &block.matrix().apply_basis_ket(c, n),
        ));
    }
    let spread = result.j.block_dim() - 1;
    let mut interior_ran = false;
    if let Some(margin) = effective_margin(config, spread) {
        let lhs = realize(&rebuilt, config.cutoff)?;
        let rhs = realize(block.matrix(), config.cutoff)?;
        worst = worst.max(interior_compare(&lhs, &rhs, margin)?);
        interior_ran = true;
    }
    Ok((worst, interior_ran))
}

fn check_reconstruction_closed(config: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut interior_ran = true;
    for twice in [1u32, 2, 3] {
        let result = diagonalize(Spin::from_twice(twice), Mode::ClosedForm)?;
        let (residual, ran) = reconstruction_residual(&result, config)?;
        worst = worst.max(residual);
        interior_ran &= ran;
    }
    Ok(Outcome::new(worst).with("j", "1/2, 1, 3/2").with("interior", interior_ran))
}

fn check_reconstruction_per_level(config: &CheckConfig) -> Result<Outcome> {
    let result = diagonalize(Spin::from_twice(4), Mode::PerLevel)?;
    let (residual, ran) = reconstruction_residual(&result, config)?;
    Ok(Outcome::new(residual).with("j", "2").with("interior", ran))
}

fn check_qdm_unitarity(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for twice in [1u32, 2, 3] {
        let result = diagonalize(Spin::from_twice(twice), Mode::ClosedForm)?;
        let left = result.u.adjoint().multiply(&result.u)?;
        let right = result.u.multiply(&result.u.adjoint())?;
        worst = worst.max(profile_identity_defect(&left, &result.domain, 18));
        worst = worst.max(profile_identity_defect(&right, &result.range, 18));
    }
    Ok(Outcome::new(worst).with("j", "1/2, 1, 3/2").with("levels", "0..=18"))
}

fn check_modes_agree(_: &CheckConfig) -> Result<Outcome> {
    let closed = diagonalize(Spin::from_twice(2), Mode::ClosedForm)?;
    let level = diagonalize(Spin::from_twice(2), Mode::PerLevel)?;
    let mut worst: f64 = 0.0;
    for n in 0..=30u64 {
        for i in 0..3 {
            let a = closed.d.entry(i, i).diag().eval_real(n);
            let b = level.d.entry(i, i).diag().eval_real(n);
            worst = worst.max((a - b).abs());
        }
    }
    Ok(Outcome::new(worst).with("j", "1").with("levels", "0..=30"))
}

// --- closed-form exponentials vs the oracle ------------------------------

fn oracle_residual(
    n: AtomCount,
    config: &CheckConfig,
) -> Result<(f64, Vec<(String, String)>)> {
    let margin = required_margin(config, n.count())?;
    let mut worst: f64 = 0.0;
    for &tg in &config.tg_values {
        let closed = realize(&interaction_exponential(n, tg, 1.0), config.cutoff)?;
        let oracle = oracle_exponential(n, tg, config.cutoff)?;
        worst = worst.max(interior_compare(&closed, &oracle, margin)?);
    }
    let params = vec![(
        "tg".to_string(),
        config
            .tg_values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    )];
    Ok((worst, params))
}

fn check_oracle_one(config: &CheckConfig) -> Result<Outcome> {
    let (residual, params) = oracle_residual(AtomCount::One, config)?;
    Ok(Outcome { residual, params })
}

fn check_oracle_two(config: &CheckConfig) -> Result<Outcome> {
    let (residual, params) = oracle_residual(AtomCount::Two, config)?;
    Ok(Outcome { residual, params })
}

fn check_oracle_three(config: &CheckConfig) -> Result<Outcome> {
    let (residual, params) = oracle_residual(AtomCount::Three, config)?;
    Ok(Outcome { residual, params })
}

fn check_group_property(config: &CheckConfig) -> Result<Outcome> {
    let (t1, t2) = (0.7, 1.3);
    let mut worst: f64 = 0.0;
    let mut skipped = Vec::new();
    for n in [AtomCount::One, AtomCount::Two, AtomCount::Three] {
        // The matrix product spreads twice as far as a single factor; skip
        // atom counts whose interior would be empty at this cutoff.
        let Some(margin) = effective_margin(config, 2 * n.count()) else {
            skipped.push(n.to_string());
            continue;
        };
        let sum = realize(&interaction_exponential(n, t1 + t2, 1.0), config.cutoff)?;
        let a = realize(&interaction_exponential(n, t1, 1.0), config.cutoff)?;
        let b = realize(&interaction_exponential(n, t2, 1.0), config.cutoff)?;
        worst = worst.max(interior_compare(&sum, &a.mul(&b)?, margin)?);
    }
    let mut outcome = Outcome::new(worst).with("t1", t1).with("t2", t2);
    if !skipped.is_empty() {
        outcome = outcome.with("skipped_atoms", skipped.join(", "));
    }
    Ok(outcome)
}

fn check_time_reversal(config: &CheckConfig) -> Result<Outcome> {
    let t = 1.3;
    let mut worst: f64 = 0.0;
    for n in [AtomCount::One, AtomCount::Two, AtomCount::Three] {
        let margin = required_margin(config, n.count())?;
        let forward = realize(&interaction_exponential(n, t, 1.0), config.cutoff)?;
        let backward = realize(&interaction_exponential(n, -t, 1.0), config.cutoff)?;
        worst = worst.max(interior_compare(&forward.adjoint(), &backward, margin)?);
    }
    Ok(Outcome::new(worst).with("t", t))
}

fn check_excitation_conservation(config: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let cases: Vec<(AtomCount, InitialState)> = vec![
        (
            AtomCount::One,
            InitialState { atoms: vec![AtomLevel::Excited], field: FieldState::Fock(3) },
        ),
        (
            AtomCount::Two,
            InitialState {
                atoms: vec![AtomLevel::Excited, AtomLevel::Ground],
                field: FieldState::Fock(2),
            },
        ),
        (
            AtomCount::Three,
            InitialState {
                atoms: vec![AtomLevel::Excited, AtomLevel::Excited, AtomLevel::Ground],
                field: FieldState::Fock(1),
            },
        ),
    ];
    for (n, initial) in cases {
        let spin_exc = atom_excitations(n);
        let state0 = evolve::build_initial(n, &initial, config.cutoff, config.margin)?;
        let before = state0.excitation_distribution(&spin_exc);
        for &t in &[0.7, 1.9] {
            let after = evolve::full_propagator(n, t, 1.0, 0.9)
                .apply(&state0)
                .excitation_distribution(&spin_exc);
            for (b, a) in before.iter().zip(&after) {
                worst = worst.max((b - a).abs());
            }
        }
    }
    Ok(Outcome::new(worst).with("times", "0.7, 1.9"))
}

// --- triple agreement -----------------------------------------------------

fn triple_residual(
    n: AtomCount,
    assemble: impl Fn(f64) -> Result<QuantumMatrix>,
    config: &CheckConfig,
) -> Result<f64> {
    let margin = required_margin(config, n.count())?;
    let mut worst: f64 = 0.0;
    for &tg in &config.tg_values {
        let via_qdm = realize(&assemble(tg)?, config.cutoff)?;
        let closed = realize(&interaction_exponential(n, tg, 1.0), config.cutoff)?;
        let oracle = oracle_exponential(n, tg, config.cutoff)?;
        worst = worst.max(interior_compare(&via_qdm, &closed, margin)?);
        worst = worst.max(interior_compare(&via_qdm, &oracle, margin)?);
        worst = worst.max(interior_compare(&closed, &oracle, margin)?);
    }
    Ok(worst)
}

fn check_triple_one(config: &CheckConfig) -> Result<Outcome> {
    let result = diagonalize(Spin::from_twice(1), Mode::ClosedForm)?;
    let residual =
        triple_residual(AtomCount::One, |tg| result.exponential(tg, 1.0), config)?;
    Ok(Outcome::new(residual).with("tg", format_tgs(config)))
}

fn check_triple_two(config: &CheckConfig) -> Result<Outcome> {
    let decomposition = build_decomposition(AtomCount::Two)?;
    let result = diagonalize(Spin::from_twice(2), Mode::ClosedForm)?;
    let residual = triple_residual(
        AtomCount::Two,
        |tg| {
            let blocks = QuantumMatrix::direct_sum(&[
                QuantumMatrix::identity(1),
                result.exponential(tg, 1.0)?,
            ]);
            blocks.conjugate_by_scalar_transposed(&decomposition.t)
        },
        config,
    )?;
    Ok(Outcome::new(residual).with("tg", format_tgs(config)))
}

fn check_triple_three(config: &CheckConfig) -> Result<Outcome> {
    let decomposition = build_decomposition(AtomCount::Three)?;
    let half = diagonalize(Spin::from_twice(1), Mode::ClosedForm)?;
    let three_halves = diagonalize(Spin::from_twice(3), Mode::ClosedForm)?;
    let residual = triple_residual(
        AtomCount::Three,
        |tg| {
            let e_half = half.exponential(tg, 1.0)?;
            let blocks = QuantumMatrix::direct_sum(&[
                e_half.clone(),
                e_half,
                three_halves.exponential(tg, 1.0)?,
            ]);
            blocks.conjugate_by_scalar_transposed(&decomposition.t)
        },
        config,
    )?;
    Ok(Outcome::new(residual).with("tg", format_tgs(config)))
}

fn format_tgs(config: &CheckConfig) -> String {
    config.tg_values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn check_two_atom_corner(config: &CheckConfig) -> Result<Outcome> {
    let result = diagonalize(Spin::from_twice(2), Mode::ClosedForm)?;
    let mut worst: f64 = 0.0;
    for &tg in &config.tg_values {
        let e = result.exponential(tg, 1.0)?;
        let corner = e.entry(0, 0);
        for n in 0..=30u64 {
            let nf = n as f64;
            let expected =
                1.0 + (2.0 * nf + 2.0) / (2.0 * nf + 3.0) * spectral::two_atom_f(tg, nf + 1.0);
            let got = corner.diag().eval(n);
            worst = worst.max((got - C64::new(expected, 0.0)).norm());
        }
    }
    Ok(Outcome::new(worst).with("tg", format_tgs(config)).with("levels", "0..=30"))
}

// --- three-atom entry identities ------------------------------------------

fn check_beta_gamma_relations(_: &CheckConfig) -> Result<Outcome> {
    // The printed relations β + 1/β = (μ-ν)/b, 1/β - β = (x-y)/b (and the γ
    // pair) divide by quantities that dip toward zero, so they are asserted
    // here with denominators cleared: the pair for β is equivalent to
    // (μ-ν)² - (x-y)² = 4b², the pair for γ to (μ+ν)² - (x+y)² = 4c², and
    // the cross relation to (β² + γ²)·2bc = βγ·((μ²-ν²) - (x²-y²)).
    let mut worst: f64 = 0.0;
    for n in 0..=30u64 {
        let f = ThreeAtomFunctions::at(n as f64);
        let lhs_b = (f.mu - f.nu).powi(2) - (f.x - f.y).powi(2);
        let rhs_b = 4.0 * f.b * f.b;
        worst = worst.max((lhs_b - rhs_b).abs() / lhs_b.abs().max(1.0));
        let lhs_c = (f.mu + f.nu).powi(2) - (f.x + f.y).powi(2);
        let rhs_c = 4.0 * f.c * f.c;
        worst = worst.max((lhs_c - rhs_c).abs() / (f.mu + f.nu).powi(2).max(1.0));
        let cross_lhs = (f.beta * f.beta + f.gamma * f.gamma) * 2.0 * f.b * f.c;
        let cross_rhs = f.beta
            * f.gamma
            * ((f.mu * f.mu - f.nu * f.nu) - (f.x * f.x - f.y * f.y));
        worst = worst.max((cross_lhs - cross_rhs).abs());
    }
    Ok(Outcome::new(worst).with("levels", "0..=30").with("form", "denominators cleared"))
}

fn check_entry11_squares(_: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 0..=30u64 {
        let nf = n as f64;
        let f = ThreeAtomFunctions::at(nf);
        let root_d = spectral::d(nf + 2.0).sqrt();
        let u11_sq = 2.0 * f.u11() * f.u11();
        let u12_sq = 2.0 * f.u12() * f.u12();
        worst = worst.max((u11_sq - spectral::v_plus(nf + 2.0) / (2.0 * root_d)).abs());
        worst = worst.max((u12_sq + spectral::v_minus(nf + 2.0) / (2.0 * root_d)).abs());
    }
    Ok(Outcome::new(worst).with("levels", "0..=30"))
}

fn check_entry11_assembled(config: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for &tg in &config.tg_values {
        for n in 0..=30u64 {
            let nf = n as f64;
            let f = ThreeAtomFunctions::at(nf);
            let assembled = 2.0 * f.u11() * f.u11() * (tg * f.mu / 4.0).cos()
                + 2.0 * f.u12() * f.u12() * (tg * f.nu / 4.0).cos();
            worst = worst.max((assembled - spectral::f2(tg, nf + 2.0)).abs());
        }
    }
    Ok(Outcome::new(worst).with("tg", format_tgs(config)).with("levels", "0..=30"))
}

fn check_u_symmetries(_: &CheckConfig) -> Result<Outcome> {
    // The row symmetries are enforced structurally when the unitary is
    // assembled; re-derive them here from the stored entries.
    let result = three_atom_diagonalization();
    let mut worst: f64 = 0.0;
    type SignedPair = ((usize, usize), (usize, usize), f64);
    let pairs: [SignedPair; 8] = [
        ((0, 2), (0, 1), 1.0),
        ((0, 3), (0, 0), -1.0),
        ((1, 2), (1, 1), -1.0),
        ((1, 3), (1, 0), 1.0),
        ((2, 2), (2, 1), 1.0),
        ((2, 3), (2, 0), -1.0),
        ((3, 2), (3, 1), -1.0),
        ((3, 3), (3, 0), 1.0),
    ];
    for ((r1, c1), (r2, c2), sign) in pairs {
        let diff = result
            .u
            .entry(r1, c1)
            .max_coefficient_diff(&result.u.entry(r2, c2).scale(C64::new(sign, 0.0)), 40);
        worst = worst.max(diff);
    }
    Ok(Outcome::new(worst).with("levels", "0..=40"))
}

// --- phase dressing (the factorization is not unique) ----------------------

/// The dressing `U0~ = diag((1/√(N+1)) a, ·, ·)`.
fn phase_dressing() -> QuantumMatrix {
    let mut m = QuantumMatrix::zero(3);
    for i in 0..3 {
        m[(i, i)] = OperatorEntry::lowering(
            NumberFunction::from_real("1/sqrt(N+1)", |n| 1.0 / ((n + 1) as f64).sqrt()),
            1,
        );
    }
    m
}

/// The dressed unitary as printed, with every entry a total function.
fn dressed_unitary() -> QuantumMatrix {
    let s = |n: f64| (2.0 * (2.0 * n + 3.0)).sqrt();
    let mut m = QuantumMatrix::zero(3);
    m[(0, 0)] = OperatorEntry::lowering(
        NumberFunction::from_real("-1/sqrt(2(2N+3))", move |n| -1.0 / s(n as f64)),
        1,
    );
    m[(0, 1)] = OperatorEntry::lowering(
        NumberFunction::from_real("sqrt(2)sqrt(N+2)/(sqrt(N+1)sqrt(2(2N+3)))", move |n| {
            let nf = n as f64;
            2f64.sqrt() * (nf + 2.0).sqrt() / ((nf + 1.0).sqrt() * s(nf))
        }),
        1,
    );
    m[(0, 2)] = OperatorEntry::lowering(
        NumberFunction::from_real("1/sqrt(2(2N+3))", move |n| 1.0 / s(n as f64)),
        1,
    );
    let r = std::f64::consts::FRAC_1_SQRT_2;
    m[(1, 0)] = OperatorEntry::scalar(C64::new(-r, 0.0));
    m[(1, 2)] = OperatorEntry::scalar(C64::new(-r, 0.0));
    // Bottom row: the printed f(N) a† becomes a† f(N+1), e.g.
    // (1/√(2(2N-1))) a† = a† (1/√(2(2N+1))).
    let s1 = |n: f64| (2.0 * (2.0 * n + 1.0)).sqrt();
    m[(2, 0)] = OperatorEntry::raising(
        1,
        NumberFunction::from_real("-1/sqrt(2(2N+1))", move |n| -1.0 / s1(n as f64)),
    );
    m[(2, 1)] = OperatorEntry::raising(
        1,
        NumberFunction::from_real("-sqrt(2)sqrt(N)/(sqrt(N+1)sqrt(2(2N+1)))", move |n| {
            let nf = n as f64;
            -(2f64.sqrt()) * nf.sqrt() / ((nf + 1.0).sqrt() * s1(nf))
        }),
    );
    m[(2, 2)] = OperatorEntry::raising(
        1,
        NumberFunction::from_real("1/sqrt(2(2N+1))", move |n| 1.0 / s1(n as f64)),
    );
    m
}

/// The shifted diagonal `D~ = diag(√(2(2N+1)), 0, -√(2(2N+1)))`.
fn dressed_diagonal() -> QuantumMatrix {
    fn s1(n: u64) -> f64 {
        (2.0 * (2.0 * n as f64 + 1.0)).sqrt()
    }
    let mut m = QuantumMatrix::zero(3);
    m[(0, 0)] = OperatorEntry::diagonal(NumberFunction::from_real("sqrt(2(2N+1))", s1));
    m[(2, 2)] =
        OperatorEntry::diagonal(NumberFunction::from_real("-sqrt(2(2N+1))", |n| -s1(n)));
    m
}

/// Worst action difference of two quantum matrices over basis kets with
/// `n_from <= n <= max_n` in every component.
fn action_difference(
    a: &QuantumMatrix,
    b: &QuantumMatrix,
    n_from: u64,
    max_n: u64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..a.dim() {
        for n in n_from..=max_n {
            worst =
                worst.max(ket_distance(&a.apply_basis_ket(c, n), &b.apply_basis_ket(c, n)));
        }
    }
    worst
}

fn check_dressed_diagonal(_: &CheckConfig) -> Result<Outcome> {
    let base = diagonalize(Spin::from_twice(2), Mode::ClosedForm)?;
    let dressing = phase_dressing();
    let shifted = dressing.adjoint().multiply(&base.d)?.multiply(&dressing)?;
    // Equality holds above the vacuum; at n = 0 the dressing annihilates
    // while the printed diagonal takes the value sqrt(2).
    let printed = dressed_diagonal();
    let mut worst = action_difference(&shifted, &printed, 1, 30);
    // The dressed unitary built by the algebra also matches the printed one
    // above the vacuum.
    let built = base.u.multiply(&dressing)?;
    worst = worst.max(action_difference(&built, &dressed_unitary(), 1, 30));
    Ok(Outcome::new(worst).with("levels", "1..=30"))
}

fn check_dressed_reconstruction(config: &CheckConfig) -> Result<Outcome> {
    let u = dressed_unitary();
    let rebuilt = u.multiply(&dressed_diagonal())?.multiply(&u.adjoint())?;
    let lhs = realize(&rebuilt, config.cutoff)?;
    let rhs = realize(&spin_one_block(), config.cutoff)?;
    Ok(Outcome::new(interior_compare(&lhs, &rhs, required_margin(config, 2)?)?))
}

fn check_dressed_profiles(_: &CheckConfig) -> Result<Outcome> {
    let u = dressed_unitary();
    let left = u.adjoint().multiply(&u)?;
    let right = u.multiply(&u.adjoint())?;
    let domain = SubspaceProfile::new(vec![0, 1, 0]);
    let range = SubspaceProfile::new(vec![0, 0, 1]);
    let mut worst = profile_identity_defect(&left, &domain, 25);
    worst = worst.max(profile_identity_defect(&right, &range, 25));
    Ok(Outcome::new(worst)
        .with("domain", domain.to_string())
        .with("range", range.to_string()))
}

fn check_dressed_differs(_: &CheckConfig) -> Result<Outcome> {
    // The two diagonals must differ at every level: the factorization is
    // not unique. Residual is how far the observed minimum gap falls short
    // of a unit-scale separation.
    let base = diagonalize(Spin::from_twice(2), Mode::ClosedForm)?;
    let dressed = dressed_diagonal();
    let mut min_gap = f64::INFINITY;
    for n in 0..=30u64 {
        let gap = (base.d.entry(0, 0).diag().eval_real(n)
            - dressed.entry(0, 0).diag().eval_real(n))
        .abs();
        min_gap = min_gap.min(gap);
    }
    let required = 1e-3;
    Ok(Outcome::new((required - min_gap).max(0.0))
        .with("min_gap", format!("{min_gap:.6}"))
        .with("vacuum_gap", format!("{}", 6f64.sqrt() - 2f64.sqrt())))
}

// --- physics ----------------------------------------------------------------

fn check_vacuum_rabi(config: &CheckConfig) -> Result<Outcome> {
    let initial =
        InitialState { atoms: vec![AtomLevel::Excited], field: FieldState::Fock(0) };
    let times: Vec<f64> =
        (0..=64).map(|k| k as f64 * 2.0 * std::f64::consts::PI / 64.0).collect();
    let series = evolve_state(
        AtomCount::One,
        1.0,
        1.0,
        &initial,
        &times,
        config.cutoff,
        config.margin,
    )?;
    let mut worst: f64 = 0.0;
    for (k, &t) in times.iter().enumerate() {
        worst = worst.max((series.excited_populations[k][0] - t.cos().powi(2)).abs());
        worst = worst.max((series.norm[k] - 1.0).abs());
    }
    Ok(Outcome::new(worst).with("t_range", "0..=2pi").with("g", 1))
}

fn check_ground_stationary(config: &CheckConfig) -> Result<Outcome> {
    let initial =
        InitialState { atoms: vec![AtomLevel::Ground], field: FieldState::Fock(0) };
    let series = evolve_state(
        AtomCount::One,
        1.0,
        1.0,
        &initial,
        &[0.3, 1.1, 2.9],
        config.cutoff,
        config.margin,
    )?;
    let mut worst: f64 = 0.0;
    for (k, pops) in series.excited_populations.iter().enumerate() {
        worst = worst.max(pops[0].abs());
        worst = worst.max((series.norm[k] - 1.0).abs());
    }
    Ok(Outcome::new(worst))
}

fn check_norm_conservation(config: &CheckConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut ran = vec!["|ee, 0>".to_string()];
    let fock_case = InitialState {
        atoms: vec![AtomLevel::Excited, AtomLevel::Excited],
        field: FieldState::Fock(0),
    };
    let series = evolve_state(
        AtomCount::Two,
        1.0,
        1.0,
        &fock_case,
        &[0.5, 1.3, 2.9],
        config.cutoff,
        config.margin,
    )?;
    for norm in series.norm {
        worst = worst.max((norm - 1.0).abs());
    }
    // The coherent case needs cutoff headroom; skip it (and say so) when the
    // configured truncation cannot hold its tail.
    let coherent_case = InitialState {
        atoms: vec![AtomLevel::Excited; 3],
        field: FieldState::Coherent(C64::new(2.0, 0.0)),
    };
    match evolve_state(
        AtomCount::Three,
        1.0,
        1.0,
        &coherent_case,
        &[0.5, 1.3, 2.9],
        config.cutoff,
        config.margin,
    ) {
        Ok(series) => {
            for norm in series.norm {
                worst = worst.max((norm - 1.0).abs());
            }
            ran.push("|eee, coherent(2)>".to_string());
        }
        Err(crate::error::Error::TruncationMass { .. }) => {
            ran.push("coherent case skipped: cutoff too small for alpha = 2".to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(Outcome::new(worst).with("states", ran.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run_suite(&CheckConfig::default()).unwrap();
        for check in &report.checks {
            assert!(
                check.pass,
                "{} failed: residual {:.3e} > tolerance {:.3e}",
                check.name, check.residual, check.tolerance
            );
        }
        assert!(report.all_pass);
    }

    #[test]
    fn small_cutoff_with_reduced_margin_still_passes() {
        let config = CheckConfig {
            cutoff: 8,
            margin: 2,
            tg_values: vec![0.3, 0.7],
            ..CheckConfig::default()
        };
        let report = run_suite(&config).unwrap();
        for check in &report.checks {
            assert!(check.pass, "{} failed at cutoff 8: {:.3e}", check.name, check.residual);
        }
    }

    #[test]
    fn impossible_tolerance_reports_failures() {
        let config = CheckConfig {
            tol_override: Some(1e-300),
            only: Some("oracle_equivalence".to_string()),
            ..CheckConfig::default()
        };
        let report = run_suite(&config).unwrap();
        assert!(!report.all_pass);
        assert!(report.checks.iter().all(|c| !c.pass));
    }

    #[test]
    fn filter_selects_by_substring() {
        let config = CheckConfig {
            only: Some("spin32".to_string()),
            ..CheckConfig::default()
        };
        let report = run_suite(&config).unwrap();
        assert_eq!(report.checks.len(), 4);
        assert!(report.checks.iter().all(|c| c.name.starts_with("spin32")));
    }

    #[test]
    fn report_serializes_with_fixed_keys() {
        let config = CheckConfig {
            only: Some("one_atom_square".to_string()),
            ..CheckConfig::default()
        };
        let report = run_suite(&config).unwrap();
        let json = report.to_json();
        for key in
            ["\"name\"", "\"paper_anchor\"", "\"residual\"", "\"tolerance\"", "\"pass\"", "\"cutoff\"", "\"margin\"", "\"params\""]
        {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        // 17 significant digits in scientific notation.
        assert!(json.contains("e-") || json.contains("e0"));
    }

    #[test]
    fn reports_are_reproducible() {
        let config = CheckConfig {
            only: Some("normal_ordering".to_string()),
            ..CheckConfig::default()
        };
        let a = run_suite(&config).unwrap().to_json();
        let b = run_suite(&config).unwrap().to_json();
        assert_eq!(a, b);
    }
}
