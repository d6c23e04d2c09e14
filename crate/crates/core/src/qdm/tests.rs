use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fock::{interior_compare, realize};
use crate::model::build_spin_block;
use crate::opalg::{ket_distance, Ket};

const CUTOFF: usize = 40;
const MARGIN: usize = 6;

#[test]
fn printed_x_matrix_for_spin_one() {
    let es = classical_eigensystem(3);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let expected = DMatrix::from_row_slice(3, 3, &[
        0.5,  r,  0.5,
          r, 0.0, -r,
        0.5, -r,  0.5,
    ]);
    let diff = (es.x() - expected).iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-15, "spin-1 X deviates by {diff:.3e}");
    assert_eq!(es.slopes(), &[2, 0, -2]);
}

#[test]
fn two_dimensional_x_matrix() {
    let es = classical_eigensystem(2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let expected = DMatrix::from_row_slice(2, 2, &[r, r, r, -r]);
    let diff = (es.x() - expected).iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-15);
    assert_eq!(es.slopes(), &[1, -1]);
}

#[test]
fn second_recursion_row_is_slope_over_root() {
    for j_dim in 2..=8usize {
        let es = classical_eigensystem(j_dim);
        for col in 0..j_dim {
            let slope = (j_dim as i64 - 2 * (col as i64 + 1) + 1) as f64;
            let expected = slope / ((j_dim - 1) as f64).sqrt();
            assert!((es.raw()[(1, col)] - expected).abs() <= 1e-13);
        }
    }
}

#[test]
fn x_is_orthogonal_up_to_j_eight() {
    for j_dim in 2..=8usize {
        let defect = classical_eigensystem(j_dim).orthogonality_defect();
        assert!(defect <= 1e-12, "J = {j_dim}: {defect:.3e}");
    }
}

#[test]
fn classicalize_at_unit_z_reduces_to_x() {
    let out = classicalize(Spin::from_twice(2), C64::ONE).unwrap();
    let es = classical_eigensystem(3);
    for i in 0..3 {
        for k in 0..3 {
            assert!((out.w[(i, k)].re - es.x()[(i, k)]).abs() <= 1e-15);
            assert_eq!(out.w[(i, k)].im, 0.0);
        }
    }
    assert_eq!(out.eigenvalues, vec![2.0, 0.0, -2.0]);
}

#[test]
fn classicalize_spin_half_imaginary_z() {
    let out = classicalize(Spin::from_twice(1), C64::new(0.0, 1.0)).unwrap();
    assert_eq!(out.eigenvalues, vec![1.0, -1.0]);
    assert!(out.eigen_residual() <= 1e-12);
}

#[test]
fn classicalize_spin_three_halves_scaled() {
    let out = classicalize(Spin::from_twice(3), C64::new(2.0, 0.0)).unwrap();
    assert_eq!(out.eigenvalues, vec![6.0, 2.0, -2.0, -6.0]);
}

#[test]
fn classicalize_rejects_zero() {
    assert!(matches!(
        classicalize(Spin::from_twice(2), C64::ZERO),
        Err(Error::ZeroClassicalArgument)
    ));
}

#[test]
fn eigen_recursion_residual_for_random_z() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for twice in 1..=7u32 {
        for _ in 0..4 {
            let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if z.norm() < 1e-3 {
                continue;
            }
            let out = classicalize(Spin::from_twice(twice), z).unwrap();
            assert!(out.eigen_residual() <= 1e-12);
            assert!(out.reconstruction_residual() <= 1e-12);
        }
    }
}

#[test]
fn quantized_rows_carry_normalized_ladders() {
    // Applying U₁ to (|5⟩, 0, 0) yields (x₁₁|5⟩, x₂₁|6⟩, x₃₁|7⟩).
    let es = classical_eigensystem(3);
    let iso = quantize(&es);
    let out = iso.u1.apply_basis_ket(0, 5);
    for row in 0..3usize {
        let amp = out.get(&(row, 5 + row as u64)).copied().unwrap_or(C64::ZERO);
        assert!((amp.re - es.x()[(row, 0)]).abs() <= 1e-14);
        assert_eq!(amp.im, 0.0);
    }
}

#[test]
fn printed_u1_for_one_atom() {
    let es = classical_eigensystem(2);
    let iso = quantize(&es);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // Row 0: constants (1/√2, 1/√2); row 1: ±(1/√2)(1/√N)a†.
    for col in 0..2 {
        let sign = if col == 0 { 1.0 } else { -1.0 };
        assert!((iso.u1.entry(0, col).diag().eval(0).re - r).abs() <= 1e-15);
        let (p, f) = iso.u1.entry(1, col).raising_terms().next().unwrap();
        assert_eq!(p, 1);
        for n in 0..30u64 {
            let expected = sign * r / ((n + 1) as f64).sqrt();
            assert!((f.eval(n).re - expected).abs() <= 1e-14);
        }
    }
}

#[test]
fn printed_u1_middle_row_for_spin_one() {
    let es = classical_eigensystem(3);
    let iso = quantize(&es);
    // Row 1 (0-based): ((1/√2)(1/√N)a†, 0, -(1/√2)(1/√N)a†).
    assert!(iso.u1.entry(1, 1).is_structurally_zero());
    for (col, sign) in [(0usize, 1.0), (2usize, -1.0)] {
        let (p, f) = iso.u1.entry(1, col).raising_terms().next().unwrap();
        assert_eq!(p, 1);
        for n in 0..30u64 {
            let expected = sign / (2.0 * (n + 1) as f64).sqrt();
            assert!((f.eval(n).re - expected).abs() <= 1e-14);
        }
    }
}

fn profile_identity_defect(
    product: &QuantumMatrix,
    profile: &crate::opalg::SubspaceProfile,
    max_n: u64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for (c, n) in profile.basis_kets(max_n) {
        let mut expected = Ket::new();
        expected.insert((c, n), C64::ONE);
        let got = product.apply_basis_ket(c, n);
        worst = worst.max(ket_distance(&got, &expected));
    }
    worst
}

#[test]
fn isometry_identities_on_stated_subspaces() {
    for j_dim in 2..=5usize {
        let es = classical_eigensystem(j_dim);
        let iso = quantize(&es);
        let left = iso.u1.adjoint().multiply(&iso.u1).unwrap();
        let right = iso.u1.multiply(&iso.u1.adjoint()).unwrap();
        // U₁†U₁ = 1 on the whole space (hence on any stated subspace).
        assert!(profile_identity_defect(&left, &iso.domain, 20) <= 1e-12);
        // U₁U₁† = 1 on the staircase H ⊕ H₁ ⊕ ... ⊕ H_{J-1}.
        assert!(profile_identity_defect(&right, &iso.range, 20) <= 1e-12);
    }
}

#[test]
fn isometry_fails_below_the_staircase() {
    // U₁U₁† annihilates |component 1, n = 0⟩ for J = 2 rather than fixing it.
    let es = classical_eigensystem(2);
    let iso = quantize(&es);
    let right = iso.u1.multiply(&iso.u1.adjoint()).unwrap();
    let out = right.apply_basis_ket(1, 0);
    assert!(ket_norm_of(&out) <= 1e-14);
}

fn ket_norm_of(k: &Ket) -> f64 {
    crate::opalg::ket_norm(k)
}

#[test]
fn reduction_for_one_atom_is_diagonal_sqrt() {
    let block = build_spin_block(Spin::from_twice(1)).unwrap();
    let es = classical_eigensystem(2);
    let reduced = reduce(&block, &quantize(&es)).unwrap();
    for n in 0..=40u64 {
        let m = reduced.level_matrix(n);
        let root = ((n + 1) as f64).sqrt();
        assert!((m[(0, 0)] - root).abs() <= 1e-12);
        assert!((m[(1, 1)] + root).abs() <= 1e-12);
        assert!(m[(0, 1)].abs() <= 1e-13);
    }
}

#[test]
fn reduction_for_spin_one_matches_printed_matrix() {
    let block = build_spin_block(Spin::from_twice(2)).unwrap();
    let es = classical_eigensystem(3);
    let reduced = reduce(&block, &quantize(&es)).unwrap();
    for n in 0..=40u64 {
        let m = reduced.level_matrix(n);
        let r1 = ((n + 1) as f64).sqrt();
        let r2 = ((n + 2) as f64).sqrt();
        let corner = r1 + r2;
        let off = -(r2 - r1) / 2f64.sqrt();
        assert!((m[(0, 0)] - corner).abs() <= 1e-12);
        assert!((m[(2, 2)] + corner).abs() <= 1e-12);
        assert!((m[(0, 1)] - off).abs() <= 1e-12);
        assert!((m[(1, 2)] + off).abs() <= 1e-12);
        assert!(m[(1, 1)].abs() <= 1e-13);
        assert!(m[(0, 2)].abs() <= 1e-13);
    }
}

#[test]
fn reduction_is_symmetric() {
    for twice in [1, 2, 3, 4] {
        let j = Spin::from_twice(twice);
        let block = build_spin_block(j).unwrap();
        let es = classical_eigensystem(j.block_dim());
        let reduced = reduce(&block, &quantize(&es)).unwrap();
        assert!(reduced.symmetry_defect(50) <= 1e-12);
    }
}

#[test]
fn reduction_matches_closed_formula() {
    // Dual route: operator algebra vs the printed summation formula.
    for twice in 1..=5u32 {
        let j = Spin::from_twice(twice);
        let block = build_spin_block(j).unwrap();
        let es = classical_eigensystem(j.block_dim());
        let reduced = reduce(&block, &quantize(&es)).unwrap();
        let formula = reduced_formula(&es);
        let diff = reduced.matrix().max_coefficient_diff(&formula, 50);
        assert!(diff <= 1e-12, "j = {j}: {diff:.3e}");
    }
}

#[test]
fn closed_form_diagonal_for_spin_one() {
    let block = build_spin_block(Spin::from_twice(2)).unwrap();
    let es = classical_eigensystem(3);
    let reduced = reduce(&block, &quantize(&es)).unwrap();
    let (u2, d) = diagonalize_reduced(&reduced, Mode::ClosedForm).unwrap();
    for n in 0..=30u64 {
        let s = (2.0 * (2.0 * n as f64 + 3.0)).sqrt();
        assert!((d.entry(0, 0).diag().eval_real(n) - s).abs() <= 1e-12);
        assert!(d.entry(1, 1).diag().eval_real(n).abs() <= 1e-15);
        assert!((d.entry(2, 2).diag().eval_real(n) + s).abs() <= 1e-12);
        // Printed center entry of U₂.
        let center = ((n as f64 + 2.0).sqrt() + (n as f64 + 1.0).sqrt()) / s;
        assert!((u2.entry(1, 1).diag().eval_real(n) - center).abs() <= 1e-12);
    }
}

#[test]
fn per_level_matches_closed_form_for_spin_one() {
    let block = build_spin_block(Spin::from_twice(2)).unwrap();
    let es = classical_eigensystem(3);
    let reduced = reduce(&block, &quantize(&es)).unwrap();
    let (u2_closed, d_closed) = diagonalize_reduced(&reduced, Mode::ClosedForm).unwrap();
    let (u2_level, d_level) = diagonalize_reduced(&reduced, Mode::PerLevel).unwrap();
    for n in 0..=30u64 {
        for i in 0..3 {
            let a = d_closed.entry(i, i).diag().eval_real(n);
            let b = d_level.entry(i, i).diag().eval_real(n);
            assert!((a - b).abs() <= 1e-10, "D[{i}]({n}): {a} vs {b}");
        }
        // Columns agree up to the per-level sign convention.
        for col in 0..3 {
            let lead = (0..3)
                .find(|&row| u2_closed.entry(row, col).diag().eval_real(n).abs() > 1e-9)
                .unwrap();
            let sign = u2_closed.entry(lead, col).diag().eval_real(n).signum();
            for row in 0..3 {
                let a = sign * u2_closed.entry(row, col).diag().eval_real(n);
                let b = u2_level.entry(row, col).diag().eval_real(n);
                assert!((a - b).abs() <= 1e-10, "U₂[{row}][{col}]({n})");
            }
        }
    }
}

#[test]
fn per_level_vacuum_eigenvalues_for_spin_one() {
    // Independent 3x3 eigensolve of R(0) must give (√6, 0, -√6).
    let block = build_spin_block(Spin::from_twice(2)).unwrap();
    let es = classical_eigensystem(3);
    let reduced = reduce(&block, &quantize(&es)).unwrap();
    let table = PerLevelTable::build(&reduced).unwrap();
    let expected = 6f64.sqrt();
    assert!((table.eigenvalue(0, 0) - expected).abs() <= 1e-12);
    assert!(table.eigenvalue(1, 0).abs() <= 1e-12);
    assert!((table.eigenvalue(2, 0) + expected).abs() <= 1e-12);
}

#[test]
fn one_atom_diagonalization_matches_printed_factors() {
    let result = diagonalize(Spin::from_twice(1), Mode::ClosedForm).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (col, sign) in [(0usize, 1.0), (1usize, -1.0)] {
        assert!((result.u.entry(0, col).diag().eval_real(5) - r).abs() <= 1e-14);
        let (p, f) = result.u.entry(1, col).raising_terms().next().unwrap();
        assert_eq!(p, 1);
        for n in 0..30u64 {
            let expected = sign * r / ((n + 1) as f64).sqrt();
            assert!((f.eval(n).re - expected).abs() <= 1e-14);
        }
        let d = result.d.entry(col, col).diag();
        for n in 0..30u64 {
            let expected = sign * ((n + 1) as f64).sqrt();
            assert!((d.eval_real(n) - expected).abs() <= 1e-14);
        }
    }
}

#[test]
fn two_atom_diagonalization_matches_printed_u() {
    let result = diagonalize(Spin::from_twice(2), Mode::ClosedForm).unwrap();
    let s = |n: f64| (2.0 * (2.0 * n + 3.0)).sqrt();
    for n in 0..=30u64 {
        let nf = n as f64;
        // First row: (-√(N+1)/s, √2√(N+2)/s, √(N+1)/s).
        let top = [
            -((nf + 1.0).sqrt()) / s(nf),
            2f64.sqrt() * (nf + 2.0).sqrt() / s(nf),
            (nf + 1.0).sqrt() / s(nf),
        ];
        for (col, expected) in top.into_iter().enumerate() {
            let got = result.u.entry(0, col).diag().eval_real(n);
            assert!((got - expected).abs() <= 1e-12, "U[0][{col}]({n})");
        }
        // Middle row: (-(1/√2√N)a†, 0, -(1/√2√N)a†), canonically shifted.
        for col in [0usize, 2] {
            let (p, f) = result.u.entry(1, col).raising_terms().next().unwrap();
            assert_eq!(p, 1);
            let expected = -1.0 / (2.0 * (nf + 1.0)).sqrt();
            assert!((f.eval(n).re - expected).abs() <= 1e-12);
        }
        assert!(result.u.entry(1, 1).max_ladder_residue(30) <= 1e-12);
        // Bottom row carries (a†)² with 1/(√(N+1)√(2(2N+3))) weights.
        let bottom = [
            -1.0 / ((nf + 1.0).sqrt() * s(nf)),
            -2f64.sqrt() / ((nf + 2.0).sqrt() * s(nf)),
            1.0 / ((nf + 1.0).sqrt() * s(nf)),
        ];
        for (col, expected) in bottom.into_iter().enumerate() {
            let (p, f) = result.u.entry(2, col).raising_terms().next().unwrap();
            assert_eq!(p, 2);
            assert!((f.eval(n).re - expected).abs() <= 1e-12, "U[2][{col}]({n})");
        }
    }
}

fn reconstruction_residual(result: &DiagonalizationResult) -> f64 {
    let block = build_spin_block(result.j).unwrap();
    let rebuilt = result.reconstruct().unwrap();
    let x = realize(&rebuilt, CUTOFF).unwrap();
    let y = realize(block.matrix(), CUTOFF).unwrap();
    interior_compare(&x, &y, MARGIN).unwrap()
}

#[test]
fn closed_form_reconstructions() {
    for twice in [1u32, 2, 3] {
        let result = diagonalize(Spin::from_twice(twice), Mode::ClosedForm).unwrap();
        let residual = reconstruction_residual(&result);
        assert!(residual <= 1e-9, "j = {}: {residual:.3e}", result.j);
    }
}

#[test]
fn per_level_reconstructions() {
    for twice in [1u32, 2, 3, 4] {
        let result = diagonalize(Spin::from_twice(twice), Mode::PerLevel).unwrap();
        let residual = reconstruction_residual(&result);
        assert!(residual <= 1e-9, "j = {}: {residual:.3e}", result.j);
    }
}

#[test]
fn diagonalization_unitarity_profiles() {
    for twice in [1u32, 2, 3] {
        let result = diagonalize(Spin::from_twice(twice), Mode::ClosedForm).unwrap();
        let left = result.u.adjoint().multiply(&result.u).unwrap();
        let right = result.u.multiply(&result.u.adjoint()).unwrap();
        assert!(profile_identity_defect(&left, &result.domain, 18) <= 1e-12);
        assert!(profile_identity_defect(&right, &result.range, 18) <= 1e-12);
    }
}

#[test]
fn u_contains_no_lowering_operators() {
    for twice in [1u32, 2, 3] {
        let result = diagonalize(Spin::from_twice(twice), Mode::ClosedForm).unwrap();
        for i in 0..result.u.dim() {
            for k in 0..result.u.dim() {
                assert_eq!(result.u.entry(i, k).lowering_terms().count(), 0);
            }
        }
    }
}

#[test]
fn closed_form_beyond_three_halves_is_rejected() {
    assert!(matches!(
        diagonalize(Spin::from_twice(4), Mode::ClosedForm),
        Err(Error::NoClosedForm(_))
    ));
}

#[test]
fn spin_half_exponential_reproduces_the_closed_form() {
    // U e^{-itgD} U† agrees with the closed form on the staircase domain;
    // below it (|component 1, 0⟩) the factorized form annihilates instead,
    // so the comparison is an interior one.
    let (t, g) = (0.7, 1.0);
    let result = diagonalize(Spin::from_twice(1), Mode::ClosedForm).unwrap();
    let via_diag = realize(&result.exponential(t, g).unwrap(), CUTOFF).unwrap();
    let direct = realize(&crate::evolve::evolution_one(t, g), CUTOFF).unwrap();
    assert!(interior_compare(&via_diag, &direct, MARGIN).unwrap() <= 1e-10);
}
