//! Closed-form evolution operators `e^{-itgA_n}` for one, two, and three
//! atoms, the full resonant propagator, and state evolution.
//!
//! The spin-block exponentials are assembled from spectral functions of the
//! number operator and conjugated back through the orthogonal intertwiners.
//! Trigonometric factors are evaluated through the entire functions
//! `cosq(x) = cos(√x)` and `sincq(x) = sin(√x)/√x`, which stay valid where a
//! spectral argument dips to zero or below; every such branch comes with a
//! coefficient that vanishes there, and a runtime guard enforces it.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{
    build_decomposition, build_hamiltonian_phases, AtomCount, PhaseFactors,
};
use crate::opalg::{NumberFunction, OperatorEntry, QuantumMatrix};

pub mod spectral {
    //! Spectral functions entering the two- and three-atom exponentials.

    /// `cos(√x)` continued to all real `x` (hyperbolic branch for `x < 0`).
    pub fn cosq(x: f64) -> f64 {
        if x >= 0.0 {
            x.sqrt().cos()
        } else {
            (-x).sqrt().cosh()
        }
    }

    /// `sin(√x)/√x` continued to all real `x`.
    pub fn sincq(x: f64) -> f64 {
        if x.abs() < 1e-12 {
            1.0 - x / 6.0 + x * x / 120.0
        } else if x > 0.0 {
            let r = x.sqrt();
            r.sin() / r
        } else {
            let r = (-x).sqrt();
            r.sinh() / r
        }
    }

    /// Discriminant `d(N) = 16N² + 9`.
    pub fn d(m: f64) -> f64 {
        16.0 * m * m + 9.0
    }

    /// `λ±(N) = 5N ± √d(N)`.
    pub fn lambda_plus(m: f64) -> f64 {
        5.0 * m + d(m).sqrt()
    }

    pub fn lambda_minus(m: f64) -> f64 {
        5.0 * m - d(m).sqrt()
    }

    /// `v±(N) = -2N - 3 ± √d(N)`.
    pub fn v_plus(m: f64) -> f64 {
        -2.0 * m - 3.0 + d(m).sqrt()
    }

    pub fn v_minus(m: f64) -> f64 {
        -2.0 * m - 3.0 - d(m).sqrt()
    }

    /// `w±(N) = 2N - 3 ± √d(N)`.
    pub fn w_plus(m: f64) -> f64 {
        2.0 * m - 3.0 + d(m).sqrt()
    }

    pub fn w_minus(m: f64) -> f64 {
        2.0 * m - 3.0 - d(m).sqrt()
    }

    /// `coeff · cos(tg√λ)` with the negative-branch guard: a hyperbolic
    /// branch may only appear multiplied by a vanishing coefficient.
    pub fn cos_term(tau: f64, lambda: f64, coeff: f64) -> f64 {
        if lambda < 0.0 {
            assert!(
                coeff.abs() <= 1e-12,
                "hyperbolic branch (λ = {lambda}) with coefficient {coeff}"
            );
            0.0
        } else {
            coeff * cosq(tau * tau * lambda)
        }
    }

    /// `coeff · sin(tg√λ)/√λ` with the same guard.
    pub fn sinc_term(tau: f64, lambda: f64, coeff: f64) -> f64 {
        if lambda < 0.0 {
            assert!(
                coeff.abs() <= 1e-12,
                "hyperbolic branch (λ = {lambda}) with coefficient {coeff}"
            );
            0.0
        } else {
            coeff * tau * sincq(tau * tau * lambda)
        }
    }

    /// Two-atom spectral argument `2(2N+1)`.
    pub fn two_atom_lambda(m: f64) -> f64 {
        2.0 * (2.0 * m + 1.0)
    }

    /// Two-atom `f(N) = (-1 + cos(tg√(2(2N+1))))/2`, total on all integers
    /// through the entire-function branch.
    pub fn two_atom_f(tau: f64, m: f64) -> f64 {
        (-1.0 + cosq(tau * tau * two_atom_lambda(m))) / 2.0
    }

    /// Two-atom `h(N) = sin(tg√(2(2N+1)))/√(2N+1)`.
    pub fn two_atom_h(tau: f64, m: f64) -> f64 {
        std::f64::consts::SQRT_2 * tau * sincq(tau * tau * two_atom_lambda(m))
    }

    /// Three-atom diagonal family.
    pub fn f2(tau: f64, m: f64) -> f64 {
        (cos_term(tau, lambda_plus(m), v_plus(m)) - cos_term(tau, lambda_minus(m), v_minus(m)))
            / (2.0 * d(m).sqrt())
    }

    pub fn f1(tau: f64, m: f64) -> f64 {
        (cos_term(tau, lambda_plus(m), w_plus(m)) - cos_term(tau, lambda_minus(m), w_minus(m)))
            / (2.0 * d(m).sqrt())
    }

    pub fn f0(tau: f64, m: f64) -> f64 {
        (cos_term(tau, lambda_minus(m), v_plus(m)) - cos_term(tau, lambda_plus(m), v_minus(m)))
            / (2.0 * d(m).sqrt())
    }

    pub fn f_minus1(tau: f64, m: f64) -> f64 {
        (cos_term(tau, lambda_minus(m), w_plus(m)) - cos_term(tau, lambda_plus(m), w_minus(m)))
            / (2.0 * d(m).sqrt())
    }

    /// `h₁(N) = {cos(tg√λ₊) - cos(tg√λ₋)}/(2√d)`.
    pub fn h1(tau: f64, m: f64) -> f64 {
        (cos_term(tau, lambda_plus(m), 1.0) - cos_term(tau, lambda_minus(m), 1.0))
            / (2.0 * d(m).sqrt())
    }

    /// `F₁(N) = {(w₊/√λ₊)sin(tg√λ₊) - (w₋/√λ₋)sin(tg√λ₋)}/(2√d)`.
    pub fn cap_f1(tau: f64, m: f64) -> f64 {
        (sinc_term(tau, lambda_plus(m), w_plus(m)) - sinc_term(tau, lambda_minus(m), w_minus(m)))
            / (2.0 * d(m).sqrt())
    }

    /// `F₀(N) = {(v₊/√λ₋)sin(tg√λ₋) - (v₋/√λ₊)sin(tg√λ₊)}/(2√d)`.
    pub fn cap_f0(tau: f64, m: f64) -> f64 {
        (sinc_term(tau, lambda_minus(m), v_plus(m)) - sinc_term(tau, lambda_plus(m), v_minus(m)))
            / (2.0 * d(m).sqrt())
    }

    /// `H₁(N) = {√λ₊ sin(tg√λ₊) - √λ₋ sin(tg√λ₋)}/(2√d)`.
    pub fn cap_h1(tau: f64, m: f64) -> f64 {
        (sinc_term(tau, lambda_plus(m), lambda_plus(m))
            - sinc_term(tau, lambda_minus(m), lambda_minus(m)))
            / (2.0 * d(m).sqrt())
    }

    /// `H₀(N) = {(1/√λ₊)sin(tg√λ₊) - (1/√λ₋)sin(tg√λ₋)}/(2√d)`.
    pub fn cap_h0(tau: f64, m: f64) -> f64 {
        (sinc_term(tau, lambda_plus(m), 1.0) - sinc_term(tau, lambda_minus(m), 1.0))
            / (2.0 * d(m).sqrt())
    }
}

use spectral::*;

const MINUS_I: C64 = C64::new(0.0, -1.0);

fn real_fn(
    label: impl Into<String>,
    f: impl Fn(u64) -> f64 + Send + Sync + 'static,
) -> NumberFunction {
    NumberFunction::from_real(label, f)
}

/// The 2x2 closed form
/// `[[cos(tg√(N+1)), -i (sin(tg√(N+1))/√(N+1)) a], [-i a† (...), cos(tg√N)]]`.
pub fn evolution_one(t: f64, g: f64) -> QuantumMatrix {
    let tau = t * g;
    let mut m = QuantumMatrix::zero(2);
    m[(0, 0)] = OperatorEntry::diagonal(real_fn("cos(tg sqrt(N+1))", move |n| {
        cosq(tau * tau * (n as f64 + 1.0))
    }));
    let off = NumberFunction::new("-i sin(tg sqrt(N+1))/sqrt(N+1)", move |n| {
        MINUS_I * tau * sincq(tau * tau * (n as f64 + 1.0))
    });
    m[(0, 1)] = OperatorEntry::lowering(off.clone(), 1);
    m[(1, 0)] = OperatorEntry::raising(1, off);
    m[(1, 1)] =
        OperatorEntry::diagonal(real_fn("cos(tg sqrt(N))", move |n| cosq(tau * tau * n as f64)));
    m
}

/// The 3x3 exponential of the spin-1 block.
pub fn spin_one_exponential(t: f64, g: f64) -> QuantumMatrix {
    let tau = t * g;
    let mut m = QuantumMatrix::zero(3);
    m[(0, 0)] = OperatorEntry::diagonal(real_fn("1 + (2N+2)/(2N+3) f(N+1)", move |n| {
        let n = n as f64;
        1.0 + (2.0 * n + 2.0) / (2.0 * n + 3.0) * two_atom_f(tau, n + 1.0)
    }));
    let h_shift1 = NumberFunction::new("-i h(N+1)", move |n| {
        MINUS_I * two_atom_h(tau, n as f64 + 1.0)
    });
    let h_plain =
        NumberFunction::new("-i h(N)", move |n| MINUS_I * two_atom_h(tau, n as f64));
    let f_over = real_fn("2/(2N+3) f(N+1)", move |n| {
        let n = n as f64;
        2.0 / (2.0 * n + 3.0) * two_atom_f(tau, n + 1.0)
    });
    m[(0, 1)] = OperatorEntry::lowering(h_shift1.clone(), 1);
    m[(0, 2)] = OperatorEntry::lowering(f_over.clone(), 2);
    m[(1, 0)] = OperatorEntry::raising(1, h_shift1);
    m[(1, 1)] = OperatorEntry::diagonal(real_fn("1 + 2f(N)", move |n| {
        1.0 + 2.0 * two_atom_f(tau, n as f64)
    }));
    m[(1, 2)] = OperatorEntry::lowering(h_plain.clone(), 1);
    m[(2, 0)] = OperatorEntry::raising(2, f_over);
    m[(2, 1)] = OperatorEntry::raising(1, h_plain);
    m[(2, 2)] = OperatorEntry::diagonal(real_fn("1 + 2N/(2N-1) f(N-1)", move |n| {
        let nf = n as f64;
        let coeff = 2.0 * nf / (2.0 * nf - 1.0);
        // At n = 0 the spectral argument is negative and the coefficient
        // vanishes exactly; route through the guard rather than f directly.
        let lambda = two_atom_lambda(nf - 1.0);
        1.0 + (cos_term(tau, lambda, coeff) - coeff) / 2.0
    }));
    m
}

/// The 4x4 closed form `e^{-itgA_2}`: scalar-1 block plus the spin-1
/// exponential, conjugated back through the two-atom intertwiner.
pub fn evolution_two(t: f64, g: f64) -> QuantumMatrix {
    let d = build_decomposition(AtomCount::Two).expect("two-atom decomposition");
    let blocks =
        QuantumMatrix::direct_sum(&[QuantumMatrix::identity(1), spin_one_exponential(t, g)]);
    blocks.conjugate_by_scalar_transposed(&d.t).expect("dimensions match")
}

/// The 4x4 exponential of the spin-3/2 block.
pub fn spin_three_halves_exponential(t: f64, g: f64) -> QuantumMatrix {
    let tau = t * g;
    let s3 = 3f64.sqrt();
    let mut m = QuantumMatrix::zero(4);

    m[(0, 0)] =
        OperatorEntry::diagonal(real_fn("f2(N+2)", move |n| f2(tau, n as f64 + 2.0)));
    m[(1, 1)] =
        OperatorEntry::diagonal(real_fn("f1(N+1)", move |n| f1(tau, n as f64 + 1.0)));
    m[(2, 2)] = OperatorEntry::diagonal(real_fn("f0(N)", move |n| f0(tau, n as f64)));
    m[(3, 3)] = OperatorEntry::diagonal(real_fn("f-1(N-1)", move |n| {
        f_minus1(tau, n as f64 - 1.0)
    }));

    let cap_f1_s2 = NumberFunction::new("-sqrt(3) i F1(N+2)", move |n| {
        MINUS_I * s3 * cap_f1(tau, n as f64 + 2.0)
    });
    let h1_s2 = NumberFunction::new("2 sqrt(3) h1(N+2)", move |n| {
        C64::new(2.0 * s3 * h1(tau, n as f64 + 2.0), 0.0)
    });
    let h1_s1 = NumberFunction::new("2 sqrt(3) h1(N+1)", move |n| {
        C64::new(2.0 * s3 * h1(tau, n as f64 + 1.0), 0.0)
    });
    let cap_h0_s2 = NumberFunction::new("-6i H0(N+2)", move |n| {
        MINUS_I * 6.0 * cap_h0(tau, n as f64 + 2.0)
    });
    let cap_h1_s1 = NumberFunction::new("-2i H1(N+1)", move |n| {
        MINUS_I * 2.0 * cap_h1(tau, n as f64 + 1.0)
    });
    let cap_f0_s0 = NumberFunction::new("-sqrt(3) i F0(N)", move |n| {
        MINUS_I * s3 * cap_f0(tau, n as f64)
    });

    m[(0, 1)] = OperatorEntry::lowering(cap_f1_s2.clone(), 1);
    m[(0, 2)] = OperatorEntry::lowering(h1_s2.clone(), 2);
    m[(0, 3)] = OperatorEntry::lowering(cap_h0_s2.clone(), 3);
    m[(1, 0)] = OperatorEntry::raising(1, cap_f1_s2);
    m[(1, 2)] = OperatorEntry::lowering(cap_h1_s1.clone(), 1);
    m[(1, 3)] = OperatorEntry::lowering(h1_s1.clone(), 2);
    m[(2, 0)] = OperatorEntry::raising(2, h1_s2);
    m[(2, 1)] = OperatorEntry::raising(1, cap_h1_s1);
    m[(2, 3)] = OperatorEntry::lowering(cap_f0_s0.clone(), 1);
    m[(3, 0)] = OperatorEntry::raising(3, cap_h0_s2);
    m[(3, 1)] = OperatorEntry::raising(2, h1_s1);
    m[(3, 2)] = OperatorEntry::raising(1, cap_f0_s0);
    m
}

/// The 8x8 closed form `e^{-itgA_3}`: two spin-1/2 exponentials and the
/// spin-3/2 exponential, conjugated back through the three-atom intertwiner.
pub fn evolution_three(t: f64, g: f64) -> QuantumMatrix {
    let d = build_decomposition(AtomCount::Three).expect("three-atom decomposition");
    let half = evolution_one(t, g);
    let blocks = QuantumMatrix::direct_sum(&[
        half.clone(),
        half,
        spin_three_halves_exponential(t, g),
    ]);
    blocks.conjugate_by_scalar_transposed(&d.t).expect("dimensions match")
}

/// Closed-form `e^{-itgA_n}` for the supported atom counts.
pub fn interaction_exponential(n: AtomCount, t: f64, g: f64) -> QuantumMatrix {
    match n {
        AtomCount::One => evolution_one(t, g),
        AtomCount::Two => evolution_two(t, g),
        AtomCount::Three => evolution_three(t, g),
    }
}

/// The resonant propagator `U(t) = (e^{-itωS3} ⊗ e^{-itω a†a}) e^{-itgA_n}`.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub n: AtomCount,
    pub t: f64,
    pub g: f64,
    pub omega: f64,
    pub interaction: QuantumMatrix,
    pub phases: PhaseFactors,
}

pub fn full_propagator(n: AtomCount, t: f64, g: f64, omega: f64) -> Propagator {
    Propagator {
        n,
        t,
        g,
        omega,
        interaction: interaction_exponential(n, t, g),
        phases: build_hamiltonian_phases(n, omega, t),
    }
}

impl Propagator {
    /// Applies the propagator to a truncated state: interaction first, then
    /// the free phases (the two factors commute exactly).
    pub fn apply(&self, state: &State) -> State {
        let levels = state.cutoff + 1;
        let mut out = State::zero(state.blockdim, state.cutoff);
        for comp in 0..state.blockdim {
            for n in 0..levels {
                let amp = state.amps[comp * levels + n];
                if amp == C64::ZERO {
                    continue;
                }
                for row in 0..state.blockdim {
                    let e = self.interaction.entry(row, comp);
                    if e.is_structurally_zero() {
                        continue;
                    }
                    for (m, a) in e.apply(n as u64) {
                        if (m as usize) < levels {
                            out.amps[row * levels + m as usize] += a * amp;
                        }
                    }
                }
            }
        }
        for comp in 0..state.blockdim {
            let atom_phase = self.phases.atom[comp];
            for n in 0..levels {
                out.amps[comp * levels + n] *= atom_phase * self.phases.field.eval(n as u64);
            }
        }
        out
    }
}

/// Truncated atom-field state vector, component-major like
/// [`FockRealization`](crate::fock::FockRealization).
#[derive(Clone, Debug)]
pub struct State {
    blockdim: usize,
    cutoff: usize,
    amps: Vec<C64>,
}

impl State {
    pub fn zero(blockdim: usize, cutoff: usize) -> Self {
        Self { blockdim, cutoff, amps: vec![C64::ZERO; blockdim * (cutoff + 1)] }
    }

    pub fn blockdim(&self) -> usize {
        self.blockdim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, component: usize, n: usize) -> C64 {
        self.amps[component * (self.cutoff + 1) + n]
    }

    pub fn set_amplitude(&mut self, component: usize, n: usize, amp: C64) {
        self.amps[component * (self.cutoff + 1) + n] = amp;
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mean_photon(&self) -> f64 {
        let levels = self.cutoff + 1;
        self.amps
            .iter()
            .enumerate()
            .map(|(i, c)| (i % levels) as f64 * c.norm_sqr())
            .sum()
    }

    /// Excited-state population of each atom. Component bit `k` (atom 1 is
    /// the most significant bit) is 0 when atom `k` is excited.
    pub fn excited_populations(&self, atoms: usize) -> Vec<f64> {
        let levels = self.cutoff + 1;
        (0..atoms)
            .map(|atom| {
                let bit = 1 << (atoms - 1 - atom);
                (0..self.blockdim)
                    .filter(|comp| comp & bit == 0)
                    .flat_map(|comp| {
                        self.amps[comp * levels..(comp + 1) * levels].iter()
                    })
                    .map(|c| c.norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// Probability mass per total excitation `(excited atoms) + (photons)`.
    pub fn excitation_distribution(&self, spin_excitation: &[u32]) -> Vec<f64> {
        let levels = self.cutoff + 1;
        let max_e = spin_excitation.iter().copied().max().unwrap_or(0) as usize + self.cutoff;
        let mut dist = vec![0.0; max_e + 1];
        for comp in 0..self.blockdim {
            for n in 0..levels {
                dist[spin_excitation[comp] as usize + n] +=
                    self.amps[comp * levels + n].norm_sqr();
            }
        }
        dist
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomLevel {
    Excited,
    Ground,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldState {
    Fock(u64),
    Coherent(C64),
}

#[derive(Clone, Debug)]
pub struct InitialState {
    pub atoms: Vec<AtomLevel>,
    pub field: FieldState,
}

const COHERENT_TAIL_LIMIT: f64 = 1e-12;

/// Builds the truncated initial state. Coherent fields must leave at most
/// `1e-12` probability mass above `cutoff - margin`; the kept amplitudes are
/// then renormalized.
pub fn build_initial(
    n: AtomCount,
    initial: &InitialState,
    cutoff: usize,
    margin: usize,
) -> Result<State> {
    if initial.atoms.len() != n.count() {
        return Err(Error::InvalidStateSpec(format!(
            "expected {} atom levels, got {}",
            n.count(),
            initial.atoms.len()
        )));
    }
    let component = initial
        .atoms
        .iter()
        .fold(0usize, |acc, level| {
            (acc << 1) | usize::from(*level == AtomLevel::Ground)
        });
    let mut state = State::zero(n.dim(), cutoff);
    match initial.field {
        FieldState::Fock(m) => {
            if m as usize > cutoff.saturating_sub(margin) {
                return Err(Error::FockLevelTooHigh { level: m, cutoff, margin });
            }
            state.set_amplitude(component, m as usize, C64::ONE);
        }
        FieldState::Coherent(alpha) => {
            // c_m = e^{-|α|²/2} α^m / √(m!), built iteratively.
            let safe_level = cutoff.saturating_sub(margin);
            let mut amps = Vec::with_capacity(cutoff + 1);
            let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
            let mut safe_mass = 0.0;
            for m in 0..=cutoff {
                amps.push(c);
                if m <= safe_level {
                    safe_mass += c.norm_sqr();
                }
                c *= alpha / ((m + 1) as f64).sqrt();
            }
            let tail = 1.0 - safe_mass;
            if tail > COHERENT_TAIL_LIMIT {
                return Err(Error::TruncationMass { mass: tail, limit: COHERENT_TAIL_LIMIT });
            }
            let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for (m, amp) in amps.into_iter().enumerate() {
                state.set_amplitude(component, m, amp / norm);
            }
        }
    }
    Ok(state)
}

/// Per-time-point observables of an evolved state.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub excited_populations: Vec<Vec<f64>>,
    pub mean_photon: Vec<f64>,
    pub norm: Vec<f64>,
    pub amplitudes: Vec<Vec<C64>>,
}

/// Evolves the initial state with the closed-form propagator at each
/// requested time (no stepping; each point is exact).
pub fn evolve_state(
    n: AtomCount,
    g: f64,
    omega: f64,
    initial: &InitialState,
    times: &[f64],
    cutoff: usize,
    margin: usize,
) -> Result<TimeSeries> {
    let state0 = build_initial(n, initial, cutoff, margin)?;
    let atoms = n.count();
    let mut out = TimeSeries {
        times: times.to_vec(),
        excited_populations: Vec::with_capacity(times.len()),
        mean_photon: Vec::with_capacity(times.len()),
        norm: Vec::with_capacity(times.len()),
        amplitudes: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let propagator = full_propagator(n, t, g, omega);
        let state = propagator.apply(&state0);
        out.excited_populations.push(state.excited_populations(atoms));
        out.mean_photon.push(state.mean_photon());
        out.norm.push(state.norm());
        out.amplitudes.push(state.amplitudes().to_vec());
    }
    Ok(out)
}
