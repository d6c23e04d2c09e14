use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

use super::number_function::NumberFunction;

/// Normal-form operator on Fock space:
///
/// ```text
/// f0(N)  +  Σ_{p>=1} (a†)^p f_p(N)  +  Σ_{q>=1} g_q(N) a^q
/// ```
///
/// Raising powers sit to the left of their number function, lowering powers
/// to the right; constructors accept either side and normalize with the
/// commutation shift `a f(N) = f(N+1) a`, `f(N) a† = a† f(N+1)`. At most one
/// term is kept per power.
#[derive(Clone)]
pub struct OperatorEntry {
    diag: NumberFunction,
    raising: BTreeMap<u32, NumberFunction>,
    lowering: BTreeMap<u32, NumberFunction>,
}

impl OperatorEntry {
    pub fn zero() -> Self {
        Self {
            diag: NumberFunction::zero(),
            raising: BTreeMap::new(),
            lowering: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::diagonal(NumberFunction::one())
    }

    pub fn diagonal(f: NumberFunction) -> Self {
        Self { diag: f, raising: BTreeMap::new(), lowering: BTreeMap::new() }
    }

    /// `(a†)^p f(N)` with the function already on the right of the ladder.
    pub fn raising(p: u32, f: NumberFunction) -> Self {
        assert!(p >= 1, "raising power must be >= 1");
        let mut raising = BTreeMap::new();
        raising.insert(p, f);
        Self { diag: NumberFunction::zero(), raising, lowering: BTreeMap::new() }
    }

    /// `f(N) (a†)^p`, normalized to `(a†)^p f(N+p)`.
    pub fn raising_from_left(f: NumberFunction, p: u32) -> Self {
        Self::raising(p, f.shift(p as i64))
    }

    /// `g(N) a^q` with the function already on the left of the ladder.
    pub fn lowering(g: NumberFunction, q: u32) -> Self {
        assert!(q >= 1, "lowering power must be >= 1");
        let mut lowering = BTreeMap::new();
        lowering.insert(q, g);
        Self { diag: NumberFunction::zero(), raising: BTreeMap::new(), lowering }
    }

    /// `a^q g(N)`, normalized to `g(N+q) a^q`.
    pub fn lowering_from_right(q: u32, g: NumberFunction) -> Self {
        Self::lowering(g.shift(q as i64), q)
    }

    /// The annihilation operator `c·a`.
    pub fn annihilator(c: C64) -> Self {
        Self::lowering(NumberFunction::constant(c), 1)
    }

    /// The creation operator `c·a†`.
    pub fn creator(c: C64) -> Self {
        Self::raising(1, NumberFunction::constant(c))
    }

    pub fn scalar(c: C64) -> Self {
        if c == C64::ZERO {
            Self::zero()
        } else {
            Self::diagonal(NumberFunction::constant(c))
        }
    }

    pub fn diag(&self) -> &NumberFunction {
        &self.diag
    }

    pub fn raising_terms(&self) -> impl Iterator<Item = (u32, &NumberFunction)> {
        self.raising.iter().map(|(&p, f)| (p, f))
    }

    pub fn lowering_terms(&self) -> impl Iterator<Item = (u32, &NumberFunction)> {
        self.lowering.iter().map(|(&q, g)| (q, g))
    }

    pub fn has_ladder_terms(&self) -> bool {
        !self.raising.is_empty() || !self.lowering.is_empty()
    }

    /// Largest ladder power present in the entry.
    pub fn max_power(&self) -> u32 {
        let p = self.raising.keys().next_back().copied().unwrap_or(0);
        let q = self.lowering.keys().next_back().copied().unwrap_or(0);
        p.max(q)
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.raising.is_empty() && self.lowering.is_empty() && self.diag.label() == "0"
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut raising = self.raising.clone();
        for (&p, f) in &other.raising {
            raising
                .entry(p)
                .and_modify(|g| *g = g.add(f))
                .or_insert_with(|| f.clone());
        }
        let mut lowering = self.lowering.clone();
        for (&q, g) in &other.lowering {
            lowering
                .entry(q)
                .and_modify(|h| *h = h.add(g))
                .or_insert_with(|| g.clone());
        }
        let diag = if self.diag.label() == "0" {
            other.diag.clone()
        } else if other.diag.label() == "0" {
            self.diag.clone()
        } else {
            self.diag.add(&other.diag)
        };
        Self { diag, raising, lowering }
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == C64::ZERO {
            return Self::zero();
        }
        Self {
            diag: if self.diag.label() == "0" { NumberFunction::zero() } else { self.diag.scale(c) },
            raising: self.raising.iter().map(|(&p, f)| (p, f.scale(c))).collect(),
            lowering: self.lowering.iter().map(|(&q, g)| (q, g.scale(c))).collect(),
        }
    }

    /// Adjoint: `(a†)^p f(N) <-> conj(f)(N) a^p`, diagonal conjugated.
    /// An involution by construction.
    pub fn adjoint(&self) -> Self {
        Self {
            diag: if self.diag.label() == "0" { NumberFunction::zero() } else { self.diag.conj() },
            raising: self.lowering.iter().map(|(&q, g)| (q, g.conj())).collect(),
            lowering: self.raising.iter().map(|(&p, f)| (p, f.conj())).collect(),
        }
    }

    /// Normal-form product using the rewrite rules
    /// `a f(N) = f(N+1) a`, `f(N) a† = a† f(N+1)`,
    /// `(a†)^l a^l = N(N-1)···(N-l+1)`, `a^l (a†)^l = (N+l)···(N+1)`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        let x_diag = (self.diag.label() != "0").then_some(&self.diag);
        let y_diag = (other.diag.label() != "0").then_some(&other.diag);

        if let (Some(f), Some(h)) = (x_diag, y_diag) {
            out = out.add(&Self::diagonal(f.mul(h)));
        }
        if let Some(f) = x_diag {
            for (&r, h) in &other.raising {
                // f(N) (a†)^r h(N) = (a†)^r f(N+r) h(N)
                out = out.add(&Self::raising(r, f.shift(r as i64).mul(h)));
            }
            for (&s, k) in &other.lowering {
                // f(N) k(N) a^s
                out = out.add(&Self::lowering(f.mul(k), s));
            }
        }
        for (&p, f) in &self.raising {
            if let Some(h) = y_diag {
                // (a†)^p f(N) h(N)
                out = out.add(&Self::raising(p, f.mul(h)));
            }
            for (&r, h) in &other.raising {
                // (a†)^p f(N) (a†)^r h(N) = (a†)^{p+r} f(N+r) h(N)
                out = out.add(&Self::raising(p + r, f.shift(r as i64).mul(h)));
            }
            for (&s, k) in &other.lowering {
                // (a†)^p u(N) a^s with u = f·k, contracted via
                // (a†)^s u(N) a^s = u(N-s)·N(N-1)···(N-s+1).
                let u = f.mul(k);
                if p >= s {
                    let w = u.lowered_with_falling_factorial(s);
                    if p == s {
                        out = out.add(&Self::diagonal(w));
                    } else {
                        out = out.add(&Self::raising(p - s, w));
                    }
                } else {
                    let v = u.lowered_with_falling_factorial(p);
                    out = out.add(&Self::lowering(v, s - p));
                }
            }
        }
        for (&q, g) in &self.lowering {
            if let Some(h) = y_diag {
                // g(N) a^q h(N) = g(N) h(N+q) a^q
                out = out.add(&Self::lowering(g.mul(&h.shift(q as i64)), q));
            }
            for (&r, h) in &other.raising {
                // g(N) a^q (a†)^r h(N), contracted via a^l (a†)^l = (N+l)···(N+1).
                if q >= r {
                    let w = g.mul(&h.with_rising_factorial(r).shift((q - r) as i64));
                    if q == r {
                        out = out.add(&Self::diagonal(w));
                    } else {
                        out = out.add(&Self::lowering(w, q - r));
                    }
                } else {
                    let d = r - q;
                    let w = g.with_rising_factorial(q).shift(d as i64).mul(h);
                    out = out.add(&Self::raising(d, w));
                }
            }
            for (&s, k) in &other.lowering {
                // g(N) a^q k(N) a^s = g(N) k(N+q) a^{q+s}
                out = out.add(&Self::lowering(g.mul(&k.shift(q as i64)), q + s));
            }
        }
        out
    }

    /// Action on the basis ket `|n⟩`: the finitely many `(m, c)` with
    /// `x|n⟩ = Σ c|m⟩`, sorted by `m`. Exact zeros are dropped.
    pub fn apply(&self, n: u64) -> Vec<(u64, C64)> {
        let mut out = Vec::new();
        for (&q, g) in self.lowering.iter().rev() {
            let q = q as u64;
            if n >= q {
                let mut ladder = 1.0;
                for l in 0..q {
                    ladder *= (n - l) as f64;
                }
                let amp = g.eval(n - q) * ladder.sqrt();
                if amp != C64::ZERO {
                    out.push((n - q, amp));
                }
            }
        }
        let d = self.diag.eval(n);
        if d != C64::ZERO {
            out.push((n, d));
        }
        for (&p, f) in &self.raising {
            let p = p as u64;
            let mut ladder = 1.0;
            for l in 1..=p {
                ladder *= (n + l) as f64;
            }
            let amp = f.eval(n) * ladder.sqrt();
            if amp != C64::ZERO {
                out.push((n + p, amp));
            }
        }
        out
    }

    /// Matrix element `⟨m| x |n⟩`.
    pub fn matrix_element(&self, m: u64, n: u64) -> C64 {
        self.apply(n)
            .into_iter()
            .find(|&(k, _)| k == m)
            .map(|(_, c)| c)
            .unwrap_or(C64::ZERO)
    }

    /// Maximum pointwise difference of the coefficient functions against
    /// `other`, per ladder power, over `n = 0..=max_n`. Powers missing on one
    /// side are compared against zero.
    pub fn max_coefficient_diff(&self, other: &Self, max_n: u64) -> f64 {
        let mut worst: f64 = self.diag.max_diff_on(&other.diag, max_n);
        let powers = |a: &BTreeMap<u32, NumberFunction>, b: &BTreeMap<u32, NumberFunction>| {
            let mut ps: Vec<u32> = a.keys().chain(b.keys()).copied().collect();
            ps.sort_unstable();
            ps.dedup();
            ps
        };
        let zero = NumberFunction::zero();
        for p in powers(&self.raising, &other.raising) {
            let f = self.raising.get(&p).unwrap_or(&zero);
            let g = other.raising.get(&p).unwrap_or(&zero);
            worst = worst.max(f.max_diff_on(g, max_n));
        }
        for q in powers(&self.lowering, &other.lowering) {
            let f = self.lowering.get(&q).unwrap_or(&zero);
            let g = other.lowering.get(&q).unwrap_or(&zero);
            worst = worst.max(f.max_diff_on(g, max_n));
        }
        worst
    }

    /// Pointwise equality of actions over `n = 0..=max_n` within `tol`.
    pub fn approx_eq(&self, other: &Self, max_n: u64, tol: f64) -> bool {
        self.max_coefficient_diff(other, max_n) <= tol
    }

    /// Largest magnitude any ladder coefficient attains on `0..=max_n`;
    /// zero for purely diagonal entries.
    pub fn max_ladder_residue(&self, max_n: u64) -> f64 {
        let mut worst: f64 = 0.0;
        for f in self.raising.values().chain(self.lowering.values()) {
            for n in 0..=max_n {
                worst = worst.max(f.eval(n).norm());
            }
        }
        worst
    }

    /// Drops ladder terms that vanish pointwise on `0..=max_n` within `tol`.
    pub fn pruned(&self, max_n: u64, tol: f64) -> Self {
        Self {
            diag: self.diag.clone(),
            raising: self
                .raising
                .iter()
                .filter(|(_, f)| !f.is_zero_on(max_n, tol))
                .map(|(&p, f)| (p, f.clone()))
                .collect(),
            lowering: self
                .lowering
                .iter()
                .filter(|(_, g)| !g.is_zero_on(max_n, tol))
                .map(|(&q, g)| (q, g.clone()))
                .collect(),
        }
    }

    /// Keeps only the diagonal part.
    pub fn diagonal_part(&self) -> Self {
        Self::diagonal(self.diag.clone())
    }
}

impl fmt::Display for OperatorEntry {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.diag.label() != "0" {
            parts.push(self.diag.label().to_string());
        }
        for (&p, f) in &self.raising {
            let op = if p == 1 { "a†".to_string() } else { format!("(a†)^{}", p) };
            if f.label() == "1" {
                parts.push(op);
            } else {
                parts.push(format!("{} {}", op, f.label()));
            }
        }
        for (&q, g) in &self.lowering {
            let op = if q == 1 { "a".to_string() } else { format!("a^{}", q) };
            if g.label() == "1" {
                parts.push(op);
            } else {
                parts.push(format!("{} {}", g.label(), op));
            }
        }
        if parts.is_empty() {
            out.write_str("0")
        } else {
            out.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Debug for OperatorEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
