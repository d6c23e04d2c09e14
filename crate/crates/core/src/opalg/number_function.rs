use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

type EvalFn = dyn Fn(u64) -> C64 + Send + Sync;

/// An evaluable function of the number operator `N`.
///
/// Values are complex and the function must be total on n >= 0. Singular
/// classical expressions such as `1/√(N(N-1))` are never stored bare; entry
/// constructors shift them behind ladder powers into their defined region
/// first (see [`OperatorEntry`](super::OperatorEntry)).
#[derive(Clone)]
pub struct NumberFunction {
    f: Arc<EvalFn>,
    label: String,
}

impl NumberFunction {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(u64) -> C64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), label: label.into() }
    }

    /// Real-valued function of `n`, stored as complex.
    pub fn from_real<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, move |n| C64::new(f(n), 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new(format_scalar(c), move |_| c)
    }

    pub fn real_constant(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::new("0", |_| C64::ZERO)
    }

    pub fn one() -> Self {
        Self::new("1", |_| C64::ONE)
    }

    /// The identity map n -> n.
    pub fn number() -> Self {
        Self::new("N", |n| C64::new(n as f64, 0.0))
    }

    pub fn eval(&self, n: u64) -> C64 {
        (self.f)(n)
    }

    /// Real part of the value at `n`; panics if the imaginary part is
    /// not negligible. Used where entries are known to be real.
    pub fn eval_real(&self, n: u64) -> f64 {
        let v = self.eval(n);
        assert!(
            v.im.abs() <= 1e-12 * v.re.abs().max(1.0),
            "function `{}` is not real at n={}: {}",
            self.label,
            n,
            v
        );
        v.re
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Argument shift: the result satisfies `shift(k).eval(n) = eval(n + k)`.
    ///
    /// Evaluating the shifted function at `n` with `n + k < 0` is a contract
    /// violation and panics; callers arrange ladder powers so that this
    /// region is never reached.
    pub fn shift(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let f = Arc::clone(&self.f);
        let label = self.label.clone();
        Self {
            f: Arc::new(move |n: u64| {
                let m = n as i64 + k;
                assert!(m >= 0, "domain error: `{}` shifted by {} evaluated at n={}", label, k, n);
                f(m as u64)
            }),
            label: shift_label(&self.label, k),
        }
    }

    pub fn conj(&self) -> Self {
        let f = Arc::clone(&self.f);
        Self {
            f: Arc::new(move |n| f(n).conj()),
            label: format!("conj({})", self.label),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == C64::ONE {
            return self.clone();
        }
        let f = Arc::clone(&self.f);
        Self {
            f: Arc::new(move |n| c * f(n)),
            label: binary_label(&format_scalar(c), "*", &self.label),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = Arc::clone(&self.f);
        let g = Arc::clone(&other.f);
        Self {
            f: Arc::new(move |n| f(n) + g(n)),
            label: binary_label(&self.label, "+", &other.label),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = Arc::clone(&self.f);
        let g = Arc::clone(&other.f);
        Self {
            f: Arc::new(move |n| f(n) * g(n)),
            label: binary_label(&self.label, "*", &other.label),
        }
    }

    /// Guarded contraction factor `(a†)^s f(N) a^s = f(N-s)·N(N-1)···(N-s+1)`.
    ///
    /// The falling factorial vanishes for n < s, exactly where `f(n - s)`
    /// would leave the domain, so the product is total.
    pub fn lowered_with_falling_factorial(&self, s: u32) -> Self {
        if s == 0 {
            return self.clone();
        }
        let f = Arc::clone(&self.f);
        Self {
            f: Arc::new(move |n: u64| {
                if n < s as u64 {
                    return C64::ZERO;
                }
                let mut ff = 1.0;
                for l in 0..s as u64 {
                    ff *= (n - l) as f64;
                }
                f(n - s as u64) * ff
            }),
            label: format!("ff{}({})", s, self.label),
        }
    }

    /// Rising factorial multiplier `(N+1)(N+2)···(N+r)` times this function.
    pub fn with_rising_factorial(&self, r: u32) -> Self {
        if r == 0 {
            return self.clone();
        }
        let f = Arc::clone(&self.f);
        Self {
            f: Arc::new(move |n: u64| {
                let mut rf = 1.0;
                for l in 1..=r as u64 {
                    rf *= (n + l) as f64;
                }
                f(n) * rf
            }),
            label: format!("rf{}({})", r, self.label),
        }
    }

    /// Pointwise numerical zero test over `0..=max_n`.
    pub fn is_zero_on(&self, max_n: u64, tol: f64) -> bool {
        (0..=max_n).all(|n| self.eval(n).norm() <= tol)
    }

    /// Maximum pointwise difference against `other` over `0..=max_n`.
    pub fn max_diff_on(&self, other: &Self, max_n: u64) -> f64 {
        (0..=max_n)
            .map(|n| (self.eval(n) - other.eval(n)).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for NumberFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberFunction({})", self.label)
    }
}

impl fmt::Display for NumberFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn shift_label(label: &str, k: i64) -> String {
    // Rewrites "f" to "f(N+k)"; composed labels stay readable enough.
    if k == 0 {
        label.to_string()
    } else if k > 0 {
        format!("{}(N+{})", label, k)
    } else {
        format!("{}(N-{})", label, -k)
    }
}

fn binary_label(a: &str, op: &str, b: &str) -> String {
    let s = format!("({} {} {})", a, op, b);
    if s.len() > 160 {
        "<composite>".to_string()
    } else {
        s
    }
}

/// Compact scalar formatting: integers print bare, pure-real and
/// pure-imaginary values drop the zero part.
pub(crate) fn format_scalar(c: C64) -> String {
    fn fmt_re(x: f64) -> String {
        if x == x.trunc() && x.abs() < 1e6 {
            format!("{}", x as i64)
        } else {
            // Square roots of small integers are common coefficients here.
            let sq = x * x;
            let rounded = sq.round();
            if rounded > 1.0 && rounded < 1e6 && (sq - rounded).abs() < 1e-12 {
                if x > 0.0 {
                    format!("sqrt({})", rounded as i64)
                } else {
                    format!("-sqrt({})", rounded as i64)
                }
            } else {
                format!("{}", x)
            }
        }
    }
    if c.im == 0.0 {
        fmt_re(c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            "i".to_string()
        } else if c.im == -1.0 {
            "-i".to_string()
        } else {
            format!("{}i", fmt_re(c.im))
        }
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}
