//! The per-mode symbol `l_n(lambda) = lambda^2 + a^2 - a^{2 theta} K^(lambda)`
//! and its cleared-denominator polynomial form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::ExponentialKernel;

/// Default cap on kernel terms for the polynomial route.
pub const DEFAULT_MAX_POLY_TERMS: usize = 64;

/// Environment variable overriding [`DEFAULT_MAX_POLY_TERMS`].
pub const MAX_N_ENV: &str = "VOLTSPEC_MAX_N";

/// Polynomial-route term cap, honoring `VOLTSPEC_MAX_N` when it parses.
pub fn max_poly_terms() -> usize {
    std::env::var(MAX_N_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_POLY_TERMS)
}

/// An operator eigenvalue `a_n >= 1` together with the exponent `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub a: f64,
    pub theta: f64,
}

impl Mode {
    pub fn new(a: f64, theta: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 1.0) {
            return Err(Error::InvalidParameter(format!("mode eigenvalue a = {a} must be >= 1")));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta = {theta} must lie in [0, 1]")));
        }
        Ok(Self { a, theta })
    }

    /// `a^{2(1-theta)}`, the stability threshold for `sum c_k / gamma_k`.
    pub fn threshold(&self) -> f64 {
        self.a.powf(2.0 * (1.0 - self.theta))
    }

    /// `a^{2 theta}`, the weight on the kernel term.
    pub fn coupling(&self) -> f64 {
        self.a.powf(2.0 * self.theta)
    }

    pub fn a2(&self) -> f64 {
        self.a * self.a
    }
}

pub fn eval_ell(mode: &Mode, kernel: &ExponentialKernel, lambda: Complex64) -> Result<Complex64> {
    let k = kernel.laplace(lambda)?;
    Ok(lambda * lambda + mode.a2() - k * mode.coupling())
}

pub fn eval_ell_deriv(mode: &Mode, kernel: &ExponentialKernel, lambda: Complex64) -> Result<Complex64> {
    let kp = kernel.laplace_deriv(lambda)?;
    Ok(lambda * 2.0 - kp * mode.coupling())
}

/// `1 - a^{-2(1-theta)} K^(x)` on the real axis.
pub fn eval_f(mode: &Mode, kernel: &ExponentialKernel, x: f64) -> Result<f64> {
    let k = kernel.laplace(Complex64::new(x, 0.0))?;
    Ok(1.0 - k.re / mode.threshold())
}

/// Monic polynomial `(lambda^2 + a^2) prod (lambda + gamma_k) - a^{2 theta} sum_k c_k prod_{j != k} (lambda + gamma_j)`,
/// coefficients listed from the leading power down.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolPolynomial {
    pub coeffs: Vec<f64>,
}

impl SymbolPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_deriv(&self, z: Complex64) -> Complex64 {
        let n = self.degree();
        self.coeffs[..n]
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| acc * z + c * (n - i) as f64)
    }
}

// Multiplies an ascending-power coefficient vector by (x + g) in place.
fn mul_linear(p: &mut Vec<f64>, g: f64) -> Result<()> {
    p.push(0.0);
    for i in (0..p.len()).rev() {
        let lower = if i > 0 { p[i - 1] } else { 0.0 };
        p[i] = p[i] * g + lower;
        if !p[i].is_finite() || p[i].abs() > 1e300 {
            return Err(Error::Overflow(p[i]));
        }
    }
    Ok(())
}

/// Expands the symbol into its cleared-denominator polynomial.
pub fn poly_coeffs(mode: &Mode, kernel: &ExponentialKernel) -> Result<SymbolPolynomial> {
    poly_coeffs_capped(mode, kernel, max_poly_terms())
}

pub fn poly_coeffs_capped(mode: &Mode, kernel: &ExponentialKernel, cap: usize) -> Result<SymbolPolynomial> {
    let n = kernel.len();
    if n > cap {
        return Err(Error::TooManyTerms { terms: n, cap });
    }
    let terms = kernel.terms();

    // Ascending-power coefficients throughout; reversed at the end.
    let mut prod = vec![1.0];
    for t in terms {
        mul_linear(&mut prod, t.gamma)?;
    }
    // (x^2 + a^2) * prod
    let a2 = mode.a2();
    let mut full = vec![0.0; n + 3];
    for (i, &p) in prod.iter().enumerate() {
        full[i] += a2 * p;
        full[i + 2] += p;
    }

    let w = mode.coupling();
    let mut correction = vec![0.0; n];
    for (k, tk) in terms.iter().enumerate() {
        let mut partial = vec![1.0];
        for (j, tj) in terms.iter().enumerate() {
            if j != k {
                mul_linear(&mut partial, tj.gamma)?;
            }
        }
        for (i, &p) in partial.iter().enumerate() {
            correction[i] += tk.c * p;
        }
    }
    for (i, &c) in correction.iter().enumerate() {
        full[i] -= w * c;
        if !full[i].is_finite() || full[i].abs() > 1e300 {
            return Err(Error::Overflow(full[i]));
        }
    }
    full.reverse();
    Ok(SymbolPolynomial { coeffs: full })
}
