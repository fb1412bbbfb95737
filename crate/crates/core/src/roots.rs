//! Zeros of `l_n` for a single mode: the real zeros interlaced with the
//! poles, the zeros of the auxiliary function `f`, and the complex pair.

use num_complex::Complex64;
use serde::Serialize;

use crate::bracket::brent;
use crate::error::{Error, Result};
use crate::kernel::ExponentialKernel;
use crate::linalg;
use crate::oracle::{companion_roots, MAX_ORACLE_DIM};
use crate::symbol::{eval_ell, eval_ell_deriv, poly_coeffs_capped, Mode};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const BRENT_MAX_ITER: usize = 500;

/// A candidate for the upper zero must clear the real axis by this much
/// relative to `1 + |lambda|`; otherwise it may be a real zero seen through rounding.
const NONREAL_MARGIN: f64 = 1e-6;

fn is_nonreal(z: Complex64) -> bool {
    z.im > NONREAL_MARGIN * (1.0 + z.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootOptions {
    /// Residual tolerance relative to `max(1, a^2)`.
    pub residual_rel: f64,
    pub contraction_ratio: f64,
    pub fixed_point_max_iter: usize,
    /// Relative stopping threshold on successive fixed-point iterates.
    pub fixed_point_tol: f64,
    pub newton_max_iter: usize,
    /// Allow the companion-matrix fallback for the complex pair.
    pub oracle_fallback: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            residual_rel: 1e-9,
            contraction_ratio: 0.9,
            fixed_point_max_iter: 50,
            fixed_point_tol: 1e-14,
            newton_max_iter: 100,
            oracle_fallback: true,
        }
    }
}

pub fn residual_tol(mode: &Mode, opts: &RootOptions) -> f64 {
    opts.residual_rel * mode.a2().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealZero {
    pub value: f64,
    /// Pole interval `(-gamma_k, -gamma_{k-1})`, or `(0, x_1)` for an unstable first zero.
    pub bracket: (f64, f64),
    /// `value + gamma_k`, computed without cancellation.
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairRoute {
    FixedPoint,
    TauNewton,
    Oracle,
}

/// The zero `lambda^+ = alpha + i beta` in the upper half-plane and its
/// scaled offset `tau` with `lambda^+ = a (tau + i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexPair {
    pub alpha: f64,
    pub beta: f64,
    pub tau: Complex64,
    pub route: PairRoute,
}

impl ComplexPair {
    pub fn lambda_plus(&self) -> Complex64 {
        Complex64::new(self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSlice {
    pub mode: Mode,
    pub unstable: bool,
    pub real_zeros: Vec<RealZero>,
    pub f_zeros: Vec<f64>,
    pub complex_pair: Option<ComplexPair>,
    /// Real zeros found in place of a complex pair.
    pub extra_real: Vec<f64>,
    pub unstable_real: Vec<f64>,
    pub residual_max: f64,
    pub residual_tol: f64,
}

impl SpectrumSlice {
    /// Every reported zero, conjugates included.
    pub fn all_zeros(&self) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = self.real_zeros.iter().map(|r| Complex64::new(r.value, 0.0)).collect();
        z.extend(self.extra_real.iter().map(|&x| Complex64::new(x, 0.0)));
        if let Some(p) = &self.complex_pair {
            z.push(p.lambda_plus());
            z.push(p.lambda_plus().conj());
        }
        z
    }

    pub fn zero_count(&self) -> usize {
        self.real_zeros.len() + self.extra_real.len() + if self.complex_pair.is_some() { 2 } else { 0 }
    }

    pub fn upper_half_count(&self) -> usize {
        self.all_zeros().iter().filter(|z| z.im > 0.0).count()
    }

    /// Violations of `-gamma_k < lambda_k < x_k < -gamma_{k-1}`, checked from
    /// the values alone. An unstable first zero must satisfy `0 < lambda_1 < x_1`.
    pub fn interlacing_violations(&self, kernel: &ExponentialKernel) -> Vec<String> {
        let mut out = Vec::new();
        if self.real_zeros.len() != kernel.len() || self.f_zeros.len() != kernel.len() {
            out.push(format!(
                "expected {} real zeros and f-zeros, got {} and {}",
                kernel.len(),
                self.real_zeros.len(),
                self.f_zeros.len()
            ));
            return out;
        }
        for (j, (z, &x)) in self.real_zeros.iter().zip(&self.f_zeros).enumerate() {
            let lam = z.value;
            let (lo, hi) = if j == 0 && self.unstable {
                (0.0, f64::INFINITY)
            } else {
                (-kernel.gamma(j), if j == 0 { 0.0 } else { -kernel.gamma(j - 1) })
            };
            if !(lo < lam && lam < x && x < hi) {
                out.push(format!("k = {}: need {lo} < {lam} < {x} < {hi}", j + 1));
            }
            if z.psi <= 0.0 {
                out.push(format!("k = {}: psi = {} is not positive", j + 1, z.psi));
            }
        }
        out
    }
}

/// `l_n` at `x = -gamma_j + psi` with the `j`-th pole term kept exact.
fn ell_shifted(mode: &Mode, kernel: &ExponentialKernel, j: usize, psi: f64) -> f64 {
    let x = psi - kernel.gamma(j);
    x * x + mode.a2() - mode.coupling() * kernel.laplace_shifted(j, psi)
}

fn f_shifted(mode: &Mode, kernel: &ExponentialKernel, j: usize, psi: f64) -> f64 {
    1.0 - kernel.laplace_shifted(j, psi) / mode.threshold()
}

/// Width of the `j`-th pole interval in `psi` coordinates.
fn gap(kernel: &ExponentialKernel, j: usize) -> f64 {
    if j == 0 {
        kernel.gamma(0)
    } else {
        kernel.gamma(j) - kernel.gamma(j - 1)
    }
}

/// Moves the lower endpoint toward the pole at `psi = 0` until `g` changes sign
/// against `g_hi`.
fn pole_offset<G: Fn(f64) -> f64>(g: &G, width: f64, g_hi: f64) -> Result<f64> {
    let mut eps = 1e-9 * width;
    for _ in 0..12 {
        let v = g(eps);
        if v.signum() != g_hi.signum() && !v.is_nan() {
            return Ok(eps);
        }
        eps *= 1e-3;
    }
    Err(Error::BracketFailure {
        lo: eps,
        hi: width,
        flo: g(eps),
        fhi: g_hi,
    })
}

fn ensure_kernel(kernel: &ExponentialKernel) -> Result<()> {
    if kernel.is_empty() {
        return Err(Error::InvalidKernel("root finding needs at least one term".into()));
    }
    Ok(())
}

/// Zero `x_j` of `f(x) = 1 - a^{-2(1-theta)} K^(x)` in the `j`-th pole interval
/// (zero-based), returned as `(x_j, x_j + gamma_j)`.
fn f_zero_at(mode: &Mode, kernel: &ExponentialKernel, j: usize) -> Result<(f64, f64)> {
    let thr = mode.threshold();
    let g0 = kernel.gamma(j);
    if j == 0 && kernel.s_partial() > thr {
        // f(0) < 0 and f increases to 1 on the positive axis.
        let hi = (2.0 * kernel.c_sum() / thr).max(1.0);
        let f = |x: f64| 1.0 - kernel.laplace(Complex64::new(x, 0.0)).map(|k| k.re).unwrap_or(f64::NAN) / thr;
        let x = brent(f, 0.0, hi, 0.0, BRENT_MAX_ITER)?.root;
        return Ok((x, x + g0));
    }
    let width = gap(kernel, j);
    let g = |psi: f64| f_shifted(mode, kernel, j, psi);
    let mut hi = if j == 0 { width } else { width * (1.0 - 1e-9) };
    let mut g_hi = g(hi);
    if j > 0 {
        let mut shrink = 1e-9;
        while g_hi <= 0.0 && shrink > 1e-300 {
            shrink *= 1e-3;
            hi = width * (1.0 - shrink);
            g_hi = g(hi);
        }
    }
    let lo = pole_offset(&g, width, g_hi)?;
    let psi = brent(g, lo, hi, 0.0, BRENT_MAX_ITER)?.root;
    Ok((psi - g0, psi))
}

fn f_zeros_shifted(mode: &Mode, kernel: &ExponentialKernel) -> Result<Vec<(f64, f64)>> {
    ensure_kernel(kernel)?;
    (0..kernel.len()).map(|j| f_zero_at(mode, kernel, j)).collect()
}

/// Zeros `x_k` of `f(x) = 1 - a^{-2(1-theta)} K^(x)`, one per pole interval.
pub fn f_zeros(mode: &Mode, kernel: &ExponentialKernel) -> Result<Vec<f64>> {
    Ok(f_zeros_shifted(mode, kernel)?.into_iter().map(|(x, _)| x).collect())
}

/// Real zeros `lambda_k`, one per pole interval. Each is bracketed between the
/// pole `-gamma_k` (where `l_n -> -inf`) and the f-zero `x_k` (where `l_n = x_k^2 > 0`).
pub fn real_zeros(mode: &Mode, kernel: &ExponentialKernel) -> Result<Vec<RealZero>> {
    let fz = f_zeros_shifted(mode, kernel)?;
    real_zeros_from(mode, kernel, &fz)
}

fn real_zeros_from(mode: &Mode, kernel: &ExponentialKernel, fz: &[(f64, f64)]) -> Result<Vec<RealZero>> {
    fz.iter()
        .enumerate()
        .map(|(j, &x)| real_zero_at(mode, kernel, j, x))
        .collect()
}

fn real_zero_at(mode: &Mode, kernel: &ExponentialKernel, j: usize, (x, psi_x): (f64, f64)) -> Result<RealZero> {
    let g0 = kernel.gamma(j);
    if j == 0 && kernel.s_partial() > mode.threshold() {
        let ell = |t: f64| {
            eval_ell(mode, kernel, Complex64::new(t, 0.0))
                .map(|v| v.re)
                .unwrap_or(f64::NAN)
        };
        let mut hi = x;
        let mut tries = 0;
        while ell(hi) <= 0.0 && tries < 200 {
            hi *= 2.0;
            tries += 1;
        }
        let lam = brent(ell, 0.0, hi, 0.0, BRENT_MAX_ITER)?.root;
        return Ok(RealZero {
            value: lam,
            bracket: (0.0, hi),
            psi: lam + g0,
        });
    }
    let width = gap(kernel, j);
    let g = |psi: f64| ell_shifted(mode, kernel, j, psi);
    let (mut hi, mut g_hi) = (psi_x, g(psi_x));
    if g_hi <= 0.0 {
        // Rounding near threshold; the upper pole still gives l_n -> +inf.
        hi = if j == 0 { width } else { width * (1.0 - 1e-12) };
        g_hi = g(hi);
    }
    let lo = pole_offset(&g, width, g_hi)?;
    let psi = brent(g, lo, hi, 0.0, BRENT_MAX_ITER)?.root;
    let upper = if j == 0 { 0.0 } else { -kernel.gamma(j - 1) };
    Ok(RealZero {
        value: psi - g0,
        bracket: (-g0, upper),
        psi,
    })
}

/// The positive real zero of an unstable mode (`S_N > a^{2(1-theta)}`).
pub fn positive_real_zero(mode: &Mode, kernel: &ExponentialKernel) -> Result<RealZero> {
    ensure_kernel(kernel)?;
    let thr = mode.threshold();
    let s = kernel.s_partial();
    if s <= thr {
        return Err(Error::NotUnstable { s, threshold: thr });
    }
    let fz = f_zero_at(mode, kernel, 0)?;
    real_zero_at(mode, kernel, 0, fz)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub tau: Complex64,
    pub lambda_plus: Complex64,
    pub iterations: usize,
}

fn h_map(mode: &Mode, kernel: &ExponentialKernel, tau: Complex64) -> Result<Complex64> {
    let k = kernel.laplace((tau + I) * mode.a)?;
    Ok(k / ((tau + 2.0 * I) * mode.threshold()))
}

/// Iterates `tau -> K^(a tau + i a) / (a^{2(1-theta)} (tau + 2i))` from `tau = 0`.
pub fn complex_pair_fixed_point(mode: &Mode, kernel: &ExponentialKernel) -> Result<FixedPointResult> {
    complex_pair_fixed_point_with(mode, kernel, &RootOptions::default())
}

pub fn complex_pair_fixed_point_with(
    mode: &Mode,
    kernel: &ExponentialKernel,
    opts: &RootOptions,
) -> Result<FixedPointResult> {
    ensure_kernel(kernel)?;
    let mut tau = Complex64::new(0.0, 0.0);
    let mut prev_step = f64::NAN;
    let mut ratio = 0.0;
    for it in 1..=opts.fixed_point_max_iter {
        let next = h_map(mode, kernel, tau)?;
        let step = (next - tau).norm();
        tau = next;
        if step <= opts.fixed_point_tol * tau.norm() || step == 0.0 {
            return Ok(FixedPointResult {
                tau,
                lambda_plus: (tau + I) * mode.a,
                iterations: it,
            });
        }
        if prev_step.is_finite() {
            ratio = step / prev_step;
            if ratio >= opts.contraction_ratio {
                return Err(Error::ContractionFailed { ratio, iterations: it });
            }
        }
        prev_step = step;
    }
    Err(Error::ContractionFailed {
        ratio,
        iterations: opts.fixed_point_max_iter,
    })
}

/// Newton's method on `a^{2(1-theta)} tau (tau + 2i) - K^(a tau + i a)`,
/// started from the leading-order term `-(i/2) K^(i a) / a^{2(1-theta)}`.
pub fn complex_pair_tau_newton(mode: &Mode, kernel: &ExponentialKernel, opts: &RootOptions) -> Result<Complex64> {
    ensure_kernel(kernel)?;
    let thr = mode.threshold();
    let g = |t: Complex64| -> Result<Complex64> { Ok(t * (t + 2.0 * I) * thr - kernel.laplace((t + I) * mode.a)?) };
    let mut tau = -0.5 * I * kernel.laplace(I * mode.a)? / thr;
    let mut res = g(tau)?.norm();
    for _ in 0..opts.newton_max_iter {
        let dg = (tau * 2.0 + 2.0 * I) * thr - kernel.laplace_deriv((tau + I) * mode.a)? * mode.a;
        let step = g(tau)? / dg;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let next = tau - step;
        let next_res = g(next).map(|v| v.norm()).unwrap_or(f64::INFINITY);
        if next_res > res && res.is_finite() {
            break;
        }
        tau = next;
        res = next_res;
        if step.norm() <= 1e-15 * tau.norm() || res == 0.0 {
            return Ok(tau);
        }
    }
    let lam = (tau + I) * mode.a;
    let r = eval_ell(mode, kernel, lam)?.norm();
    if r <= residual_tol(mode, opts) {
        Ok(tau)
    } else {
        Err(Error::NoConvergence {
            last: format!("{lam}"),
            residual: r,
        })
    }
}

/// Damped Newton iteration on `l_n` starting at `z0`.
pub fn newton_polish(mode: &Mode, kernel: &ExponentialKernel, z0: Complex64) -> Result<Complex64> {
    newton_polish_with(mode, kernel, z0, &RootOptions::default())
}

pub fn newton_polish_with(
    mode: &Mode,
    kernel: &ExponentialKernel,
    z0: Complex64,
    opts: &RootOptions,
) -> Result<Complex64> {
    let tol = residual_tol(mode, opts);
    let residual = |z: Complex64| eval_ell(mode, kernel, z).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    let mut z = z0;
    let mut r = eval_ell(mode, kernel, z)?.norm();
    for _ in 0..opts.newton_max_iter {
        if r == 0.0 {
            return Ok(z);
        }
        let step = eval_ell(mode, kernel, z)? / eval_ell_deriv(mode, kernel, z)?;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let mut t = 1.0;
        let mut next = z - step;
        let mut next_r = residual(next);
        while next_r > r && t > 1e-6 {
            t *= 0.5;
            next = z - step * t;
            next_r = residual(next);
        }
        if next_r > r {
            break;
        }
        z = next;
        r = next_r;
        if r <= tol && (step * t).norm() <= 4.0 * f64::EPSILON * z.norm() {
            return Ok(z);
        }
    }
    if r <= tol {
        Ok(z)
    } else {
        Err(Error::NoConvergence {
            last: format!("{z}"),
            residual: r,
        })
    }
}

/// The two zeros left after removing `known` from the companion roots.
fn oracle_leftovers(mode: &Mode, kernel: &ExponentialKernel, known: &[f64]) -> Result<Vec<Complex64>> {
    let cap = MAX_ORACLE_DIM - 2;
    let mut all = companion_roots(&poly_coeffs_capped(mode, kernel, cap)?)?;
    for &x in known {
        if let Some((idx, _)) = all
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - x).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
        {
            all.remove(idx);
        }
    }
    linalg::sort_lex(&mut all);
    Ok(all)
}

/// Outcome of each complex-pair route, for agreement checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRoutes {
    pub fixed_point: Option<Complex64>,
    pub tau_newton: Option<Complex64>,
    pub oracle: Option<Complex64>,
}

impl PairRoutes {
    /// Largest `|z1 - z2| / (1 + |z1|)` among routes that succeeded.
    pub fn max_disagreement(&self) -> f64 {
        let found: Vec<Complex64> = [self.fixed_point, self.tau_newton, self.oracle]
            .into_iter()
            .flatten()
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..found.len() {
            for j in i + 1..found.len() {
                worst = worst.max((found[i] - found[j]).norm() / (1.0 + found[i].norm()));
            }
        }
        worst
    }
}

pub fn pair_routes(mode: &Mode, kernel: &ExponentialKernel) -> Result<PairRoutes> {
    let opts = RootOptions::default();
    let tol = residual_tol(mode, &opts);
    let accept = |z: Complex64| is_nonreal(z) && eval_ell(mode, kernel, z).map(|v| v.norm() <= tol).unwrap_or(false);
    let fixed_point = complex_pair_fixed_point_with(mode, kernel, &opts)
        .ok()
        .map(|r| r.lambda_plus)
        .filter(|&z| accept(z));
    let tau_newton = complex_pair_tau_newton(mode, kernel, &opts)
        .ok()
        .map(|t| (t + I) * mode.a)
        .filter(|&z| accept(z));
    let known: Vec<f64> = real_zeros(mode, kernel)?.iter().map(|z| z.value).collect();
    let oracle = oracle_leftovers(mode, kernel, &known)
        .ok()
        .and_then(|rest| rest.into_iter().find(|&z| is_nonreal(z)))
        .and_then(|z| newton_polish_with(mode, kernel, z, &opts).ok())
        .filter(|&z| accept(z));
    Ok(PairRoutes {
        fixed_point,
        tau_newton,
        oracle,
    })
}

enum Remainder {
    Pair(ComplexPair),
    Real(Vec<f64>),
}

fn pair_from_tau(mode: &Mode, tau: Complex64, route: PairRoute) -> ComplexPair {
    let lam = (tau + I) * mode.a;
    ComplexPair {
        alpha: lam.re,
        beta: lam.im,
        tau,
        route,
    }
}

fn remainder(mode: &Mode, kernel: &ExponentialKernel, known: &[f64], opts: &RootOptions) -> Result<Remainder> {
    let tol = residual_tol(mode, opts);
    let ok = |tau: Complex64| {
        let lam = (tau + I) * mode.a;
        is_nonreal(lam) && eval_ell(mode, kernel, lam).map(|v| v.norm() <= tol).unwrap_or(false)
    };
    let mut last_err = match complex_pair_fixed_point_with(mode, kernel, opts) {
        Ok(r) if ok(r.tau) => return Ok(Remainder::Pair(pair_from_tau(mode, r.tau, PairRoute::FixedPoint))),
        Ok(r) => Error::NoConvergence {
            last: format!("{}", r.lambda_plus),
            residual: eval_ell(mode, kernel, r.lambda_plus)
                .map(|v| v.norm())
                .unwrap_or(f64::INFINITY),
        },
        Err(e) => e,
    };
    match complex_pair_tau_newton(mode, kernel, opts) {
        Ok(t) if ok(t) => return Ok(Remainder::Pair(pair_from_tau(mode, t, PairRoute::TauNewton))),
        Ok(_) => {}
        Err(e) => last_err = e,
    }
    if !opts.oracle_fallback {
        return Err(last_err);
    }
    let rest = oracle_leftovers(mode, kernel, known)?;
    if let Some(&z) = rest.iter().find(|&&z| is_nonreal(z)) {
        let lam = newton_polish_with(mode, kernel, z, opts)?;
        if is_nonreal(lam) {
            let tau = lam / mode.a - I;
            return Ok(Remainder::Pair(ComplexPair {
                alpha: lam.re,
                beta: lam.im,
                tau,
                route: PairRoute::Oracle,
            }));
        }
    }
    let mut reals = Vec::with_capacity(rest.len());
    for z in &rest {
        reals.push(newton_polish_with(mode, kernel, Complex64::new(z.re, 0.0), opts)?.re);
    }
    // Two nearly coincident zeros can both be drawn to the same one; keep the
    // unpolished pair in that case.
    if reals.len() == 2 && (reals[0] - reals[1]).abs() <= 1e-10 * (1.0 + reals[0].abs()) {
        reals = rest.iter().map(|z| z.re).collect();
    }
    reals.sort_by(f64::total_cmp);
    Ok(Remainder::Real(reals))
}

/// The upper zero alone. Tries the fixed point and tau-Newton, which cost
/// O(N) per step. Falls back to the full slice only when both fail and the kernel
/// is small enough for the companion oracle.
pub fn upper_zero(mode: &Mode, kernel: &ExponentialKernel, opts: &RootOptions) -> Result<ComplexPair> {
    let quick = RootOptions {
        oracle_fallback: false,
        ..*opts
    };
    match remainder(mode, kernel, &[], &quick) {
        Ok(Remainder::Pair(p)) => return Ok(p),
        Ok(Remainder::Real(_)) => unreachable!("the oracle route is disabled"),
        Err(e) if !opts.oracle_fallback || kernel.len() + 2 > MAX_ORACLE_DIM => return Err(e),
        Err(_) => {}
    }
    let slice = full_slice(mode, kernel, opts)?;
    slice.complex_pair.ok_or_else(|| Error::NoConvergence {
        last: format!("real zeros {:?}", slice.extra_real),
        residual: slice.residual_max,
    })
}

/// Assembles the full zero set of `l_{n,N}` for one mode: `N` real zeros,
/// their f-zeros, and the complex pair (or two extra real zeros).
pub fn full_slice(mode: &Mode, kernel: &ExponentialKernel, opts: &RootOptions) -> Result<SpectrumSlice> {
    let fz = f_zeros_shifted(mode, kernel)?;
    let real = real_zeros_from(mode, kernel, &fz)?;
    let unstable = kernel.s_partial() > mode.threshold();
    let known: Vec<f64> = real.iter().map(|z| z.value).collect();
    let (complex_pair, extra_real) = match remainder(mode, kernel, &known, opts)? {
        Remainder::Pair(p) => (Some(p), Vec::new()),
        Remainder::Real(r) => (None, r),
    };

    let mut residual_max: f64 = 0.0;
    for (j, z) in real.iter().enumerate() {
        let r = if j == 0 && unstable {
            eval_ell(mode, kernel, Complex64::new(z.value, 0.0))?.norm()
        } else {
            ell_shifted(mode, kernel, j, z.psi).abs()
        };
        residual_max = residual_max.max(r);
    }
    for &x in &extra_real {
        residual_max = residual_max.max(eval_ell(mode, kernel, Complex64::new(x, 0.0))?.norm());
    }
    if let Some(p) = &complex_pair {
        let lam = p.lambda_plus();
        residual_max = residual_max
            .max(eval_ell(mode, kernel, lam)?.norm())
            .max(eval_ell(mode, kernel, lam.conj())?.norm());
    }

    let mut unstable_real: Vec<f64> = known.iter().chain(&extra_real).copied().filter(|&x| x > 0.0).collect();
    unstable_real.sort_by(f64::total_cmp);
    Ok(SpectrumSlice {
        mode: *mode,
        unstable,
        real_zeros: real,
        f_zeros: fz.into_iter().map(|(x, _)| x).collect(),
        complex_pair,
        extra_real,
        unstable_real,
        residual_max,
        residual_tol: residual_tol(mode, opts),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroKind {
    Real,
    Pair,
    Unstable,
}

impl ZeroKind {
    pub fn name(&self) -> &'static str {
        match self {
            ZeroKind::Real => "real",
            ZeroKind::Pair => "pair",
            ZeroKind::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroRow {
    pub kind: ZeroKind,
    pub value: Complex64,
    pub residual: f64,
}

impl SpectrumSlice {
    /// One row per zero: real zeros in ascending pole order, then any real
    /// leftovers, then `lambda^+` and its conjugate. Near-pole residuals use
    /// the shifted evaluation the solver converged on.
    pub fn zero_rows(&self, kernel: &ExponentialKernel) -> Result<Vec<ZeroRow>> {
        let real_kind = |x: f64| if x > 0.0 { ZeroKind::Unstable } else { ZeroKind::Real };
        let mut rows = Vec::with_capacity(self.zero_count());
        for (j, z) in self.real_zeros.iter().enumerate() {
            let residual = if j == 0 && self.unstable {
                eval_ell(&self.mode, kernel, Complex64::new(z.value, 0.0))?.norm()
            } else {
                ell_shifted(&self.mode, kernel, j, z.psi).abs()
            };
            rows.push(ZeroRow {
                kind: real_kind(z.value),
                value: Complex64::new(z.value, 0.0),
                residual,
            });
        }
        for &x in &self.extra_real {
            rows.push(ZeroRow {
                kind: real_kind(x),
                value: Complex64::new(x, 0.0),
                residual: eval_ell(&self.mode, kernel, Complex64::new(x, 0.0))?.norm(),
            });
        }
        if let Some(p) = &self.complex_pair {
            for lam in [p.lambda_plus(), p.lambda_plus().conj()] {
                rows.push(ZeroRow {
                    kind: ZeroKind::Pair,
                    value: lam,
                    residual: eval_ell(&self.mode, kernel, lam)?.norm(),
                });
            }
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleLimitRow {
    pub a: f64,
    pub lambda: f64,
    pub psi: f64,
    /// `psi_k a^{2(1-theta)} / c_k`, which tends to 1 when `theta < 1`.
    pub scaled: f64,
}

/// Tracks `lambda_{n,k} -> -gamma_k` along increasing modes. `k` is one-based.
pub fn pole_limit_study(kernel: &ExponentialKernel, k: usize, theta: f64, a_grid: &[f64]) -> Result<Vec<PoleLimitRow>> {
    if k == 0 || k > kernel.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: kernel.len(),
        });
    }
    if a_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("a_grid must be strictly increasing".into()));
    }
    let ck = kernel.terms()[k - 1].c;
    a_grid
        .iter()
        .map(|&a| {
            let mode = Mode::new(a, theta)?;
            let z = real_zeros(&mode, kernel)?[k - 1];
            Ok(PoleLimitRow {
                a,
                lambda: z.value,
                psi: z.psi,
                scaled: z.psi * mode.threshold() / ck,
            })
        })
        .collect()
}
