//! Time-domain check of the spectrum: integrates the modal ODE in the state
//! `(u, v, w_1..w_N)` and compares the observed energy decay with the
//! rightmost eigenvalue.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::ExponentialKernel;
use crate::numeric::ls_slope;
use crate::oracle::{augmented_matrix, matrix_eigs};
use crate::symbol::Mode;

/// Minimum envelope peaks for a fit.
pub const MIN_PEAKS: usize = 10;
/// Required lead of the rightmost eigenvalue over the rest, in real part.
pub const DOMINANCE_GAP: f64 = 0.05;
/// Relative tolerance between fitted rate / 2 and the abscissa.
pub const RATE_TOL: f64 = 0.05;

/// Initial-value problem `u' = v`, `v' = -a^2 u + g sum c_k w_k`, `w_k' = u - gamma_k w_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalSystem {
    pub a: f64,
    /// Kernel weight `a^{2 theta}`; zero removes the memory term.
    pub coupling: f64,
    pub c: Vec<f64>,
    pub gamma: Vec<f64>,
    pub state0: Vec<f64>,
}

impl ModalSystem {
    pub fn dim(&self) -> usize {
        self.state0.len()
    }

    /// Same system with the memory term switched off.
    pub fn without_memory(mut self) -> Self {
        self.coupling = 0.0;
        self
    }

    /// Largest step allowed: `0.1 / max(a, gamma_N)`.
    pub fn max_step(&self) -> f64 {
        let g = self.gamma.iter().copied().fold(0.0, f64::max);
        0.1 / self.a.max(g)
    }

    fn rhs(&self, x: &[f64], out: &mut [f64]) {
        let (u, v) = (x[0], x[1]);
        let mut mem = 0.0;
        for (k, (&c, &g)) in self.c.iter().zip(&self.gamma).enumerate() {
            mem += c * x[k + 2];
            out[k + 2] = u - g * x[k + 2];
        }
        out[0] = v;
        out[1] = -self.a * self.a * u + self.coupling * mem;
    }
}

/// State starts at `(u0, v0, 0, ..., 0)`.
pub fn assemble(mode: &Mode, kernel: &ExponentialKernel, u0: f64, v0: f64) -> ModalSystem {
    let mut state0 = vec![0.0; kernel.len() + 2];
    state0[0] = u0;
    state0[1] = v0;
    ModalSystem {
        a: mode.a,
        coupling: mode.coupling(),
        c: kernel.terms().iter().map(|t| t.c).collect(),
        gamma: kernel.terms().iter().map(|t| t.gamma).collect(),
        state0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `a^2 u^2 + v^2`.
    pub energy: Vec<f64>,
    pub fitted_rate: Option<f64>,
    /// Full state at the final time.
    pub final_state: Vec<f64>,
}

/// Classical fourth-order Runge-Kutta with `round(T / dt)` equal steps.
pub fn integrate(sys: &ModalSystem, t_end: f64, dt: f64) -> Result<SimTrace> {
    if !(t_end > 0.0 && dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need T > 0 and dt > 0, got T = {t_end}, dt = {dt}"
        )));
    }
    let limit = sys.max_step();
    if dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let n = sys.dim();
    let a2 = sys.a * sys.a;

    let mut x = sys.state0.clone();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut times = Vec::with_capacity(steps + 1);
    let mut u = Vec::with_capacity(steps + 1);
    let mut v = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps + 1);
    let mut record = |i: usize, x: &[f64]| {
        times.push(i as f64 * h);
        u.push(x[0]);
        v.push(x[1]);
        energy.push(a2 * x[0] * x[0] + x[1] * x[1]);
    };
    record(0, &x);
    for i in 1..=steps {
        sys.rhs(&x, &mut k1);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        sys.rhs(&tmp, &mut k2);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        sys.rhs(&tmp, &mut k3);
        for j in 0..n {
            tmp[j] = x[j] + h * k3[j];
        }
        sys.rhs(&tmp, &mut k4);
        for j in 0..n {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        record(i, &x);
    }
    let mut trace = SimTrace {
        times,
        u,
        v,
        energy,
        fitted_rate: None,
        final_state: x,
    };
    trace.fitted_rate = decay_rate(&trace).ok();
    Ok(trace)
}

/// Slope of `ln E` fitted through the strict local maxima of `E`. A trace
/// that is monotone over its second half has no oscillating envelope; it is
/// fitted through 20 evenly spaced samples of that half instead.
pub fn decay_rate(trace: &SimTrace) -> Result<f64> {
    let e = &trace.energy;
    let n = e.len();
    let peaks: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| e[i] > e[i - 1] && e[i] >= e[i + 1] && e[i] > 0.0)
        .collect();
    if peaks.len() >= MIN_PEAKS {
        let ts: Vec<f64> = peaks.iter().map(|&i| trace.times[i]).collect();
        let ls: Vec<f64> = peaks.iter().map(|&i| e[i].ln()).collect();
        return Ok(ls_slope(&ts, &ls));
    }
    let half = &e[n / 2..];
    let monotone = half.windows(2).all(|w| w[1] >= w[0]) || half.windows(2).all(|w| w[1] <= w[0]);
    if n >= 40 && monotone && half.iter().all(|&x| x > 0.0) {
        let idx: Vec<usize> = (0..20).map(|j| n / 2 + j * (n - 1 - n / 2) / 19).collect();
        let ts: Vec<f64> = idx.iter().map(|&i| trace.times[i]).collect();
        let ls: Vec<f64> = idx.iter().map(|&i| e[i].ln()).collect();
        return Ok(ls_slope(&ts, &ls));
    }
    Err(Error::InsufficientPeaks {
        found: peaks.len(),
        needed: MIN_PEAKS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub mode: Mode,
    pub t_end: f64,
    pub dt: f64,
    pub fitted_rate: f64,
    /// Largest real part among the ODE-matrix eigenvalues.
    pub abscissa: f64,
    /// Lead of the rightmost eigenvalue (or conjugate pair) over the next one.
    pub dominance_gap: f64,
    pub dominant: bool,
    pub rel_err: f64,
    pub pass: bool,
}

/// Rightmost real part and its lead over all eigenvalues outside the
/// rightmost conjugate group.
pub fn abscissa_and_gap(eigs: &[Complex64]) -> (f64, f64) {
    let top = eigs
        .iter()
        .copied()
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .unwrap_or(Complex64::new(f64::NEG_INFINITY, 0.0));
    let rest = eigs
        .iter()
        .filter(|z| {
            (**z - top).norm() > 1e-12 * (1.0 + top.norm()) && (**z - top.conj()).norm() > 1e-12 * (1.0 + top.norm())
        })
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    (top.re, top.re - rest)
}

/// Integrates from `(u, v) = (1, 0)` and compares `fitted_rate / 2` with the
/// abscissa. Passing requires both a dominant eigenvalue group and agreement
/// within [`RATE_TOL`].
pub fn abscissa_consistency(mode: &Mode, kernel: &ExponentialKernel, t_end: f64, dt: f64) -> Result<ConsistencyReport> {
    let trace = integrate(&assemble(mode, kernel, 1.0, 0.0), t_end, dt)?;
    consistency_of(mode, kernel, &trace)
}

/// The comparison behind [`abscissa_consistency`] for a trace already integrated
/// from `(u, v) = (1, 0)`.
pub fn consistency_of(mode: &Mode, kernel: &ExponentialKernel, trace: &SimTrace) -> Result<ConsistencyReport> {
    let t_end = trace.times.last().copied().unwrap_or(0.0);
    let dt = if trace.times.len() > 1 {
        trace.times[1] - trace.times[0]
    } else {
        0.0
    };
    let fitted_rate = decay_rate(trace)?;
    let eigs = matrix_eigs(&augmented_matrix(mode, kernel))?;
    let (abscissa, dominance_gap) = abscissa_and_gap(&eigs);
    let rel_err = (fitted_rate / 2.0 - abscissa).abs() / abscissa.abs().max(1e-6);
    let dominant = dominance_gap >= DOMINANCE_GAP;
    Ok(ConsistencyReport {
        mode: *mode,
        t_end,
        dt,
        fitted_rate,
        abscissa,
        dominance_gap,
        dominant,
        rel_err,
        pass: dominant && rel_err <= RATE_TOL,
    })
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::roots::{full_slice, RootOptions};
    use std::f64::consts::PI;

    fn kernel(pairs: &[(f64, f64)]) -> ExponentialKernel {
        ExponentialKernel::new(pairs).unwrap()
    }

    fn mode(a: f64, theta: f64) -> Mode {
        Mode::new(a, theta).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let s = assemble(&mode(1.0, 0.0), &kernel(&[(1.0, 2.0)]), 1.0, 0.0);
        assert_eq!(s.state0, vec![1.0, 0.0, 0.0]);
        assert_eq!(
            assemble(&mode(1.0, 0.0), &kernel(&[(1.0, 2.0), (1.0, 3.0)]), 1.0, 0.0).dim(),
            4
        );
        let zero = assemble(&mode(1.0, 0.0), &kernel(&[(1.0, 2.0)]), 0.0, 0.0);
        let t = integrate(&zero, 5.0, 0.01).unwrap();
        assert!(t.u.iter().chain(&t.v).all(|&x| x == 0.0));
    }

    #[test]
    fn harmonic_limit() {
        let s = assemble(&mode(1.0, 0.0), &kernel(&[(1.0, 2.0)]), 1.0, 0.0).without_memory();
        let t = integrate(&s, 2.0 * PI, 1e-3).unwrap();
        assert!((t.u.last().unwrap() - 1.0).abs() <= 1e-6);
        let e0 = t.energy[0];
        let drift = t.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0;
        assert!(drift <= 1e-8, "{drift}");
        let long = integrate(&s, 100.0, 1e-3).unwrap();
        assert!(decay_rate(&long).unwrap().abs() <= 1e-6);
    }

    #[test]
    fn step_limit_enforced() {
        let s = assemble(&mode(10.0, 0.0), &kernel(&[(1.0, 2.0)]), 1.0, 0.0);
        assert!(matches!(integrate(&s, 1.0, 0.02), Err(Error::StepTooLarge { .. })));
        assert!(integrate(&s, 1.0, 0.01).is_ok());
    }

    #[test]
    fn decay_matches_abscissa() {
        let r = abscissa_consistency(&mode(1.0, 0.0), &kernel(&[(1.0, 2.0)]), 200.0, 1e-3).unwrap();
        assert!((r.abscissa + 0.1226).abs() < 1e-4);
        assert!(r.pass, "{r:?}");

        let r = abscissa_consistency(&mode(1.0, 0.0), &kernel(&[(4.0, 2.0)]), 30.0, 1e-3).unwrap();
        assert!((r.fitted_rate - 2.0 * 0.696).abs() < 0.05 * 2.0 * 0.696);
        assert!(r.pass, "{r:?}");

        let r = abscissa_consistency(&mode(2.0, 1.0), &kernel(&[(1.0, 1.0), (1.0, 3.0)]), 40.0, 1e-3).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn too_few_peaks() {
        let s = assemble(&mode(1.0, 0.0), &kernel(&[(1.0, 2.0)]), 1.0, 0.0);
        let t = integrate(&s, 3.0, 1e-3).unwrap();
        assert!(matches!(decay_rate(&t), Err(Error::InsufficientPeaks { .. })));
    }

    // Solves a small dense complex system by Gaussian elimination with partial pivoting.
    fn solve(mut m: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
        let n = b.len();
        for col in 0..n {
            let p = (col..n)
                .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
                .unwrap();
            m.swap(col, p);
            b.swap(col, p);
            for row in col + 1..n {
                let f = m[row][col] / m[col][col];
                for k in col..n {
                    let t = m[col][k];
                    m[row][k] -= f * t;
                }
                let t = b[col];
                b[row] -= f * t;
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for row in (0..n).rev() {
            let s: Complex64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / m[row][row];
        }
        x
    }

    #[test]
    fn matches_modal_superposition() {
        for (a, theta, pairs) in [
            (1.0, 0.0, vec![(1.0, 2.0)]),
            (2.0, 0.5, vec![(0.5, 1.0), (1.0, 3.0)]),
            (3.0, 0.25, vec![(0.2, 0.5), (1.0, 2.0), (0.7, 4.0), (0.1, 6.0)]),
        ] {
            let m = mode(a, theta);
            let k = kernel(&pairs);
            let zeros = full_slice(&m, &k, &RootOptions::default()).unwrap().all_zeros();
            // Eigenvector for eigenvalue z: (1, z, 1 / (z + gamma_k)).
            let n = zeros.len();
            let mut cols = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            for (j, z) in zeros.iter().enumerate() {
                cols[0][j] = Complex64::new(1.0, 0.0);
                cols[1][j] = *z;
                for (i, t) in k.terms().iter().enumerate() {
                    cols[i + 2][j] = 1.0 / (z + t.gamma);
                }
            }
            let sys = assemble(&m, &k, 1.0, 0.5);
            let b: Vec<Complex64> = sys.state0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let coef = solve(cols.clone(), b);
            let t_end = 4.0;
            let trace = integrate(&sys, t_end, 1e-3).unwrap();
            for row in 0..n {
                let exact: Complex64 = (0..n).map(|j| coef[j] * cols[row][j] * (zeros[j] * t_end).exp()).sum();
                let got = trace.final_state[row];
                assert!(
                    (got - exact.re).abs() <= 1e-6 * exact.norm().max(1e-3),
                    "row {row}: {got} vs {exact}"
                );
            }
        }
    }
}
