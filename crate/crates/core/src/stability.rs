//! Half-plane stability: compares `S = sum c_k / gamma_k` with the per-mode
//! thresholds `a^{2(1-theta)}`, locates positive real zeros of unstable modes
//! and confirms that no zero lies on the imaginary axis.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::ExponentialKernel;
use crate::numeric::Accumulator;
use crate::roots::{positive_real_zero, residual_tol, RootOptions};
use crate::symbol::{eval_ell, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnstableRoot {
    /// One-based position in the mode list.
    pub mode_index: usize,
    pub root: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `[S_N, S_N + tail_S]`.
    pub s: (f64, f64),
    pub thresholds: Vec<f64>,
    pub mode_verdicts: Vec<Verdict>,
    pub verdict: Verdict,
    #[serde(rename = "N0")]
    pub n0: usize,
    pub unstable_roots: Vec<UnstableRoot>,
}

fn mode_verdict(s: (f64, f64), threshold: f64) -> Verdict {
    if s.1 < threshold {
        Verdict::Stable
    } else if s.0 > threshold {
        Verdict::Unstable
    } else {
        Verdict::Indeterminate
    }
}

/// Classifies each mode and the list as a whole. One definitely unstable mode
/// makes the whole list `Unstable`. Otherwise any straddling mode, including
/// exact equality with a threshold, makes it `Indeterminate`.
pub fn classify(kernel: &ExponentialKernel, modes: &[Mode]) -> Result<StabilityReport> {
    if modes.is_empty() {
        return Err(Error::InvalidParameter("at least one mode is required".into()));
    }
    if modes.windows(2).any(|w| w[1].a < w[0].a) {
        return Err(Error::InvalidParameter(
            "modes must be ordered by nondecreasing a".into(),
        ));
    }
    let s = kernel.s_interval();
    let thresholds: Vec<f64> = modes.iter().map(Mode::threshold).collect();
    let mode_verdicts: Vec<Verdict> = thresholds.iter().map(|&t| mode_verdict(s, t)).collect();
    let mut unstable_roots = Vec::new();
    for (i, (m, v)) in modes.iter().zip(&mode_verdicts).enumerate() {
        if *v == Verdict::Unstable {
            let root = unstable_root(m, kernel)?;
            let residual = eval_ell(m, kernel, Complex64::new(root, 0.0))?.norm();
            unstable_roots.push(UnstableRoot {
                mode_index: i + 1,
                root,
                residual,
            });
        }
    }
    let verdict = if !unstable_roots.is_empty() {
        Verdict::Unstable
    } else if mode_verdicts.contains(&Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::Stable
    };
    Ok(StabilityReport {
        s,
        thresholds,
        mode_verdicts,
        verdict,
        n0: unstable_roots.len(),
        unstable_roots,
    })
}

/// The positive real zero of `l_n` when `S_N > a^{2(1-theta)}`.
pub fn unstable_root(mode: &Mode, kernel: &ExponentialKernel) -> Result<f64> {
    let z = positive_real_zero(mode, kernel)?;
    let residual = eval_ell(mode, kernel, Complex64::new(z.value, 0.0))?.norm();
    let tol = residual_tol(mode, &RootOptions::default());
    if residual > tol {
        return Err(Error::NoConvergence {
            last: format!("{}", z.value),
            residual,
        });
    }
    Ok(z.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisRow {
    pub y: f64,
    pub abs_ell: f64,
    pub im_direct: f64,
    /// `y a^{2 theta} sum c_k / (y^2 + gamma_k^2)`.
    pub im_closed: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisReport {
    pub rows: Vec<AxisRow>,
    pub min_abs_ell: f64,
    pub max_rel_err: f64,
    /// `Re l_n(0) = a^{2 theta} (a^{2(1-theta)} - S)`, present when `y = 0` is on the grid.
    pub re_at_zero: Option<f64>,
}

impl AxisReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.min_abs_ell > 0.0 && self.max_rel_err <= tol && self.re_at_zero.is_none_or(|r| r > 0.0)
    }
}

pub fn imaginary_axis_check(mode: &Mode, kernel: &ExponentialKernel, y_grid: &[f64]) -> Result<AxisReport> {
    let w = mode.coupling();
    let mut rows = Vec::with_capacity(y_grid.len());
    let mut re_at_zero = None;
    for &y in y_grid {
        let ell = eval_ell(mode, kernel, Complex64::new(0.0, y))?;
        if y == 0.0 {
            re_at_zero = Some(w * (mode.threshold() - kernel.s_partial()));
        }
        let mut acc = Accumulator::for_len(kernel.len());
        for t in kernel.terms() {
            acc.add(t.c / (y * y + t.gamma * t.gamma));
        }
        let im_closed = y * w * acc.value();
        let rel_err = if im_closed == 0.0 {
            ell.im.abs()
        } else {
            (ell.im - im_closed).abs() / im_closed.abs()
        };
        rows.push(AxisRow {
            y,
            abs_ell: ell.norm(),
            im_direct: ell.im,
            im_closed,
            rel_err,
        });
    }
    Ok(AxisReport {
        min_abs_ell: rows.iter().map(|r| r.abs_ell).fold(f64::INFINITY, f64::min),
        max_rel_err: rows.iter().map(|r| r.rel_err).fold(0.0, f64::max),
        rows,
        re_at_zero,
    })
}
