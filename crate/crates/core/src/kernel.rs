//! Exponential-sum memory kernels `K(t) = sum c_k exp(-gamma_k t)`, their
//! Laplace transforms, admissibility checks, and the integral approximant
//! used for power-law coefficient families.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{real_over, Accumulator, ComplexAccumulator};
use crate::quad::{self, QuadOptions};

/// Default relative pole guard: evaluation within `1e-12 * gamma_k` of `-gamma_k` is refused.
pub const DEFAULT_POLE_GUARD: f64 = 1e-12;

/// One exponential term `c * exp(-gamma t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub c: f64,
    pub gamma: f64,
}

/// A validated finite exponential kernel with bounds on the omitted tail.
///
/// `tail_s` bounds the omitted part of `sum c_k / gamma_k`; `tail_c` bounds
/// the omitted part of `sum c_k` and is `+inf` when that series diverges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentialKernel {
    terms: Vec<Term>,
    tail_s: f64,
    tail_c: f64,
    pole_guard: f64,
}

impl ExponentialKernel {
    /// Builds an exact finite kernel from `(c_k, gamma_k)` pairs.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidKernel("kernel needs at least one term".into()));
        }
        let mut terms = Vec::with_capacity(pairs.len());
        for (i, &(c, gamma)) in pairs.iter().enumerate() {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidKernel(format!(
                    "term {}: amplitude {c} must be positive",
                    i + 1
                )));
            }
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Error::InvalidKernel(format!(
                    "term {}: decay rate {gamma} must be positive",
                    i + 1
                )));
            }
            terms.push(Term { c, gamma });
        }
        terms.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        if let Some(w) = terms.windows(2).find(|w| w[1].gamma <= w[0].gamma) {
            return Err(Error::InvalidKernel(format!("duplicate decay rate {}", w[0].gamma)));
        }
        Ok(Self {
            terms,
            tail_s: 0.0,
            tail_c: 0.0,
            pole_guard: DEFAULT_POLE_GUARD,
        })
    }

    /// Realizes the first `N` terms of a power-law family and records
    /// integral bounds for the omitted tail.
    pub fn from_power_law(family: &PowerLawFamily) -> Result<Self> {
        family.validate()?;
        let pairs: Vec<(f64, f64)> = (1..=family.n_terms).map(|k| family.term(k)).collect();
        let mut kernel = Self::new(&pairs)?;
        kernel.tail_s = family.tail_s_bound(family.n_terms);
        kernel.tail_c = family.tail_c_bound(family.n_terms);
        Ok(kernel)
    }

    pub fn with_pole_guard(mut self, rel: f64) -> Self {
        self.pole_guard = rel;
        self
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn tail_s(&self) -> f64 {
        self.tail_s
    }

    pub fn tail_c(&self) -> f64 {
        self.tail_c
    }

    pub fn gamma(&self, k: usize) -> f64 {
        self.terms[k].gamma
    }

    pub fn gamma_max(&self) -> f64 {
        self.terms[self.terms.len() - 1].gamma
    }

    /// Partial sum of `c_k / gamma_k` over the stored terms.
    pub fn s_partial(&self) -> f64 {
        let mut acc = Accumulator::for_len(self.terms.len());
        for t in &self.terms {
            acc.add(real_over(t.c, Complex64::new(t.gamma, 0.0)).re);
        }
        acc.value()
    }

    /// `[partial, partial + tail_s]`, the enclosure of `sum c_k / gamma_k`.
    pub fn s_interval(&self) -> (f64, f64) {
        let s = self.s_partial();
        (s, s + self.tail_s)
    }

    /// Partial sum of `c_k` over the stored terms.
    pub fn c_sum(&self) -> f64 {
        let mut acc = Accumulator::for_len(self.terms.len());
        for t in &self.terms {
            acc.add(t.c);
        }
        acc.value()
    }

    pub fn eval_time(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("time {t} must be nonnegative")));
        }
        let mut acc = Accumulator::for_len(self.terms.len());
        for term in &self.terms {
            acc.add(term.c * (-term.gamma * t).exp());
        }
        Ok(acc.value())
    }

    fn guard(&self, lambda: Complex64) -> Result<()> {
        for t in &self.terms {
            let d = (lambda + t.gamma).norm();
            if d < self.pole_guard * t.gamma {
                return Err(Error::PoleProximity {
                    point: format!("{lambda}"),
                    gamma: t.gamma,
                    distance: d,
                });
            }
        }
        Ok(())
    }

    /// `K^(lambda) = sum c_k / (lambda + gamma_k)`.
    pub fn laplace(&self, lambda: Complex64) -> Result<Complex64> {
        self.guard(lambda)?;
        let mut acc = ComplexAccumulator::for_len(self.terms.len());
        for t in &self.terms {
            acc.add(real_over(t.c, lambda + t.gamma));
        }
        Ok(acc.value())
    }

    /// `K^'(lambda) = -sum c_k / (lambda + gamma_k)^2`.
    pub fn laplace_deriv(&self, lambda: Complex64) -> Result<Complex64> {
        self.guard(lambda)?;
        let mut acc = ComplexAccumulator::for_len(self.terms.len());
        for t in &self.terms {
            let z = lambda + t.gamma;
            acc.add(real_over(t.c, z * z));
        }
        Ok(-acc.value())
    }

    /// Real transform at `x = -gamma_k + psi`, with the `k`-th term taken as
    /// `c_k / psi` so that points close to the pole keep full relative precision.
    /// `k` is zero-based.
    pub fn laplace_shifted(&self, k: usize, psi: f64) -> f64 {
        let gk = self.terms[k].gamma;
        let mut acc = Accumulator::for_len(self.terms.len());
        for (j, t) in self.terms.iter().enumerate() {
            if j == k {
                acc.add(t.c / psi);
            } else {
                acc.add(t.c / ((t.gamma - gk) + psi));
            }
        }
        acc.value()
    }

    /// Derivative counterpart of [`Self::laplace_shifted`].
    pub fn laplace_deriv_shifted(&self, k: usize, psi: f64) -> f64 {
        let gk = self.terms[k].gamma;
        let mut acc = Accumulator::for_len(self.terms.len());
        for (j, t) in self.terms.iter().enumerate() {
            let z = if j == k { psi } else { (t.gamma - gk) + psi };
            acc.add(t.c / (z * z));
        }
        -acc.value()
    }

    pub fn check_conditions(&self) -> ConditionReport {
        let (s_lo, s_hi) = self.s_interval();
        let gaps: Vec<f64> = self
            .terms
            .windows(2)
            .map(|w| w[0].gamma * (w[1].gamma - w[0].gamma))
            .collect();
        let gap_sup = gaps.iter().copied().reduce(f64::max);
        ConditionReport {
            s_lo,
            s_hi,
            cond_a: s_hi < 1.0,
            cond_b: self.tail_c.is_finite(),
            c_sum: self.c_sum(),
            gap_sup,
            gap_unbounded_plausible: gap_growth_plausible(&gaps),
        }
    }
}

// Growth of gamma_k (gamma_{k+1} - gamma_k) over the last quarter of the
// stored terms. A finite prefix cannot decide the supremum condition.
fn gap_growth_plausible(gaps: &[f64]) -> bool {
    if gaps.len() < 3 {
        return false;
    }
    let start = gaps.len() - (gaps.len() / 4).max(2);
    let tail = &gaps[start..];
    tail.windows(2).all(|w| w[1] >= w[0]) && gaps[gaps.len() - 1] > 2.0 * gaps[0]
}

/// Results of the admissibility checks on a kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// Enclosure `[s_lo, s_hi]` of `sum c_k / gamma_k`.
    pub s_lo: f64,
    pub s_hi: f64,
    /// `sum c_k / gamma_k < 1`, decided on the upper end of the enclosure.
    pub cond_a: bool,
    /// `sum c_k < inf`.
    pub cond_b: bool,
    pub c_sum: f64,
    /// `max_k gamma_k (gamma_{k+1} - gamma_k)` over stored terms; `None` for one term.
    pub gap_sup: Option<f64>,
    pub gap_unbounded_plausible: bool,
}

/// Power-law coefficients `c_k = A / k^alpha`, `gamma_k = B k^beta`, truncated at `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFamily {
    #[serde(rename = "A")]
    pub amp: f64,
    #[serde(rename = "B")]
    pub scale: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n_terms: usize,
}

impl PowerLawFamily {
    pub fn new(amp: f64, scale: f64, alpha: f64, beta: f64, n_terms: usize) -> Result<Self> {
        let f = Self {
            amp,
            scale,
            alpha,
            beta,
            n_terms,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidKernel(format!("{name} = {v} must be positive")))
            }
        };
        positive("A", self.amp)?;
        positive("B", self.scale)?;
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        if self.alpha + self.beta <= 1.0 {
            return Err(Error::InvalidKernel(format!(
                "alpha + beta = {} must exceed 1",
                self.alpha + self.beta
            )));
        }
        if self.n_terms == 0 {
            return Err(Error::InvalidKernel("truncation N must be at least 1".into()));
        }
        Ok(())
    }

    /// `(alpha + beta - 1) / beta`.
    pub fn r(&self) -> f64 {
        (self.alpha + self.beta - 1.0) / self.beta
    }

    pub fn with_terms(mut self, n_terms: usize) -> Self {
        self.n_terms = n_terms;
        self
    }

    /// `(c_k, gamma_k)` for one-based `k`.
    pub fn term(&self, k: usize) -> (f64, f64) {
        let k = k as f64;
        (self.amp / k.powf(self.alpha), self.scale * k.powf(self.beta))
    }

    /// `(A/B) int_N^inf x^{-(alpha+beta)} dx`, bounding `sum_{k>N} c_k / gamma_k`.
    pub fn tail_s_bound(&self, n: usize) -> f64 {
        let p = self.alpha + self.beta;
        (self.amp / self.scale) * (n as f64).powf(1.0 - p) / (p - 1.0)
    }

    /// Bound on `sum_{k>N} c_k`; infinite when `alpha <= 1`.
    pub fn tail_c_bound(&self, n: usize) -> f64 {
        if self.alpha <= 1.0 {
            f64::INFINITY
        } else {
            self.amp * (n as f64).powf(1.0 - self.alpha) / (self.alpha - 1.0)
        }
    }

    /// Smallest power-of-two-ish truncation whose `tail_s` falls below `bound`.
    pub fn terms_for_tail(&self, bound: f64) -> usize {
        let p = self.alpha + self.beta - 1.0;
        let n = ((self.amp / self.scale) / (p * bound)).powf(1.0 / p);
        (n.ceil() as usize).max(1)
    }
}

/// Checks `|arg lambda| < pi - delta`.
pub fn check_sector(lambda: Complex64, delta: f64) -> Result<()> {
    let arg = lambda.arg();
    if lambda.norm() > 0.0 && arg.abs() >= PI - delta {
        return Err(Error::SectorViolation {
            point: format!("{lambda}"),
            arg,
            delta,
        });
    }
    Ok(())
}

/// Default sector half-width used by [`integral_approximant_h`].
pub const DEFAULT_SECTOR_DELTA: f64 = 1e-2;

/// `h(lambda) = int_1^inf A dx / (x^alpha (lambda + B x^beta))`.
///
/// The range `[1, X]` is integrated in `u = ln x` with adaptive Gauss–Kronrod
/// panels, split where `B x^beta = |lambda|`; beyond `X` the integrand is
/// expanded in powers of `lambda / (B x^beta)` and integrated term by term.
pub fn integral_approximant_h(family: &PowerLawFamily, lambda: Complex64, delta: f64) -> Result<Complex64> {
    family.validate()?;
    check_sector(lambda, delta)?;
    let PowerLawFamily {
        amp,
        scale,
        alpha,
        beta,
        ..
    } = *family;

    let mag = lambda.norm();
    let x_cut = ((1e3 * mag / scale).powf(1.0 / beta)).max(1.0);
    let u_cut = x_cut.ln();

    let integrand = |u: f64| {
        let x_beta = (beta * u).exp();
        let num = amp * ((1.0 - alpha) * u).exp();
        Complex64::new(num, 0.0) / (lambda + scale * x_beta)
    };
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_panels: 8000,
    };
    let mut body = Complex64::new(0.0, 0.0);
    if u_cut > 0.0 {
        let u_knee = (mag / scale).ln() / beta;
        let mut cuts = vec![0.0];
        if u_knee > 0.0 && u_knee < u_cut {
            cuts.push(u_knee);
        }
        cuts.push(u_cut);
        for w in cuts.windows(2) {
            body += quad::integrate(integrand, w[0], w[1], opts)?.value;
        }
    }

    // Tail: (A/B) sum_j q^j X^{1-alpha-beta} / (alpha + beta - 1 + j beta), q = -lambda / (B X^beta).
    let q = -lambda / (scale * x_cut.powf(beta));
    let lead = (amp / scale) * x_cut.powf(1.0 - alpha - beta);
    let mut tail = Complex64::new(0.0, 0.0);
    let mut qj = Complex64::new(1.0, 0.0);
    for j in 0..200 {
        let term = qj * (lead / (alpha + beta - 1.0 + j as f64 * beta));
        tail += term;
        if term.norm() <= 1e-18 * (tail.norm() + body.norm()) {
            break;
        }
        qj *= q;
    }
    Ok(body + tail)
}

/// One row of a sector-decay probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub radius: f64,
    pub arg: f64,
    pub k_abs: f64,
    pub lambda_kprime_abs: f64,
    /// `|lambda (K^ - h)|`, present when a power-law family is supplied.
    pub lambda_diff_abs: Option<f64>,
}

/// Per-ray verdicts of a sector-decay probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayVerdict {
    pub arg: f64,
    /// `|K^|` fails to decrease strictly somewhere along the ray.
    pub k_not_decreasing: bool,
    /// `|lambda K^'|` fails to decrease strictly somewhere along the ray.
    pub kprime_not_decreasing: bool,
    /// max/min over the last three `|lambda (K^ - h)|` samples exceeds [`BOUNDED_RATIO`].
    pub diff_unbounded: bool,
}

/// Largest admissible max/min ratio over the last three `|lambda (K^ - h)|` samples.
pub const BOUNDED_RATIO: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    pub rays: Vec<RayVerdict>,
}

impl ProbeTable {
    pub fn pass(&self) -> bool {
        self.rays
            .iter()
            .all(|r| !r.k_not_decreasing && !r.kprime_not_decreasing && !r.diff_unbounded)
    }
}

/// Samples `|K^|`, `|lambda K^'|` and optionally `|lambda (K^ - h)|` along rays.
/// Comparisons are written negated so that NaN samples raise the flags.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn sector_decay_probe(
    kernel: &ExponentialKernel,
    family: Option<&PowerLawFamily>,
    delta: f64,
    radii: &[f64],
    angles: &[f64],
) -> Result<ProbeTable> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("probe radii must be increasing".into()));
    }
    let mut rows = Vec::with_capacity(radii.len() * angles.len());
    let mut rays = Vec::with_capacity(angles.len());
    for &arg in angles {
        let start = rows.len();
        for &radius in radii {
            let lambda = Complex64::from_polar(radius, arg);
            check_sector(lambda, delta)?;
            let k = kernel.laplace(lambda)?;
            let kp = kernel.laplace_deriv(lambda)?;
            let lambda_diff_abs = match family {
                Some(f) => Some((lambda * (k - integral_approximant_h(f, lambda, delta)?)).norm()),
                None => None,
            };
            rows.push(ProbeRow {
                radius,
                arg,
                k_abs: k.norm(),
                lambda_kprime_abs: (lambda * kp).norm(),
                lambda_diff_abs,
            });
        }
        let ray = &rows[start..];
        let diffs: Vec<f64> = ray.iter().filter_map(|r| r.lambda_diff_abs).collect();
        let diff_unbounded = if diffs.len() >= 3 {
            let last = &diffs[diffs.len() - 3..];
            let hi = last.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = last.iter().copied().fold(f64::INFINITY, f64::min);
            !(hi <= BOUNDED_RATIO * lo)
        } else {
            false
        };
        rays.push(RayVerdict {
            arg,
            k_not_decreasing: ray.windows(2).any(|w| !(w[1].k_abs < w[0].k_abs)),
            kprime_not_decreasing: ray
                .windows(2)
                .any(|w| !(w[1].lambda_kprime_abs < w[0].lambda_kprime_abs)),
            diff_unbounded,
        });
    }
    Ok(ProbeTable { rows, rays })
}
