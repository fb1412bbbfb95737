//! Independent ground truth for the root finders: companion-matrix roots of
//! the cleared symbol polynomial, eigenvalues of the augmented modal ODE
//! matrix, and the Vieta identities for sum and product of all zeros.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::ExponentialKernel;
use crate::linalg::{self, DenseMatrix};
use crate::roots::{self, RootOptions};
use crate::symbol::{poly_coeffs, Mode, SymbolPolynomial};

/// Largest polynomial degree / matrix dimension handled by the oracle.
pub const MAX_ORACLE_DIM: usize = 66;

/// Largest kernel accepted by [`crosscheck`].
pub const CROSSCHECK_MAX_TERMS: usize = 12;

/// Relative route-agreement tolerance: `|z1 - z2| <= tol * (1 + |z1|)`.
pub const AGREEMENT_TOL: f64 = 1e-8;

/// All roots of a monic polynomial via its balanced companion matrix, sorted by `(re, im)`.
pub fn companion_roots(poly: &SymbolPolynomial) -> Result<Vec<Complex64>> {
    let d = poly.degree();
    if d > MAX_ORACLE_DIM {
        return Err(Error::InvalidParameter(format!("degree {d} exceeds {MAX_ORACLE_DIM}")));
    }
    if poly.coeffs[0] != 1.0 {
        return Err(Error::InvalidParameter("polynomial must be monic".into()));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut m = DenseMatrix::zeros(d);
    for j in 0..d {
        m.set(0, j, -poly.coeffs[j + 1]);
    }
    for i in 1..d {
        m.set(i, i - 1, 1.0);
    }
    linalg::balance(&mut m);
    linalg::hqr(&m)
}

/// Value and first derivative carried together through products.
#[derive(Clone, Copy)]
struct Dual {
    v: Complex64,
    d: Complex64,
}

impl Dual {
    const ONE: Dual = Dual {
        v: Complex64 { re: 1.0, im: 0.0 },
        d: Complex64 { re: 0.0, im: 0.0 },
    };

    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

/// The cleared symbol `(z^2 + a^2) prod (z + gamma_j) - a^{2 theta} sum c_k prod_{j != k} (z + gamma_j)`
/// and its derivative, evaluated in product form without expanding coefficients.
pub fn product_form(mode: &Mode, kernel: &ExponentialKernel, z: Complex64) -> (Complex64, Complex64) {
    let terms = kernel.terms();
    let n = terms.len();
    let factor = |g: f64| Dual {
        v: z + g,
        d: Complex64::new(1.0, 0.0),
    };
    let mut suffix = vec![Dual::ONE; n + 1];
    for k in (0..n).rev() {
        suffix[k] = factor(terms[k].gamma).mul(suffix[k + 1]);
    }
    let mut prefix = Dual::ONE;
    let mut q = Dual {
        v: Complex64::new(0.0, 0.0),
        d: Complex64::new(0.0, 0.0),
    };
    for k in 0..n {
        let others = prefix.mul(suffix[k + 1]);
        q.v += others.v * terms[k].c;
        q.d += others.d * terms[k].c;
        prefix = prefix.mul(factor(terms[k].gamma));
    }
    let quad = Dual {
        v: z * z + mode.a2(),
        d: z * 2.0,
    };
    let lead = quad.mul(prefix);
    let w = mode.coupling();
    (lead.v - q.v * w, lead.d - q.d * w)
}

/// Companion roots refined by a few guarded Newton steps on [`product_form`],
/// which removes the error introduced by expanding the coefficients. A root
/// is never moved by more than `1e-5 (1 + |z|)`, so a genuinely wrong
/// polynomial still shows up as a mismatch.
pub fn companion_roots_refined(
    mode: &Mode,
    kernel: &ExponentialKernel,
    poly: &SymbolPolynomial,
) -> Result<Vec<Complex64>> {
    let mut roots = companion_roots(poly)?;
    for z in roots.iter_mut() {
        let start = *z;
        let (mut p, _) = product_form(mode, kernel, *z);
        for _ in 0..8 {
            let (_, dp) = product_form(mode, kernel, *z);
            let step = p / dp;
            let mut next = *z - step;
            if !(step.re.is_finite() && step.im.is_finite()) || (next - start).norm() > 1e-5 * (1.0 + start.norm()) {
                break;
            }
            if start.im == 0.0 {
                next.im = 0.0;
            }
            let (pn, _) = product_form(mode, kernel, next);
            if pn.norm() >= p.norm() {
                break;
            }
            *z = next;
            p = pn;
        }
    }
    linalg::sort_lex(&mut roots);
    Ok(roots)
}

/// System matrix of the modal ODE in the state `(u, v, w_1..w_N)`:
/// `u' = v`, `v' = -a^2 u + a^{2 theta} sum c_k w_k`, `w_k' = u - gamma_k w_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentedMatrix {
    pub matrix: DenseMatrix,
}

impl AugmentedMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

pub fn augmented_matrix(mode: &Mode, kernel: &ExponentialKernel) -> AugmentedMatrix {
    let n = kernel.len();
    let mut m = DenseMatrix::zeros(n + 2);
    m.set(0, 1, 1.0);
    m.set(1, 0, -mode.a2());
    let w = mode.coupling();
    for (k, t) in kernel.terms().iter().enumerate() {
        m.set(1, k + 2, w * t.c);
        m.set(k + 2, 0, 1.0);
        m.set(k + 2, k + 2, -t.gamma);
    }
    AugmentedMatrix { matrix: m }
}

pub fn matrix_eigs(m: &AugmentedMatrix) -> Result<Vec<Complex64>> {
    if m.dim() > MAX_ORACLE_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {} exceeds {MAX_ORACLE_DIM}",
            m.dim()
        )));
    }
    linalg::eigenvalues(&m.matrix)
}

/// Normalized residuals of the sum and product identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VietaResiduals {
    /// `|sum z + sum gamma| / (sum |z| + sum gamma)`.
    pub sum_residual: f64,
    /// `|prod z - P| / |P|` with `P = (-1)^{N+2} a^2 prod gamma (1 - S_N / a^{2(1-theta)})`.
    pub prod_residual: f64,
}

impl VietaResiduals {
    pub fn within(&self, tol: f64) -> bool {
        self.sum_residual <= tol && self.prod_residual <= tol
    }
}

/// Checks the complete zero set of `l_{n,N}` against the Vieta identities
/// written directly in terms of the kernel and mode.
pub fn vieta_check(mode: &Mode, kernel: &ExponentialKernel, zeros: &[Complex64]) -> VietaResiduals {
    let n = kernel.len();
    let gamma_sum: f64 = kernel.terms().iter().map(|t| t.gamma).sum();
    let sum: Complex64 = zeros.iter().sum();
    let scale: f64 = zeros.iter().map(|z| z.norm()).sum::<f64>() + gamma_sum;
    let sum_residual = (sum + gamma_sum).norm() / scale;

    let gamma_prod: f64 = kernel.terms().iter().map(|t| t.gamma).product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let expected = sign * mode.a2() * gamma_prod * (1.0 - kernel.s_partial() / mode.threshold());
    let prod: Complex64 = zeros.iter().product();
    let denom = if expected != 0.0 {
        expected.abs()
    } else {
        zeros.iter().map(|z| z.norm()).product::<f64>().max(f64::MIN_POSITIVE)
    };
    VietaResiduals {
        sum_residual,
        prod_residual: (prod - expected).norm() / denom,
    }
}

/// Greedy nearest-neighbour matching after lexicographic sort; returns the
/// largest normalized distance `|a - b| / (1 + |a|)` over matched pairs.
pub fn match_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    linalg::sort_lex(&mut a);
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for z in &a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (z - w).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if j == usize::MAX {
            return f64::INFINITY;
        }
        used[j] = true;
        worst = worst.max(d / (1.0 + z.norm()));
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub mode: Mode,
    pub analytic: Vec<Complex64>,
    pub companion: Vec<Complex64>,
    pub matrix: Vec<Complex64>,
    pub analytic_vs_companion: f64,
    pub analytic_vs_matrix: f64,
    pub companion_vs_matrix: f64,
    pub vieta: VietaResiduals,
    pub pass: bool,
}

/// Runs all three routes on one mode and compares their zero sets.
pub fn crosscheck(mode: &Mode, kernel: &ExponentialKernel) -> Result<CrosscheckReport> {
    crosscheck_with(mode, kernel, |p| p)
}

/// As [`crosscheck`], with a hook that may alter the polynomial before the
/// companion route runs. Used for negative controls.
pub fn crosscheck_with<F>(mode: &Mode, kernel: &ExponentialKernel, tamper: F) -> Result<CrosscheckReport>
where
    F: FnOnce(SymbolPolynomial) -> SymbolPolynomial,
{
    if kernel.len() > CROSSCHECK_MAX_TERMS {
        return Err(Error::TooManyTerms {
            terms: kernel.len(),
            cap: CROSSCHECK_MAX_TERMS,
        });
    }
    let slice = roots::full_slice(mode, kernel, &RootOptions::default())?;
    let mut analytic = slice.all_zeros();
    linalg::sort_lex(&mut analytic);
    let companion = companion_roots_refined(mode, kernel, &tamper(poly_coeffs(mode, kernel)?))?;
    let matrix = matrix_eigs(&augmented_matrix(mode, kernel))?;

    let analytic_vs_companion = match_distance(&analytic, &companion);
    let analytic_vs_matrix = match_distance(&analytic, &matrix);
    let companion_vs_matrix = match_distance(&companion, &matrix);
    let vieta = vieta_check(mode, kernel, &analytic);
    let pass = analytic_vs_companion <= AGREEMENT_TOL
        && analytic_vs_matrix <= AGREEMENT_TOL
        && companion_vs_matrix <= AGREEMENT_TOL;
    Ok(CrosscheckReport {
        mode: *mode,
        analytic,
        companion,
        matrix,
        analytic_vs_companion,
        analytic_vs_matrix,
        companion_vs_matrix,
        vieta,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kernel(pairs: &[(f64, f64)]) -> ExponentialKernel {
        ExponentialKernel::new(pairs).unwrap()
    }

    // Real root of x^3 + 2x^2 + x + 1 from Cardano's formula; the complex
    // pair follows from sum = -2 and product = -1.
    fn cubic_reference() -> (f64, Complex64) {
        // Depressed form t^3 + p t + q with x = t - 2/3.
        let p: f64 = 1.0 - 4.0 / 3.0;
        let q: f64 = 2.0 * 8.0 / 27.0 - 2.0 / 3.0 + 1.0;
        let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
        let t = (-q / 2.0 + disc.sqrt()).cbrt() + (-q / 2.0 - disc.sqrt()).cbrt();
        let x = t - 2.0 / 3.0;
        let re = (-2.0 - x) / 2.0;
        let modulus2 = -1.0 / x;
        (x, c(re, (modulus2 - re * re).sqrt()))
    }

    #[test]
    fn companion_examples() {
        let (x, pair) = cubic_reference();
        assert!((x + 1.7549).abs() < 1e-4);
        let r = companion_roots(&SymbolPolynomial {
            coeffs: vec![1.0, 2.0, 1.0, 1.0],
        })
        .unwrap();
        assert!((r[0] - c(x, 0.0)).norm() < 1e-13);
        assert!((r[1] - pair.conj()).norm() < 1e-13);
        assert!((r[2] - pair).norm() < 1e-13);
        assert!((pair.re + 0.1226).abs() < 1e-4 && (pair.im - 0.7449).abs() < 1e-4);

        let r = companion_roots(&SymbolPolynomial {
            coeffs: vec![1.0, 0.0, 1.0],
        })
        .unwrap();
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-15 && (r[1] - c(0.0, 1.0)).norm() < 1e-15);
        let r = companion_roots(&SymbolPolynomial {
            coeffs: vec![1.0, -3.0, 2.0],
        })
        .unwrap();
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-15 && (r[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_form_matches_expanded_polynomial() {
        let mode = Mode::new(3.0, 0.25).unwrap();
        let k = kernel(&[(0.5, 1.0), (2.0, 4.0), (0.1, 9.0)]);
        let poly = poly_coeffs(&mode, &k).unwrap();
        for z in [c(0.3, 0.2), c(-2.5, 1.0), c(-4.0, 0.0), c(7.0, -3.0)] {
            let (p, dp) = product_form(&mode, &k, z);
            assert!((p - poly.eval(z)).norm() <= 1e-12 * poly.eval(z).norm().max(1.0));
            assert!((dp - poly.eval_deriv(z)).norm() <= 1e-12 * poly.eval_deriv(z).norm().max(1.0));
        }
    }

    #[test]
    fn companion_rejects_non_monic_and_oversized() {
        assert!(companion_roots(&SymbolPolynomial { coeffs: vec![2.0, 1.0] }).is_err());
        let big = SymbolPolynomial {
            coeffs: std::iter::once(1.0).chain(std::iter::repeat_n(0.0, 67)).collect(),
        };
        assert!(companion_roots(&big).is_err());
    }

    #[test]
    fn augmented_matrix_layout() {
        let m = augmented_matrix(&Mode::new(1.0, 0.0).unwrap(), &kernel(&[(1.0, 2.0)]));
        assert_eq!(
            m.matrix.rows(),
            vec![vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, -2.0]]
        );
        let m2 = augmented_matrix(&Mode::new(2.0, 1.0).unwrap(), &kernel(&[(1.0, 1.0), (1.0, 3.0)]));
        assert_eq!(m2.dim(), 4);
        assert_eq!(m2.matrix.get(1, 3), 4.0);
        assert_eq!(m2.matrix.get(3, 3), -3.0);
    }

    #[test]
    fn matrix_and_companion_agree() {
        let mode = Mode::new(1.0, 0.0).unwrap();
        let k = kernel(&[(1.0, 2.0)]);
        let e = matrix_eigs(&augmented_matrix(&mode, &k)).unwrap();
        let r = companion_roots(&poly_coeffs(&mode, &k).unwrap()).unwrap();
        assert!(match_distance(&e, &r) < 1e-10);

        let rot = AugmentedMatrix {
            matrix: DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]),
        };
        let e = matrix_eigs(&rot).unwrap();
        assert!((e[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn vieta_examples() {
        let mode = Mode::new(1.0, 0.0).unwrap();
        let k = kernel(&[(1.0, 2.0)]);
        let r = companion_roots(&poly_coeffs(&mode, &k).unwrap()).unwrap();
        let sum: Complex64 = r.iter().sum();
        let prod: Complex64 = r.iter().product();
        assert!((sum - c(-2.0, 0.0)).norm() < 1e-13);
        assert!((prod - c(-1.0, 0.0)).norm() < 1e-13);
        assert!(vieta_check(&mode, &k, &r).within(1e-12));

        let k4 = kernel(&[(4.0, 2.0)]);
        let r = companion_roots(&poly_coeffs(&mode, &k4).unwrap()).unwrap();
        let prod: Complex64 = r.iter().product();
        assert!((prod - c(2.0, 0.0)).norm() < 1e-13);
        assert!(vieta_check(&mode, &k4, &r).within(1e-12));

        // A wrong zero set is flagged.
        let bad = [c(-1.0, 0.0), c(-0.1, 0.7), c(-0.1, -0.7)];
        assert!(!vieta_check(&mode, &k, &bad).within(1e-8));
    }

    #[test]
    fn crosscheck_examples() {
        let rep = crosscheck(&Mode::new(1.0, 0.0).unwrap(), &kernel(&[(1.0, 2.0)])).unwrap();
        assert!(rep.pass);
        assert!(rep.analytic_vs_companion < 1e-10 && rep.analytic_vs_matrix < 1e-10);

        let rep = crosscheck(
            &Mode::new(3.0, 0.5).unwrap(),
            &kernel(&[(1.0, 1.0), (0.5, 2.0), (0.25, 4.0)]),
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.vieta.within(1e-10));
    }

    #[test]
    fn crosscheck_detects_tampering() {
        let rep = crosscheck_with(&Mode::new(1.0, 0.0).unwrap(), &kernel(&[(1.0, 2.0)]), |mut p| {
            let last = p.coeffs.len() - 1;
            p.coeffs[last] += 1e-3;
            p
        })
        .unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn crosscheck_caps_kernel_size() {
        let pairs: Vec<(f64, f64)> = (1..=13).map(|k| (0.01, k as f64)).collect();
        assert!(matches!(
            crosscheck(&Mode::new(2.0, 0.0).unwrap(), &kernel(&pairs)),
            Err(Error::TooManyTerms { .. })
        ));
    }
}
