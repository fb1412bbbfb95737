//! Brent's method: bisection safeguarding secant and inverse quadratic steps.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketRoot {
    pub root: f64,
    pub iterations: usize,
}

/// Finds a root of `f` in `[lo, hi]` given a sign change at the endpoints.
/// Stops once the bracket shrinks below `2 eps |x| + xtol / 2` or `f` hits zero.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<BracketRoot> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(BracketRoot { root: a, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(BracketRoot { root: b, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::BracketFailure {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol || fb == 0.0 {
            return Ok(BracketRoot {
                root: b,
                iterations: iter,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(xm) };
        fb = f(b);
    }
    Err(Error::NoConvergence {
        last: format!("{b}"),
        residual: fb.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 0.0, 200).unwrap();
        assert!((r.root - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn handles_pole_like_growth() {
        // 1/(x+1) - 3 on (-1, 0): root at -2/3, singular at the left end.
        let r = brent(|x| 1.0 / (x + 1.0) - 3.0, -1.0 + 1e-12, 0.0, 0.0, 200).unwrap();
        assert!((r.root + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, 0.0, 50),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn endpoint_roots() {
        assert_eq!(brent(|x| x, 0.0, 1.0, 0.0, 10).unwrap().root, 0.0);
        assert_eq!(brent(|x| x - 1.0, 0.0, 1.0, 0.0, 10).unwrap().root, 1.0);
    }
}
