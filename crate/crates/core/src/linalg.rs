//! Dense real nonsymmetric eigenvalues: diagonal balancing, Householder
//! reduction to upper Hessenberg form, and Francis double-shift QR.
//!
//! The reduction and QR sweep follow the EISPACK `orthes`/`hqr` routines.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Preserves Hessenberg structure.
pub fn balance(m: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = m.n;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += m.get(j, i).abs();
                    r += m.get(i, j).abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    m.set(i, j, m.get(i, j) * g);
                }
                for j in 0..n {
                    m.set(j, i, m.get(j, i) * f);
                }
            }
        }
    }
}

/// Orthogonal similarity reduction to upper Hessenberg form.
pub fn hessenberg(m: &mut DenseMatrix) {
    let n = m.n;
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    for col in 1..n - 1 {
        let scale: f64 = (col..n).map(|i| m.get(i, col - 1).abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (col..n).rev() {
            ort[i] = m.get(i, col - 1) / scale;
            h += ort[i] * ort[i];
        }
        let mut g = h.sqrt();
        if ort[col] > 0.0 {
            g = -g;
        }
        h -= ort[col] * g;
        ort[col] -= g;

        for j in col..n {
            let f = (col..n).rev().map(|i| ort[i] * m.get(i, j)).sum::<f64>() / h;
            for i in col..n {
                m.set(i, j, m.get(i, j) - f * ort[i]);
            }
        }
        for i in 0..n {
            let f = (col..n).rev().map(|j| ort[j] * m.get(i, j)).sum::<f64>() / h;
            for j in col..n {
                m.set(i, j, m.get(i, j) - f * ort[j]);
            }
        }
        m.set(col, col - 1, scale * g);
        for i in col + 1..n {
            m.set(i, col - 1, 0.0);
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by double-shift QR.
/// Fails once the total iteration count exceeds `30 * n`.
pub fn hqr(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = m.n;
    // One-based working copy keeps the index arithmetic readable.
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            if j + 1 >= i {
                a[i][j] = m.get(i - 1, j - 1);
            }
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let budget = 30 * n.max(1);
    let mut total = 0usize;

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nn - 1][nn - 1];
            let mut w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if total >= budget {
                return Err(Error::QrNoConvergence { sweeps: total });
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            let mut mm = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[mm][mm];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[mm + 1][mm] + a[mm][mm + 1];
                q = a[mm + 1][mm + 1] - z - rr - ss;
                r = a[mm + 2][mm + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if mm == l {
                    break;
                }
                let u = a[mm][mm - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[mm - 1][mm - 1].abs() + z.abs() + a[mm + 1][mm + 1].abs());
                if u + v == v {
                    break;
                }
                mm -= 1;
            }
            for i in mm + 2..=nn {
                a[i][i - 2] = 0.0;
                if i != mm + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = mm;
            while k < nn {
                if k != mm {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k != nn - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == mm {
                        if l != mm {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            pp += z * a[i][k + 2];
                            a[i][k + 2] -= pp * r;
                        }
                        a[i][k + 1] -= pp * q;
                        a[i][k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    let mut out: Vec<Complex64> = (1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect();
    sort_lex(&mut out);
    Ok(out)
}

/// Sorts by real part, then imaginary part.
pub fn sort_lex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All eigenvalues of a general real matrix, sorted by `(re, im)`.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let mut work = m.clone();
    balance(&mut work);
    hessenberg(&mut work);
    hqr(&work)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn diagonal_and_rotation() {
        let d = DenseMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -2.0]]);
        let e = eigenvalues(&d).unwrap();
        assert!(close(
            &e,
            &[Complex64::new(-2.0, 0.0), Complex64::new(-1.0, 0.0)],
            1e-15
        ));
        let r = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let e = eigenvalues(&r).unwrap();
        assert!(close(&e, &[Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)], 1e-15));
    }

    #[test]
    fn companion_of_known_quartic() {
        // Companion matrix of (x-1)(x-2)(x-3)(x-4).
        let m = DenseMatrix::from_rows(&[
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        let e = eigenvalues(&m).unwrap();
        let want: Vec<Complex64> = (1..=4).map(|k| Complex64::new(k as f64, 0.0)).collect();
        assert!(close(&e, &want, 1e-10), "{e:?}");
    }

    #[test]
    fn dense_nonsymmetric_with_complex_pair() {
        // Block-diagonal [[1, -2], [2, 1]] (eigs 1 +- 2i) and 3, mixed by a permutation-similarity.
        let m = DenseMatrix::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 1.0, -2.0], vec![0.0, 2.0, 1.0]]);
        let e = eigenvalues(&m).unwrap();
        let want = [
            Complex64::new(1.0, -2.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(3.0, 0.0),
        ];
        assert!(close(&e, &want, 1e-14), "{e:?}");
    }

    #[test]
    fn trace_and_determinant_on_random_dense() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [5usize, 9, 14] {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let m = DenseMatrix::from_rows(&rows);
            let e = eigenvalues(&m).unwrap();
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let sum: Complex64 = e.iter().sum();
            assert!((sum.re - trace).abs() < 1e-12 && sum.im.abs() < 1e-12);
            // Conjugate closure.
            for z in &e {
                if z.im != 0.0 {
                    assert!(e.iter().any(|w| (w - z.conj()).norm() < 1e-12));
                }
            }
        }
    }

    #[test]
    fn balancing_handles_bad_scaling() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 1e8, 0.0], vec![1e-8, 2.0, 1e8], vec![0.0, 1e-8, 3.0]]);
        let mut b = m.clone();
        balance(&mut b);
        let row0: f64 = (0..3).map(|j| b.get(0, j).abs()).sum();
        assert!(row0 < 1e4);
        let e = eigenvalues(&m).unwrap();
        let trace: f64 = e.iter().map(|z| z.re).sum();
        assert!((trace - 6.0).abs() < 1e-12);
    }
}
