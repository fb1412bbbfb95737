//! Small floating-point helpers shared across modules.

use num_complex::Complex64;

/// Term count above which kernel sums switch to compensated accumulation.
pub const COMPENSATE_ABOVE: usize = 10_000;

/// Neumaier-compensated accumulator. With `compensated == false` it degrades
/// to plain left-to-right summation, so both paths share one call site.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator {
    sum: f64,
    carry: f64,
    compensated: bool,
}

impl Accumulator {
    pub fn new(compensated: bool) -> Self {
        Self {
            sum: 0.0,
            carry: 0.0,
            compensated,
        }
    }

    pub fn for_len(len: usize) -> Self {
        Self::new(len > COMPENSATE_ABOVE)
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if !self.compensated {
            self.sum += x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Complex counterpart of [`Accumulator`], compensating each component.
#[derive(Debug, Clone, Copy)]
pub struct ComplexAccumulator {
    re: Accumulator,
    im: Accumulator,
}

impl ComplexAccumulator {
    pub fn for_len(len: usize) -> Self {
        Self {
            re: Accumulator::for_len(len),
            im: Accumulator::for_len(len),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `c / z` for real `c` by Smith's algorithm. Exact `c / z.re` when `z` is real.
#[inline]
pub fn real_over(c: f64, z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(c / z.re, 0.0);
    }
    if z.re.abs() >= z.im.abs() {
        let r = z.im / z.re;
        let d = z.re + z.im * r;
        Complex64::new(c / d, -c * r / d)
    } else {
        let r = z.re / z.im;
        let d = z.re * r + z.im;
        Complex64::new(c * r / d, -c / d)
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Slope of `log |y|` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    ls_slope(&lx, &ly)
}
