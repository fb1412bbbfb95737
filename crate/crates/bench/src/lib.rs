//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use voltspec::{ExponentialKernel, Mode, PowerLawFamily};

/// `n` terms with rates spread geometrically over `[0.1, 100]`, scaled to `S = 0.5`.
pub fn geometric_kernel(n: usize) -> ExponentialKernel {
    let ratio = if n > 1 { 1e3f64.powf(1.0 / (n - 1) as f64) } else { 1.0 };
    let raw: Vec<(f64, f64)> = (0..n).map(|k| (1.0, 0.1 * ratio.powi(k as i32))).collect();
    let s: f64 = raw.iter().map(|(c, g)| c / g).sum();
    let terms: Vec<(f64, f64)> = raw.iter().map(|&(c, g)| (0.5 * c / s, g)).collect();
    ExponentialKernel::new(&terms).expect("valid fixture")
}

pub fn power_law_kernel(n: usize) -> (PowerLawFamily, ExponentialKernel) {
    let family = PowerLawFamily::new(1.0, 1.0, 0.5, 2.0, n).expect("valid family");
    let kernel = ExponentialKernel::from_power_law(&family).expect("valid fixture");
    (family, kernel)
}

pub fn mode(a: f64, theta: f64) -> Mode {
    Mode::new(a, theta).expect("valid mode")
}

/// A point off the real axis where no fixture has a pole.
pub fn probe_point() -> Complex64 {
    Complex64::new(-0.3, 7.0)
}
