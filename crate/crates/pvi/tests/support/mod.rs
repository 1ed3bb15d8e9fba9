//! Independent oracles shared by the integration tests.
//!
//! Everything here is deliberately primitive: truncated lattice sums, direct
//! series summation, adaptive Simpson quadrature, trapezoid contour
//! integrals. Slow and unimpeachable, and entirely separate from the series
//! implementations under test.

#![allow(dead_code)]

use num_complex::Complex64;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const PI: f64 = std::f64::consts::PI;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Weierstrass wp by the regularized double lattice sum
/// 1/z^2 + sum' [1/(z+w)^2 - 1/w^2] over w = m tau + n, |m|, |n| <= cut.
pub fn wp_lattice_sum(z: Complex64, tau: Complex64, cut: i64) -> Complex64 {
    let mut sum = 1.0 / (z * z);
    for m in -cut..=cut {
        for n in -cut..=cut {
            if m == 0 && n == 0 {
                continue;
            }
            let w = (m as f64) * tau + (n as f64);
            sum += 1.0 / ((z + w) * (z + w)) - 1.0 / (w * w);
        }
    }
    sum
}

/// wp_z by the absolutely convergent cubic lattice sum
/// -2 sum 1/(z + w)^3 over |m|, |n| <= cut.
pub fn wp_z_lattice_sum(z: Complex64, tau: Complex64, cut: i64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for m in -cut..=cut {
        for n in -cut..=cut {
            let w = (m as f64) * tau + (n as f64);
            let d = z + w;
            sum += 1.0 / (d * d * d);
        }
    }
    -2.0 * sum
}

/// Direct truncated theta series sum_{|n| <= cut} exp(pi i n^2 tau + 2 pi i n z).
pub fn theta_direct(z: Complex64, tau: Complex64, cut: i64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for n in -cut..=cut {
        let nf = n as f64;
        sum += (I * PI * nf * nf * tau + 2.0 * PI * I * nf * z).exp();
    }
    sum
}

/// Adaptive Simpson quadrature of a complex integrand along the straight
/// segment [a, b].
pub fn adaptive_simpson<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Complex64 {
    fn simpson(a: Complex64, b: Complex64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(Complex64) -> Complex64>(
        f: &F,
        a: Complex64,
        b: Complex64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: usize,
    ) -> Complex64 {
        let m = (a + b) / 2.0;
        let lm = (a + m) / 2.0;
        let rm = (m + b) / 2.0;
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() < 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = (a + b) / 2.0;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Residue of f at `center` by the trapezoid rule on a circle of radius r
/// (spectrally accurate for meromorphic f with one simple pole inside).
pub fn contour_residue<F: Fn(Complex64) -> Complex64>(
    f: &F,
    center: Complex64,
    r: f64,
    points: usize,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..points {
        let angle = 2.0 * PI * (k as f64) / (points as f64);
        let w = r * c(angle.cos(), angle.sin());
        sum += f(center + w) * w;
    }
    sum / points as f64
}

/// Laurent coefficient of (z - center)^m (m may be negative) by discrete
/// Fourier extraction on a circle of radius r.
pub fn laurent_coefficient<F: Fn(Complex64) -> Complex64>(
    f: &F,
    center: Complex64,
    m: i32,
    r: f64,
    points: usize,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..points {
        let angle = 2.0 * PI * (k as f64) / (points as f64);
        let w = r * c(angle.cos(), angle.sin());
        sum += f(center + w) * w.powi(-m);
    }
    sum / points as f64
}
