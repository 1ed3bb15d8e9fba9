//! Shared numerical helpers: finite-difference weights on arbitrary complex
//! nodes and small linear solves.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finite-difference weights on arbitrary (complex) nodes, by Fornberg's
/// recursion. Returns `weights[k][j]`: the weight of `f(nodes[j])` in the
/// k-th derivative at `x0`, for k = 0..=max_order.
pub fn fd_weights(nodes: &[Complex64], x0: Complex64, max_order: usize) -> Vec<Vec<Complex64>> {
    let n = nodes.len();
    assert!(n > max_order, "need more nodes than the derivative order");
    let zero = Complex64::new(0.0, 0.0);
    let mut w = vec![vec![zero; n]; max_order + 1];
    let mut c1 = Complex64::new(1.0, 0.0);
    let mut c4 = nodes[0] - x0;
    w[0][0] = Complex64::new(1.0, 0.0);
    for i in 1..n {
        let mut c2 = Complex64::new(1.0, 0.0);
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=max_order).rev() {
                    w[k][i] = c1 * ((k as f64) * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=max_order).rev() {
                w[k][j] = (c4 * w[k][j] - (k as f64) * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Apply a weight row to sampled values.
pub fn apply_weights(weights: &[Complex64], values: &[Complex64]) -> Complex64 {
    weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Solve a 2x2 complex linear system a x = b.
pub fn solve2(a: [[Complex64; 2]; 2], b: [Complex64; 2]) -> Result<[Complex64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a[0][0].norm() * a[1][1].norm() + a[0][1].norm() * a[1][0].norm();
    if det.norm() < 1e-14 * scale.max(1e-300) {
        return Err(Error::InvalidInput(
            "singular 2x2 system in operator reconstruction".into(),
        ));
    }
    Ok([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

/// Reduce `value` modulo the lattice spanned by `p1`, `p2` (assumed
/// R-linearly independent), returning the representative closest to zero and
/// the integer coefficients removed: value = result + m p1 + n p2.
pub fn reduce_mod_lattice(
    value: Complex64,
    p1: Complex64,
    p2: Complex64,
) -> (Complex64, i64, i64) {
    // Solve value = a p1 + b p2 over the reals.
    let det = p1.re * p2.im - p1.im * p2.re;
    let a = (value.re * p2.im - value.im * p2.re) / det;
    let b = (p1.re * value.im - p1.im * value.re) / det;
    let mut best = (value, 0i64, 0i64);
    let mut best_norm = f64::INFINITY;
    let (ar, br) = (a.round() as i64, b.round() as i64);
    for dm in -1..=1 {
        for dn in -1..=1 {
            let m = ar + dm;
            let n = br + dn;
            let candidate = value - (m as f64) * p1 - (n as f64) * p2;
            if candidate.norm() < best_norm {
                best_norm = candidate.norm();
                best = (candidate, m, n);
            }
        }
    }
    best
}
