//! Special-function checks: the modular constant, the Weierstrass cubic, the
//! half-period sum, the heat equation, and the Eisenstein coefficients.

use pvi::elliptic::*;

use super::{c, r, random_tau, rng, tight};
use crate::report::CheckRecord;

pub fn elliptic_records(quick: bool) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let opts = tight();

    // Modular constant: C(tau) = -9 pi^2 to relative 1e-8 at random tau, and
    // the half-period sum vanishes at every sampled tau.
    let n_tau = if quick { 5 } else { 20 };
    let mut generator = rng(101);
    let expected = r(-9.0 * PI * PI);
    let mut worst_c: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    let mut values = Vec::new();
    for _ in 0..n_tau {
        let tau = random_tau(&mut generator);
        match constant_c(tau, &EvalOptions::default()) {
            Ok(v) => {
                worst_c = worst_c.max((v - expected).norm() / expected.norm());
                values.push(v);
            }
            Err(e) => {
                records.push(CheckRecord::error("modular_constant", "C = -9 pi^2", &e.to_string()));
            }
        }
        match half_period_values(tau, &opts) {
            Ok((e1, e2, e3)) => worst_sum = worst_sum.max((e1 + e2 + e3).norm()),
            Err(e) => records.push(CheckRecord::error(
                "half_period_sum",
                "e1 + e2 + e3 = 0",
                &e.to_string(),
            )),
        }
    }
    records.push(CheckRecord::new(
        "modular_constant",
        "C(tau) = prod (e_i - e_j)^2 / (e1 e2' - e2 e1')^2 = -9 pi^2",
        worst_c,
        1e-8,
    ));
    // tau-independence: relative spread of the samples.
    let mean = values.iter().sum::<num_complex::Complex64>() / values.len() as f64;
    let spread = values
        .iter()
        .map(|v| (v - mean).norm())
        .fold(0.0f64, f64::max)
        / mean.norm();
    records.push(CheckRecord::new(
        "modular_constant_spread",
        "C(tau) is independent of tau",
        spread,
        1e-7,
    ));
    records.push(CheckRecord::new(
        "half_period_sum",
        "e1 + e2 + e3 = 0",
        worst_sum,
        1e-12,
    ));

    // Weierstrass cubic identity on a grid of z for several tau.
    let taus = if quick {
        vec![c(0.0, 1.0), c(0.3, 0.9)]
    } else {
        vec![
            c(0.0, 1.0),
            c(0.3, 0.9),
            c(-0.25, 1.4),
            c(0.1, 0.7),
            c(0.45, 1.1),
        ]
    };
    let grid = if quick { 4 } else { 10 };
    let mut worst_cubic: f64 = 0.0;
    for tau_val in taus {
        let tau = ModularParameter::new(tau_val).unwrap();
        let (e1, e2, e3) = half_period_values(tau, &opts).unwrap();
        for i in 0..grid {
            for j in 0..grid {
                let s = 0.17 + 0.16 * (i as f64) / (grid as f64 - 1.0);
                let u = 0.17 + 0.16 * (j as f64) / (grid as f64 - 1.0);
                let z = s + u * tau_val;
                let (p, pz) = wp_pair(z, tau, &opts).unwrap();
                let lhs = pz * pz;
                let rhs = 4.0 * (p - e1) * (p - e2) * (p - e3);
                worst_cubic = worst_cubic.max((lhs - rhs).norm());
            }
        }
    }
    records.push(CheckRecord::new(
        "weierstrass_cubic",
        "wp_z^2 = 4 (wp - e1)(wp - e2)(wp - e3)",
        worst_cubic,
        1e-9,
    ));

    // Heat equation residual on a grid.
    let mut worst_heat: f64 = 0.0;
    for tau_val in [c(0.0, 1.3), c(0.2, 0.8)] {
        let tau = ModularParameter::new(tau_val).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let z = c(0.1 * i as f64, 0.07 * j as f64);
                let v = heat_residual(z, tau, &opts).unwrap();
                worst_heat = worst_heat.max(v.norm());
            }
        }
    }
    records.push(CheckRecord::new(
        "heat_equation",
        "theta_tau = theta_zz / (4 pi i), term-wise",
        worst_heat,
        1e-9,
    ));

    // Eisenstein coefficients are the divisor sums.
    let sigma: [u64; 10] = [1, 3, 4, 7, 6, 12, 8, 15, 13, 18];
    let mismatches = (1..=10u64)
        .filter(|n| g2_coefficient(*n) != sigma[(*n - 1) as usize])
        .count();
    records.push(CheckRecord::new(
        "g2_coefficients",
        "q-coefficients of G2 are sigma_1(n)",
        mismatches as f64,
        0.5,
    ));

    // Constant term dominates high in the strip.
    let g2 = eisenstein_g2(ModularParameter::new(c(0.0, 50.0)).unwrap(), &opts).unwrap();
    records.push(CheckRecord::new(
        "g2_constant_term",
        "G2 -> -1/24 as Im tau -> infinity",
        (g2 - r(-1.0 / 24.0)).norm(),
        1e-12,
    ));

    records
}
