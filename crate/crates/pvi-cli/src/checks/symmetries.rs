//! Symmetry checks: the Landin transform at both levels, the theta and v
//! functional equations, solution transport, the derivation on observables,
//! and the solvability classification.

use num_complex::Complex64;
use pvi::dynamics::*;
use pvi::elliptic::{theta, theta_v, two_pi_i, EvalOptions, ModularParameter, I, PI};
use pvi::numeric::{apply_weights, fd_weights};
use pvi::symmetry::*;

use super::{c, elliptic_trajectory, r, random_gamma2, rng, tight, tight_config};
use crate::report::CheckRecord;

pub fn symmetries_records(quick: bool) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let opts = tight();

    records.extend(landin(quick, &opts));
    records.extend(functional_equations(quick, &opts));
    records.extend(solution_transport(&opts));
    records.extend(okamoto(&opts));
    records.extend(classification());

    records
}

fn landin(quick: bool, opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    // Identity of the doubling isogeny on a grid.
    let m = ModularParameter::new(c(0.0, 1.6)).unwrap();
    let grid = if quick { 3 } else { 6 };
    let mut worst: f64 = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let z = c(0.12 + 0.05 * i as f64, 0.04 + 0.05 * j as f64);
            match landin_identity_residual(z, m, opts) {
                Ok(v) => worst = worst.max(v.norm()),
                Err(e) => records.push(CheckRecord::error(
                    "landin_identity",
                    "wp_z(z, tau/2) = wp_z(z, tau) + wp_z(z + tau/2, tau)",
                    &e.to_string(),
                )),
            }
        }
    }
    records.push(CheckRecord::new(
        "landin_identity",
        "wp_z(z, tau/2) = wp_z(z, tau) + wp_z(z + tau/2, tau)",
        worst,
        1e-9,
    ));

    // Parameter bijection and solution map.
    let p = PainleveParams::from_alphas([r(0.125), r(0.125), r(0.125), r(0.125)]);
    let fwd = landin_forward(&p).unwrap();
    let delta = fwd
        .alphas
        .iter()
        .zip([r(0.5), r(0.5), r(0.0), r(0.0)].iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    records.push(CheckRecord::new(
        "landin_parameters",
        "(x, y, x, y) alphas map to (4x, 4y, 0, 0)",
        delta,
        1e-15,
    ));

    match elliptic_trajectory(p, c(0.29, 0.21), c(0.08, -0.03), c(0.0, 1.05), c(0.09, 0.05), 25)
        .and_then(|traj| landin_map(&traj, opts))
    {
        Ok(mapped) => records.push(CheckRecord::new(
            "landin_solution_map",
            "the reparameterized solution solves the target equation",
            mapped.residual,
            1e-6,
        )),
        Err(e) => records.push(CheckRecord::error(
            "landin_solution_map",
            "the reparameterized solution solves the target equation",
            &e.to_string(),
        )),
    }
    records
}

fn functional_equations(quick: bool, opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let mut generator = rng(505);
    let tau = c(0.11, 1.4);
    let z = c(0.21, 0.13);
    let m = ModularParameter::new(tau).unwrap();
    let n = if quick { 3 } else { 5 };

    // Congruence equation of theta, modulo the eighth root of unity.
    let mut worst_mod: f64 = 0.0;
    let mut worst_eighth: f64 = 0.0;
    let mut checked = 0;
    let mut guard = 0;
    while checked < n && guard < 100 {
        guard += 1;
        let g = random_gamma2(&mut generator, false);
        let den = (g.c as f64) * tau + (g.d as f64);
        let tau_g = ((g.a as f64) * tau + (g.b as f64)) / den;
        if tau_g.im < 0.25 {
            continue;
        }
        let mg = ModularParameter::new(tau_g).unwrap();
        let lhs = theta(z / den, mg, opts).unwrap();
        let base = den.sqrt() * (I * PI * (g.c as f64) * z * z / den).exp()
            * theta(z, m, opts).unwrap();
        let ratio = lhs / base;
        worst_mod = worst_mod.max((ratio.norm() - 1.0).abs());
        worst_eighth = worst_eighth.max((ratio.powu(8) - r(1.0)).norm());
        checked += 1;
    }
    records.push(CheckRecord::new(
        "theta_congruence_modulus",
        "theta multiplier has unit modulus",
        worst_mod,
        1e-9,
    ));
    records.push(CheckRecord::new(
        "theta_congruence_eighth_power",
        "theta multiplier is an eighth root of unity",
        worst_eighth,
        1e-9,
    ));

    // Lattice shift equation of theta (sharp).
    let mut worst_shift: f64 = 0.0;
    for (mm, nn) in [(1i64, 0i64), (0, 1), (2, -1), (-1, 2)] {
        let lhs = theta(z + (mm as f64) * tau + nn as f64, m, opts).unwrap();
        let factor =
            (-I * PI * (mm as f64) * (mm as f64) * tau - two_pi_i() * (mm as f64) * z).exp();
        let rhs = factor * theta(z, m, opts).unwrap();
        worst_shift = worst_shift.max((lhs - rhs).norm() / rhs.norm().max(1e-6));
    }
    records.push(CheckRecord::new(
        "theta_shift_equation",
        "theta(z + m tau + n) = exp(-pi i m^2 tau - 2 pi i m z) theta(z)",
        worst_shift,
        1e-10,
    ));

    // Covariance of v under both generators.
    let v0 = theta_v(z, m, opts).unwrap();
    let mut worst_v: f64 = 0.0;
    let mut checked = 0;
    let mut guard = 0;
    while checked < n && guard < 100 {
        guard += 1;
        let g = random_gamma2(&mut generator, false);
        let den = (g.c as f64) * tau + (g.d as f64);
        let tau_g = ((g.a as f64) * tau + (g.b as f64)) / den;
        if tau_g.im < 0.25 {
            continue;
        }
        let mg = ModularParameter::new(tau_g).unwrap();
        let lhs = theta_v(z / den, mg, opts).unwrap();
        worst_v = worst_v.max((lhs - (v0 * den - (g.c as f64) * z)).norm());
        checked += 1;
    }
    let v_shift = theta_v(z + 2.0 * tau - 3.0, m, opts).unwrap();
    worst_v = worst_v.max((v_shift - (v0 + 2.0)).norm());
    records.push(CheckRecord::new(
        "v_covariance",
        "v(z/(c tau + d)) = v (c tau + d) - c z and v(z + m tau + n) = v + m",
        worst_v,
        1e-9,
    ));
    records
}

fn solution_transport(opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let p = PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.0)]);
    match elliptic_trajectory(p, c(0.29, 0.21), c(0.08, -0.03), c(0.0, 1.05), c(0.09, 0.05), 25) {
        Ok(traj) => {
            let g = ModularElement::new(1, 0, -2, 1, 0, 0).unwrap();
            let mut worst: f64 = f64::NAN;
            if let Ok(moved) = gamma2_act_trajectory(&g, &traj) {
                worst = flow_residual(&moved, opts).unwrap_or(f64::NAN);
            }
            let shift = ModularElement::shift(1, -1);
            if let Ok(shifted) = gamma2_act_trajectory(&shift, &traj) {
                worst = worst.max(flow_residual(&shifted, opts).unwrap_or(f64::NAN));
            }
            records.push(CheckRecord::new(
                "deck_transport",
                "transported solutions solve the same equation",
                worst,
                1e-6,
            ));
        }
        Err(e) => records.push(CheckRecord::error(
            "deck_transport",
            "transported solutions solve the same equation",
            &e.to_string(),
        )),
    }

    // Zero-section shifts move Picard solutions to Picard solutions.
    match elliptic_trajectory(
        PainleveParams::zero(),
        0.21 * c(0.0, 1.0) + 0.13,
        r(0.21),
        c(0.0, 1.0),
        c(0.1, 0.06),
        25,
    ) {
        Ok(traj) => {
            let mut worst: f64 = 0.0;
            for j in [1u8, 2, 3] {
                let i = pvi::elliptic::HalfPeriodIndex::new(j).unwrap();
                match shift_zero_section_trajectory(i, &traj) {
                    Ok((moved, _)) => {
                        worst = worst.max(flow_residual(&moved, opts).unwrap_or(f64::NAN))
                    }
                    Err(e) => records.push(CheckRecord::error(
                        "zero_section_shift",
                        "half-period shifts permute the equation labels",
                        &e.to_string(),
                    )),
                }
            }
            records.push(CheckRecord::new(
                "zero_section_shift",
                "half-period shifts permute the equation labels",
                worst,
                1e-6,
            ));
        }
        Err(e) => records.push(CheckRecord::error(
            "zero_section_shift",
            "half-period shifts permute the equation labels",
            &e.to_string(),
        )),
    }
    records
}

fn okamoto(opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let a = [r(0.4), r(0.3), r(0.2), r(0.3)];
    let p = PainleveParams::from_avec(a);
    let t0 = c(0.32, 0.07);
    let x0 = c(0.55, 0.2);
    let s0 = AlgebraicState {
        u: c(0.17, -0.04),
        x: x0,
        y: (x0 * (x0 - 1.0) * (x0 - t0)).sqrt(),
        t: t0,
    };

    // The derivation on the coordinates is the flow itself.
    let (dx, du) = okamoto_flow_coefficients(&s0, &a).unwrap();
    let (dx_rhs, du_rhs, _) = rhs_algebraic(&s0, &p, opts).unwrap();
    let coeff_residual = (dx - dx_rhs)
        .norm()
        .max((du - du_rhs).norm())
        / dx_rhs.norm().max(du_rhs.norm()).max(1.0);
    records.push(CheckRecord::new(
        "okamoto_flow",
        "the derivation restates the flow: D X and D U are the equations of motion",
        coeff_residual,
        1e-12,
    ));

    // D h against the trajectory derivative of h.
    let initial = ChartPoint::Algebraic(s0);
    let path = PathSpec::segment(t0, t0 + c(0.07, 0.03)).unwrap();
    match integrate(
        Chart::Algebraic,
        &initial,
        &path,
        ParamsUsed::Standard(p),
        &tight_config(21),
    ) {
        Ok(traj) => {
            let mid = 10;
            let states: Vec<AlgebraicState> = traj
                .samples
                .iter()
                .map(|s| *s.point.as_algebraic().unwrap())
                .collect();
            let hs: Vec<Complex64> =
                states.iter().map(|s| okamoto_h(s, &a).unwrap()).collect();
            let ts: Vec<Complex64> = states.iter().map(|s| s.t).collect();
            let w = fd_weights(&ts[mid - 2..=mid + 2], ts[mid], 1);
            let dh_fd = apply_weights(&w[1], &hs[mid - 2..=mid + 2]);
            let h_obs = |s: &AlgebraicState| okamoto_h(s, &a);
            let dh_flow =
                okamoto_d(&Observable::Custom(&h_obs), &states[mid], &a).unwrap();
            records.push(CheckRecord::new(
                "okamoto_h_derivative",
                "D h matches d/dt of h along the flow",
                (dh_fd - dh_flow).norm(),
                1e-6,
            ));
        }
        Err(e) => records.push(CheckRecord::error(
            "okamoto_h_derivative",
            "D h matches d/dt of h along the flow",
            &e.to_string(),
        )),
    }

    // The parameter shift lands where it should.
    let h0 = okamoto_h(&s0, &a).unwrap();
    let (_, shifted) = okamoto_shift_h(h0, &s0, &a).unwrap();
    let expected = [a[0] + 1.0, a[1], a[2], a[3] + 1.0];
    let shift_residual = shifted
        .iter()
        .zip(expected.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0f64, f64::max);
    records.push(CheckRecord::new(
        "okamoto_shift",
        "the elementary shift adds one to the outer a-coordinates",
        shift_residual,
        1e-15,
    ));
    records
}

fn classification() -> Vec<CheckRecord> {
    use SolvabilityTag::*;
    let cases: [([f64; 4], SolvabilityTag); 8] = [
        ([0.0, 0.0, 0.0, 0.0], ClassicalGeneral),
        ([1.0, 1.0, 0.0, 0.0], ClassicalGeneral),
        ([0.5, 0.5, 0.5, 0.5], ClassicalGeneral),
        ([0.0, 0.0, 0.0, 1.0], OneDimFamily),
        ([0.0, 0.0, 0.5, 0.5], OneDimFamily),
        ([0.25, 0.25, 0.25, 0.25], OneDimFamily),
        ([0.3, 0.3, 0.2, 0.2], HypergeometricHyperplane),
        ([0.123, 0.456, 0.789, 0.1], Unknown),
    ];
    let mut mismatches = 0usize;
    let mut replay_failures = 0usize;
    for (a, expected) in cases {
        let result = classify(&a);
        if result.tag != expected {
            mismatches += 1;
            continue;
        }
        if result.tag != Unknown {
            let mut v = a;
            let mut ok = true;
            for mv in &result.witness {
                match apply_witness_move(mv, &v) {
                    Ok(next) => v = next,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok
                || v
                    .iter()
                    .zip(result.base_point.iter())
                    .any(|(x, y)| (x - y).abs() > 1e-9)
            {
                replay_failures += 1;
            }
        }
    }
    vec![
        CheckRecord::new(
            "classification_tags",
            "the listed parameter points classify into their solvability tiers",
            mismatches as f64,
            0.5,
        ),
        CheckRecord::new(
            "classification_witnesses",
            "every witness chain replays to its claimed base point",
            replay_failures as f64,
            0.5,
        ),
    ]
}
