//! Covering-map checks: the lemniscatic value of the base map, inversion
//! round trips, and on-curve residuals of the uniformization.

use pvi::elliptic::ModularParameter;
use pvi::uniformization::*;

use super::{c, rng, tight};
use crate::report::CheckRecord;
use rand::Rng;

pub fn uniformization_records(quick: bool) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let opts = tight();

    // lambda(i) = 1/2.
    let lemniscatic = modular_lambda(ModularParameter::new(c(0.0, 1.0)).unwrap(), &opts).unwrap();
    records.push(CheckRecord::new(
        "lambda_at_i",
        "t(i) = (e3 - e1)/(e2 - e1) = 1/2",
        (lemniscatic - 0.5).norm(),
        1e-10,
    ));

    // Inversion round trips.
    let mut generator = rng(202);
    let n = if quick { 4 } else { 10 };
    let mut worst_round: f64 = 0.0;
    for _ in 0..n {
        let tau0 = ModularParameter::new(c(
            generator.random_range(-0.3..0.3),
            generator.random_range(0.7..1.4),
        ))
        .unwrap();
        let t = modular_lambda(tau0, &opts).unwrap();
        let seed = ModularParameter::new(tau0.get() + c(0.01, 0.01)).unwrap();
        match invert_lambda(t, seed, &opts) {
            Ok(back) => worst_round = worst_round.max((back.get() - tau0.get()).norm()),
            Err(e) => records.push(CheckRecord::error(
                "lambda_inversion",
                "lambda(invert_lambda(t)) = t",
                &e.to_string(),
            )),
        }
    }
    records.push(CheckRecord::new(
        "lambda_inversion",
        "invert_lambda round trip in tau",
        worst_round,
        1e-8,
    ));

    // On-curve residual of the covering map over a grid.
    let n_tau = if quick { 2 } else { 5 };
    let mut worst_curve: f64 = 0.0;
    let mut worst_pullback: f64 = 0.0;
    for k in 0..n_tau {
        let tau = ModularParameter::new(c(0.08 * k as f64, 0.85 + 0.15 * k as f64)).unwrap();
        let branch = BranchChoice::principal(tau, &opts).unwrap();
        for i in 0..4 {
            for j in 0..5 {
                let z = (0.12 + 0.07 * i as f64) + (0.1 + 0.06 * j as f64) * tau.get();
                let p = phi(z, tau, &branch, &opts).unwrap();
                worst_curve = worst_curve.max(p.curve_residual());
                let pb = pullback_residual(z, tau, &branch, &opts).unwrap();
                worst_pullback = worst_pullback.max(pb.norm());
            }
        }
    }
    records.push(CheckRecord::new(
        "on_curve_residual",
        "Y^2 = X (X - 1)(X - t) along the covering map",
        worst_curve,
        1e-10,
    ));
    records.push(CheckRecord::new(
        "differential_pullback",
        "(dX/dz)/Y = 2 (e2 - e1)^(1/2)",
        worst_pullback,
        1e-8,
    ));

    // Fiber inversion round trip.
    let tau = ModularParameter::new(c(0.1, 1.05)).unwrap();
    let branch = BranchChoice::principal(tau, &opts).unwrap();
    let mut worst_fiber: f64 = 0.0;
    for i in 0..4 {
        let z0 = c(0.14 + 0.06 * i as f64, 0.2);
        let p = phi(z0, tau, &branch, &opts).unwrap();
        let z = z_from_point(&p, tau, &branch, z0 + c(0.03, -0.01), &opts).unwrap();
        let expected = pvi::elliptic::lattice_reduce(z0, tau).z_reduced;
        worst_fiber = worst_fiber.max((z - expected).norm());
    }
    records.push(CheckRecord::new(
        "fiber_round_trip",
        "z_from_point inverts the covering map modulo the lattice",
        worst_fiber,
        1e-8,
    ));

    records
}
