//! Form checks: exactness with the Eisenstein control, deck-group
//! invariance, the null-foliation property, divisor vanishing, and the
//! Laurent residue of the cubic differentials.

use num_complex::Complex64;
use pvi::dynamics::*;
use pvi::elliptic::{eisenstein_g2, two_pi_i, EvalOptions, HalfPeriodIndex, ModularParameter};
use pvi::forms::*;
use pvi::symmetry::ModularElement;
use rand::Rng;

use super::{c, elliptic_trajectory, r, random_gamma2, rng, tight};
use crate::report::CheckRecord;

pub fn forms_records(quick: bool) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let opts = tight();

    records.extend(exactness(quick, &opts));
    records.extend(invariance(quick, &opts));
    records.extend(null_foliation(&opts));
    records.extend(divisor_vanishing(&opts));
    records.extend(laurent_residue(quick, &opts));

    records
}

fn exactness(quick: bool, opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let mut generator = rng(303);
    let params = [
        PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.0)]),
        PainleveParams::from_alphas([r(0.125); 4]),
        PainleveParams::from_alphas([r(0.0), r(0.0), r(0.0), r(0.5)]),
    ];
    let n_states = if quick { 5 } else { 20 };
    let mut worst: f64 = 0.0;
    for p in &params {
        for _ in 0..n_states {
            let s = ChartPoint::Elliptic(EllipticState {
                z: c(
                    generator.random_range(0.15..0.4),
                    generator.random_range(0.05..0.35),
                ),
                y: c(
                    generator.random_range(-0.4..0.4),
                    generator.random_range(-0.3..0.3),
                ),
                tau: c(
                    generator.random_range(-0.4..0.4),
                    generator.random_range(0.7..1.6),
                ),
            });
            for plane in [(0usize, 1usize), (0, 2), (1, 2)] {
                match exactness_residual(&s, p, plane, opts) {
                    Ok(v) => worst = worst.max(v.norm()),
                    Err(e) => records.push(CheckRecord::error(
                        "exactness",
                        "d Omega = omega on every coordinate plane",
                        &e.to_string(),
                    )),
                }
            }
        }
    }
    records.push(CheckRecord::new(
        "exactness",
        "d Omega = omega on every coordinate plane",
        worst,
        1e-6,
    ));

    // The Eisenstein control: the term 2 pi i G2 dtau in Omega is closed, so
    // exactness cannot see it; what it carries is the deck-group invariance
    // of Omega. Dropping it must break that invariance.
    let p = PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.0)]);
    let s = EllipticState {
        z: c(0.26, 0.14),
        y: c(0.09, -0.02),
        tau: c(0.05, 1.2),
    };
    let g = ModularElement::new(1, 0, 2, 1, 0, 0).unwrap();
    let with_g2 =
        |state: &EllipticState| omega_big_components(&ChartPoint::Elliptic(*state), &p, opts);
    match one_form_invariance_residual(&s, &g, with_g2, opts) {
        Ok(v) => records.push(CheckRecord::new(
            "one_form_invariance",
            "Omega is invariant under the deck group",
            v,
            1e-8,
        )),
        Err(e) => records.push(CheckRecord::error(
            "one_form_invariance",
            "Omega is invariant under the deck group",
            &e.to_string(),
        )),
    }
    let without_g2 = |state: &EllipticState| -> Result<[Complex64; 3], pvi::Error> {
        let mut comps = omega_big_components(&ChartPoint::Elliptic(*state), &p, opts)?;
        let tau = state.modular_tau()?;
        comps[2] -= two_pi_i() * eisenstein_g2(tau, opts)?;
        Ok(comps)
    };
    match one_form_invariance_residual(&s, &g, without_g2, opts) {
        Ok(v) => records.push(CheckRecord::lower_bound(
            "eisenstein_control",
            "dropping the G2 term breaks the invariance of Omega",
            v,
            1e-3,
        )),
        Err(e) => records.push(CheckRecord::error(
            "eisenstein_control",
            "dropping the G2 term breaks the invariance of Omega",
            &e.to_string(),
        )),
    }
    records
}

fn invariance(quick: bool, opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut generator = rng(404);
    let p = PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.0)]);
    let s = EllipticState {
        z: c(0.27, 0.18),
        y: c(0.1, -0.05),
        tau: c(0.1, 1.2),
    };
    let n = if quick { 4 } else { 10 };
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut guard = 0;
    while checked < n && guard < 200 {
        guard += 1;
        let g = random_gamma2(&mut generator, true);
        let moved = match pvi::symmetry::gamma2_act(&g, &s) {
            Ok(m) => m,
            Err(_) => continue,
        };
        if moved.tau.im < 0.12 {
            continue;
        }
        match invariance_residual(&s, &p, &g, opts) {
            Ok(v) => worst = worst.max(v),
            Err(_) => continue,
        }
        checked += 1;
    }
    vec![CheckRecord::new(
        "two_form_invariance",
        "omega is invariant under the deck group action",
        worst,
        1e-8,
    )]
}

fn null_foliation(opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let picard = PainleveParams::zero();
    let anchor = "solution tangents contract omega to zero";
    match elliptic_trajectory(picard, 0.25 * c(0.0, 1.0) + 0.1, r(0.25), c(0.0, 1.0), c(0.08, 0.05), 41)
    {
        Ok(traj) => {
            let mut worst = match null_foliation_residual(&traj, &picard, opts) {
                Ok(v) => v,
                Err(e) => {
                    records.push(CheckRecord::error("null_foliation", anchor, &e.to_string()));
                    return records;
                }
            };
            let p2 = PainleveParams::from_alphas([r(0.0), r(0.0), r(0.0), r(0.5)]);
            if let Ok(traj2) =
                elliptic_trajectory(p2, c(0.31, 0.22), c(0.05, 0.02), c(0.0, 1.0), c(0.08, 0.05), 41)
            {
                worst = worst.max(null_foliation_residual(&traj2, &p2, opts).unwrap_or(f64::NAN));
            }
            records.push(CheckRecord::new("null_foliation", anchor, worst, 1e-7));
            // Negative control: a mismatched form does not vanish.
            let wrong = PainleveParams::from_alphas([r(1.0), r(0.0), r(0.0), r(0.0)]);
            match null_foliation_residual(&traj, &wrong, opts) {
                Ok(v) => records.push(CheckRecord::lower_bound(
                    "null_foliation_control",
                    "a mismatched form does not annihilate the tangents",
                    v,
                    1e-3,
                )),
                Err(e) => records.push(CheckRecord::error(
                    "null_foliation_control",
                    "a mismatched form does not annihilate the tangents",
                    &e.to_string(),
                )),
            }
        }
        Err(e) => records.push(CheckRecord::error("null_foliation", anchor, &e.to_string())),
    }
    records
}

fn divisor_vanishing(opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let t = c(0.3, 0.1);
    let x = c(0.52, 0.24);
    let on_divisor = ChartPoint::Algebraic(AlgebraicState {
        u: r(0.0),
        x,
        y: (x * (x - 1.0) * (x - t)).sqrt(),
        t,
    });
    let dx = TangentVector::basis(Chart::Algebraic, 1);
    let dt = TangentVector::basis(Chart::Algebraic, 2);
    let special = PainleveParams::from_alphas([r(0.0), r(0.0), r(0.0), r(0.5)]);
    match omega_eval(&on_divisor, &dx, &dt, &special, opts) {
        Ok(v) => records.push(CheckRecord::new(
            "divisor_vanishing",
            "the distinguished form vanishes on the tangents of U = 0",
            v.norm(),
            1e-9,
        )),
        Err(e) => records.push(CheckRecord::error(
            "divisor_vanishing",
            "the distinguished form vanishes on the tangents of U = 0",
            &e.to_string(),
        )),
    }
    let mut smallest = f64::INFINITY;
    for p in [
        PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.0)]),
        PainleveParams::from_alphas([r(0.125); 4]),
        PainleveParams::from_alphas([r(0.5), r(0.0), r(0.0), r(0.0)]),
    ] {
        if let Ok(v) = omega_eval(&on_divisor, &dx, &dt, &p, opts) {
            smallest = smallest.min(v.norm());
        }
    }
    records.push(CheckRecord::lower_bound(
        "divisor_transversality",
        "every other sampled form is nonzero on the tangents of U = 0",
        smallest,
        1e-3,
    ));
    records
}

fn laurent_residue(quick: bool, opts: &EvalOptions) -> Vec<CheckRecord> {
    let taus = if quick {
        vec![c(0.0, 1.3), c(0.2, 0.9)]
    } else {
        vec![
            c(0.0, 0.8),
            c(0.0, 1.3),
            c(0.3, 1.0),
            c(-0.2, 1.5),
            c(0.1, 0.65),
        ]
    };
    let mut worst: f64 = 0.0;
    let mut worst_sub: f64 = 0.0;
    for tau in taus {
        let m = ModularParameter::new(tau).unwrap();
        for j in HalfPeriodIndex::all() {
            if let Ok(v) = omega_j_residue(j, m, opts) {
                worst = worst.max((v - r(-4.0)).norm());
            }
        }
        let j0 = HalfPeriodIndex::new(0).unwrap();
        for order in [-2, -1] {
            if let Ok(v) = omega_j_laurent(j0, m, order, opts) {
                worst_sub = worst_sub.max(v.norm());
            }
        }
    }
    vec![
        CheckRecord::new(
            "laurent_residue",
            "the cubic differential has leading coefficient -4",
            worst,
            1e-6,
        ),
        CheckRecord::new(
            "laurent_subleading",
            "no subleading pole terms below the cubic one",
            worst_sub,
            1e-8,
        ),
    ]
}
