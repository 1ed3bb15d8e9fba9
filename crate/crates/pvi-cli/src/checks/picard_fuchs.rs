//! Operator checks: annihilation of both periods with Richardson-sharpened
//! differencing, and the master identity along integrated solutions.

use num_complex::Complex64;
use pvi::dynamics::{convert_state, Chart, ChartPoint, ConvertContext, EllipticState};
use pvi::dynamics::{integrate, ParamsUsed, PathSpec};
use pvi::elliptic::ModularParameter;
use pvi::picard_fuchs::*;
use pvi::uniformization::BranchChoice;

use super::{c, parameter_points, r, tight, tight_config};
use crate::report::CheckRecord;

pub fn picard_fuchs_records(quick: bool) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let opts = tight();

    // L_t annihilates both periods, at base points along a complex segment.
    let n = if quick { 3 } else { 10 };
    let seed = ModularParameter::new(c(0.0, 1.0)).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let t0 = c(0.2 + 0.6 * (k as f64) / ((n - 1) as f64), 0.15);
        let value = |h: f64| -> Result<(Complex64, Complex64), pvi::Error> {
            let (pi1, pi2) = period_samples(t0, c(h, 0.0), 2, seed, &opts)?;
            Ok((apply_lt(&pi1, t0)?, apply_lt(&pi2, t0)?))
        };
        match (value(1e-3), value(2e-3)) {
            (Ok((a1, a2)), Ok((b1, b2))) => {
                let r1 = (16.0 * a1 - b1) / 15.0;
                let r2 = (16.0 * a2 - b2) / 15.0;
                worst = worst.max(r1.norm()).max(r2.norm());
            }
            (Err(e), _) | (_, Err(e)) => {
                records.push(CheckRecord::error(
                    "period_annihilation",
                    "L_t Pi_1 = L_t Pi_2 = 0",
                    &e.to_string(),
                ));
            }
        }
    }
    records.push(CheckRecord::new(
        "period_annihilation",
        "t(1-t) Pi'' + (1-2t) Pi' - Pi/4 = 0 for both periods",
        worst,
        1e-6,
    ));

    // The master identity along integrated solutions: the Picard point, the
    // quantum-cohomology point, and Hitchin's point.
    let points = parameter_points();
    let mut worst_mu: f64 = 0.0;
    for (i, p) in [points[0], points[1], points[2]].iter().enumerate() {
        let tau0 = c(0.0, 1.0);
        let (z0, y0) = if i == 0 {
            (0.21 * c(0.0, 1.0) + 0.13, r(0.21))
        } else {
            (c(0.32, 0.18 + 0.01 * i as f64), c(0.07, -0.02))
        };
        let m = ModularParameter::new(tau0).unwrap();
        let branch = BranchChoice::principal(m, &opts).unwrap();
        let ctx = ConvertContext::new(branch, opts).with_tau_hint(tau0);
        let initial = ChartPoint::Elliptic(EllipticState {
            z: z0,
            y: y0,
            tau: tau0,
        });
        let classical = match convert_state(&initial, Chart::Classical, &ctx) {
            Ok(s) => s,
            Err(e) => {
                records.push(CheckRecord::error(
                    "mu_equation",
                    "t(1-t) L_t int dx/y reproduces the parameter terms",
                    &e.to_string(),
                ));
                continue;
            }
        };
        let t0 = classical.base();
        let path = PathSpec::segment(t0, t0 + c(0.08, 0.03)).unwrap();
        let traj = match integrate(
            Chart::Classical,
            &classical,
            &path,
            ParamsUsed::Standard(*p),
            &tight_config(41),
        ) {
            Ok(t) => t,
            Err(e) => {
                records.push(CheckRecord::error(
                    "mu_equation",
                    "t(1-t) L_t int dx/y reproduces the parameter terms",
                    &e.to_string(),
                ));
                continue;
            }
        };
        let mid = traj.samples[20].point.base();
        match mu_residual(&traj, p, mid, &opts) {
            Ok(v) => worst_mu = worst_mu.max(v.norm()),
            Err(e) => records.push(CheckRecord::error(
                "mu_equation",
                "t(1-t) L_t int dx/y reproduces the parameter terms",
                &e.to_string(),
            )),
        }
    }
    records.push(CheckRecord::new(
        "mu_equation",
        "t(1-t) L_t int dx/y = alpha Y + beta t Y/X^2 + gamma (t-1) Y/(X-1)^2 + (delta - 1/2) t(t-1) Y/(X-t)^2",
        worst_mu,
        1e-5,
    ));

    records
}
