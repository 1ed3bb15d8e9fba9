//! Dynamics checks: agreement of the three charts on the same solution,
//! exactness of the canonical families, and the reduced-form coefficients.

use num_complex::Complex64;
use pvi::dynamics::*;
use pvi::elliptic::{wp_z, EvalOptions, ModularParameter, PI};
use pvi::uniformization::{modular_lambda, BranchChoice};

use super::{c, parameter_points, r, tight, tight_config};
use crate::report::CheckRecord;

fn image_path(
    waypoints: &[Complex64],
    opts: &EvalOptions,
) -> Result<PathSpec, pvi::Error> {
    let pts = waypoints
        .iter()
        .map(|t| modular_lambda(ModularParameter::new(*t)?, opts))
        .collect::<Result<Vec<_>, pvi::Error>>()?;
    PathSpec::polyline(pts)
}

pub fn dynamics_records(quick: bool) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let opts = tight();

    records.push(chart_equivalence(quick, &opts));
    records.extend(picard_exactness(&opts));
    records.extend(divisor_family(&opts));
    records.extend(reduced_form_coefficients(&opts));

    records
}

/// The same solution integrated in the elliptic, algebraic, and classical
/// charts agrees after conversion, for every standing parameter point and
/// three initial conditions.
fn chart_equivalence(quick: bool, opts: &EvalOptions) -> CheckRecord {
    let anchor = "one solution, three charts: endpoints agree after conversion";
    let params = parameter_points();
    let initial_conditions = [
        (c(0.31, 0.17), c(0.12, -0.03)),
        (c(0.26, 0.24), c(-0.05, 0.08)),
        (c(0.37, 0.11), c(0.02, 0.04)),
    ];
    let n_ic = if quick { 1 } else { initial_conditions.len() };
    let tau0 = c(0.0, 1.0);
    let tau1 = tau0 + c(0.07, 0.07);
    let waypoints: Vec<Complex64> = (0..=16)
        .map(|k| tau0 + (tau1 - tau0) * (k as f64 / 16.0))
        .collect();
    let m0 = ModularParameter::new(tau0).unwrap();
    let branch0 = match BranchChoice::principal(m0, opts) {
        Ok(b) => b,
        Err(e) => return CheckRecord::error("chart_equivalence", anchor, &e.to_string()),
    };
    let mut branch1 = branch0;
    for w in waypoints.windows(2) {
        branch1 = branch1
            .continue_to(ModularParameter::new(w[1]).unwrap(), opts)
            .unwrap();
    }
    let mut worst: f64 = 0.0;
    for p in &params {
        for (z0, y0) in initial_conditions.iter().take(n_ic) {
            let run = || -> Result<f64, pvi::Error> {
                let initial = ChartPoint::Elliptic(EllipticState {
                    z: *z0,
                    y: *y0,
                    tau: tau0,
                });
                let tau_path = PathSpec::segment(tau0, tau1)?;
                let ell = integrate(
                    Chart::Elliptic,
                    &initial,
                    &tau_path,
                    ParamsUsed::Standard(*p),
                    &tight_config(5),
                )?;
                let ctx0 = ConvertContext::new(branch0, *opts).with_tau_hint(tau0);
                let alg_initial = convert_state(&initial, Chart::Algebraic, &ctx0)?;
                let cls_initial = convert_state(&initial, Chart::Classical, &ctx0)?;
                let t_path = image_path(&waypoints, opts)?;
                let alg = integrate(
                    Chart::Algebraic,
                    &alg_initial,
                    &t_path,
                    ParamsUsed::Standard(*p),
                    &tight_config(5),
                )?;
                let cls = integrate(
                    Chart::Classical,
                    &cls_initial,
                    &t_path,
                    ParamsUsed::Standard(*p),
                    &tight_config(5),
                )?;
                // Project all three endpoints to the classical chart.
                let ctx1 = ConvertContext::new(branch1, *opts).with_tau_hint(tau1);
                let from_ell = convert_state(&ell.last().point, Chart::Classical, &ctx1)?;
                let from_alg = convert_state(&alg.last().point, Chart::Classical, &ctx1)?;
                let e = from_ell.as_classical()?;
                let a = from_alg.as_classical()?;
                let d = cls.last().point.as_classical()?;
                let scale = e
                    .x
                    .norm()
                    .max(e.x_dot.norm())
                    .max(1.0);
                let mismatch = (e.x - a.x)
                    .norm()
                    .max((e.x_dot - a.x_dot).norm())
                    .max((e.x - d.x).norm())
                    .max((e.x_dot - d.x_dot).norm());
                Ok(mismatch / scale)
            };
            match run() {
                Ok(v) => worst = worst.max(v),
                Err(e) => {
                    return CheckRecord::error("chart_equivalence", anchor, &e.to_string())
                }
            }
        }
    }
    CheckRecord::new("chart_equivalence", anchor, worst, 1e-6)
}

/// Zero-parameter solutions stay on the affine sections z = e tau + f.
fn picard_exactness(opts: &EvalOptions) -> Vec<CheckRecord> {
    let _ = opts;
    let mut records = Vec::new();
    let tau0 = c(0.1, 1.0);
    let (e, f) = (0.25, 0.1);
    let initial = ChartPoint::Elliptic(EllipticState {
        z: e * tau0 + f,
        y: r(e),
        tau: tau0,
    });
    let path = PathSpec::polyline(vec![tau0, tau0 + c(0.3, 0.2), tau0 + c(0.5, 0.1)]).unwrap();
    match integrate(
        Chart::Elliptic,
        &initial,
        &path,
        ParamsUsed::Standard(PainleveParams::zero()),
        &tight_config(33),
    ) {
        Ok(traj) => {
            let mut worst_z: f64 = 0.0;
            let mut worst_y: f64 = 0.0;
            for s in &traj.samples {
                let st = s.point.as_elliptic().unwrap();
                worst_z = worst_z.max((st.z - (e * st.tau + f)).norm());
                worst_y = worst_y.max((st.y - r(e)).norm());
            }
            records.push(CheckRecord::new(
                "picard_sections_z",
                "zero parameters: z stays on e tau + f",
                worst_z,
                1e-9,
            ));
            records.push(CheckRecord::new(
                "picard_sections_y",
                "zero parameters: y stays at e",
                worst_y,
                1e-9,
            ));
        }
        Err(e) => records.push(CheckRecord::error(
            "picard_sections_z",
            "zero parameters: z stays on e tau + f",
            &e.to_string(),
        )),
    }
    records
}

/// The constant family on the divisor: classical zero parameters, U = 0.
fn divisor_family(opts: &EvalOptions) -> Vec<CheckRecord> {
    let _ = opts;
    let mut records = Vec::new();
    let t0 = c(0.35, 0.05);
    let x0 = c(0.52, 0.31);
    let initial = ChartPoint::Algebraic(AlgebraicState {
        u: r(0.0),
        x: x0,
        y: (x0 * (x0 - 1.0) * (x0 - t0)).sqrt(),
        t: t0,
    });
    let p = PainleveParams::from_classical([r(0.0); 4]);
    let path = PathSpec::segment(t0, t0 + c(0.12, -0.03)).unwrap();
    match integrate(
        Chart::Algebraic,
        &initial,
        &path,
        ParamsUsed::Standard(p),
        &tight_config(17),
    ) {
        Ok(traj) => {
            let mut worst_u: f64 = 0.0;
            let mut worst_x: f64 = 0.0;
            let mut worst_curve: f64 = 0.0;
            for s in &traj.samples {
                let a = s.point.as_algebraic().unwrap();
                worst_u = worst_u.max(a.u.norm());
                worst_x = worst_x.max((a.x - x0).norm());
                worst_curve = worst_curve.max(a.curve_residual());
            }
            records.push(CheckRecord::new(
                "divisor_family_u",
                "classical zero parameters: U stays 0",
                worst_u,
                1e-9,
            ));
            records.push(CheckRecord::new(
                "divisor_family_x",
                "classical zero parameters: X stays constant",
                worst_x,
                1e-9,
            ));
            records.push(CheckRecord::new(
                "on_curve_drift",
                "derived dY/dt keeps Y^2 = X(X-1)(X-t)",
                worst_curve,
                1e-9,
            ));
        }
        Err(e) => records.push(CheckRecord::error(
            "divisor_family_u",
            "classical zero parameters: U stays 0",
            &e.to_string(),
        )),
    }
    records
}

/// The reduced-form coefficients -1/(8 pi^2) and -1/(2 pi^2) drop out of the
/// normalization as algebraic identities.
fn reduced_form_coefficients(opts: &EvalOptions) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let tau = c(0.0, 1.2);
    let z = c(0.27, 0.31);
    let m = ModularParameter::new(tau).unwrap();
    let pz = wp_z(z, m, opts).unwrap();
    let s = EllipticState {
        z,
        y: r(0.0),
        tau,
    };
    let half = PainleveParams::from_alphas([r(0.5), r(0.0), r(0.0), r(0.0)]);
    let v1 = rhs_elliptic(&s, &half, opts).unwrap();
    let e1 = (v1 - (-pz / (8.0 * PI * PI))).norm() / (pz.norm() / (8.0 * PI * PI));
    records.push(CheckRecord::new(
        "reduced_form_eighth",
        "alphas (1/2,0,0,0): flow = -(1/8 pi^2) wp_z",
        e1,
        1e-14,
    ));
    let two = PainleveParams::from_alphas([r(2.0), r(0.0), r(0.0), r(0.0)]);
    let v2 = rhs_elliptic(&s, &two, opts).unwrap();
    let e2 = (v2 - (-pz / (2.0 * PI * PI))).norm() / (pz.norm() / (2.0 * PI * PI));
    records.push(CheckRecord::new(
        "reduced_form_half",
        "alphas (2,0,0,0): flow = -(1/2 pi^2) wp_z",
        e2,
        1e-14,
    ));
    records
}
