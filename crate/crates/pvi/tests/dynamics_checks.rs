//! Cross-chart dynamics checks: the same solution integrated in different
//! coordinate systems must agree after conversion, the classical form must
//! match finite differences of the uniformized elliptic flow, and the
//! Hamiltonian must obey the chain rule along trajectories.

mod support;

use num_complex::Complex64;
use pvi::dynamics::*;
use pvi::elliptic::{EvalOptions, ModularParameter};
use pvi::numeric::{apply_weights, fd_weights};
use pvi::uniformization::{modular_lambda, BranchChoice};
use support::c;

fn r(v: f64) -> Complex64 {
    c(v, 0.0)
}

fn tight_config(points: usize) -> IntegratorConfig {
    IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-13,
        ..IntegratorConfig::default()
    }
    .with_output_points(points)
}

fn eval_opts() -> EvalOptions {
    EvalOptions::with_tolerance(1e-13)
}

/// Map a tau-polyline to the corresponding t-polyline through lambda.
fn image_path(tau_path: &[Complex64], opts: &EvalOptions) -> PathSpec {
    let pts = tau_path
        .iter()
        .map(|t| modular_lambda(ModularParameter::new(*t).unwrap(), opts).unwrap())
        .collect();
    PathSpec::polyline(pts).unwrap()
}

/// Waypoints subdividing a straight tau-segment.
fn tau_waypoints(from: Complex64, to: Complex64, n: usize) -> Vec<Complex64> {
    (0..=n)
        .map(|k| from + (to - from) * (k as f64 / n as f64))
        .collect()
}

#[test]
fn elliptic_and_algebraic_integrations_agree() {
    let opts = eval_opts();
    let params_list = [
        PainleveParams::from_classical([r(0.125), r(-0.125), r(0.0), r(0.5)]),
        PainleveParams::from_classical([r(0.125), r(-0.125), r(0.125), r(0.375)]),
        PainleveParams::from_alphas([r(0.5), r(0.0), r(0.0), r(0.0)]),
    ];
    let tau0 = c(0.0, 1.0);
    let tau1 = tau0 + c(0.07, 0.07);
    let waypoints = tau_waypoints(tau0, tau1, 16);
    let m0 = ModularParameter::new(tau0).unwrap();
    let branch0 = BranchChoice::principal(m0, &opts).unwrap();

    for (i, p) in params_list.iter().enumerate() {
        let z0 = c(0.31, 0.17 + 0.02 * i as f64);
        let y0 = c(0.12, -0.03);
        let initial = ChartPoint::Elliptic(EllipticState {
            z: z0,
            y: y0,
            tau: tau0,
        });

        // Elliptic integration, then conversion of the endpoint.
        let tau_path = PathSpec::segment(tau0, tau1).unwrap();
        let ell = integrate(
            Chart::Elliptic,
            &initial,
            &tau_path,
            ParamsUsed::Standard(*p),
            &tight_config(9),
        )
        .unwrap();

        // Algebraic integration along the image path from the converted
        // initial state.
        let ctx0 = ConvertContext::new(branch0, opts).with_tau_hint(tau0);
        let alg_initial = convert_state(&initial, Chart::Algebraic, &ctx0).unwrap();
        let t_path = image_path(&waypoints, &opts);
        let alg = integrate(
            Chart::Algebraic,
            &alg_initial,
            &t_path,
            ParamsUsed::Standard(*p),
            &tight_config(9),
        )
        .unwrap();

        // Convert the elliptic endpoint and compare all components.
        let mut branch = branch0;
        for w in waypoints.windows(2) {
            branch = branch
                .continue_to(ModularParameter::new(w[1]).unwrap(), &opts)
                .unwrap();
        }
        let ctx1 = ConvertContext::new(branch, opts).with_tau_hint(tau1);
        let ell_end = convert_state(&ell.last().point, Chart::Algebraic, &ctx1).unwrap();
        let a = ell_end.as_algebraic().unwrap();
        let b = alg.last().point.as_algebraic().unwrap();
        let scale = b.u.norm().max(b.x.norm()).max(1.0);
        assert!(
            (a.u - b.u).norm() / scale < 1e-6,
            "U mismatch {} vs {} for parameter point {i}",
            a.u,
            b.u
        );
        assert!((a.x - b.x).norm() / scale < 1e-6, "X mismatch for point {i}");
        assert!((a.y - b.y).norm() / scale < 1e-6, "Y mismatch for point {i}");
        assert!((a.t - b.t).norm() < 1e-9, "base mismatch for point {i}");
    }
}

#[test]
fn classical_rhs_matches_uniformized_elliptic_flow() {
    // Integrate in the elliptic chart, push every sample through the
    // covering map, and difference X(t) numerically: the classical
    // right-hand side must reproduce the second derivative.
    let opts = eval_opts();
    let p = PainleveParams::from_classical([r(0.125), r(-0.125), r(0.0), r(0.5)]);
    let tau0 = c(0.0, 0.95);
    let tau1 = tau0 + c(0.05, 0.03);
    let initial = ChartPoint::Elliptic(EllipticState {
        z: c(0.33, 0.21),
        y: c(0.08, 0.02),
        tau: tau0,
    });
    let n = 21;
    let traj = integrate(
        Chart::Elliptic,
        &initial,
        &PathSpec::segment(tau0, tau1).unwrap(),
        ParamsUsed::Standard(p),
        &tight_config(n),
    )
    .unwrap();

    let m0 = ModularParameter::new(tau0).unwrap();
    let mut branch = BranchChoice::principal(m0, &opts).unwrap();
    let mut ts = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    for s in &traj.samples {
        let e = s.point.as_elliptic().unwrap();
        let tau = ModularParameter::new(e.tau).unwrap();
        branch = branch.continue_to(tau, &opts).unwrap();
        let ctx = ConvertContext::new(branch, opts).with_tau_hint(e.tau);
        let a = convert_state(&s.point, Chart::Algebraic, &ctx).unwrap();
        let a = a.as_algebraic().copied().unwrap();
        ts.push(a.t);
        xs.push(a.x);
    }
    // Second derivative of X(t) on the non-uniform complex nodes.
    let mid = n / 2;
    let nodes = &ts[mid - 3..=mid + 3];
    let vals = &xs[mid - 3..=mid + 3];
    let w = fd_weights(nodes, ts[mid], 2);
    let x_dot = apply_weights(&w[1], vals);
    let x_ddot = apply_weights(&w[2], vals);
    let s = ClassicalState {
        x: xs[mid],
        x_dot,
        t: ts[mid],
    };
    let rhs = rhs_classical(&s, &p, &opts).unwrap();
    assert!(
        (x_ddot - rhs).norm() < 1e-6 * rhs.norm().max(1.0),
        "finite difference {} vs right-hand side {}",
        x_ddot,
        rhs
    );
}

#[test]
fn algebraic_flow_matches_elliptic_through_conversion() {
    // d/dt of the converted elliptic trajectory must equal the algebraic
    // right-hand side at the matched state.
    let opts = eval_opts();
    let p = PainleveParams::from_classical([r(0.125), r(-0.125), r(0.125), r(0.375)]);
    let tau0 = c(0.1, 1.05);
    let tau1 = tau0 + c(0.04, 0.025);
    let initial = ChartPoint::Elliptic(EllipticState {
        z: c(0.27, 0.24),
        y: c(0.05, 0.06),
        tau: tau0,
    });
    let n = 21;
    let traj = integrate(
        Chart::Elliptic,
        &initial,
        &PathSpec::segment(tau0, tau1).unwrap(),
        ParamsUsed::Standard(p),
        &tight_config(n),
    )
    .unwrap();
    let m0 = ModularParameter::new(tau0).unwrap();
    let mut branch = BranchChoice::principal(m0, &opts).unwrap();
    let mut ts = Vec::new();
    let mut us = Vec::new();
    let mut states = Vec::new();
    for s in &traj.samples {
        let e = s.point.as_elliptic().unwrap();
        let tau = ModularParameter::new(e.tau).unwrap();
        branch = branch.continue_to(tau, &opts).unwrap();
        let ctx = ConvertContext::new(branch, opts).with_tau_hint(e.tau);
        let a = convert_state(&s.point, Chart::Algebraic, &ctx).unwrap();
        let a = a.as_algebraic().copied().unwrap();
        ts.push(a.t);
        us.push(a.u);
        states.push(a);
    }
    let mid = n / 2;
    let nodes = &ts[mid - 3..=mid + 3];
    let w = fd_weights(nodes, ts[mid], 1);
    let u_dot = apply_weights(&w[1], &us[mid - 3..=mid + 3]);
    let (_, du, _) = rhs_algebraic(&states[mid], &p, &opts).unwrap();
    assert!(
        (u_dot - du).norm() < 1e-6 * du.norm().max(1.0),
        "dU/dt by differencing {} vs flow {}",
        u_dot,
        du
    );
}

#[test]
fn hamiltonian_chain_rule_along_trajectory() {
    // H is not conserved; instead dH/dtau along the flow equals the partial
    // tau-derivative of H at the frozen state.
    let opts = eval_opts();
    let p = PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.0)]);
    let tau0 = c(0.0, 1.1);
    let tau1 = tau0 + c(0.06, 0.04);
    let initial = ChartPoint::Elliptic(EllipticState {
        z: c(0.29, 0.22),
        y: c(0.11, -0.02),
        tau: tau0,
    });
    let n = 17;
    let traj = integrate(
        Chart::Elliptic,
        &initial,
        &PathSpec::segment(tau0, tau1).unwrap(),
        ParamsUsed::Standard(p),
        &tight_config(n),
    )
    .unwrap();
    let mut taus = Vec::new();
    let mut hs = Vec::new();
    for s in &traj.samples {
        let e = s.point.as_elliptic().unwrap();
        taus.push(e.tau);
        hs.push(hamiltonian(e, &p, &opts).unwrap());
    }
    let mid = n / 2;
    let w = fd_weights(&taus[mid - 2..=mid + 2], taus[mid], 1);
    let dh_total = apply_weights(&w[1], &hs[mid - 2..=mid + 2]);

    // Partial tau-derivative at the frozen phase point.
    let e = traj.samples[mid].point.as_elliptic().copied().unwrap();
    let h = 1e-5;
    let mut shifted = Vec::new();
    let mut nodes = Vec::new();
    for k in [-2i32, -1, 1, 2] {
        let tau_k = e.tau + (k as f64) * h;
        let s_k = EllipticState::new(e.z, e.y, tau_k).unwrap();
        nodes.push(tau_k);
        shifted.push(hamiltonian(&s_k, &p, &opts).unwrap());
    }
    let w2 = fd_weights(&nodes, e.tau, 1);
    let dh_partial = apply_weights(&w2[1], &shifted);
    assert!(
        (dh_total - dh_partial).norm() < 1e-6,
        "total {} vs partial {}",
        dh_total,
        dh_partial
    );
}

#[test]
fn picard_canonical_lift_converts_consistently() {
    let opts = eval_opts();
    let tau = ModularParameter::new(c(0.0, 1.1)).unwrap();
    let branch = BranchChoice::principal(tau, &opts).unwrap();
    let ctx = ConvertContext::new(branch, opts).with_tau_hint(tau.get());
    let (ell, alg) = canonical_lift(1.0 / 3.0, 0.0, tau, &ctx).unwrap();
    assert_eq!(ell.y, r(1.0 / 3.0));
    let converted = convert_state(
        &ChartPoint::Elliptic(ell),
        Chart::Algebraic,
        &ctx.with_z_hint(ell.z),
    )
    .unwrap();
    let a = converted.as_algebraic().unwrap();
    assert!((a.u - alg.u).norm() < 1e-8);
    assert!((a.x - alg.x).norm() < 1e-8);
    assert!((a.y - alg.y).norm() < 1e-8);
}
