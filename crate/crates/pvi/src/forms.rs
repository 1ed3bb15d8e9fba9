//! The Painlevé differential forms and their structural identities.
//!
//! In the elliptic phase-space chart with coordinates (y, z, tau):
//!
//! ```text
//! omega = 2 pi i (dy ^ dz - y dy ^ dtau)
//!         + (1/2 pi i) sum_j alpha_j wp_z(z + T_j/2, tau) dz ^ dtau,
//!
//! Omega = 2 pi i (y dz - y^2/2 dtau) + dlog theta
//!         + 2 pi i G2(tau) dtau
//!         + (1/2 pi i) sum_j alpha_j wp(z + T_j/2, tau) dtau,
//! ```
//!
//! and in the algebraic chart with coordinates (U, X, t), Y dependent:
//!
//! ```text
//! omega = dU ^ dX / Y - U/(2(X-t)Y) dX ^ dt - 2 U dU ^ dt/(t(t-1))
//!         + (1/(2 t(t-1))) (alpha + beta t/X^2 + ...) dX ^ dt,
//!
//! Omega = U dX/Y - U^2 dt/(t(t-1))
//!         + (1/(2 t(t-1))) (alpha X - beta t/X - ...) dt.
//! ```
//!
//! Everything here is stored as explicit coefficient arrays per chart;
//! exterior derivatives are taken by central-difference circulation with one
//! Richardson refinement, and invariance is checked by pulling forms back
//! through finite-difference Jacobians of the group action.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    AlgebraicState, Chart, ChartPoint, EllipticState, PainleveParams, Trajectory,
};
use crate::elliptic::{
    eisenstein_g2, theta_with_derivatives, two_pi_i, wp, wp_pair, wp_z, EvalOptions,
    HalfPeriodIndex, ModularParameter, I, PI,
};
use crate::error::{Error, Result};
use crate::numeric::{apply_weights, fd_weights};
use crate::symmetry::{gamma2_act, ModularElement};

/// A tangent vector at a state, components in the chart's coordinate order:
/// (y, z, tau) in the elliptic chart, (U, X, t) in the algebraic one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub chart: Chart,
    pub components: [Complex64; 3],
}

impl TangentVector {
    pub fn new(chart: Chart, components: [Complex64; 3]) -> Self {
        TangentVector { chart, components }
    }

    pub fn basis(chart: Chart, k: usize) -> Self {
        let mut components = [Complex64::new(0.0, 0.0); 3];
        components[k] = Complex64::new(1.0, 0.0);
        TangentVector { chart, components }
    }
}

fn ensure_chart(state: &ChartPoint, v: &TangentVector) -> Result<()> {
    if state.chart() != v.chart {
        return Err(Error::InconsistentContext(format!(
            "tangent vector lives in {:?} but the state is in {:?}",
            v.chart,
            state.chart()
        )));
    }
    Ok(())
}

/// The weighted sum over half periods entering the elliptic forms, with f
/// evaluating either wp or wp_z at the shifted argument.
fn half_period_sum<F>(s: &EllipticState, p: &PainleveParams, mut f: F) -> Result<Complex64>
where
    F: FnMut(Complex64, ModularParameter) -> Result<Complex64>,
{
    let tau = s.modular_tau()?;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in HalfPeriodIndex::all() {
        let alpha = p.alphas[j.index() as usize];
        if alpha.norm() == 0.0 {
            continue;
        }
        sum += alpha * f(s.z + j.half_period(tau), tau)?;
    }
    Ok(sum)
}

/// The antisymmetric coefficient triple (m01, m02, m12) of the 2-form in the
/// state's chart, indexed by the coordinate order.
pub fn omega_coefficients(
    state: &ChartPoint,
    p: &PainleveParams,
    opts: &EvalOptions,
) -> Result<[Complex64; 3]> {
    match state {
        ChartPoint::Elliptic(s) => {
            let w = half_period_sum(s, p, |arg, tau| wp_z(arg, tau, opts))?;
            Ok([
                two_pi_i(),
                -two_pi_i() * s.y,
                w / two_pi_i(),
            ])
        }
        ChartPoint::Algebraic(s) => {
            let (u, x, y, t) = (s.u, s.x, s.y, s.t);
            let [alpha, beta, gamma, delta] = p.classical;
            let bracket = alpha
                + beta * t / (x * x)
                + gamma * (t - 1.0) / ((x - 1.0) * (x - 1.0))
                + delta * t * (t - 1.0) / ((x - t) * (x - t));
            Ok([
                1.0 / y,
                -2.0 * u / (t * (t - 1.0)),
                -u / (2.0 * (x - t) * y) + bracket / (2.0 * t * (t - 1.0)),
            ])
        }
        ChartPoint::Classical(_) => Err(Error::InvalidInput(
            "the 2-form lives on the phase space, not the classical quotient".into(),
        )),
    }
}

/// Evaluate the 2-form on two tangent vectors.
pub fn omega_eval(
    state: &ChartPoint,
    v1: &TangentVector,
    v2: &TangentVector,
    p: &PainleveParams,
    opts: &EvalOptions,
) -> Result<Complex64> {
    ensure_chart(state, v1)?;
    ensure_chart(state, v2)?;
    let m = omega_coefficients(state, p, opts)?;
    let a = &v1.components;
    let b = &v2.components;
    Ok(m[0] * (a[0] * b[1] - a[1] * b[0])
        + m[1] * (a[0] * b[2] - a[2] * b[0])
        + m[2] * (a[1] * b[2] - a[2] * b[1]))
}

/// Coefficient triple of the 1-form Omega in the state's chart.
pub fn omega_big_components(
    state: &ChartPoint,
    p: &PainleveParams,
    opts: &EvalOptions,
) -> Result<[Complex64; 3]> {
    match state {
        ChartPoint::Elliptic(s) => {
            let tau = s.modular_tau()?;
            let th = theta_with_derivatives(s.z, tau, opts)?;
            let wp_sum = half_period_sum(s, p, |arg, tau| wp(arg, tau, opts))?;
            let g2 = eisenstein_g2(tau, opts)?;
            Ok([
                Complex64::new(0.0, 0.0),
                two_pi_i() * s.y + th.theta_z / th.theta,
                -I * PI * s.y * s.y
                    + th.theta_tau / th.theta
                    + two_pi_i() * g2
                    + wp_sum / two_pi_i(),
            ])
        }
        ChartPoint::Algebraic(s) => {
            let (u, x, y, t) = (s.u, s.x, s.y, s.t);
            let [alpha, beta, gamma, delta] = p.classical;
            let linear = alpha * x - beta * t / x - gamma * (t - 1.0) / (x - 1.0)
                - delta * t * (t - 1.0) / (x - t);
            Ok([
                Complex64::new(0.0, 0.0),
                u / y,
                -u * u / (t * (t - 1.0)) + linear / (2.0 * t * (t - 1.0)),
            ])
        }
        ChartPoint::Classical(_) => Err(Error::InvalidInput(
            "the 1-form lives on the phase space, not the classical quotient".into(),
        )),
    }
}

/// Evaluate Omega on a tangent vector.
pub fn omega_big_eval(
    state: &ChartPoint,
    v: &TangentVector,
    p: &PainleveParams,
    opts: &EvalOptions,
) -> Result<Complex64> {
    ensure_chart(state, v)?;
    let c = omega_big_components(state, p, opts)?;
    Ok(c[0] * v.components[0] + c[1] * v.components[1] + c[2] * v.components[2])
}

/// Coefficient triple of Omega_0, the primitive of the divisor-vanishing
/// form, in the elliptic chart: its dtau part uses the second logarithmic
/// z-derivative of theta instead of the parameter sum.
pub fn omega0_components(s: &EllipticState, opts: &EvalOptions) -> Result<[Complex64; 3]> {
    let tau = s.modular_tau()?;
    let th = theta_with_derivatives(s.z, tau, opts)?;
    let l1 = th.theta_z / th.theta;
    let l2 = th.theta_zz / th.theta - l1 * l1;
    Ok([
        Complex64::new(0.0, 0.0),
        two_pi_i() * s.y + l1,
        -I * PI * s.y * s.y + th.theta_tau / th.theta + I / (4.0 * PI) * l2,
    ])
}

/// Evaluate Omega_0 on a tangent vector (elliptic chart).
pub fn omega0_eval(s: &EllipticState, v: &TangentVector, opts: &EvalOptions) -> Result<Complex64> {
    if v.chart != Chart::Elliptic {
        return Err(Error::InconsistentContext(
            "Omega_0 is evaluated in the elliptic chart".into(),
        ));
    }
    let c = omega0_components(s, opts)?;
    Ok(c[1] * v.components[1] + c[2] * v.components[2])
}

/// Displace one chart coordinate, keeping the dependent curve variable Y
/// branch-consistent in the algebraic chart.
pub fn displace(state: &ChartPoint, coord: usize, h: Complex64) -> Result<ChartPoint> {
    match state {
        ChartPoint::Elliptic(s) => {
            let (mut y, mut z, mut tau) = (s.y, s.z, s.tau);
            match coord {
                0 => y += h,
                1 => z += h,
                2 => tau += h,
                _ => return Err(Error::InvalidInput("coordinate index out of range".into())),
            }
            Ok(ChartPoint::Elliptic(EllipticState { z, y, tau }))
        }
        ChartPoint::Algebraic(s) => {
            let (mut u, mut x, mut t) = (s.u, s.x, s.t);
            match coord {
                0 => u += h,
                1 => x += h,
                2 => t += h,
                _ => return Err(Error::InvalidInput("coordinate index out of range".into())),
            }
            let mut y = (x * (x - 1.0) * (x - t)).sqrt();
            if (y - s.y).norm() > (y + s.y).norm() {
                y = -y;
            }
            Ok(ChartPoint::Algebraic(AlgebraicState { u, x, y, t }))
        }
        ChartPoint::Classical(_) => Err(Error::InvalidInput(
            "forms are displaced on the phase space charts only".into(),
        )),
    }
}

/// Residual of exactness on one coordinate plane: the central-difference
/// circulation d Omega (e_i, e_j) minus the stored 2-form coefficient.
/// One Richardson refinement sharpens the O(h^2) differencing to O(h^4).
pub fn exactness_residual(
    state: &ChartPoint,
    p: &PainleveParams,
    plane: (usize, usize),
    opts: &EvalOptions,
) -> Result<Complex64> {
    let (i, j) = plane;
    if i >= 3 || j >= 3 || i == j {
        return Err(Error::InvalidInput(format!(
            "({i}, {j}) is not a coordinate plane"
        )));
    }
    let circulation = |h: f64| -> Result<Complex64> {
        let hc = Complex64::new(h, 0.0);
        let comp = |pt: &ChartPoint, k: usize| -> Result<Complex64> {
            Ok(omega_big_components(pt, p, opts)?[k])
        };
        let di_oj = (comp(&displace(state, i, hc)?, j)? - comp(&displace(state, i, -hc)?, j)?)
            / (2.0 * h);
        let dj_oi = (comp(&displace(state, j, hc)?, i)? - comp(&displace(state, j, -hc)?, i)?)
            / (2.0 * h);
        Ok(di_oj - dj_oi)
    };
    let h = 1e-5;
    let d1 = circulation(h)?;
    let d2 = circulation(h / 2.0)?;
    let d_omega = (4.0 * d2 - d1) / 3.0;
    let m = omega_coefficients(state, p, opts)?;
    let index = match (i, j) {
        (0, 1) => m[0],
        (1, 0) => -m[0],
        (0, 2) => m[1],
        (2, 0) => -m[1],
        (1, 2) => m[2],
        _ => -m[2],
    };
    Ok(d_omega - index)
}

/// Exact Jacobian of the deck-group action at a state, rows and columns in
/// (y, z, tau) order. The action is affine in (y, z) over a Möbius map in
/// tau, so the derivative is available in closed form; the finite-difference
/// version below serves as its independent oracle in the tests.
fn action_jacobian(g: &ModularElement, s: &EllipticState) -> [[Complex64; 3]; 3] {
    let (c, d) = (g.c as f64, g.d as f64);
    let m = g.m as f64;
    let den = c * s.tau + d;
    let zero = Complex64::new(0.0, 0.0);
    [
        [den, Complex64::from(-c), c * s.y],
        [zero, 1.0 / den, (m - c * s.z) / (den * den)],
        [zero, zero, 1.0 / (den * den)],
    ]
}

/// Finite-difference Jacobian of the deck-group action at a state, with one
/// Richardson refinement; columns indexed by (y, z, tau).
pub fn action_jacobian_fd(
    g: &ModularElement,
    s: &EllipticState,
    h: f64,
) -> Result<[[Complex64; 3]; 3]> {
    let eval = |state: &EllipticState| -> Result<[Complex64; 3]> {
        let t = gamma2_act(g, state)?;
        Ok([t.y, t.z, t.tau])
    };
    let one_sided = |h: f64| -> Result<[[Complex64; 3]; 3]> {
        let mut jac = [[Complex64::new(0.0, 0.0); 3]; 3];
        for col in 0..3 {
            let hc = Complex64::new(h, 0.0);
            let plus = match col {
                0 => EllipticState { y: s.y + hc, ..*s },
                1 => EllipticState { z: s.z + hc, ..*s },
                _ => EllipticState {
                    tau: s.tau + hc,
                    ..*s
                },
            };
            let minus = match col {
                0 => EllipticState { y: s.y - hc, ..*s },
                1 => EllipticState { z: s.z - hc, ..*s },
                _ => EllipticState {
                    tau: s.tau - hc,
                    ..*s
                },
            };
            let fp = eval(&plus)?;
            let fm = eval(&minus)?;
            for row in 0..3 {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        Ok(jac)
    };
    let j1 = one_sided(h)?;
    let j2 = one_sided(h / 2.0)?;
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = (4.0 * j2[r][c] - j1[r][c]) / 3.0;
        }
    }
    Ok(out)
}

fn matrix_vector(j: &[[Complex64; 3]; 3], v: &[Complex64; 3]) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r] += j[r][c] * v[c];
        }
    }
    out
}

/// Residual of the invariance of the 2-form under a deck-group element:
/// max over coordinate planes of |(pullback of omega) - omega| at the state.
pub fn invariance_residual(
    s: &EllipticState,
    p: &PainleveParams,
    g: &ModularElement,
    opts: &EvalOptions,
) -> Result<f64> {
    let transformed = gamma2_act(g, s)?;
    if transformed.tau.im <= crate::elliptic::MIN_IM_TAU {
        return Err(Error::InvalidInput(
            "transformed tau leaves the evaluation strip".into(),
        ));
    }
    let jac = action_jacobian(g, s);
    let here = ChartPoint::Elliptic(*s);
    let there = ChartPoint::Elliptic(transformed);
    let mut worst: f64 = 0.0;
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let ei = TangentVector::basis(Chart::Elliptic, i);
        let ej = TangentVector::basis(Chart::Elliptic, j);
        let ji = TangentVector::new(Chart::Elliptic, matrix_vector(&jac, &ei.components));
        let jj = TangentVector::new(Chart::Elliptic, matrix_vector(&jac, &ej.components));
        let pulled = omega_eval(&there, &ji, &jj, p, opts)?;
        let original = omega_eval(&here, &ei, &ej, p, opts)?;
        worst = worst.max((pulled - original).norm());
    }
    Ok(worst)
}

/// Residual of the invariance of a 1-form given by its coefficient function,
/// pulled back through a deck-group element the same way.
pub fn one_form_invariance_residual<F>(
    s: &EllipticState,
    g: &ModularElement,
    components: F,
    _opts: &EvalOptions,
) -> Result<f64>
where
    F: Fn(&EllipticState) -> Result<[Complex64; 3]>,
{
    let transformed = gamma2_act(g, s)?;
    let jac = action_jacobian(g, s);
    let c_there = components(&transformed)?;
    let c_here = components(s)?;
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let e = TangentVector::basis(Chart::Elliptic, k);
        let je = matrix_vector(&jac, &e.components);
        let pulled = c_there[0] * je[0] + c_there[1] * je[1] + c_there[2] * je[2];
        worst = worst.max((pulled - c_here[k]).norm());
    }
    Ok(worst)
}

/// Maximum contraction of the 2-form with the numerical tangent of a
/// trajectory, over interior samples and all coordinate probes. Solutions
/// are null leaves, so this vanishes exactly when the trajectory solves the
/// equation the form encodes.
pub fn null_foliation_residual(
    traj: &Trajectory,
    p: &PainleveParams,
    opts: &EvalOptions,
) -> Result<f64> {
    let n = traj.samples.len();
    if n < 5 {
        return Err(Error::InsufficientSamples {
            available: n,
            needed: 5,
        });
    }
    let mut worst: f64 = 0.0;
    let bases: Vec<Complex64> = traj.samples.iter().map(|s| s.point.base()).collect();
    for i in 2..n - 2 {
        let s = traj.samples[i].point.as_elliptic()?;
        let nodes = &bases[i - 2..=i + 2];
        let w = fd_weights(nodes, bases[i], 1);
        let zs: Vec<Complex64> = traj.samples[i - 2..=i + 2]
            .iter()
            .map(|s| Ok(s.point.as_elliptic()?.z))
            .collect::<Result<_>>()?;
        let ys: Vec<Complex64> = traj.samples[i - 2..=i + 2]
            .iter()
            .map(|s| Ok(s.point.as_elliptic()?.y))
            .collect::<Result<_>>()?;
        let tangent = TangentVector::new(
            Chart::Elliptic,
            [
                apply_weights(&w[1], &ys),
                apply_weights(&w[1], &zs),
                Complex64::new(1.0, 0.0),
            ],
        );
        let state = ChartPoint::Elliptic(*s);
        for k in 0..3 {
            let probe = TangentVector::basis(Chart::Elliptic, k);
            let v = omega_eval(&state, &tangent, &probe, p, opts)?;
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}

/// Laurent coefficient of w^m of the cubic differential representative
/// 2 wp_z(w, tau) at the pole w = 0, by discrete Fourier extraction on a
/// circle of radius 1e-2 with 16 sample points.
pub fn omega_j_laurent(
    _j: HalfPeriodIndex,
    tau: ModularParameter,
    m: i32,
    opts: &EvalOptions,
) -> Result<Complex64> {
    // wp_z is lattice periodic, so the expansion of 2 wp_z(z + T_j/2) at
    // z = -T_j/2 is the expansion of 2 wp_z(w) at w = 0 for every j.
    let radius = 1e-2;
    let points = 16usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..points {
        let angle = 2.0 * PI * (k as f64) / (points as f64);
        let w = radius * Complex64::new(angle.cos(), angle.sin());
        let (_, pz) = wp_pair(w, tau, opts)?;
        sum += 2.0 * pz * w.powi(-m);
    }
    Ok(sum / points as f64)
}

/// The leading Laurent coefficient (of w^{-3}); must equal -4, pinning the
/// normalization under which the form is the cube of a differential with
/// residue r, r^3 = -4.
pub fn omega_j_residue(
    j: HalfPeriodIndex,
    tau: ModularParameter,
    opts: &EvalOptions,
) -> Result<Complex64> {
    omega_j_laurent(j, tau, -3, opts)
}
