//! Right-hand sides of the equation in each chart, and the time-dependent
//! Hamiltonian generating the elliptic flow.

use num_complex::Complex64;

use crate::elliptic::{
    lattice_distance, lattice_reduce, two_pi_i, wp, wp_z, EvalOptions, HalfPeriodIndex,
};
use crate::error::{Error, Result};

use super::{
    AlgebraicState, ClassicalState, EllipticState, GeneralizedParams, PainleveParams,
};

/// 1 / (2 pi i)^2 = -1 / (4 pi^2).
fn inv_two_pi_i_squared() -> Complex64 {
    1.0 / (two_pi_i() * two_pi_i())
}

/// d^2 z / d tau^2 = (1/(2 pi i)^2) sum_j alpha_j wp_z(z + T_j/2, tau).
pub fn rhs_elliptic(s: &EllipticState, p: &PainleveParams, opts: &EvalOptions) -> Result<Complex64> {
    let tau = s.modular_tau()?;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in HalfPeriodIndex::all() {
        let alpha = p.alphas[j.index() as usize];
        if alpha.norm() == 0.0 {
            continue;
        }
        let arg = s.z + j.half_period(tau);
        let shifted = lattice_reduce(arg, tau).z_reduced;
        if lattice_distance(shifted, tau) < opts.pole_guard {
            return Err(Error::PoleHit { location: arg });
        }
        sum += alpha * wp_z(arg, tau, opts)?;
    }
    Ok(inv_two_pi_i_squared() * sum)
}

/// The generalized right-hand side over arbitrary torsion shift points.
pub fn rhs_elliptic_generalized(
    s: &EllipticState,
    g: &GeneralizedParams,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let tau = s.modular_tau()?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (shift, alpha) in g.terms() {
        if alpha.norm() == 0.0 {
            continue;
        }
        let arg = s.z + shift.at(tau);
        let reduced = lattice_reduce(arg, tau).z_reduced;
        if lattice_distance(reduced, tau) < opts.pole_guard {
            return Err(Error::PoleHit { location: arg });
        }
        sum += alpha * wp_z(arg, tau, opts)?;
    }
    Ok(inv_two_pi_i_squared() * sum)
}

/// The shared parameter bracket alpha + beta t/X^2 + gamma (t-1)/(X-1)^2
/// + delta t(t-1)/(X-t)^2.
fn classical_bracket(x: Complex64, t: Complex64, p: &PainleveParams) -> Complex64 {
    let [alpha, beta, gamma, delta] = p.classical;
    alpha
        + beta * t / (x * x)
        + gamma * (t - 1.0) / ((x - 1.0) * (x - 1.0))
        + delta * t * (t - 1.0) / ((x - t) * (x - t))
}

fn guard_classical(x: Complex64, t: Complex64, guard: f64) -> Result<()> {
    if x.norm() < guard || (x - 1.0).norm() < guard || (x - t).norm() < guard {
        return Err(Error::PoleHit { location: x });
    }
    Ok(())
}

/// d^2 X / d t^2 of the classical rational form.
pub fn rhs_classical(s: &ClassicalState, p: &PainleveParams, opts: &EvalOptions) -> Result<Complex64> {
    let (x, xd, t) = (s.x, s.x_dot, s.t);
    guard_classical(x, t, opts.pole_guard)?;
    let half_sum = 1.0 / x + 1.0 / (x - 1.0) + 1.0 / (x - t);
    let drift = 1.0 / t + 1.0 / (t - 1.0) + 1.0 / (x - t);
    let front = x * (x - 1.0) * (x - t) / (t * t * (t - 1.0) * (t - 1.0));
    Ok(0.5 * half_sum * xd * xd - drift * xd + front * classical_bracket(x, t, p))
}

/// Flow of the algebraic phase-space model:
///
/// ```text
/// dX/dt = 2 U Y / (t(t-1)),
/// dU/dt = -U / (2(X-t)) + Y/(2t(t-1)) * bracket,
/// ```
///
/// with dY/dt derived by differentiating the curve equation so the on-curve
/// constraint is preserved to integrator order rather than drifting.
pub fn rhs_algebraic(
    s: &AlgebraicState,
    p: &PainleveParams,
    opts: &EvalOptions,
) -> Result<(Complex64, Complex64, Complex64)> {
    let (u, x, y, t) = (s.u, s.x, s.y, s.t);
    guard_classical(x, t, opts.pole_guard)?;
    if y.norm() < opts.pole_guard {
        return Err(Error::PoleHit { location: x });
    }
    let dx = 2.0 * u * y / (t * (t - 1.0));
    let du = -u / (2.0 * (x - t)) + y / (2.0 * t * (t - 1.0)) * classical_bracket(x, t, p);
    // Y^2 = P(X, t) with P = X^3 - (1+t) X^2 + t X.
    let dp_dx = 3.0 * x * x - 2.0 * (1.0 + t) * x + t;
    let dp_dt = -x * (x - 1.0);
    let dy = (dp_dx * dx + dp_dt) / (2.0 * y);
    Ok((dx, du, dy))
}

/// The time-dependent Hamiltonian
/// H = y^2/2 - (1/(2 pi i)^2) sum_j alpha_j wp(z + T_j/2, tau),
/// whose flow dz/dtau = dH/dy, dy/dtau = -dH/dz is the elliptic form.
pub fn hamiltonian(s: &EllipticState, p: &PainleveParams, opts: &EvalOptions) -> Result<Complex64> {
    let tau = s.modular_tau()?;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in HalfPeriodIndex::all() {
        let alpha = p.alphas[j.index() as usize];
        if alpha.norm() == 0.0 {
            continue;
        }
        let arg = s.z + j.half_period(tau);
        let reduced = lattice_reduce(arg, tau).z_reduced;
        if lattice_distance(reduced, tau) < opts.pole_guard {
            return Err(Error::PoleHit { location: arg });
        }
        sum += alpha * wp(arg, tau, opts)?;
    }
    Ok(s.y * s.y * 0.5 - inv_two_pi_i_squared() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{ModularParameter, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(v: f64) -> Complex64 {
        c(v, 0.0)
    }

    fn opts() -> EvalOptions {
        EvalOptions::with_tolerance(1e-13)
    }

    fn state(z: Complex64, y: Complex64, tau: Complex64) -> EllipticState {
        EllipticState::new(z, y, tau).unwrap()
    }

    #[test]
    fn zero_parameters_give_zero_flow() {
        let s = state(c(0.31, 0.12), c(0.2, 0.0), c(0.1, 1.1));
        let v = rhs_elliptic(&s, &PainleveParams::zero(), &opts()).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn reduced_form_coefficients_are_algebraic_identities() {
        let tau = c(0.0, 1.2);
        let z = c(0.27, 0.31);
        let s = state(z, r(0.0), tau);
        let m = ModularParameter::new(tau).unwrap();
        let pz = wp_z(z, m, &opts()).unwrap();

        // alphas (1/2, 0, 0, 0): d^2z/dtau^2 = -(1/8 pi^2) wp_z(z, tau).
        let half = PainleveParams::from_alphas([r(0.5), r(0.0), r(0.0), r(0.0)]);
        let v = rhs_elliptic(&s, &half, &opts()).unwrap();
        let expected = -pz / (8.0 * PI * PI);
        assert!((v - expected).norm() <= 1e-14 * expected.norm());

        // alphas (2, 0, 0, 0): d^2z/dtau^2 = -(1/2 pi^2) wp_z(z, tau).
        let two = PainleveParams::from_alphas([r(2.0), r(0.0), r(0.0), r(0.0)]);
        let v2 = rhs_elliptic(&s, &two, &opts()).unwrap();
        let expected2 = -pz / (2.0 * PI * PI);
        assert!((v2 - expected2).norm() <= 1e-14 * expected2.norm());
    }

    #[test]
    fn generalized_form_recovers_the_half_period_sum() {
        let p = PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.3)]);
        let g = GeneralizedParams::from_standard(&p);
        let s = state(c(0.21, 0.09), r(0.1), c(0.15, 0.95));
        let a = rhs_elliptic(&s, &p, &opts()).unwrap();
        let b = rhs_elliptic_generalized(&s, &g, &opts()).unwrap();
        assert!((a - b).norm() < 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn rhs_elliptic_is_odd_in_z() {
        let p = PainleveParams::from_alphas([r(0.125), r(0.2), r(0.05), r(0.31)]);
        let s_plus = state(c(0.23, 0.11), r(0.0), c(0.1, 1.05));
        let s_minus = state(-s_plus.z, r(0.0), s_plus.tau);
        let a = rhs_elliptic(&s_plus, &p, &opts()).unwrap();
        let b = rhs_elliptic(&s_minus, &p, &opts()).unwrap();
        assert!((a + b).norm() < 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn rhs_elliptic_guards_poles() {
        let p = PainleveParams::from_alphas([r(0.5), r(0.0), r(0.0), r(0.0)]);
        let s = state(c(1e-12, 0.0), r(0.0), c(0.0, 1.0));
        match rhs_elliptic(&s, &p, &opts()) {
            Err(Error::PoleHit { .. }) => {}
            other => panic!("expected PoleHit, got {other:?}"),
        }
        // The same point is harmless when its coefficient vanishes.
        let quiet = PainleveParams::from_alphas([r(0.0), r(0.5), r(0.0), r(0.0)]);
        assert!(rhs_elliptic(&s, &quiet, &opts()).is_ok());
    }

    #[test]
    fn classical_rest_states_need_no_force_at_zero_parameters() {
        let s = ClassicalState {
            x: c(0.4, 0.2),
            x_dot: r(0.0),
            t: c(0.3, 0.1),
        };
        let zero = PainleveParams::from_classical([r(0.0); 4]);
        let v = rhs_classical(&s, &zero, &opts()).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        // Negative control: a delta perturbation switches the force on.
        let bumped = PainleveParams::from_classical([r(0.0), r(0.0), r(0.0), r(0.1)]);
        let w = rhs_classical(&s, &bumped, &opts()).unwrap();
        assert!(w.norm() > 1e-3);
    }

    #[test]
    fn algebraic_flow_freezes_the_divisor_family() {
        // classical (0,0,0,0) with U = 0: the X = const family.
        let s = AlgebraicState {
            u: r(0.0),
            x: c(0.4, 0.1),
            y: (c(0.4, 0.1) * (c(0.4, 0.1) - 1.0) * (c(0.4, 0.1) - c(0.3, 0.05))).sqrt(),
            t: c(0.3, 0.05),
        };
        let zero = PainleveParams::from_classical([r(0.0); 4]);
        let (dx, du, _) = rhs_algebraic(&s, &zero, &opts()).unwrap();
        assert_eq!(dx, c(0.0, 0.0));
        assert_eq!(du, c(0.0, 0.0));
    }

    #[test]
    fn hamiltonian_reduces_to_kinetic_term() {
        let s = state(c(0.3, 0.2), c(0.4, -0.1), c(0.0, 1.0));
        let h = hamiltonian(&s, &PainleveParams::zero(), &opts()).unwrap();
        assert_eq!(h, s.y * s.y * 0.5);
    }

    #[test]
    fn hamilton_equations_generate_the_flow() {
        let p = PainleveParams::from_alphas([r(0.125), r(0.125), r(0.0), r(0.0)]);
        let s = state(c(0.29, 0.17), c(0.21, 0.05), c(0.1, 1.15));
        // dH/dy = y exactly (quadratic kinetic term).
        let h0 = hamiltonian(&s, &p, &opts()).unwrap();
        let dy = 1e-6;
        let s_plus = state(s.z, s.y + dy, s.tau);
        let s_minus = state(s.z, s.y - dy, s.tau);
        let dh_dy = (hamiltonian(&s_plus, &p, &opts()).unwrap()
            - hamiltonian(&s_minus, &p, &opts()).unwrap())
            / (2.0 * dy);
        assert!((dh_dy - s.y).norm() < 1e-9);
        let _ = h0;
        // -dH/dz matches the right-hand side by central difference.
        let dz = 1e-6;
        let z_plus = state(s.z + dz, s.y, s.tau);
        let z_minus = state(s.z - dz, s.y, s.tau);
        let dh_dz = (hamiltonian(&z_plus, &p, &opts()).unwrap()
            - hamiltonian(&z_minus, &p, &opts()).unwrap())
            / (2.0 * dz);
        let rhs = rhs_elliptic(&s, &p, &opts()).unwrap();
        assert!((-dh_dz - rhs).norm() < 1e-7, "-dH/dz {}, rhs {}", -dh_dz, rhs);
    }
}
