//! Weierstrass and theta functions on the family of tori C/(Z + Z tau).
//!
//! Everything is evaluated from the single theta series
//!
//! ```text
//! theta(z, tau) = sum_{n in Z} exp(pi i n^2 tau + 2 pi i n z)
//! ```
//!
//! with nome q = exp(pi i tau). The Weierstrass function and its z-derivative
//! come from logarithmic derivatives of theta shifted by the half period
//! (1 + tau)/2:
//!
//! ```text
//! wp(z)   = -d^2/dz^2 log theta(z + (1+tau)/2) + 8 pi^2 G2(tau)
//! wp_z(z) = -d^3/dz^3 log theta(z + (1+tau)/2)
//! ```
//!
//! The additive constant is fixed by matching the 1/z^2 Laurent behaviour of
//! wp at the origin; expanding the theta product form shows it equals
//! 8 pi^2 G2(tau) with the normalization G2 = -1/24 + sum sigma_1(n) q^{2n}.
//! The slow but unimpeachable lattice sums live in the test suite as
//! independent oracles for all of this.
//!
//! Arguments are lattice-reduced before any series is summed, and the
//! quasi-periodicity factor exp(-pi i m^2 tau - 2 pi i m z) is reapplied
//! afterwards, so evaluation is uniformly accurate over the whole plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const PI: f64 = std::f64::consts::PI;

/// 2 pi i, the recurring normalization of the whole theory.
pub fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// Smallest imaginary part of tau the series evaluators accept.
///
/// Below this the nome is too close to the unit circle for double-precision
/// truncation control; no fundamental-domain reduction is attempted.
pub const MIN_IM_TAU: f64 = 0.05;

/// The modular parameter tau with Im(tau) > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularParameter(Complex64);

impl ModularParameter {
    pub fn new(tau: Complex64) -> Result<Self> {
        // The negated comparison also rejects NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(tau.im > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidInput(format!(
                "tau = {tau} must have strictly positive imaginary part"
            )));
        }
        Ok(ModularParameter(tau))
    }

    pub fn get(self) -> Complex64 {
        self.0
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    fn check_series_range(self) -> Result<()> {
        if self.0.im < MIN_IM_TAU {
            return Err(Error::NonConvergent { terms: 0 });
        }
        Ok(())
    }
}

impl From<ModularParameter> for Complex64 {
    fn from(tau: ModularParameter) -> Complex64 {
        tau.0
    }
}

/// Accuracy controls shared by every special-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Target absolute error of the returned value.
    pub tolerance: f64,
    /// Hard cap on series terms before a `NonConvergent` error.
    pub max_terms: usize,
    /// Distance (in lattice-reduced coordinates) below which an argument
    /// counts as sitting on a pole or zero divisor.
    pub pole_guard: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tolerance: 1e-10,
            max_terms: 4096,
            pole_guard: 1e-8,
        }
    }
}

impl EvalOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        EvalOptions {
            tolerance,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        // The negated comparison also rejects NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidInput("max_terms must be at least 1".into()));
        }
        Ok(())
    }

    /// Internal truncation threshold: a safety factor below the public target.
    fn series_cutoff(&self) -> f64 {
        self.tolerance * 1e-2
    }
}

/// Index j of the half period T_j / 2 with (T_0, ..., T_3) = (0, 1, tau, 1 + tau).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfPeriodIndex(u8);

impl HalfPeriodIndex {
    pub fn new(j: u8) -> Result<Self> {
        if j > 3 {
            return Err(Error::InvalidInput(format!(
                "half-period index must be in 0..=3, got {j}"
            )));
        }
        Ok(HalfPeriodIndex(j))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn all() -> [HalfPeriodIndex; 4] {
        [
            HalfPeriodIndex(0),
            HalfPeriodIndex(1),
            HalfPeriodIndex(2),
            HalfPeriodIndex(3),
        ]
    }

    /// The period T_j itself.
    pub fn period(self, tau: ModularParameter) -> Complex64 {
        let t = tau.get();
        match self.0 {
            0 => Complex64::new(0.0, 0.0),
            1 => Complex64::new(1.0, 0.0),
            2 => t,
            _ => t + 1.0,
        }
    }

    /// The half period T_j / 2.
    pub fn half_period(self, tau: ModularParameter) -> Complex64 {
        self.period(tau) * 0.5
    }

    /// d/dtau of T_j / 2, constant in tau: (0, 0, 1/2, 1/2).
    pub fn half_period_tau_derivative(self) -> Complex64 {
        match self.0 {
            0 | 1 => Complex64::new(0.0, 0.0),
            _ => Complex64::new(0.5, 0.0),
        }
    }

    /// Lattice label (m, n) of T_j = m tau + n, used for the Klein four-group
    /// arithmetic of half-period addition.
    pub fn lattice_label(self) -> (i64, i64) {
        match self.0 {
            0 => (0, 0),
            1 => (0, 1),
            2 => (1, 0),
            _ => (1, 1),
        }
    }

    /// The index of T_i/2 + T_j/2 modulo the lattice (XOR of the labels).
    pub fn add(self, other: HalfPeriodIndex) -> HalfPeriodIndex {
        HalfPeriodIndex(self.0 ^ other.0)
    }
}

/// A point reduced to the fundamental cell {s + u tau : s, u in [-1/2, 1/2)},
/// together with the integer shifts taken out: z = z_reduced + m tau + n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeReducedPoint {
    pub z_reduced: Complex64,
    pub shift_m: i64,
    pub shift_n: i64,
}

/// Reduce z modulo the lattice Z + Z tau into the fundamental cell.
pub fn lattice_reduce(z: Complex64, tau: ModularParameter) -> LatticeReducedPoint {
    let t = tau.get();
    let u = z.im / t.im;
    let s = z.re - u * t.re;
    let m = (u + 0.5).floor();
    let n = (s + 0.5).floor();
    LatticeReducedPoint {
        z_reduced: z - m * t - n,
        shift_m: m as i64,
        shift_n: n as i64,
    }
}

/// Distance from a (reduced) point to the nearest lattice point.
pub fn lattice_distance(z_reduced: Complex64, tau: ModularParameter) -> f64 {
    let t = tau.get();
    let mut best = f64::INFINITY;
    for a in -1..=1 {
        for b in -1..=1 {
            let d = (z_reduced - (a as f64) * t - (b as f64)).norm();
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Theta and its term-wise derivatives, evaluated at one point.
#[derive(Debug, Clone, Copy)]
pub struct ThetaDerivatives {
    pub theta: Complex64,
    pub theta_z: Complex64,
    pub theta_zz: Complex64,
    pub theta_zzz: Complex64,
    pub theta_tau: Complex64,
}

/// Raw series evaluation at a point that must already be lattice-reduced.
fn theta_series(z: Complex64, tau: ModularParameter, opts: &EvalOptions) -> Result<ThetaDerivatives> {
    tau.check_series_range()?;
    let t = tau.get();
    let cutoff = opts.series_cutoff();

    // n = 0 term.
    let mut th = Complex64::new(1.0, 0.0);
    let mut dz = Complex64::new(0.0, 0.0);
    let mut dzz = Complex64::new(0.0, 0.0);
    let mut dzzz = Complex64::new(0.0, 0.0);
    let mut dtau = Complex64::new(0.0, 0.0);

    let mut small_runs = 0usize;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        let phase = I * PI * (nf * nf) * t;
        let plus = (phase + two_pi_i() * nf * z).exp();
        let minus = (phase - two_pi_i() * nf * z).exp();
        let k = two_pi_i() * nf; // 2 pi i n

        let even = plus + minus;
        let odd = plus - minus;
        th += even;
        dz += k * odd;
        dzz += k * k * even;
        dzzz += k * k * k * odd;
        dtau += I * PI * (nf * nf) * even;

        // Conservative pair bound covering the worst derivative weight.
        let weight = 1.0 + k.norm().powi(3);
        let bound = weight * (plus.norm() + minus.norm());
        if bound < cutoff {
            small_runs += 1;
            if small_runs >= 2 && n >= 4 {
                break;
            }
        } else {
            small_runs = 0;
        }
        n += 1;
        if n > opts.max_terms {
            return Err(Error::NonConvergent { terms: n });
        }
    }

    Ok(ThetaDerivatives {
        theta: th,
        theta_z: dz,
        theta_zz: dzz,
        theta_zzz: dzzz,
        theta_tau: dtau,
    })
}

/// theta(z, tau) = sum_n exp(pi i n^2 tau + 2 pi i n z), for arbitrary z.
///
/// The argument is lattice-reduced first and the quasi-periodicity factor
/// exp(-pi i m^2 tau - 2 pi i m z_red) is reapplied, so the value agrees with
/// the defining series everywhere while the truncation stays controlled.
pub fn theta(z: Complex64, tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    opts.validate()?;
    let red = lattice_reduce(z, tau);
    let raw = theta_series(red.z_reduced, tau, opts)?;
    Ok(quasi_periodic_factor(&red, tau) * raw.theta)
}

fn quasi_periodic_factor(red: &LatticeReducedPoint, tau: ModularParameter) -> Complex64 {
    let m = red.shift_m as f64;
    (-I * PI * m * m * tau.get() - two_pi_i() * m * red.z_reduced).exp()
}

/// theta together with theta_z, theta_zz, theta_zzz and theta_tau at the given
/// (unreduced) z, with all quasi-periodicity bookkeeping applied.
pub fn theta_with_derivatives(
    z: Complex64,
    tau: ModularParameter,
    opts: &EvalOptions,
) -> Result<ThetaDerivatives> {
    opts.validate()?;
    let red = lattice_reduce(z, tau);
    let raw = theta_series(red.z_reduced, tau, opts)?;
    let f = quasi_periodic_factor(&red, tau);
    let m = red.shift_m as f64;
    // Differentiating theta(z) = F(z_red, tau) * theta(z_red, tau) with
    // z = z_red + m tau + n: each d/dz brings down k = -2 pi i m from F,
    // and d/dtau at fixed z moves z_red by -m.
    let k = -two_pi_i() * m;
    let theta_z = f * (raw.theta_z + k * raw.theta);
    let theta_zz = f * (raw.theta_zz + 2.0 * k * raw.theta_z + k * k * raw.theta);
    let theta_zzz = f * (raw.theta_zzz
        + 3.0 * k * raw.theta_zz
        + 3.0 * k * k * raw.theta_z
        + k * k * k * raw.theta);
    let theta_tau = f * (raw.theta_tau - m * raw.theta_z + I * PI * m * m * raw.theta);
    Ok(ThetaDerivatives {
        theta: f * raw.theta,
        theta_z,
        theta_zz,
        theta_zzz,
        theta_tau,
    })
}

/// theta_z / theta. Errors within the pole guard of the zero divisor
/// z = (1 + tau)/2 mod (1, tau).
pub fn theta_log_derivative(
    z: Complex64,
    tau: ModularParameter,
    opts: &EvalOptions,
) -> Result<Complex64> {
    opts.validate()?;
    let shifted = lattice_reduce(z - (1.0 + tau.get()) * 0.5, tau);
    if lattice_distance(shifted.z_reduced, tau) < opts.pole_guard {
        return Err(Error::PoleAtThetaZero {
            z,
            guard: opts.pole_guard,
        });
    }
    let red = lattice_reduce(z, tau);
    let raw = theta_series(red.z_reduced, tau, opts)?;
    Ok(raw.theta_z / raw.theta - two_pi_i() * red.shift_m as f64)
}

/// v(z, tau) = -(1/2 pi i) theta_z / theta, the scaled logarithmic derivative
/// with residue -1/(2 pi i) at the theta zeroes and the covariance
/// v(z + m tau + n) = v(z) + m.
pub fn theta_v(z: Complex64, tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    Ok(-theta_log_derivative(z, tau, opts)? / two_pi_i())
}

/// Logarithmic z-derivatives of theta at a reduced point: returns
/// (d/dz log theta, d^2/dz^2 log theta, d^3/dz^3 log theta).
fn log_derivatives(raw: &ThetaDerivatives) -> (Complex64, Complex64, Complex64) {
    let l1 = raw.theta_z / raw.theta;
    let l2 = raw.theta_zz / raw.theta - l1 * l1;
    let l3 = raw.theta_zzz / raw.theta - 3.0 * (raw.theta_zz / raw.theta) * l1
        + 2.0 * l1 * l1 * l1;
    (l1, l2, l3)
}

fn wp_guard(z: Complex64, tau: ModularParameter, opts: &EvalOptions) -> Result<LatticeReducedPoint> {
    opts.validate()?;
    let red = lattice_reduce(z, tau);
    if lattice_distance(red.z_reduced, tau) < opts.pole_guard {
        return Err(Error::PoleAtLatticePoint {
            z,
            guard: opts.pole_guard,
        });
    }
    Ok(red)
}

/// The Weierstrass function wp(z, tau).
pub fn wp(z: Complex64, tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    Ok(wp_pair(z, tau, opts)?.0)
}

/// d/dz of the Weierstrass function.
pub fn wp_z(z: Complex64, tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    Ok(wp_pair(z, tau, opts)?.1)
}

/// (wp, wp_z) in a single series evaluation.
pub fn wp_pair(
    z: Complex64,
    tau: ModularParameter,
    opts: &EvalOptions,
) -> Result<(Complex64, Complex64)> {
    let red = wp_guard(z, tau, opts)?;
    // Shift by (1 + tau)/2 moves the lattice poles onto the theta zeroes.
    let w = lattice_reduce(red.z_reduced + (1.0 + tau.get()) * 0.5, tau);
    let raw = theta_series(w.z_reduced, tau, opts)?;
    let (_, l2, l3) = log_derivatives(&raw);
    let g2_scale = 8.0 * PI * PI;
    let g2_opts = EvalOptions {
        tolerance: (opts.tolerance / g2_scale).min(1e-13),
        ..*opts
    };
    let constant = g2_scale * eisenstein_g2(tau, &g2_opts)?;
    Ok((-l2 + constant, -l3))
}

/// The half-period values e_i(tau) = wp(T_i / 2, tau), i = 1, 2, 3.
pub fn half_period_values(
    tau: ModularParameter,
    opts: &EvalOptions,
) -> Result<(Complex64, Complex64, Complex64)> {
    let e1 = wp(HalfPeriodIndex(1).half_period(tau), tau, opts)?;
    let e2 = wp(HalfPeriodIndex(2).half_period(tau), tau, opts)?;
    let e3 = wp(HalfPeriodIndex(3).half_period(tau), tau, opts)?;
    Ok((e1, e2, e3))
}

/// G2(tau) = -1/24 + sum_{n >= 1} sigma_1(n) exp(2 pi i n tau).
pub fn eisenstein_g2(tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    opts.validate()?;
    tau.check_series_range()?;
    let q2 = (two_pi_i() * tau.get()).exp();
    let cutoff = opts.series_cutoff();
    let mut sum = Complex64::new(-1.0 / 24.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut n = 1usize;
    loop {
        power *= q2;
        let sigma = divisor_sum(n) as f64;
        sum += sigma * power;
        // sigma_1(n) <= n (1 + ln n) bounds every remaining coefficient of
        // the tail against the geometric decay of |q|^(2n).
        let tail_bound =
            (n as f64 + 1.0) * (1.0 + ((n + 1) as f64).ln()) * power.norm() * q2.norm()
                / (1.0 - q2.norm());
        if tail_bound < cutoff {
            break;
        }
        n += 1;
        if n > opts.max_terms {
            return Err(Error::NonConvergent { terms: n });
        }
    }
    Ok(sum)
}

/// The exact integer coefficient of exp(2 pi i n tau) in G2: the divisor sum
/// sigma_1(n).
pub fn g2_coefficient(n: u64) -> u64 {
    divisor_sum(n as usize) as u64
}

fn divisor_sum(n: usize) -> usize {
    let mut s = 0usize;
    let mut d = 1usize;
    while d * d <= n {
        if n % d == 0 {
            s += d;
            let q = n / d;
            if q != d {
                s += q;
            }
        }
        d += 1;
    }
    s
}

/// theta_tau - theta_zz / (4 pi i), both terms by term-wise differentiation of
/// the series. Vanishes identically (the heat equation); the returned value
/// measures truncation and rounding only.
pub fn heat_residual(z: Complex64, tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    let d = theta_with_derivatives(z, tau, opts)?;
    Ok(d.theta_tau - d.theta_zz / (2.0 * two_pi_i()))
}

/// Floor below which the finite-difference derivatives cannot honestly go.
const DERIVATIVE_TOLERANCE_FLOOR: f64 = 1e-10;

/// Total tau-derivatives (e1', e2', e3') of the half-period values, the
/// half-period argument moving with tau.
///
/// Computed by central differences with two levels of Richardson
/// extrapolation; the step is scaled to the requested tolerance. Requests
/// tighter than about 1e-10 are not reachable in double precision and return
/// `StepUnderflow`.
pub fn half_period_derivatives(
    tau: ModularParameter,
    opts: &EvalOptions,
) -> Result<(Complex64, Complex64, Complex64)> {
    opts.validate()?;
    if opts.tolerance < DERIVATIVE_TOLERANCE_FLOOR {
        return Err(Error::StepUnderflow {
            tolerance: opts.tolerance,
        });
    }
    // Error model: truncation ~ |e^(7)| h^6 / 5040 with |e^(7)| <~ 1e6,
    // rounding ~ eps |e| / h. The clamp keeps both comfortably under target.
    let h = (opts.tolerance * 5040.0 / 1e6).powf(1.0 / 6.0).clamp(2e-3, 2e-2);
    let series_opts = EvalOptions {
        tolerance: 1e-13,
        ..*opts
    };
    let eval = |shift: f64| -> Result<[Complex64; 3]> {
        let t = ModularParameter::new(tau.get() + shift)?;
        let (e1, e2, e3) = half_period_values(t, &series_opts)?;
        Ok([e1, e2, e3])
    };
    let central = |h: f64| -> Result<[Complex64; 3]> {
        let plus = eval(h)?;
        let minus = eval(-h)?;
        Ok([
            (plus[0] - minus[0]) / (2.0 * h),
            (plus[1] - minus[1]) / (2.0 * h),
            (plus[2] - minus[2]) / (2.0 * h),
        ])
    };
    let d1 = central(h)?;
    let d2 = central(h / 2.0)?;
    let d4 = central(h / 4.0)?;
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        let r1 = (4.0 * d2[i] - d1[i]) / 3.0;
        let r2 = (4.0 * d4[i] - d2[i]) / 3.0;
        out[i] = (16.0 * r2 - r1) / 15.0;
    }
    Ok((out[0], out[1], out[2]))
}

/// The modular constant
///
/// ```text
/// C(tau) = prod_{i > j} (e_i - e_j)^2 / (e1 e2' - e2 e1')^2
/// ```
///
/// which is independent of tau and equal to -9 pi^2. The derivative accuracy
/// saturates near 1e-9; tighter requested tolerances only tighten the series
/// evaluations underneath.
pub fn constant_c(tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    opts.validate()?;
    let series_opts = EvalOptions {
        tolerance: opts.tolerance.min(1e-12),
        ..*opts
    };
    let (e1, e2, e3) = half_period_values(tau, &series_opts)?;
    let deriv_opts = EvalOptions {
        tolerance: opts.tolerance.max(1e-9),
        ..*opts
    };
    let (e1p, e2p, _) = half_period_derivatives(tau, &deriv_opts)?;
    let num = ((e2 - e1) * (e3 - e1) * (e3 - e2)).powu(2);
    let den = (e1 * e2p - e2 * e1p).powu(2);
    Ok(num / den)
}
