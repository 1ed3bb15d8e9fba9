//! The Picard-Fuchs operator
//!
//! ```text
//! L_t = t(1-t) d^2/dt^2 + (1-2t) d/dt - 1/4,
//! ```
//!
//! the period pair of dX/Y on the Legendre pencil, and the residual of the
//! master identity connecting the operator to the equation: applied to the
//! Abelian integral of a solution, t(1-t) L_t must reproduce the algebraic
//! right-hand side
//!
//! ```text
//! alpha Y + beta t Y/X^2 + gamma (t-1) Y/(X-1)^2 + (delta - 1/2) t(t-1) Y/(X-t)^2.
//! ```
//!
//! All differentiation is by finite-difference stencils on sampled values,
//! never symbolic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{PainleveParams, Trajectory};
use crate::elliptic::{EvalOptions, ModularParameter};
use crate::error::{Error, Result};
use crate::numeric::{apply_weights, fd_weights, reduce_mod_lattice, solve2};
use crate::uniformization::{
    invert_lambda, invert_lambda_seeded, periods, z_from_point, BranchChoice, CurvePoint,
};

/// Samples of a scalar function along a declared path in the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    points: Vec<(Complex64, Complex64)>,
}

impl SampledFunction {
    pub fn new(points: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if points.len() < 5 {
            return Err(Error::InsufficientSamples {
                available: points.len(),
                needed: 5,
            });
        }
        for (i, (t, _)) in points.iter().enumerate() {
            for (s, _) in points.iter().skip(i + 1) {
                if (t - s).norm() < 1e-14 {
                    return Err(Error::InvalidInput(
                        "sampled function has coincident base points".into(),
                    ));
                }
            }
        }
        Ok(SampledFunction { points })
    }

    /// Sample a closure on a uniform stencil grid centered at `center`.
    pub fn from_closure<F>(
        center: Complex64,
        step: Complex64,
        half_width: usize,
        mut f: F,
    ) -> Result<Self>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let mut points = Vec::with_capacity(2 * half_width + 1);
        for k in -(half_width as i64)..=(half_width as i64) {
            let t = center + step * (k as f64);
            points.push((t, f(t)?));
        }
        SampledFunction::new(points)
    }

    pub fn points(&self) -> &[(Complex64, Complex64)] {
        &self.points
    }

    fn nearest_index(&self, at: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, (t, _)) in self.points.iter().enumerate() {
            let d = (t - at).norm();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// A centered window of `width` samples around the sample nearest `at`.
    fn window(&self, at: Complex64, width: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let n = self.points.len();
        if n < width {
            return Err(Error::InsufficientSamples {
                available: n,
                needed: width,
            });
        }
        let center = self.nearest_index(at);
        let half = width / 2;
        let lo = center.saturating_sub(half).min(n - width);
        let nodes = self.points[lo..lo + width].iter().map(|p| p.0).collect();
        let values = self.points[lo..lo + width].iter().map(|p| p.1).collect();
        Ok((nodes, values))
    }
}

/// First and second derivatives of a sampled function at `at`, by five-point
/// stencils on the (possibly non-uniform, complex) nodes.
pub fn differentiate(f: &SampledFunction, at: Complex64) -> Result<(Complex64, Complex64)> {
    let (nodes, values) = f.window(at, 5)?;
    let w = fd_weights(&nodes, at, 2);
    Ok((apply_weights(&w[1], &values), apply_weights(&w[2], &values)))
}

/// Value of the sampled function at `at` (interpolated through the stencil's
/// zeroth-derivative weights; exact at a sample point).
pub fn interpolate(f: &SampledFunction, at: Complex64) -> Result<Complex64> {
    let (nodes, values) = f.window(at, 5)?;
    let w = fd_weights(&nodes, at, 0);
    Ok(apply_weights(&w[0], &values))
}

/// Apply L_t to a sampled function at an interior point.
pub fn apply_lt(f: &SampledFunction, at: Complex64) -> Result<Complex64> {
    let value = interpolate(f, at)?;
    let (d1, d2) = differentiate(f, at)?;
    Ok(at * (1.0 - at) * d2 + (1.0 - 2.0 * at) * d1 - value / 4.0)
}

/// The two periods of dX/Y over the base point t, recovered through the
/// uniformization: Pi_1 = 2 (e2 - e1)^(1/2) and Pi_2 = tau Pi_1 at
/// tau = lambda^{-1}(t).
pub fn period_functions(
    t: Complex64,
    tau_seed: ModularParameter,
    opts: &EvalOptions,
) -> Result<(Complex64, Complex64)> {
    let tau = invert_lambda(t, tau_seed, opts)?;
    let branch = BranchChoice::principal(tau, opts)?;
    Ok(periods(tau, &branch))
}

/// Periods sampled on a stencil grid with branch and tau continued from the
/// center outward, so the samples are values of single analytic functions.
pub fn period_samples(
    center: Complex64,
    step: Complex64,
    half_width: usize,
    tau_seed: ModularParameter,
    opts: &EvalOptions,
) -> Result<(SampledFunction, SampledFunction)> {
    let tau0 = invert_lambda(center, tau_seed, opts)?;
    let branch0 = BranchChoice::principal(tau0, opts)?;
    let width = 2 * half_width as i64 + 1;
    let mut pi1 = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); width as usize];
    let mut pi2 = pi1.clone();
    // Walk from the center to each side, continuing tau and the branch.
    for direction in [-1i64, 1] {
        let mut tau = tau0;
        let mut branch = branch0;
        let mut k = 0i64;
        loop {
            let idx = (half_width as i64 + k) as usize;
            let t = center + step * (k as f64);
            if k != 0 {
                tau = invert_lambda(t, tau, opts)?;
                branch = branch.continue_to(tau, opts)?;
            }
            let (p1, p2) = periods(tau, &branch);
            pi1[idx] = (t, p1);
            pi2[idx] = (t, p2);
            k += direction;
            if k.abs() > half_width as i64 {
                break;
            }
        }
    }
    Ok((SampledFunction::new(pi1)?, SampledFunction::new(pi2)?))
}

/// The Abelian integral of a classical-chart trajectory as a sampled
/// function of t, with the curve lift, the uniformizing tau, and the
/// square-root branch all continued along the samples, and the result
/// unwrapped across period-lattice jumps.
pub fn abelian_trace(
    solution: &Trajectory,
    opts: &EvalOptions,
) -> Result<(SampledFunction, Vec<CurvePoint>)> {
    let samples = &solution.samples;
    if samples.len() < 5 {
        return Err(Error::InsufficientSamples {
            available: samples.len(),
            needed: 5,
        });
    }
    let mut trace = Vec::with_capacity(samples.len());
    let mut lifts = Vec::with_capacity(samples.len());
    let mut tau = None;
    let mut branch: Option<BranchChoice> = None;
    let mut y_prev: Option<Complex64> = None;
    let mut z_prev: Option<Complex64> = None;
    for (index, s) in samples.iter().enumerate() {
        let st = s.point.as_classical()?;
        let t = st.t;
        let tau_k = match tau {
            None => invert_lambda_seeded(t, opts)?,
            Some(prev) => invert_lambda(t, prev, opts)?,
        };
        let branch_k = match &branch {
            None => BranchChoice::principal(tau_k, opts)?,
            Some(b) => b.continue_to(tau_k, opts)?,
        };
        // Continue the curve lift Y by nearest value.
        let mut y = (st.x * (st.x - 1.0) * (st.x - t)).sqrt();
        if let Some(prev) = y_prev {
            if (y - prev).norm() > (y + prev).norm() {
                y = -y;
            }
        }
        let p = CurvePoint { x: st.x, y, t };
        let seed = z_prev.unwrap_or_else(|| Complex64::new(0.3, 0.1 * tau_k.im()));
        let mut z = z_from_point(&p, tau_k, &branch_k, seed, opts)?;
        // Unwrap: land on the representative nearest the previous sample.
        if let Some(prev) = z_prev {
            let (reduced, _, _) =
                reduce_mod_lattice(z - prev, Complex64::new(1.0, 0.0), tau_k.get());
            z = prev + reduced;
            let cell = tau_k.im().min(1.0);
            if (z - prev).norm() > 0.45 * cell {
                return Err(Error::BranchJump { index });
            }
        }
        trace.push((t, 2.0 * branch_k.sqrt_e21 * z));
        lifts.push(p);
        tau = Some(tau_k);
        branch = Some(branch_k);
        y_prev = Some(y);
        z_prev = Some(z);
    }
    Ok((SampledFunction::new(trace)?, lifts))
}

/// Residual of the master identity at the sample nearest `at`:
/// t(1-t) L_t applied to the Abelian integral of the solution, minus the
/// algebraic right-hand side evaluated at the lifted curve point.
pub fn mu_residual(
    solution: &Trajectory,
    params: &PainleveParams,
    at: Complex64,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let (trace, lifts) = abelian_trace(solution, opts)?;
    let idx = trace.nearest_index(at);
    let (t, _) = trace.points()[idx];
    let lhs = t * (1.0 - t) * apply_lt(&trace, t)?;
    let p = &lifts[idx];
    let [alpha, beta, gamma, delta] = params.classical;
    let rhs = alpha * p.y
        + beta * t * p.y / (p.x * p.x)
        + gamma * (t - 1.0) * p.y / ((p.x - 1.0) * (p.x - 1.0))
        + (delta - 0.5) * t * (t - 1.0) * p.y / ((p.x - t) * (p.x - t));
    Ok(lhs - rhs)
}

/// Covariance check of the invariant bilinear expression: rescaling the
/// vertical form by g(t) and the operator symbol by f(t), then rebuilding
/// the annihilating operator from the scaled periods and applying it to the
/// scaled integral, must multiply the value by exactly f g.
///
/// Returns the discrepancy after unwinding that factor.
pub fn mu_invariant<F, G>(
    solution: &Trajectory,
    sigma_scale: F,
    omega_scale: G,
    at: Complex64,
    opts: &EvalOptions,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    let (trace, _) = abelian_trace(solution, opts)?;
    let idx = trace.nearest_index(at);
    let (t0, _) = trace.points()[idx];

    // Base value with the analytic operator.
    let base = apply_lt(&trace, t0)?;

    // Period samples on the same nodes as the trajectory window.
    let (nodes, a_values) = trace.window(t0, 5)?;
    let tau_seed = invert_lambda_seeded(nodes[0], opts)?;
    let mut pi1 = Vec::with_capacity(nodes.len());
    let mut pi2 = Vec::with_capacity(nodes.len());
    let mut tau = tau_seed;
    let mut branch = BranchChoice::principal(tau, opts)?;
    for (k, t) in nodes.iter().enumerate() {
        if k > 0 {
            tau = invert_lambda(*t, tau, opts)?;
            branch = branch.continue_to(tau, opts)?;
        }
        let (p1, p2) = periods(tau, &branch);
        pi1.push((*t, omega_scale(*t) * p1));
        pi2.push((*t, omega_scale(*t) * p2));
    }
    let pi1 = SampledFunction::new(pi1)?;
    let pi2 = SampledFunction::new(pi2)?;

    // Leading coefficient of the scaled operator: f(t) t(1-t).
    let a_lead = sigma_scale(t0) * t0 * (1.0 - t0);

    // Lower coefficients from annihilation of both scaled periods.
    let (p1d1, p1d2) = differentiate(&pi1, t0)?;
    let (p2d1, p2d2) = differentiate(&pi2, t0)?;
    let p1v = interpolate(&pi1, t0)?;
    let p2v = interpolate(&pi2, t0)?;
    let coeffs = solve2(
        [[p1d1, p1v], [p2d1, p2v]],
        [-a_lead * p1d2, -a_lead * p2d2],
    )?;

    // Apply the rebuilt operator to the scaled integral.
    let scaled: Vec<(Complex64, Complex64)> = nodes
        .iter()
        .zip(&a_values)
        .map(|(t, a)| (*t, omega_scale(*t) * a))
        .collect();
    let scaled = SampledFunction::new(scaled)?;
    let sv = interpolate(&scaled, t0)?;
    let (sd1, sd2) = differentiate(&scaled, t0)?;
    let rebuilt = a_lead * sd2 + coeffs[0] * sd1 + coeffs[1] * sv;

    Ok(rebuilt - sigma_scale(t0) * omega_scale(t0) * base)
}
