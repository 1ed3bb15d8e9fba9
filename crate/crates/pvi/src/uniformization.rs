//! The covering map between the torus picture (z, tau) and the Legendre
//! pencil Y^2 = X(X - 1)(X - t):
//!
//! ```text
//! X = (wp(z) - e1) / (e2 - e1),
//! Y = wp_z(z) / (2 (e2 - e1)^(3/2)),
//! t = (e3 - e1) / (e2 - e1),
//! ```
//!
//! together with numerical inverses in both the fiber (z from a curve point)
//! and the base (tau from t), and the square-root branch bookkeeping that a
//! single-valued Y requires.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{
    half_period_values, lattice_distance, lattice_reduce, wp_pair, EvalOptions, ModularParameter,
    MIN_IM_TAU,
};
use crate::error::{Error, Result};

/// A point on the affine curve Y^2 = X(X - 1)(X - t) over the base point t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: Complex64,
    pub y: Complex64,
    pub t: Complex64,
}

impl CurvePoint {
    /// |Y^2 - X(X-1)(X-t)|, the on-curve residual.
    pub fn curve_residual(&self) -> f64 {
        (self.y * self.y - self.x * (self.x - 1.0) * (self.x - self.t)).norm()
    }

    pub fn validate(&self, tolerance: f64) -> Result<()> {
        let r = self.curve_residual();
        if r > tolerance {
            return Err(Error::InvalidInput(format!(
                "point is off the curve: residual {r:e} exceeds {tolerance:e}"
            )));
        }
        Ok(())
    }
}

/// A chosen value of (e2 - e1)^(1/2) at some tau, continued along declared
/// paths by nearest-value selection. Value-semantic: continuation returns a
/// new choice, it never mutates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchChoice {
    pub sqrt_e21: Complex64,
}

impl BranchChoice {
    /// The principal square root of e2(tau) - e1(tau).
    pub fn principal(tau: ModularParameter, opts: &EvalOptions) -> Result<Self> {
        let (e1, e2, _) = half_period_values(tau, opts)?;
        Ok(BranchChoice {
            sqrt_e21: (e2 - e1).sqrt(),
        })
    }

    /// Continue the branch to a nearby tau, picking whichever square root is
    /// closer to the current value. Rejects a continuation that would pass
    /// through the zero locus of e2 - e1.
    pub fn continue_to(&self, tau: ModularParameter, opts: &EvalOptions) -> Result<Self> {
        let (e1, e2, _) = half_period_values(tau, opts)?;
        let d = e2 - e1;
        if d.norm() < 1e3 * opts.pole_guard {
            return Err(Error::InvalidInput(
                "branch continuation crosses the zero locus of e2 - e1".into(),
            ));
        }
        let s = d.sqrt();
        let pick = if (s - self.sqrt_e21).norm() <= (s + self.sqrt_e21).norm() {
            s
        } else {
            -s
        };
        Ok(BranchChoice { sqrt_e21: pick })
    }

    /// Consistency check against a given tau.
    pub fn check(&self, tau: ModularParameter, opts: &EvalOptions) -> Result<()> {
        let (e1, e2, _) = half_period_values(tau, opts)?;
        let mismatch = (self.sqrt_e21 * self.sqrt_e21 - (e2 - e1)).norm();
        if mismatch > 1e-6 * (e2 - e1).norm().max(1.0) {
            return Err(Error::InconsistentContext(format!(
                "branch value squared misses e2 - e1 by {mismatch:e}"
            )));
        }
        Ok(())
    }

    pub fn flipped(&self) -> Self {
        BranchChoice {
            sqrt_e21: -self.sqrt_e21,
        }
    }

    /// (e2 - e1)^(3/2) on this branch, i.e. the cube of the chosen root.
    pub fn pow_3_2(&self) -> Complex64 {
        self.sqrt_e21 * self.sqrt_e21 * self.sqrt_e21
    }
}

/// The covering map: (z, tau) to a point of the Legendre pencil. z on the
/// lattice maps to the section at infinity and is rejected.
pub fn phi(
    z: Complex64,
    tau: ModularParameter,
    branch: &BranchChoice,
    opts: &EvalOptions,
) -> Result<CurvePoint> {
    let red = lattice_reduce(z, tau);
    if lattice_distance(red.z_reduced, tau) < opts.pole_guard {
        return Err(Error::PointAtInfinity { z });
    }
    let (e1, e2, e3) = half_period_values(tau, opts)?;
    let (p, pz) = wp_pair(z, tau, opts)?;
    let d = e2 - e1;
    Ok(CurvePoint {
        x: (p - e1) / d,
        y: pz / (2.0 * branch.pow_3_2()),
        t: (e3 - e1) / d,
    })
}

/// The base component of the covering map: t(tau) = (e3 - e1)/(e2 - e1).
pub fn modular_lambda(tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    let (e1, e2, e3) = half_period_values(tau, opts)?;
    Ok((e3 - e1) / (e2 - e1))
}

/// Numerical inverse of `modular_lambda` by damped Newton iteration from a
/// caller-supplied seed. No fundamental-domain reduction is attempted; a bad
/// seed simply fails with `NoConvergence`.
pub fn invert_lambda(
    t: Complex64,
    tau_seed: ModularParameter,
    opts: &EvalOptions,
) -> Result<ModularParameter> {
    if (t - 1.0).norm() < 1e-12 || t.norm() < 1e-12 {
        return Err(Error::InvalidInput(format!(
            "t = {t} is an excluded base point of the pencil"
        )));
    }
    let target = opts.tolerance.max(1e-14);
    let mut tau = tau_seed.get();
    let eval = |tau: Complex64| -> Result<Complex64> {
        Ok(modular_lambda(ModularParameter::new(tau)?, opts)? - t)
    };
    let mut f = eval(tau)?;
    for iteration in 0..60 {
        if f.norm() <= target {
            return ModularParameter::new(tau);
        }
        let h = 1e-5 * tau.im.max(0.2);
        let fp = eval(tau + h)?;
        let fm = eval(tau - h)?;
        let derivative = (fp - fm) / (2.0 * h);
        if derivative.norm() < 1e-14 {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: f.norm(),
            });
        }
        let mut step = -f / derivative;
        // Damp: halve the step until the residual decreases and tau stays
        // inside the admissible strip.
        let mut accepted = false;
        for _ in 0..12 {
            let candidate = tau + step;
            if candidate.im >= MIN_IM_TAU {
                if let Ok(fc) = eval(candidate) {
                    if fc.norm() < f.norm() {
                        tau = candidate;
                        f = fc;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: f.norm(),
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: 60,
        residual: f.norm(),
    })
}

/// `invert_lambda` over a small set of default seeds, for internal callers
/// that have no natural seed of their own.
pub fn invert_lambda_seeded(t: Complex64, opts: &EvalOptions) -> Result<ModularParameter> {
    let seeds = [
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 0.75),
        Complex64::new(0.0, 1.4),
        Complex64::new(0.5, 1.0),
        Complex64::new(-0.5, 1.0),
        Complex64::new(0.0, 0.45),
        Complex64::new(0.3, 0.7),
        Complex64::new(-0.3, 0.7),
    ];
    let mut last = Error::NoConvergence {
        iterations: 0,
        residual: f64::INFINITY,
    };
    for seed in seeds {
        match invert_lambda(t, ModularParameter::new(seed)?, opts) {
            Ok(tau) => return Ok(tau),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Invert the fiber component: find z with phi(z, tau) = p, seeded Newton on
/// wp(z) = e1 + X (e2 - e1). Of the two preimages +-z mod the lattice, the
/// one matching the sign of Y through wp_z is returned; exact branch points
/// (Y = 0) return the representative of the closed fundamental cell.
pub fn z_from_point(
    p: &CurvePoint,
    tau: ModularParameter,
    branch: &BranchChoice,
    z_seed: Complex64,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let lambda = modular_lambda(tau, opts)?;
    let mismatch = (lambda - p.t).norm();
    if mismatch > 1e-6 {
        return Err(Error::InconsistentTau { mismatch });
    }
    if p.y.norm() <= 1e-8 {
        // Branch point: wp has a critical point there, so Newton would stall
        // at square-root accuracy. The three ramification values X = 0, 1, t
        // are the half periods themselves (closed-cell representatives).
        if p.x.norm() < 1e-6 {
            return Ok(Complex64::new(0.5, 0.0));
        }
        if (p.x - 1.0).norm() < 1e-6 {
            return Ok(tau.get() * 0.5);
        }
        if (p.x - lambda).norm() < 1e-6 {
            return Ok((tau.get() + 1.0) * 0.5);
        }
    }
    let (e1, e2, _) = half_period_values(tau, opts)?;
    let target = e1 + p.x * (e2 - e1);
    let mut z = z_seed;
    let tol = opts.tolerance.max(1e-13);
    let scale = (e2 - e1).norm().max(1.0);
    let mut converged = false;
    for _ in 0..80 {
        let (w, wz) = wp_pair(z, tau, opts)?;
        let f = w - target;
        if f.norm() <= tol * scale {
            converged = true;
            break;
        }
        if wz.norm() < 1e-12 {
            // At a critical point of wp; nudge off it.
            z += Complex64::new(1e-4, 2e-4);
            continue;
        }
        let mut step = -f / wz;
        // Keep steps below half a cell to avoid jumping across poles.
        let cap = 0.4 * tau.im().min(1.0);
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z += step;
    }
    if !converged {
        let (w, _) = wp_pair(z, tau, opts)?;
        return Err(Error::NoConvergence {
            iterations: 80,
            residual: (w - target).norm(),
        });
    }
    let mut z = lattice_reduce(z, tau).z_reduced;
    // Pick the preimage whose Y sign matches.
    let (_, wz) = wp_pair(z, tau, opts)?;
    let y_here = wz / (2.0 * branch.pow_3_2());
    if p.y.norm() > 1e-9 {
        if (y_here - p.y).norm() > (y_here + p.y).norm() {
            z = lattice_reduce(-z, tau).z_reduced;
        }
    } else {
        // Branch point: canonical representative in the closed cell.
        if z.im < 0.0 || (z.im.abs() < 1e-14 && z.re < 0.0) {
            z = lattice_reduce(-z, tau).z_reduced;
        }
    }
    Ok(z)
}

/// Residual of the differential pullback identity
/// (dX/dz) / Y - 2 (e2 - e1)^(1/2), with dX/dz = wp_z / (e2 - e1).
pub fn pullback_residual(
    z: Complex64,
    tau: ModularParameter,
    branch: &BranchChoice,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let (e1, e2, _) = half_period_values(tau, opts)?;
    let (_, pz) = wp_pair(z, tau, opts)?;
    if pz.norm() < opts.pole_guard {
        return Err(Error::InvalidInput(
            "pullback residual is indeterminate at a half period".into(),
        ));
    }
    let y = pz / (2.0 * branch.pow_3_2());
    let dxdz = pz / (e2 - e1);
    Ok(dxdz / y - 2.0 * branch.sqrt_e21)
}

/// The period pair of dX/Y on this branch: (2 (e2-e1)^(1/2), 2 tau (e2-e1)^(1/2)).
pub fn periods(tau: ModularParameter, branch: &BranchChoice) -> (Complex64, Complex64) {
    let p1 = 2.0 * branch.sqrt_e21;
    (p1, tau.get() * p1)
}

/// The Abelian integral from the section at infinity to a curve point,
/// modulo the period lattice; the representative uses the lattice-reduced
/// preimage z, so the value is 2 (e2 - e1)^(1/2) z.
pub fn abelian_integral(
    p: &CurvePoint,
    tau: ModularParameter,
    branch: &BranchChoice,
    opts: &EvalOptions,
) -> Result<Complex64> {
    p.validate(1e-8)?;
    let z = z_from_point(p, tau, branch, grid_seed(p, tau, opts)?, opts)?;
    Ok(2.0 * branch.sqrt_e21 * z)
}

/// A coarse grid search for a Newton seed when the caller has none: minimizes
/// |wp(z) - target| over the fundamental cell.
fn grid_seed(p: &CurvePoint, tau: ModularParameter, opts: &EvalOptions) -> Result<Complex64> {
    let (e1, e2, _) = half_period_values(tau, opts)?;
    let target = e1 + p.x * (e2 - e1);
    let mut best = Complex64::new(0.25, 0.0);
    let mut best_miss = f64::INFINITY;
    let coarse = EvalOptions {
        tolerance: 1e-6,
        ..*opts
    };
    for i in 0..14 {
        for j in 0..14 {
            let s = -0.5 + (i as f64 + 0.5) / 14.0;
            let u = -0.5 + (j as f64 + 0.5) / 14.0;
            let z = s + u * tau.get();
            if lattice_distance(z, tau) < 0.05 {
                continue;
            }
            if let Ok(w) = crate::elliptic::wp(z, tau, &coarse) {
                let miss = (w - target).norm();
                if miss < best_miss {
                    best_miss = miss;
                    best = z;
                }
            }
        }
    }
    Ok(best)
}
