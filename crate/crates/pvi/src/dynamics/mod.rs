//! Parameter bookkeeping, phase-space states in every chart, the equation
//! right-hand sides, adaptive complex-path integration, and chart-to-chart
//! state conversion.

mod convert;
mod integrate;
mod rhs;

pub use convert::{canonical_lift, check_context, convert_state, ConvertContext};
pub use integrate::{
    integrate, integrate_with_partial, Chart, ChartPoint, IntegratorConfig, ParamsUsed, PathSpec,
    Sample, Trajectory,
};
pub use rhs::{hamiltonian, rhs_algebraic, rhs_classical, rhs_elliptic, rhs_elliptic_generalized};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EvalOptions, ModularParameter};
use crate::error::{Error, Result};
use crate::numeric::{apply_weights, fd_weights};

/// Which of the three parameter coordinate systems a caller is speaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// (alpha, beta, gamma, delta) of the classical rational form.
    Classical,
    /// (alpha_0, ..., alpha_3) of the elliptic form.
    Alphas,
    /// (a_0, ..., a_3) with a_i^2 = 2 alpha_i.
    AVec,
}

/// One Painlevé parameter point, kept simultaneously in all three coordinate
/// systems:
///
/// ```text
/// (alpha_0, ..., alpha_3) = (alpha, -beta, gamma, 1/2 - delta),
/// a_i^2 = 2 alpha_i  (principal square roots unless given explicitly).
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PainleveParams {
    pub classical: [Complex64; 4],
    pub alphas: [Complex64; 4],
    pub avec: [Complex64; 4],
}

impl PainleveParams {
    pub fn from_classical(classical: [Complex64; 4]) -> Self {
        let [alpha, beta, gamma, delta] = classical;
        let alphas = [alpha, -beta, gamma, 0.5 - delta];
        PainleveParams {
            classical,
            alphas,
            avec: alphas.map(|a| (2.0 * a).sqrt()),
        }
    }

    pub fn from_alphas(alphas: [Complex64; 4]) -> Self {
        let [a0, a1, a2, a3] = alphas;
        PainleveParams {
            classical: [a0, -a1, a2, 0.5 - a3],
            alphas,
            avec: alphas.map(|a| (2.0 * a).sqrt()),
        }
    }

    /// Keeps the given square roots (their signs carry information; sign
    /// flips are a group action, not an ambiguity).
    pub fn from_avec(avec: [Complex64; 4]) -> Self {
        let alphas = avec.map(|a| a * a * 0.5);
        let [a0, a1, a2, a3] = alphas;
        PainleveParams {
            classical: [a0, -a1, a2, 0.5 - a3],
            alphas,
            avec,
        }
    }

    pub fn from_representation(repr: Representation, values: [Complex64; 4]) -> Self {
        match repr {
            Representation::Classical => Self::from_classical(values),
            Representation::Alphas => Self::from_alphas(values),
            Representation::AVec => Self::from_avec(values),
        }
    }

    pub fn representation(&self, repr: Representation) -> [Complex64; 4] {
        match repr {
            Representation::Classical => self.classical,
            Representation::Alphas => self.alphas,
            Representation::AVec => self.avec,
        }
    }

    /// Mutual consistency of the three stored representations.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = Self::from_classical(self.classical);
        for i in 0..4 {
            if (self.alphas[i] - rebuilt.alphas[i]).norm() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "alphas[{i}] = {} is inconsistent with the classical parameters",
                    self.alphas[i]
                )));
            }
            if (self.avec[i] * self.avec[i] - 2.0 * self.alphas[i]).norm() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "avec[{i}]^2 = {} does not equal 2 alphas[{i}]",
                    self.avec[i] * self.avec[i]
                )));
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        Self::from_alphas([Complex64::new(0.0, 0.0); 4])
    }
}

/// How well a trajectory satisfies its own equation: the maximum over
/// interior samples of the difference between finite-difference derivatives
/// of the sampled states and the chart's right-hand side.
///
/// This is the contract every symmetry-transported or re-parameterized
/// solution is held to.
pub fn flow_residual(traj: &Trajectory, opts: &EvalOptions) -> Result<f64> {
    let n = traj.samples.len();
    if n < 5 {
        return Err(Error::InsufficientSamples {
            available: n,
            needed: 5,
        });
    }
    let params = traj
        .params
        .standard()
        .ok_or_else(|| Error::InvalidInput("flow residual needs standard parameters".into()))?;
    let bases: Vec<Complex64> = traj.samples.iter().map(|s| s.point.base()).collect();
    let mut worst: f64 = 0.0;
    for i in 2..n - 2 {
        let nodes = &bases[i - 2..=i + 2];
        let w = fd_weights(nodes, bases[i], 1);
        let d = |values: &[Complex64]| apply_weights(&w[1], values);
        match traj.chart {
            Chart::Elliptic => {
                let states: Vec<&EllipticState> = traj.samples[i - 2..=i + 2]
                    .iter()
                    .map(|s| s.point.as_elliptic())
                    .collect::<Result<_>>()?;
                let zs: Vec<Complex64> = states.iter().map(|s| s.z).collect();
                let ys: Vec<Complex64> = states.iter().map(|s| s.y).collect();
                let s = states[2];
                let rhs = rhs_elliptic(s, params, opts)?;
                worst = worst.max((d(&zs) - s.y).norm()).max((d(&ys) - rhs).norm());
            }
            Chart::Classical => {
                let states: Vec<&ClassicalState> = traj.samples[i - 2..=i + 2]
                    .iter()
                    .map(|s| s.point.as_classical())
                    .collect::<Result<_>>()?;
                let xs: Vec<Complex64> = states.iter().map(|s| s.x).collect();
                let xds: Vec<Complex64> = states.iter().map(|s| s.x_dot).collect();
                let s = states[2];
                let rhs = rhs_classical(s, params, opts)?;
                worst = worst
                    .max((d(&xs) - s.x_dot).norm())
                    .max((d(&xds) - rhs).norm());
            }
            Chart::Algebraic => {
                let states: Vec<&AlgebraicState> = traj.samples[i - 2..=i + 2]
                    .iter()
                    .map(|s| s.point.as_algebraic())
                    .collect::<Result<_>>()?;
                let us: Vec<Complex64> = states.iter().map(|s| s.u).collect();
                let xs: Vec<Complex64> = states.iter().map(|s| s.x).collect();
                let s = states[2];
                let (dx, du, _) = rhs_algebraic(s, params, opts)?;
                worst = worst.max((d(&xs) - dx).norm()).max((d(&us) - du).norm());
            }
        }
    }
    Ok(worst)
}

/// A torsion class (u, s) of (Q/Z)^2, realized at each tau as the shift point
/// zeta = u tau + s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionShift {
    pub tau_part: f64,
    pub unit_part: f64,
}

impl TorsionShift {
    pub fn new(tau_part: f64, unit_part: f64) -> Self {
        TorsionShift { tau_part, unit_part }
    }

    pub fn at(&self, tau: ModularParameter) -> Complex64 {
        self.tau_part * tau.get() + self.unit_part
    }

    fn class(&self) -> (f64, f64) {
        (self.tau_part.rem_euclid(1.0), self.unit_part.rem_euclid(1.0))
    }
}

/// Finitely many torsion shift points with coefficients: the general
/// right-hand side sum_zeta alpha_zeta wp_z(z + zeta, tau) / (2 pi i)^2.
/// Supported in the elliptic chart only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedParams {
    terms: Vec<(TorsionShift, Complex64)>,
}

impl GeneralizedParams {
    pub fn new(terms: Vec<(TorsionShift, Complex64)>) -> Result<Self> {
        for (i, (a, _)) in terms.iter().enumerate() {
            for (b, _) in terms.iter().skip(i + 1) {
                let (au, asu) = a.class();
                let (bu, bsu) = b.class();
                if (au - bu).abs() < 1e-12 && (asu - bsu).abs() < 1e-12 {
                    return Err(Error::InvalidInput(
                        "torsion shift points must be distinct modulo the lattice".into(),
                    ));
                }
            }
        }
        Ok(GeneralizedParams { terms })
    }

    /// The four half-period classes of a standard parameter point.
    pub fn from_standard(p: &PainleveParams) -> Self {
        GeneralizedParams {
            terms: vec![
                (TorsionShift::new(0.0, 0.0), p.alphas[0]),
                (TorsionShift::new(0.0, 0.5), p.alphas[1]),
                (TorsionShift::new(0.5, 0.0), p.alphas[2]),
                (TorsionShift::new(0.5, 0.5), p.alphas[3]),
            ],
        }
    }

    pub fn terms(&self) -> &[(TorsionShift, Complex64)] {
        &self.terms
    }
}

/// Phase point of the elliptic Hamiltonian chart: position z on the torus,
/// conjugate momentum y = dz/dtau, base point tau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticState {
    pub z: Complex64,
    pub y: Complex64,
    pub tau: Complex64,
}

impl EllipticState {
    pub fn new(z: Complex64, y: Complex64, tau: Complex64) -> Result<Self> {
        ModularParameter::new(tau)?;
        Ok(EllipticState { z, y, tau })
    }

    pub fn modular_tau(&self) -> Result<ModularParameter> {
        ModularParameter::new(self.tau)
    }
}

/// Phase point of the classical chart: X, dX/dt, base point t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub x: Complex64,
    pub x_dot: Complex64,
    pub t: Complex64,
}

/// Phase point of the algebraic phase-space model: fiber coordinate U over
/// the curve point (X, Y), base point t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicState {
    pub u: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub t: Complex64,
}

impl AlgebraicState {
    pub fn curve_residual(&self) -> f64 {
        (self.y * self.y - self.x * (self.x - 1.0) * (self.x - self.t)).norm()
    }
}
