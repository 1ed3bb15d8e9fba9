//! The verification suites behind `verify` and the acceptance run: every
//! structural identity of the library, executed at pinned tolerances with a
//! report record per check.

mod dynamics;
mod elliptic;
mod forms;
mod picard_fuchs;
mod symmetries;
mod uniformization;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pvi::dynamics::{
    integrate, Chart, ChartPoint, EllipticState, IntegratorConfig, PainleveParams, ParamsUsed,
    PathSpec, Trajectory,
};
use pvi::elliptic::{EvalOptions, ModularParameter};
use pvi::symmetry::ModularElement;

use crate::report::{CheckRecord, VerificationReport};

pub use dynamics::dynamics_records;
pub use elliptic::elliptic_records;
pub use forms::forms_records;
pub use picard_fuchs::picard_fuchs_records;
pub use symmetries::symmetries_records;
pub use uniformization::uniformization_records;

pub const SUITES: [&str; 7] = [
    "elliptic",
    "uniformization",
    "picard_fuchs",
    "dynamics",
    "forms",
    "symmetries",
    "all",
];

/// Run one named suite. `quick` trims sample counts without touching any
/// threshold.
pub fn run_suite(name: &str, quick: bool) -> Option<VerificationReport> {
    let records = match name {
        "elliptic" => elliptic_records(quick),
        "uniformization" => uniformization_records(quick),
        "picard_fuchs" => picard_fuchs_records(quick),
        "dynamics" => dynamics_records(quick),
        "forms" => forms_records(quick),
        "symmetries" => symmetries_records(quick),
        "all" => {
            let mut all = Vec::new();
            all.extend(elliptic_records(quick));
            all.extend(uniformization_records(quick));
            all.extend(picard_fuchs_records(quick));
            all.extend(dynamics_records(quick));
            all.extend(forms_records(quick));
            all.extend(symmetries_records(quick));
            all
        }
        _ => return None,
    };
    Some(VerificationReport::new(name, records))
}

/// Every record of every suite, grouped for the acceptance run.
pub fn acceptance(quick: bool) -> Vec<(&'static str, Vec<CheckRecord>)> {
    vec![
        ("elliptic", elliptic_records(quick)),
        ("uniformization", uniformization_records(quick)),
        ("picard_fuchs", picard_fuchs_records(quick)),
        ("dynamics", dynamics_records(quick)),
        ("forms", forms_records(quick)),
        ("symmetries", symmetries_records(quick)),
    ]
}

// ---------------------------------------------------------------------------
// Shared helpers.

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn r(v: f64) -> Complex64 {
    c(v, 0.0)
}

pub(crate) fn tight() -> EvalOptions {
    EvalOptions::with_tolerance(1e-13)
}

pub(crate) fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub(crate) fn random_tau(rng: &mut StdRng) -> ModularParameter {
    ModularParameter::new(c(
        rng.random_range(-0.5..0.5),
        rng.random_range(0.5..2.0),
    ))
    .unwrap()
}

/// Random deck-group elements with entries bounded by 5.
pub(crate) fn random_gamma2(rng: &mut StdRng, with_shift: bool) -> ModularElement {
    let gens = [
        ModularElement::new(1, 2, 0, 1, 0, 0).unwrap(),
        ModularElement::new(1, -2, 0, 1, 0, 0).unwrap(),
        ModularElement::new(1, 0, 2, 1, 0, 0).unwrap(),
        ModularElement::new(1, 0, -2, 1, 0, 0).unwrap(),
    ];
    let mut g = if with_shift {
        ModularElement::shift(rng.random_range(-2..=2), rng.random_range(-2..=2))
    } else {
        ModularElement::identity()
    };
    for _ in 0..4 {
        let pick = gens[rng.random_range(0..4)];
        let candidate = g.compose(&pick);
        if candidate.c.abs() <= 5
            && candidate.d.abs() <= 5
            && candidate.a.abs() <= 5
            && candidate.b.abs() <= 5
        {
            g = candidate;
        }
    }
    g
}

/// The five standing parameter points used across the suites: the Picard
/// point, the quantum-cohomology point, Hitchin's point, the once-reduced
/// point, and a generic one.
pub(crate) fn parameter_points() -> [PainleveParams; 5] {
    [
        PainleveParams::from_classical([r(0.0), r(0.0), r(0.0), r(0.5)]),
        PainleveParams::from_classical([r(0.125), r(-0.125), r(0.0), r(0.5)]),
        PainleveParams::from_classical([r(0.125), r(-0.125), r(0.125), r(0.375)]),
        PainleveParams::from_alphas([r(0.5), r(0.0), r(0.0), r(0.0)]),
        PainleveParams::from_classical([r(0.21), r(-0.11), r(0.07), r(0.44)]),
    ]
}

pub(crate) fn tight_config(points: usize) -> IntegratorConfig {
    IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-13,
        ..IntegratorConfig::default()
    }
    .with_output_points(points)
}

/// A short elliptic trajectory for a parameter point.
pub(crate) fn elliptic_trajectory(
    p: PainleveParams,
    z0: Complex64,
    y0: Complex64,
    tau0: Complex64,
    span: Complex64,
    points: usize,
) -> Result<Trajectory, pvi::Error> {
    let initial = ChartPoint::Elliptic(EllipticState {
        z: z0,
        y: y0,
        tau: tau0,
    });
    let path = PathSpec::segment(tau0, tau0 + span)?;
    integrate(
        Chart::Elliptic,
        &initial,
        &path,
        ParamsUsed::Standard(p),
        &tight_config(points),
    )
}
