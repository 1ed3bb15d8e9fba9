//! Adaptive complex-path integration of the equation in any chart.
//!
//! Paths are caller-declared polylines in the base (t or tau); the engine is
//! an embedded Dormand-Prince 5(4) pair marched along the arclength of the
//! polyline, stepping exactly onto segment vertices and requested output
//! points. There is no automatic pole avoidance: solutions own their homotopy
//! class, and a state drifting into a chart singularity aborts cleanly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EvalOptions, MIN_IM_TAU};
use crate::error::{Error, Result};

use super::rhs::{rhs_algebraic, rhs_classical, rhs_elliptic, rhs_elliptic_generalized};
use super::{AlgebraicState, ClassicalState, EllipticState, GeneralizedParams, PainleveParams};

/// Which coordinate system a state or trajectory lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Elliptic,
    Classical,
    Algebraic,
}

/// A state in whichever chart it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChartPoint {
    Elliptic(EllipticState),
    Classical(ClassicalState),
    Algebraic(AlgebraicState),
}

impl ChartPoint {
    pub fn chart(&self) -> Chart {
        match self {
            ChartPoint::Elliptic(_) => Chart::Elliptic,
            ChartPoint::Classical(_) => Chart::Classical,
            ChartPoint::Algebraic(_) => Chart::Algebraic,
        }
    }

    /// The base-parameter value (tau or t) this state sits over.
    pub fn base(&self) -> Complex64 {
        match self {
            ChartPoint::Elliptic(s) => s.tau,
            ChartPoint::Classical(s) => s.t,
            ChartPoint::Algebraic(s) => s.t,
        }
    }

    pub fn as_elliptic(&self) -> Result<&EllipticState> {
        match self {
            ChartPoint::Elliptic(s) => Ok(s),
            _ => Err(Error::InvalidInput("state is not in the elliptic chart".into())),
        }
    }

    pub fn as_classical(&self) -> Result<&ClassicalState> {
        match self {
            ChartPoint::Classical(s) => Ok(s),
            _ => Err(Error::InvalidInput("state is not in the classical chart".into())),
        }
    }

    pub fn as_algebraic(&self) -> Result<&AlgebraicState> {
        match self {
            ChartPoint::Algebraic(s) => Ok(s),
            _ => Err(Error::InvalidInput("state is not in the algebraic chart".into())),
        }
    }
}

/// A declared polyline in the complex base plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    points: Vec<Complex64>,
}

impl PathSpec {
    pub fn polyline(points: Vec<Complex64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two points".into()));
        }
        for w in points.windows(2) {
            if (w[1] - w[0]).norm() == 0.0 {
                return Err(Error::InvalidInput("path contains a zero-length segment".into()));
            }
        }
        Ok(PathSpec { points })
    }

    pub fn segment(from: Complex64, to: Complex64) -> Result<Self> {
        Self::polyline(vec![from, to])
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn start(&self) -> Complex64 {
        self.points[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.points.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        PathSpec { points }
    }

    pub fn total_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Distance from the excluded base point to the nearest path point.
    fn distance_to(&self, p: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = b - a;
            let len2 = d.norm_sqr();
            let s = (((p - a).re * d.re + (p - a).im * d.im) / len2).clamp(0.0, 1.0);
            best = best.min((p - (a + d * s)).norm());
        }
        best
    }

    /// Chart-dependent admissibility: t-paths keep clear of {0, 1}, tau-paths
    /// stay above the evaluation strip.
    pub fn validate(&self, chart: Chart, guard: f64) -> Result<()> {
        match chart {
            Chart::Elliptic => {
                let min_im = self
                    .points
                    .iter()
                    .map(|p| p.im)
                    .fold(f64::INFINITY, f64::min);
                if min_im < MIN_IM_TAU + guard {
                    return Err(Error::InvalidInput(format!(
                        "tau path reaches Im tau = {min_im}, below the {MIN_IM_TAU} strip plus guard"
                    )));
                }
            }
            Chart::Classical | Chart::Algebraic => {
                for excluded in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] {
                    let d = self.distance_to(excluded);
                    if d < guard {
                        return Err(Error::InvalidInput(format!(
                            "t path passes within {d:e} of the excluded base point {excluded}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Step-size and accuracy controls for the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Guard radius around chart singularities; states inside abort.
    pub pole_guard: f64,
    /// When set, the trajectory holds exactly this many equally spaced
    /// samples (endpoints included); otherwise every accepted step is kept.
    pub output_points: Option<usize>,
    pub max_steps: usize,
    /// Accuracy of special-function evaluations inside the right-hand sides.
    pub eval: EvalOptions,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.1,
            min_step: 1e-12,
            pole_guard: 1e-6,
            output_points: None,
            max_steps: 1_000_000,
            eval: EvalOptions::with_tolerance(1e-12),
        }
    }
}

impl IntegratorConfig {
    pub fn with_output_points(mut self, n: usize) -> Self {
        self.output_points = Some(n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        // The negated comparisons also reject NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidInput("integrator tolerances must be positive".into()));
        }
        if let Some(n) = self.output_points {
            if n < 2 {
                return Err(Error::InvalidInput("output_points must be at least 2".into()));
            }
        }
        Ok(())
    }
}

/// One recorded sample: the full state and the largest local error estimate
/// among the accepted steps since the previous sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub point: ChartPoint,
    pub error_estimate: f64,
}

/// Parameters a trajectory was integrated with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamsUsed {
    Standard(PainleveParams),
    Generalized(GeneralizedParams),
}

impl ParamsUsed {
    pub fn standard(&self) -> Option<&PainleveParams> {
        match self {
            ParamsUsed::Standard(p) => Some(p),
            ParamsUsed::Generalized(_) => None,
        }
    }
}

/// Sampled states along a declared base path, immutable once produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub chart: Chart,
    pub params: ParamsUsed,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        self.samples.first().expect("trajectory is never empty")
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn bases(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.point.base()).collect()
    }
}

/// Right-hand side abstraction the engine marches: state vectors of length
/// at most 3 with a chart-specific derivative and pole guard.
struct Flow<'a> {
    chart: Chart,
    params: &'a ParamsUsed,
    config: &'a IntegratorConfig,
}

impl Flow<'_> {
    fn dim(&self) -> usize {
        match self.chart {
            Chart::Elliptic | Chart::Classical => 2,
            Chart::Algebraic => 3,
        }
    }

    fn pack(&self, point: &ChartPoint) -> Result<[Complex64; 3]> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(match (self.chart, point) {
            (Chart::Elliptic, ChartPoint::Elliptic(s)) => [s.z, s.y, zero],
            (Chart::Classical, ChartPoint::Classical(s)) => [s.x, s.x_dot, zero],
            (Chart::Algebraic, ChartPoint::Algebraic(s)) => [s.u, s.x, s.y],
            _ => {
                return Err(Error::InvalidInput(
                    "initial state chart does not match the requested chart".into(),
                ))
            }
        })
    }

    fn unpack(&self, base: Complex64, v: &[Complex64; 3]) -> ChartPoint {
        match self.chart {
            Chart::Elliptic => ChartPoint::Elliptic(EllipticState {
                z: v[0],
                y: v[1],
                tau: base,
            }),
            Chart::Classical => ChartPoint::Classical(ClassicalState {
                x: v[0],
                x_dot: v[1],
                t: base,
            }),
            Chart::Algebraic => ChartPoint::Algebraic(AlgebraicState {
                u: v[0],
                x: v[1],
                y: v[2],
                t: base,
            }),
        }
    }

    fn eval(&self, base: Complex64, v: &[Complex64; 3]) -> Result<[Complex64; 3]> {
        let zero = Complex64::new(0.0, 0.0);
        let opts = EvalOptions {
            pole_guard: self.config.pole_guard,
            ..self.config.eval
        };
        match (self.chart, self.params) {
            (Chart::Elliptic, ParamsUsed::Standard(p)) => {
                let s = EllipticState::new(v[0], v[1], base)?;
                Ok([v[1], rhs_elliptic(&s, p, &opts)?, zero])
            }
            (Chart::Elliptic, ParamsUsed::Generalized(g)) => {
                let s = EllipticState::new(v[0], v[1], base)?;
                Ok([v[1], rhs_elliptic_generalized(&s, g, &opts)?, zero])
            }
            (Chart::Classical, ParamsUsed::Standard(p)) => {
                let s = ClassicalState {
                    x: v[0],
                    x_dot: v[1],
                    t: base,
                };
                Ok([v[1], rhs_classical(&s, p, &opts)?, zero])
            }
            (Chart::Algebraic, ParamsUsed::Standard(p)) => {
                let s = AlgebraicState {
                    u: v[0],
                    x: v[1],
                    y: v[2],
                    t: base,
                };
                let (dx, du, dy) = rhs_algebraic(&s, p, &opts)?;
                Ok([du, dx, dy])
            }
            _ => Err(Error::InvalidInput(
                "generalized parameters are supported in the elliptic chart only".into(),
            )),
        }
    }
}

/// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate along the declared path. On a clean pole abort the partial
/// trajectory (every sample recorded so far) is returned next to the error.
pub fn integrate_with_partial(
    chart: Chart,
    initial: &ChartPoint,
    path: &PathSpec,
    params: ParamsUsed,
    config: &IntegratorConfig,
) -> (Trajectory, Option<Error>) {
    let mut samples = Vec::new();
    let error = run(chart, initial, path, &params, config, &mut samples).err();
    (
        Trajectory {
            chart,
            params,
            samples,
        },
        error,
    )
}

/// Integrate along the declared path, failing outright on any abort.
pub fn integrate(
    chart: Chart,
    initial: &ChartPoint,
    path: &PathSpec,
    params: ParamsUsed,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let (trajectory, error) = integrate_with_partial(chart, initial, path, params, config);
    match error {
        None => Ok(trajectory),
        Some(e) => Err(e),
    }
}

fn run(
    chart: Chart,
    initial: &ChartPoint,
    path: &PathSpec,
    params: &ParamsUsed,
    config: &IntegratorConfig,
    out: &mut Vec<Sample>,
) -> Result<()> {
    config.validate()?;
    path.validate(chart, config.pole_guard)?;
    if (initial.base() - path.start()).norm() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "initial state sits over {} but the path starts at {}",
            initial.base(),
            path.start()
        )));
    }
    let flow = Flow {
        chart,
        params,
        config,
    };
    let mut state = flow.pack(initial)?;
    let dim = flow.dim();

    // Arclength parameterization of the polyline.
    let seg_lengths: Vec<f64> = path
        .points()
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .collect();
    let total: f64 = seg_lengths.iter().sum();
    let mut vertex_sigma = vec![0.0];
    for l in &seg_lengths {
        vertex_sigma.push(vertex_sigma.last().unwrap() + l);
    }
    let base_at = |sigma: f64| -> (Complex64, Complex64) {
        // Returns (base point, unit direction) at arclength sigma.
        let mut k = 0;
        while k + 1 < seg_lengths.len() && sigma > vertex_sigma[k + 1] {
            k += 1;
        }
        let a = path.points()[k];
        let b = path.points()[k + 1];
        let dir = (b - a) / seg_lengths[k];
        (a + dir * (sigma - vertex_sigma[k]), dir)
    };

    // Barriers: segment vertices plus requested output points.
    let mut barriers: Vec<(f64, bool)> = vertex_sigma.iter().map(|s| (*s, false)).collect();
    match config.output_points {
        Some(n) => {
            for i in 0..n {
                barriers.push((total * i as f64 / (n - 1) as f64, true));
            }
        }
        None => {
            // Every accepted step becomes a sample; endpoints always do.
            barriers.push((0.0, true));
            barriers.push((total, true));
        }
    }
    barriers.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Merge coincident barriers, keeping the output flag.
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for (s, is_output) in barriers {
        match merged.last_mut() {
            Some((last, flag)) if (s - *last).abs() < 1e-12 * total.max(1.0) => {
                *flag |= is_output;
            }
            _ => merged.push((s, is_output)),
        }
    }
    let record_all = config.output_points.is_none();

    let mut sigma;
    let mut error_since_sample: f64 = 0.0;
    let mut steps_taken = 0usize;
    let record =
        |out: &mut Vec<Sample>, flow: &Flow, sigma: f64, state: &[Complex64; 3], err: f64| {
            let (base, _) = base_at(sigma);
            out.push(Sample {
                point: flow.unpack(base, state),
                error_estimate: err,
            });
        };
    record(out, &flow, 0.0, &state, 0.0);

    let mut h = (total / 100.0).min(config.max_step);
    for w in merged.windows(2) {
        let (start, _) = w[0];
        let (stop, stop_is_output) = w[1];
        sigma = start;
        while sigma < stop - 1e-13 * total.max(1.0) {
            if steps_taken >= config.max_steps {
                return Err(Error::NoConvergence {
                    iterations: steps_taken,
                    residual: stop - sigma,
                });
            }
            h = h.min(stop - sigma).min(config.max_step);
            let map_err = |e: Error, base: Complex64| match e {
                Error::PoleHit { location } | Error::PoleAtLatticePoint { z: location, .. } => {
                    Error::PoleApproach { base, location }
                }
                other => other,
            };
            // One embedded step from sigma with size h.
            let mut k = [[Complex64::new(0.0, 0.0); 3]; 7];
            let (b0, d0) = base_at(sigma);
            k[0] = scale(&flow.eval(b0, &state).map_err(|e| map_err(e, b0))?, d0);
            for stage in 1..7 {
                let mut arg = state;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = if stage < 7 { DP_A[stage - 1][j] } else { 0.0 };
                    if a != 0.0 {
                        for i in 0..dim {
                            arg[i] += h * a * kj[i];
                        }
                    }
                }
                let (bs, ds) = base_at(sigma + DP_C[stage] * h);
                k[stage] = scale(&flow.eval(bs, &arg).map_err(|e| map_err(e, bs))?, ds);
            }
            let mut next = state;
            let mut err_vec = [Complex64::new(0.0, 0.0); 3];
            for i in 0..dim {
                for (j, kj) in k.iter().enumerate() {
                    if DP_B[j] != 0.0 {
                        next[i] += h * DP_B[j] * kj[i];
                    }
                    if DP_ERR[j] != 0.0 {
                        err_vec[i] += h * DP_ERR[j] * kj[i];
                    }
                }
            }
            let mut err_norm: f64 = 0.0;
            for i in 0..dim {
                let scale = config.abs_tol
                    + config.rel_tol * state[i].norm().max(next[i].norm());
                err_norm = err_norm.max(err_vec[i].norm() / scale);
            }
            steps_taken += 1;
            if err_norm <= 1.0 {
                sigma += h;
                state = next;
                let local: f64 = err_vec.iter().take(dim).map(|e| e.norm()).sum();
                error_since_sample = error_since_sample.max(local);
                if record_all && sigma < stop - 1e-13 * total.max(1.0) {
                    record(out, &flow, sigma, &state, error_since_sample);
                    error_since_sample = 0.0;
                }
            }
            let factor = if err_norm > 0.0 {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h *= factor;
            if h < config.min_step {
                return Err(Error::StepUnderflow { tolerance: h });
            }
        }
        sigma = stop;
        if stop_is_output || record_all {
            record(out, &flow, sigma, &state, error_since_sample);
            error_since_sample = 0.0;
        }
    }
    Ok(())
}

fn scale(v: &[Complex64; 3], dir: Complex64) -> [Complex64; 3] {
    [v[0] * dir, v[1] * dir, v[2] * dir]
}
