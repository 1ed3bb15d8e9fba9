//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification or input-validation failure,
//! 2 numeric infrastructure error, 3 pole abort (with the partial trajectory
//! flushed), 64 usage error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use pvi::dynamics::{
    integrate_with_partial, AlgebraicState, Chart, ChartPoint, ClassicalState, EllipticState,
    IntegratorConfig, PainleveParams, ParamsUsed, PathSpec, Representation,
};
use pvi::elliptic::{self, EvalOptions, ModularParameter};
use pvi::symmetry::{classify, gamma2_act, landin_forward, landin_inverse, shift_zero_section,
    ModularElement};
use pvi::uniformization::modular_lambda;

use pvi_cli::checks;
use pvi_cli::cxarg::{parse_complex, parse_complex_list, parse_path};
use pvi_cli::exit_codes;
use pvi_cli::output::{format_complex, trajectory_csv, trajectory_json};
use pvi_cli::report::VerificationReport;

#[derive(Parser)]
#[command(name = "pvi", about = "Painlevé VI toolkit: special functions, complex-path integration, verification suites, and symmetry actions", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a special function: wp, wp_z, theta, v, ei, g2, lambda, c.
    Eval(EvalArgs),
    /// Integrate the equation along a declared path and write the trajectory.
    Solve(SolveArgs),
    /// Run a verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Classify an a-vector into its solvability tier.
    Classify(ClassifyArgs),
    /// Apply a deck-group element or a half-period shift to a phase point.
    Symmetry(SymmetryArgs),
    /// Map a parameter point through the Landin bijection.
    Landin(LandinArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Function name: wp | wp_z | theta | v | ei | g2 | lambda | c.
    function: String,
    /// Modular parameter, e.g. "1.07i" or "0.3+1.2i".
    #[arg(long)]
    tau: String,
    /// Fiber argument for wp, wp_z, theta, v.
    #[arg(long)]
    z: Option<String>,
    /// Target absolute error.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Series term cap.
    #[arg(long, default_value_t = 4096)]
    max_terms: usize,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<String>,
    /// Chart: elliptic | classical | algebraic.
    #[arg(long)]
    chart: Option<String>,
    /// Parameter point, "repr:v0,v1,v2,v3" with repr one of
    /// classical | alphas | avec.
    #[arg(long)]
    params: Option<String>,
    /// Initial state components, comma-separated complex values
    /// (z,y | x,xdot | u,x,y).
    #[arg(long)]
    state: Option<String>,
    /// Polyline path in the base, semicolon-separated complex values.
    #[arg(long)]
    path: Option<String>,
    /// Expected base point of the path start (consistency cross-check).
    #[arg(long)]
    t: Option<String>,
    /// Starting tau (elliptic chart consistency cross-check).
    #[arg(long)]
    tau: Option<String>,
    /// Relative tolerance of the integrator.
    #[arg(long)]
    tol: Option<f64>,
    /// Pole-guard radius around chart singularities.
    #[arg(long)]
    guard: Option<f64>,
    /// Number of equally spaced output samples.
    #[arg(long)]
    points: Option<usize>,
    /// Output format: csv | json.
    #[arg(long)]
    format: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: elliptic | uniformization | picard_fuchs | dynamics | forms |
    /// symmetries | all.
    suite: String,
    /// Trim sample counts (thresholds unchanged).
    #[arg(long)]
    quick: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    a0: f64,
    a1: f64,
    a2: f64,
    a3: f64,
}

#[derive(Args)]
struct SymmetryArgs {
    /// Deck-group element "a,b,c,d" or "a,b,c,d;m,n".
    #[arg(long, conflicts_with = "half_period")]
    element: Option<String>,
    /// Half-period index 0..=3 shifting the zero section.
    #[arg(long)]
    half_period: Option<u8>,
    /// Phase point "z,y".
    #[arg(long)]
    state: String,
    /// Modular parameter.
    #[arg(long)]
    tau: String,
    /// Parameter point (permuted by half-period shifts).
    #[arg(long)]
    params: Option<String>,
}

#[derive(Args)]
struct LandinArgs {
    /// Parameter point, "repr:v0,v1,v2,v3".
    #[arg(long)]
    params: String,
    /// Apply the inverse direction (from the (x, y, 0, 0) pattern).
    #[arg(long)]
    inverse: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => exit_codes::USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match cli.command {
        Command::Eval(args) => cmd_eval(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Classify(args) => cmd_classify(&args),
        Command::Symmetry(args) => cmd_symmetry(&args),
        Command::Landin(args) => cmd_landin(&args),
    };
    ExitCode::from(code as u8)
}

fn usage_error(message: &str) -> i32 {
    eprintln!("usage error: {message}");
    exit_codes::USAGE
}

fn numeric_exit(e: &pvi::Error) -> i32 {
    eprintln!("error: {e}");
    match e {
        pvi::Error::InvalidInput(_)
        | pvi::Error::PatternMismatch(_)
        | pvi::Error::InconsistentContext(_) => exit_codes::VERIFICATION_FAILURE,
        pvi::Error::PoleApproach { .. } | pvi::Error::PoleHit { .. } => exit_codes::POLE_ABORT,
        _ => exit_codes::NUMERIC_ERROR,
    }
}

fn cmd_eval(args: &EvalArgs) -> i32 {
    let tau = match parse_complex(&args.tau)
        .and_then(|t| ModularParameter::new(t).map_err(|e| e.to_string()))
    {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let opts = EvalOptions {
        tolerance: args.tol,
        max_terms: args.max_terms,
        ..Default::default()
    };
    let need_z = |z: &Option<String>| -> Result<Complex64, String> {
        z.as_deref()
            .ok_or_else(|| "this function needs --z".to_string())
            .and_then(parse_complex)
    };
    let result: Result<Vec<Complex64>, pvi::Error> = match args.function.to_lowercase().as_str() {
        "wp" => match need_z(&args.z) {
            Ok(z) => elliptic::wp(z, tau, &opts).map(|v| vec![v]),
            Err(e) => return usage_error(&e),
        },
        "wp_z" | "wpz" => match need_z(&args.z) {
            Ok(z) => elliptic::wp_z(z, tau, &opts).map(|v| vec![v]),
            Err(e) => return usage_error(&e),
        },
        "theta" => match need_z(&args.z) {
            Ok(z) => elliptic::theta(z, tau, &opts).map(|v| vec![v]),
            Err(e) => return usage_error(&e),
        },
        "v" => match need_z(&args.z) {
            Ok(z) => elliptic::theta_v(z, tau, &opts).map(|v| vec![v]),
            Err(e) => return usage_error(&e),
        },
        "ei" | "e_i" => {
            elliptic::half_period_values(tau, &opts).map(|(e1, e2, e3)| vec![e1, e2, e3])
        }
        "g2" => elliptic::eisenstein_g2(tau, &opts).map(|v| vec![v]),
        "lambda" => modular_lambda(tau, &opts).map(|v| vec![v]),
        "c" => elliptic::constant_c(tau, &opts).map(|v| vec![v]),
        other => return usage_error(&format!("unknown function '{other}'")),
    };
    match result {
        Ok(values) => {
            for v in values {
                println!("{}", format_complex(v));
            }
            exit_codes::OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_codes::NUMERIC_ERROR
        }
    }
}

/// Config-file shape of `solve`; every field has a flag override.
#[derive(Debug, Default, Deserialize)]
struct SolveConfig {
    chart: Option<String>,
    params: Option<ParamsConfig>,
    state: Option<Vec<[f64; 2]>>,
    path: Option<Vec<[f64; 2]>>,
    rel_tol: Option<f64>,
    pole_guard: Option<f64>,
    points: Option<usize>,
    format: Option<String>,
    out: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ParamsConfig {
    repr: String,
    values: Vec<[f64; 2]>,
}

fn representation_by_name(name: &str) -> Result<Representation, String> {
    match name {
        "classical" => Ok(Representation::Classical),
        "alphas" => Ok(Representation::Alphas),
        "avec" => Ok(Representation::AVec),
        other => Err(format!("unknown representation '{other}'")),
    }
}

fn parse_params_spec(spec: &str) -> Result<PainleveParams, String> {
    let (repr, rest) = spec
        .split_once(':')
        .ok_or("params must look like 'repr:v0,v1,v2,v3'")?;
    let values = parse_complex_list(rest)?;
    if values.len() != 4 {
        return Err(format!("expected 4 parameter values, got {}", values.len()));
    }
    let values: [Complex64; 4] = [values[0], values[1], values[2], values[3]];
    Ok(PainleveParams::from_representation(
        representation_by_name(repr)?,
        values,
    ))
}

fn params_from_config(cfg: &ParamsConfig) -> Result<PainleveParams, String> {
    if cfg.values.len() != 4 {
        return Err(format!("expected 4 parameter values, got {}", cfg.values.len()));
    }
    let values: [Complex64; 4] =
        std::array::from_fn(|k| Complex64::new(cfg.values[k][0], cfg.values[k][1]));
    Ok(PainleveParams::from_representation(
        representation_by_name(&cfg.repr)?,
        values,
    ))
}

fn cmd_solve(args: &SolveArgs) -> i32 {
    // Load the config file when given; flags override its fields.
    let file_config: SolveConfig = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match serde_json::from_str(&text) {
                Ok(cfg) => cfg,
                Err(e) => return usage_error(&format!("bad config file: {e}")),
            },
            Err(e) => return usage_error(&format!("cannot read config '{path}': {e}")),
        },
        None => SolveConfig::default(),
    };

    let chart = match args.chart.clone().or(file_config.chart) {
        Some(name) => match name.as_str() {
            "elliptic" => Chart::Elliptic,
            "classical" => Chart::Classical,
            "algebraic" => Chart::Algebraic,
            other => return usage_error(&format!("unknown chart '{other}'")),
        },
        None => return usage_error("missing --chart"),
    };
    let params = match (&args.params, &file_config.params) {
        (Some(spec), _) => match parse_params_spec(spec) {
            Ok(p) => p,
            Err(e) => return usage_error(&e),
        },
        (None, Some(cfg)) => match params_from_config(cfg) {
            Ok(p) => p,
            Err(e) => return usage_error(&e),
        },
        (None, None) => return usage_error("missing --params"),
    };
    let state_values: Vec<Complex64> = match (&args.state, &file_config.state) {
        (Some(spec), _) => match parse_complex_list(spec) {
            Ok(v) => v,
            Err(e) => return usage_error(&e),
        },
        (None, Some(values)) => values
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect(),
        (None, None) => return usage_error("missing --state"),
    };
    let path_points: Vec<Complex64> = match (&args.path, &file_config.path) {
        (Some(spec), _) => match parse_path(spec) {
            Ok(v) => v,
            Err(e) => return usage_error(&e),
        },
        (None, Some(values)) => values
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect(),
        (None, None) => return usage_error("missing --path"),
    };
    let path = match PathSpec::polyline(path_points) {
        Ok(p) => p,
        Err(e) => return numeric_exit(&e),
    };

    // Optional consistency cross-checks.
    if let Some(spec) = &args.t {
        match parse_complex(spec) {
            Ok(t) => {
                if (t - path.start()).norm() > 1e-9 {
                    eprintln!(
                        "error: --t = {t} does not match the path start {}",
                        path.start()
                    );
                    return exit_codes::VERIFICATION_FAILURE;
                }
            }
            Err(e) => return usage_error(&e),
        }
    }
    if let Some(spec) = &args.tau {
        match parse_complex(spec) {
            Ok(tau) => {
                if chart == Chart::Elliptic && (tau - path.start()).norm() > 1e-9 {
                    eprintln!(
                        "error: --tau = {tau} does not match the path start {}",
                        path.start()
                    );
                    return exit_codes::VERIFICATION_FAILURE;
                }
            }
            Err(e) => return usage_error(&e),
        }
    }

    let base0 = path.start();
    let initial = match (chart, state_values.as_slice()) {
        (Chart::Elliptic, [z, y]) => match EllipticState::new(*z, *y, base0) {
            Ok(s) => ChartPoint::Elliptic(s),
            Err(e) => return numeric_exit(&e),
        },
        (Chart::Classical, [x, x_dot]) => ChartPoint::Classical(ClassicalState {
            x: *x,
            x_dot: *x_dot,
            t: base0,
        }),
        (Chart::Algebraic, [u, x, y]) => {
            let s = AlgebraicState {
                u: *u,
                x: *x,
                y: *y,
                t: base0,
            };
            if s.curve_residual() > 1e-8 {
                eprintln!(
                    "error: initial state is off the curve (residual {:.3e})",
                    s.curve_residual()
                );
                return exit_codes::VERIFICATION_FAILURE;
            }
            ChartPoint::Algebraic(s)
        }
        (c, got) => {
            return usage_error(&format!(
                "chart {c:?} needs {} state components, got {}",
                match c {
                    Chart::Algebraic => 3,
                    _ => 2,
                },
                got.len()
            ))
        }
    };

    let mut config = IntegratorConfig::default();
    if let Some(tol) = args.tol.or(file_config.rel_tol) {
        config.rel_tol = tol;
        config.abs_tol = tol * 1e-2;
    }
    if let Some(guard) = args.guard.or(file_config.pole_guard) {
        config.pole_guard = guard;
    }
    if let Some(points) = args.points.or(file_config.points) {
        config.output_points = Some(points);
    }

    let (trajectory, abort) =
        integrate_with_partial(chart, &initial, &path, ParamsUsed::Standard(params), &config);

    // Validation failures produce no trajectory at all; report and stop
    // rather than writing an empty file.
    if let Some(e) = &abort {
        if trajectory.samples.is_empty() {
            return numeric_exit(e);
        }
    }

    let format = args
        .format
        .clone()
        .or(file_config.format)
        .unwrap_or_else(|| "csv".into());
    let rendered = match format.as_str() {
        "csv" => trajectory_csv(&trajectory),
        "json" => {
            let mut text = serde_json::to_string_pretty(&trajectory_json(&trajectory)).unwrap();
            text.push('\n');
            text
        }
        other => return usage_error(&format!("unknown format '{other}'")),
    };
    let out = args.out.clone().or(file_config.out);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, rendered.as_bytes()) {
                eprintln!("error: cannot write '{path}': {e}");
                return exit_codes::NUMERIC_ERROR;
            }
        }
        None => {
            print!("{rendered}");
            let _ = std::io::stdout().flush();
        }
    }
    match abort {
        None => exit_codes::OK,
        Some(e) => numeric_exit(&e),
    }
}

fn cmd_verify(args: &VerifyArgs) -> i32 {
    let report: Option<VerificationReport> = checks::run_suite(&args.suite, args.quick);
    let report = match report {
        Some(r) => r,
        None => {
            return usage_error(&format!(
                "unknown suite '{}'; available: {}",
                args.suite,
                checks::SUITES.join(", ")
            ))
        }
    };
    let mut rendered = serde_json::to_string_pretty(&report).unwrap();
    rendered.push('\n');
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered.as_bytes()) {
                eprintln!("error: cannot write '{path}': {e}");
                return exit_codes::NUMERIC_ERROR;
            }
        }
        None => print!("{rendered}"),
    }
    if report.records.iter().any(|r| r.residual.is_nan()) {
        exit_codes::NUMERIC_ERROR
    } else if report.overall_pass {
        exit_codes::OK
    } else {
        exit_codes::VERIFICATION_FAILURE
    }
}

fn cmd_classify(args: &ClassifyArgs) -> i32 {
    let result = classify(&[args.a0, args.a1, args.a2, args.a3]);
    let mut rendered = serde_json::to_string_pretty(&result).unwrap();
    rendered.push('\n');
    print!("{rendered}");
    exit_codes::OK
}

fn params_json(p: &PainleveParams) -> serde_json::Value {
    serde_json::json!({
        "classical": p.classical.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
        "alphas": p.alphas.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
        "avec": p.avec.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
    })
}

fn cmd_symmetry(args: &SymmetryArgs) -> i32 {
    let tau = match parse_complex(&args.tau) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let state_values = match parse_complex_list(&args.state) {
        Ok(v) if v.len() == 2 => v,
        Ok(v) => return usage_error(&format!("--state needs z,y (got {} values)", v.len())),
        Err(e) => return usage_error(&e),
    };
    let state = match EllipticState::new(state_values[0], state_values[1], tau) {
        Ok(s) => s,
        Err(e) => return numeric_exit(&e),
    };
    let params = match &args.params {
        Some(spec) => match parse_params_spec(spec) {
            Ok(p) => Some(p),
            Err(e) => return usage_error(&e),
        },
        None => None,
    };

    let (new_state, new_params) = if let Some(spec) = &args.element {
        let parts: Vec<&str> = spec.split(';').collect();
        let matrix: Vec<i64> = match parts[0]
            .split(',')
            .map(|v| v.trim().parse::<i64>())
            .collect::<Result<_, _>>()
        {
            Ok(m) => m,
            Err(e) => return usage_error(&format!("bad element: {e}")),
        };
        if matrix.len() != 4 {
            return usage_error("element needs four matrix entries a,b,c,d");
        }
        let (m, n) = if parts.len() > 1 {
            let shift: Vec<i64> = match parts[1]
                .split(',')
                .map(|v| v.trim().parse::<i64>())
                .collect::<Result<_, _>>()
            {
                Ok(s) => s,
                Err(e) => return usage_error(&format!("bad shift: {e}")),
            };
            if shift.len() != 2 {
                return usage_error("shift needs two entries m,n");
            }
            (shift[0], shift[1])
        } else {
            (0, 0)
        };
        let g = match ModularElement::new(matrix[0], matrix[1], matrix[2], matrix[3], m, n) {
            Ok(g) => g,
            Err(e) => return numeric_exit(&e),
        };
        match gamma2_act(&g, &state) {
            Ok(s) => (s, params),
            Err(e) => return numeric_exit(&e),
        }
    } else if let Some(j) = args.half_period {
        let index = match elliptic::HalfPeriodIndex::new(j) {
            Ok(i) => i,
            Err(e) => return numeric_exit(&e),
        };
        let p = match params {
            Some(p) => p,
            None => return usage_error("--half-period needs --params to permute"),
        };
        match shift_zero_section(index, &state, &p) {
            Ok((s, p)) => (s, Some(p)),
            Err(e) => return numeric_exit(&e),
        }
    } else {
        return usage_error("need --element or --half-period");
    };

    let value = serde_json::json!({
        "state": {
            "z": [new_state.z.re, new_state.z.im],
            "y": [new_state.y.re, new_state.y.im],
            "tau": [new_state.tau.re, new_state.tau.im],
        },
        "params": new_params.map(|p| params_json(&p)),
    });
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
    exit_codes::OK
}

fn cmd_landin(args: &LandinArgs) -> i32 {
    let params = match parse_params_spec(&args.params) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let mapped = if args.inverse {
        landin_inverse(&params)
    } else {
        landin_forward(&params)
    };
    match mapped {
        Ok(p) => {
            println!("{}", serde_json::to_string_pretty(&params_json(&p)).unwrap());
            exit_codes::OK
        }
        Err(e) => numeric_exit(&e),
    }
}
