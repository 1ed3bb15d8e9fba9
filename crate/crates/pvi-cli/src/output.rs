//! Deterministic encodings: 16-significant-digit complex printing for `eval`,
//! and the CSV / JSON trajectory formats. Floating-point values in the file
//! formats use the shortest round-trip representation, so the CSV and JSON
//! encodings of a trajectory decode to bit-identical sample sequences.

use num_complex::Complex64;
use pvi::dynamics::{Chart, ChartPoint, Trajectory};
use serde_json::{json, Value};

/// "re+imi" with 16 significant digits in each component.
pub fn format_complex(z: Complex64) -> String {
    format!("{:.15e}{:+.15e}i", z.re, z.im)
}

/// Column names of the state components per chart.
pub fn state_columns(chart: Chart) -> &'static [&'static str] {
    match chart {
        Chart::Elliptic => &["z_re", "z_im", "y_re", "y_im"],
        Chart::Classical => &["x_re", "x_im", "xdot_re", "xdot_im"],
        Chart::Algebraic => &["u_re", "u_im", "x_re", "x_im", "y_re", "y_im"],
    }
}

fn state_components(point: &ChartPoint) -> Vec<Complex64> {
    match point {
        ChartPoint::Elliptic(s) => vec![s.z, s.y],
        ChartPoint::Classical(s) => vec![s.x, s.x_dot],
        ChartPoint::Algebraic(s) => vec![s.u, s.x, s.y],
    }
}

/// CSV encoding: base_re, base_im, state components re/im interleaved, then
/// the local error estimate.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    out.push_str("base_re,base_im");
    for col in state_columns(traj.chart) {
        out.push(',');
        out.push_str(col);
    }
    out.push_str(",err\n");
    for sample in &traj.samples {
        let base = sample.point.base();
        out.push_str(&format!("{},{}", base.re, base.im));
        for comp in state_components(&sample.point) {
            out.push_str(&format!(",{},{}", comp.re, comp.im));
        }
        out.push_str(&format!(",{}\n", sample.error_estimate));
    }
    out
}

fn complex_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// JSON encoding with the schema
/// {chart, params: {classical, alphas, avec}, samples: [{base, state, err}]}.
pub fn trajectory_json(traj: &Trajectory) -> Value {
    let chart = match traj.chart {
        Chart::Elliptic => "elliptic",
        Chart::Classical => "classical",
        Chart::Algebraic => "algebraic",
    };
    let params = match traj.params.standard() {
        Some(p) => json!({
            "classical": p.classical.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
            "alphas": p.alphas.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
            "avec": p.avec.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
        }),
        None => json!("generalized"),
    };
    let samples: Vec<Value> = traj
        .samples
        .iter()
        .map(|s| {
            json!({
                "base": complex_value(s.point.base()),
                "state": state_components(&s.point)
                    .into_iter()
                    .map(complex_value)
                    .collect::<Vec<_>>(),
                "err": s.error_estimate,
            })
        })
        .collect();
    json!({
        "chart": chart,
        "params": params,
        "samples": samples,
    })
}

/// Decode the samples of either encoding into (base, state components, err)
/// triples, for the cross-format determinism guarantee.
pub fn decode_csv(text: &str) -> Result<Vec<(Complex64, Vec<Complex64>, f64)>, String> {
    let mut lines = text.lines();
    let _header = lines.next().ok_or("empty csv")?;
    let mut out = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("bad field {f}: {e}")))
            .collect::<Result<_, _>>()?;
        if fields.len() < 3 || fields.len() % 2 == 0 {
            return Err(format!("malformed row '{line}'"));
        }
        let base = Complex64::new(fields[0], fields[1]);
        let state: Vec<Complex64> = fields[2..fields.len() - 1]
            .chunks(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        out.push((base, state, fields[fields.len() - 1]));
    }
    Ok(out)
}

pub fn decode_json(value: &Value) -> Result<Vec<(Complex64, Vec<Complex64>, f64)>, String> {
    let samples = value
        .get("samples")
        .and_then(|s| s.as_array())
        .ok_or("missing samples")?;
    let pair = |v: &Value| -> Result<Complex64, String> {
        let arr = v.as_array().ok_or("complex must be [re, im]")?;
        Ok(Complex64::new(
            arr[0].as_f64().ok_or("bad re")?,
            arr[1].as_f64().ok_or("bad im")?,
        ))
    };
    samples
        .iter()
        .map(|s| {
            let base = pair(s.get("base").ok_or("missing base")?)?;
            let state = s
                .get("state")
                .and_then(|v| v.as_array())
                .ok_or("missing state")?
                .iter()
                .map(pair)
                .collect::<Result<Vec<_>, _>>()?;
            let err = s.get("err").and_then(|e| e.as_f64()).ok_or("missing err")?;
            Ok((base, state, err))
        })
        .collect()
}
