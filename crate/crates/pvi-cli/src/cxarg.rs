//! Parsing of complex literals from the command line: "1.07i", "0.5+1.3i",
//! "-2", "1e-3-2.5e-1i", "i", "-i".

use num_complex::Complex64;

pub fn parse_complex(input: &str) -> Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('I')) {
        // Find the sign splitting real and imaginary parts: the last '+' or
        // '-' that is neither leading nor part of an exponent.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let ch = bytes[k];
            if (ch == b'+' || ch == b'-')
                && !matches!(bytes[k - 1], b'e' | b'E')
            {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = body[..k]
                    .parse()
                    .map_err(|_| format!("bad real part in '{input}'"))?;
                let im = parse_im(&body[k..], input)?;
                Ok(Complex64::new(re, im))
            }
            None => Ok(Complex64::new(0.0, parse_im(body, input)?)),
        }
    } else {
        let re: f64 = s
            .parse()
            .map_err(|_| format!("bad numeric literal '{input}'"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

fn parse_im(text: &str, original: &str) -> Result<f64, String> {
    match text {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => other
            .parse()
            .map_err(|_| format!("bad imaginary part in '{original}'")),
    }
}

/// Parse a comma-separated list of complex literals.
pub fn parse_complex_list(input: &str) -> Result<Vec<Complex64>, String> {
    input.split(',').map(parse_complex).collect()
}

/// Parse a semicolon-separated polyline of complex literals.
pub fn parse_path(input: &str) -> Result<Vec<Complex64>, String> {
    input.split(';').map(parse_complex).collect()
}
