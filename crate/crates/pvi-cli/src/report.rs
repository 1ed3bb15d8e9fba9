//! Verification report model: one record per identity checked, each carrying
//! the anchor string naming the identity, the measured residual, and the
//! threshold it was held to.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str, residual: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            residual,
            threshold,
            pass: residual.is_finite() && residual <= threshold,
        }
    }

    /// A check that asserts a quantity is bounded away from zero (negative
    /// controls): passes when the residual EXCEEDS the threshold.
    pub fn lower_bound(name: &str, anchor: &str, residual: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            residual,
            threshold,
            pass: residual.is_finite() && residual >= threshold,
        }
    }

    /// An infrastructure failure surfaced as a failing record.
    pub fn error(name: &str, anchor: &str, message: &str) -> Self {
        CheckRecord {
            name: format!("{name} [{message}]"),
            anchor: anchor.into(),
            residual: f64::NAN,
            threshold: 0.0,
            pass: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub overall_pass: bool,
}

impl VerificationReport {
    /// Assemble a report: records are sorted by name so concurrent or
    /// reordered check execution cannot change the output bytes.
    pub fn new(suite: &str, mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.name.cmp(&b.name));
        let overall_pass = !records.is_empty() && records.iter().all(|r| r.pass);
        VerificationReport {
            suite: suite.into(),
            records,
            overall_pass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_tracks_every_record() {
        let good = CheckRecord::new("a", "x", 1e-10, 1e-8);
        let bad = CheckRecord::new("b", "y", 1e-6, 1e-8);
        assert!(good.pass);
        assert!(!bad.pass);
        let report = VerificationReport::new("s", vec![good.clone(), bad]);
        assert!(!report.overall_pass);
        let report2 = VerificationReport::new("s", vec![good]);
        assert!(report2.overall_pass);
    }

    #[test]
    fn records_are_sorted_and_nan_fails() {
        let r1 = CheckRecord::new("zz", "x", 0.0, 1.0);
        let r2 = CheckRecord::new("aa", "y", f64::NAN, 1.0);
        assert!(!r2.pass);
        let report = VerificationReport::new("s", vec![r1, r2]);
        assert_eq!(report.records[0].name, "aa");
    }
}
