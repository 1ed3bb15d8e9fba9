//! Library side of the command-line front end: complex-literal parsing,
//! deterministic output encodings, the verification report model, and the
//! full set of verification checks the `verify` command and the acceptance
//! suite run.

pub mod checks;
pub mod cxarg;
pub mod output;
pub mod report;

/// Process exit codes, stable for scripted use.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const VERIFICATION_FAILURE: i32 = 1;
    pub const NUMERIC_ERROR: i32 = 2;
    pub const POLE_ABORT: i32 = 3;
    pub const USAGE: i32 = 64;
}
