//! Command-line front end for the `grover-noise` simulator.

use std::fmt;

pub mod commands;
pub mod config;
pub mod output;

/// Bad flags, unreadable or malformed config/input. Exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Maps an error chain to the process exit code.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<grover_noise::Error>() {
            return if e.is_config() { EXIT_USAGE } else { EXIT_NUMERICAL };
        }
    }
    EXIT_NUMERICAL
}
