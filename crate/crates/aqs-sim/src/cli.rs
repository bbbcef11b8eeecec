//! Command-line front end: configuration loading, transcript and report
//! persistence, and the command implementations behind the binary.
//!
//! Exit codes are a stable contract: 0 for success, 1 for a golden-value
//! mismatch in the demo, 2 for a protocol rejection (or a failed attack),
//! and 64 for configuration or usage errors.

pub mod commands;
pub mod config;
pub mod files;

pub use commands::{
    cmd_demo_example, cmd_run_attack, cmd_run_honest, cmd_swap_stats, cmd_tamper_stats,
};

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_GOLDEN_MISMATCH: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;

/// Anything that prevents a command from running; always exits with
/// [`EXIT_CONFIG`].
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write `{path}`: {source}")]
    WriteFile {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("`{path}`: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("{0}")]
    Invalid(String),
}
