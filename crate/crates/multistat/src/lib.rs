//! File formats, the JSON report and the command line driver for
//! `multistat-core`.
//!
//! Exit codes: 0 success, 1 internal or postcondition failure, 2 malformed
//! input, 3 failed network hypothesis, 4 inconclusive witness search.

pub mod cli;
pub mod exec;
pub mod io;
pub mod report;

pub use multistat_core as core;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(m: impl Into<String>) -> Self {
        CliError { code: EXIT_PARSE, message: m.into() }
    }

    pub fn hypothesis(m: impl Into<String>) -> Self {
        CliError { code: EXIT_HYPOTHESIS, message: m.into() }
    }

    pub fn internal(m: impl Into<String>) -> Self {
        CliError { code: EXIT_INTERNAL, message: m.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
