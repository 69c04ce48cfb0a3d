//! Scenario runner behind the `trawl` binary.

// NaN must fail every range check, hence `!(x > 0)` style comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{load_scenario, parse_scenario, Scenario};
pub use pipeline::{run_scenario, simulate_scenario, Overrides};
pub use report::{emit_plotdata, parse_plotdata, Report, Row};

/// Threads used when `--threads` is absent.
pub const THREADS_ENV: &str = "TRAWL_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("run failed: {0}")]
    Run(#[from] trawl_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub(crate) fn config(field: &str, e: trawl_core::Error) -> Self {
        Self::Config(format!("{field}: {e}"))
    }

    /// 2 for bad input, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) => 2,
            Self::Run(_) | Self::Io(_) => 3,
        }
    }
}
