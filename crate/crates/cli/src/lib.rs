//! Library side of the `pcsio` command-line tool.

pub mod commands;
pub mod config;
pub mod plot;

pub use commands::{
    cmd_check_bounded, cmd_fredholm, cmd_index, cmd_spectrum, CommandOutput, RunOptions, EXIT_MALFORMED, EXIT_NEGATIVE,
    EXIT_OK, EXIT_PRECONDITION,
};
pub use config::{AnalysisConfig, ConfigError, Loaded};

/// Pretty JSON with a trailing newline.
pub fn render_report(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}
