//! Command-line runner: config parsing, run orchestration and result files.

pub mod commands;
pub mod output;
pub mod settings;

pub use commands::{execute, Command, Report};
pub use settings::{parse_config, parse_config_str, parse_override, ConfigError, RunSettings};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const ACCEPTANCE_FAILURE: u8 = 1;
    pub const CONFIG_ERROR: u8 = 2;
    /// A run that could not complete for reasons other than configuration.
    pub const RUN_ERROR: u8 = 3;
}

