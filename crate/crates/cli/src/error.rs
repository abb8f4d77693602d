use std::path::Path;

use thiserror::Error;

/// Exit status for configuration problems.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status for invalid channels or scheme/channel mismatches.
pub const EXIT_VALIDATION: u8 = 3;
/// Exit status for failed audits or violated bounds.
pub const EXIT_ASSERTION: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config-parse: {0}")]
    Config(String),
    #[error("{}: {}", core_category(.0), .0)]
    Core(#[from] ejs_core::Error),
    #[error("config-parse: {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Core(e) if is_config_error(e) => EXIT_CONFIG,
            CliError::Core(_) => EXIT_VALIDATION,
        }
    }
}

fn is_config_error(e: &ejs_core::Error) -> bool {
    matches!(e, ejs_core::Error::ParameterDomain(_) | ejs_core::Error::UnknownScheme(_))
}

fn core_category(e: &ejs_core::Error) -> &'static str {
    use ejs_core::Error as E;
    match e {
        E::SchemeChannelMismatch { .. } | E::NotBinaryInput(_) => "scheme-channel-mismatch",
        E::EmptyMatrix
        | E::RaggedRow { .. }
        | E::NonStochasticRow { .. }
        | E::NegativeEntry { .. }
        | E::DegenerateChannel
        | E::InfiniteC2
        | E::NoConvergence { .. }
        | E::ChannelFormat(_) => "channel-invalid",
        _ if is_config_error(e) => "config-parse",
        _ => "validation",
    }
}
