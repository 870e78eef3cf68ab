//! Configuration, sweeps and result files for the `leosec` command.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{Config, Density, Mode, PointSpec, Preset, SweepConfig, SweepVariable};
pub use output::Format;
pub use sweep::{
    argmax_altitudes, evaluate, run_point, run_sweep, sweep_fig2, sweep_fig3, Evaluation, Quantity,
    Record, SeriesArgmax, Status, SweepOutput,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] leo_secrecy::Error),
}

/// Parses the `WORKERS` value: a positive integer.
pub fn parse_workers(raw: &str) -> Result<usize, CliError> {
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(CliError::Config(format!(
            "WORKERS must be a positive integer, got {raw:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workers_parsing() {
        assert_eq!(parse_workers("4").unwrap(), 4);
        assert_eq!(parse_workers(" 12\n").unwrap(), 12);
        for bad in ["0", "-1", "two", ""] {
            assert!(parse_workers(bad).is_err());
        }
    }
}
