//! Experiment harness: configuration, execution and CSV output.

pub mod config;
mod output;
mod run;

pub use config::{Center, Experiment, ExperimentConfig, Policy, Quadrature};
pub use output::config_hash;
pub use run::{run, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Numerical(knot_energy::Error),
}

impl CliError {
    /// 2 for configuration and input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<knot_energy::Error> for CliError {
    fn from(e: knot_energy::Error) -> Self {
        use knot_energy::Error as E;
        match e {
            E::InvalidCurve(_)
            | E::InvalidArgument(_)
            | E::EpsOutOfRange(_)
            | E::BadExponents { .. }
            | E::GridTooSmall { .. }
            | E::DimensionMismatch { .. }
            | E::ROutOfRange(_) => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}
