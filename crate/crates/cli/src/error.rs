use cartan_core::{PeriodError, PfaffError, PhysicsError, SampleError, TopologyError};
use thiserror::Error;

/// Failure classes, each mapped to a distinct process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Inconclusive(String),
    #[error("numerical singularity: {0}")]
    Singularity(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Inconclusive(_) => 2,
            CliError::Singularity(_) => 3,
        }
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Inconclusive { .. } => CliError::Inconclusive(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<PfaffError> for CliError {
    fn from(e: PfaffError) -> Self {
        match e {
            PfaffError::Sample(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<PhysicsError> for CliError {
    fn from(e: PhysicsError) -> Self {
        match e {
            PhysicsError::Sample(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        match e {
            PeriodError::Singularity { .. } | PeriodError::NearSingularity { .. } | PeriodError::LambdaIdenticallyZero => {
                CliError::Singularity(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> Self {
        CliError::Input(e.to_string())
    }
}
