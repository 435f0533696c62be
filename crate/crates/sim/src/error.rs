use std::path::PathBuf;

use hcrsn_core::allocation::AllocationError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Core(#[from] hcrsn_core::Error),
}

impl SimError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Usage(_) => 2,
            SimError::Io { .. } | SimError::Format { .. } => 3,
            SimError::Infeasible(_) => 4,
            SimError::Core(e) => match e {
                hcrsn_core::Error::Allocation(
                    AllocationError::Infeasible { .. }
                    | AllocationError::SensorInfeasible { .. }
                    | AllocationError::TimesInfeasible
                    | AllocationError::NoFeasibleDraw { .. },
                ) => 4,
                _ => 2,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<AllocationError> for SimError {
    fn from(e: AllocationError) -> Self {
        SimError::Core(e.into())
    }
}

impl From<hcrsn_core::schedule::ScheduleError> for SimError {
    fn from(e: hcrsn_core::schedule::ScheduleError) -> Self {
        SimError::Core(e.into())
    }
}

impl From<hcrsn_core::model::ModelError> for SimError {
    fn from(e: hcrsn_core::model::ModelError) -> Self {
        SimError::Core(e.into())
    }
}
