use thiserror::Error;

use crate::allocation::AllocationError;
use crate::model::ModelError;
use crate::numerics::NumericsError;
use crate::schedule::ScheduleError;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}
