//! Numerical kernels shared by the optimizers.
//!
//! Everything here is a pure function of its inputs. Randomness always comes
//! from an explicitly passed [`RngStream`].

pub(crate) mod gaussian;
mod lp;
mod matrix;
mod power;
mod rng;

pub use gaussian::{gaussian_tail_q, gaussian_tail_q_inv};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus, Optimize, RowSense};
pub use matrix::Matrix;
pub use power::{kkt_residual, max_achievable_bits, solve_min_energy_power, MinEnergyPower};
pub use rng::RngStream;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("{op}: argument {value} outside the function domain")]
    Domain { op: &'static str, value: f64 },
    #[error("{what}: expected length {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("variable {index}: lower bound exceeds upper bound")]
    InvalidBounds { index: usize },
    #[error("simplex did not terminate within {iterations} pivots")]
    IterationLimit { iterations: usize },
    #[error("simplex lost feasibility by {violation} to rounding")]
    Unstable { violation: f64 },
    #[error("demand of {demand_bits} bits exceeds the achievable {max_bits} bits")]
    PowerInfeasible { demand_bits: f64, max_bits: f64 },
}
