//! Scenario generation, period simulation and the experiment runner for
//! [`hcrsn_core`].
//!
//! Scenario files are TOML with units in the key names (see
//! [`scenario::scenario_to_toml`]); experiment output is CSV.

pub mod error;
pub mod experiment;
pub mod scenario;
pub mod simulate;

pub use error::SimError;
pub use experiment::{run_experiment, ExperimentConfig, ExperimentId};
pub use scenario::{generate_scenario, load_scenario, save_scenario, Counts, GeometrySpec, Settings};
pub use simulate::{simulate_period, PeriodOutcome};
