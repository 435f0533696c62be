//! Resource allocation for heterogeneous cognitive radio sensor networks.
//!
//! Two optimizers run in tandem once per period:
//!
//! * [`schedule`] assigns energy-harvesting spectrum sensors to licensed
//!   channels with the Cross-Entropy method, maximizing the detected average
//!   available time of the channels (DAATC) subject to per-sensor harvested
//!   energy and per-channel sensing-time budgets.
//! * [`allocation`] gives battery-powered data sensors transmission time and
//!   power on the channels found idle, minimizing their total energy by
//!   alternate convex search over a linear time subproblem and a water-filling
//!   power subproblem.
//!
//! Supporting pieces are the exponential ON-OFF primary-user model
//! ([`model`]), the energy-detector statistics with Logic-OR fusion
//! ([`detection`]) and self-contained numerical kernels ([`numerics`]).
//!
//! The crate is `no_std` and only needs `alloc`. Units are SI everywhere:
//! seconds, watts, joules, hertz, bits, and linear (not dB) SNRs and gains.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod allocation;
pub mod detection;
pub mod error;
pub mod model;
pub mod numerics;
pub mod schedule;

pub use error::Error;
pub use numerics::{Matrix, RngStream};
