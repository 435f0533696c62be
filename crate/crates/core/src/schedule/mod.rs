//! Spectrum sensor scheduling.
//!
//! Each spectrum sensor picks a subset of channels to sense in the coming
//! period. The schedule maximizes the detected average available time of the
//! channels (DAATC) subject to each sensor's harvested energy and each
//! channel's sensing-phase length. [`run_ce`] solves this with the
//! Cross-Entropy method; [`run_exhaustive`], [`run_greedy`] and
//! [`run_random`] are reference schedulers.

mod baselines;
mod ce;

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

pub use baselines::{run_exhaustive, run_greedy, run_random, MAX_EXHAUSTIVE_CELLS};
pub use ce::{elite_update, run_ce, sample_assignment, CeParams, CeTrace};

use crate::detection::single_detection_prob;
use crate::model::{Scenario, MAX_CHANNELS};
use crate::numerics::Matrix;

/// Relative slack for budget comparisons, absorbing rounding in sums such as
/// `5 * 1 ms <= 5 ms`.
const BUDGET_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("exhaustive search over {cells} cells exceeds the limit of {max}")]
    TooLarge { cells: usize, max: usize },
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid Cross-Entropy parameter `{name}` = {value}")]
    InvalidParams { name: &'static str, value: f64 },
    #[error("{channels} channels exceed the supported maximum of {max}")]
    TooManyChannels { channels: usize, max: usize },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// M x K binary schedule. Row `m` is stored as a bit mask with bit `k` set
/// when sensor `m` senses channel `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssignmentMatrix {
    channels: usize,
    rows: Vec<u32>,
}

impl AssignmentMatrix {
    pub fn zeros(sensors: usize, channels: usize) -> Self {
        assert!(channels <= MAX_CHANNELS);
        Self {
            channels,
            rows: vec![0; sensors],
        }
    }

    /// Builds from row masks; `None` if a mask has bits at or above `channels`.
    pub fn from_masks(masks: Vec<u32>, channels: usize) -> Option<Self> {
        if channels > MAX_CHANNELS || masks.iter().any(|&r| r >> channels != 0) {
            return None;
        }
        Some(Self {
            channels,
            rows: masks,
        })
    }

    pub fn from_rows(rows: &[&[u8]]) -> Option<Self> {
        let channels = rows.first().map_or(0, |r| r.len());
        let mut masks = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != channels || r.iter().any(|&v| v > 1) {
                return None;
            }
            masks.push(r.iter().enumerate().fold(0u32, |acc, (k, &v)| acc | (u32::from(v) << k)));
        }
        Self::from_masks(masks, channels)
    }

    pub fn num_sensors(&self) -> usize {
        self.rows.len()
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    pub fn get(&self, m: usize, k: usize) -> bool {
        self.rows[m] >> k & 1 == 1
    }

    pub fn set(&mut self, m: usize, k: usize, on: bool) {
        assert!(k < self.channels);
        if on {
            self.rows[m] |= 1 << k;
        } else {
            self.rows[m] &= !(1 << k);
        }
    }

    pub fn row_mask(&self, m: usize) -> u32 {
        self.rows[m]
    }

    pub fn set_row_mask(&mut self, m: usize, mask: u32) {
        assert!(mask >> self.channels == 0);
        self.rows[m] = mask;
    }

    pub fn masks(&self) -> &[u32] {
        &self.rows
    }

    /// Channels sensed by sensor `m`.
    pub fn channels_of(&self, m: usize) -> usize {
        self.rows[m].count_ones() as usize
    }

    /// Sensors assigned to channel `k`.
    pub fn sensors_on(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows.len()).filter(move |&m| self.get(m, k))
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.rows.len(), self.channels, |m, k| f64::from(u8::from(self.get(m, k))))
    }

    fn check_dims(&self, m: usize, k: usize) -> Result<(), ScheduleError> {
        if self.rows.len() != m {
            return Err(ScheduleError::DimensionMismatch {
                what: "assignment rows",
                expected: m,
                found: self.rows.len(),
            });
        }
        if self.channels != k {
            return Err(ScheduleError::DimensionMismatch {
                what: "assignment columns",
                expected: k,
                found: self.channels,
            });
        }
        Ok(())
    }
}

/// All `2^K` channel assignment vectors in ascending integer order; vector
/// `c` has channel `k` set iff bit `k` of `c` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelVectorSet {
    channels: usize,
    vectors: Vec<u32>,
}

impl ChannelVectorSet {
    pub fn new(channels: usize) -> Result<Self, ScheduleError> {
        if channels > MAX_CHANNELS {
            return Err(ScheduleError::TooManyChannels {
                channels,
                max: MAX_CHANNELS,
            });
        }
        Ok(Self {
            channels,
            vectors: (0..1u32 << channels).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    pub fn vectors(&self) -> &[u32] {
        &self.vectors
    }
}

/// M x C sampling distribution over channel vectors, one row per sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfMatrix {
    channels: usize,
    probs: Matrix,
}

impl PmfMatrix {
    pub fn uniform(sensors: usize, channels: usize) -> Self {
        let c = 1usize << channels;
        Self {
            channels,
            probs: Matrix::filled(sensors, c, 1.0 / c as f64),
        }
    }

    /// Wraps `probs`; `None` unless it has `2^channels` columns, non-negative
    /// entries and rows summing to 1 within 1e-12.
    pub fn from_matrix(probs: Matrix, channels: usize) -> Option<Self> {
        if channels > MAX_CHANNELS || probs.cols() != 1 << channels {
            return None;
        }
        for r in 0..probs.rows() {
            let row = probs.row(r);
            if row.iter().any(|&p| !(p >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return None;
            }
        }
        Some(Self { channels, probs })
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    pub fn probs(&self) -> &Matrix {
        &self.probs
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.probs.frobenius_distance(&other.probs)
    }
}

/// Scenario quantities the scheduling objective needs, precomputed once.
#[derive(Debug, Clone)]
pub struct SssProblem {
    sensors: usize,
    channels: usize,
    alphas: Vec<f64>,
    alpha_sum: f64,
    /// `1 - p_d` per (sensor, channel), row-major.
    miss: Vec<f64>,
    keep: f64,
    md_thr: f64,
    /// Channels each sensor can afford to sense.
    energy_cap: Vec<usize>,
    /// Sensors each channel's sensing phase can hold.
    time_cap: usize,
}

fn affordable(unit: f64, budget: f64) -> usize {
    if unit <= 0.0 {
        return usize::MAX;
    }
    let mut n = libm::floor(budget / unit).max(0.0) as usize;
    while (n as f64 + 1.0) * unit <= budget * (1.0 + BUDGET_SLACK) {
        n += 1;
    }
    while n > 0 && n as f64 * unit > budget * (1.0 + BUDGET_SLACK) {
        n -= 1;
    }
    n
}

impl SssProblem {
    pub fn new(scenario: &Scenario) -> Result<Self, ScheduleError> {
        scenario.validate()?;
        let (m, k) = (scenario.num_spectrum_sensors, scenario.num_channels);
        let cfg = scenario.detector();
        let alphas = scenario.alphas();
        let miss = (0..m * k)
            .map(|i| 1.0 - single_detection_prob(&cfg, scenario.pu_snr[(i / k, i % k)]))
            .collect();
        Ok(Self {
            sensors: m,
            channels: k,
            alpha_sum: alphas.iter().sum(),
            alphas,
            miss,
            keep: 1.0 - scenario.target_false_alarm,
            md_thr: scenario.misdetect_threshold,
            energy_cap: (0..m)
                .map(|i| affordable(scenario.sensing_energy_j, scenario.energy_budget_j(i)))
                .collect(),
            time_cap: affordable(scenario.mini_slot_s, scenario.sensing_phase_s),
        })
    }

    pub fn num_sensors(&self) -> usize {
        self.sensors
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Penalty charged once per violated constraint family, `-sum(alpha)`.
    pub fn penalty(&self) -> f64 {
        -self.alpha_sum
    }

    fn channel_value(&self, masks: &[u32], k: usize) -> f64 {
        let mut n = 0;
        let mut miss = 1.0;
        for (m, &mask) in masks.iter().enumerate() {
            if mask >> k & 1 == 1 {
                n += 1;
                miss *= self.miss[m * self.channels + k];
            }
        }
        if n > 0 && miss < self.md_thr {
            self.alphas[k] * libm::pow(self.keep, n as f64)
        } else {
            0.0
        }
    }

    pub(crate) fn daatc_masks(&self, masks: &[u32]) -> f64 {
        (0..self.channels).map(|k| self.channel_value(masks, k)).sum()
    }

    pub(crate) fn energy_ok(&self, masks: &[u32]) -> bool {
        masks
            .iter()
            .zip(&self.energy_cap)
            .all(|(&r, &cap)| r.count_ones() as usize <= cap)
    }

    pub(crate) fn time_ok(&self, masks: &[u32]) -> bool {
        (0..self.channels).all(|k| masks.iter().filter(|&&r| r >> k & 1 == 1).count() <= self.time_cap)
    }

    pub(crate) fn penalized_masks(&self, masks: &[u32]) -> f64 {
        let mut v = self.daatc_masks(masks);
        if !self.energy_ok(masks) {
            v += self.penalty();
        }
        if !self.time_ok(masks) {
            v += self.penalty();
        }
        v
    }

    fn check(&self, j: &AssignmentMatrix) -> Result<(), ScheduleError> {
        j.check_dims(self.sensors, self.channels)
    }

    pub fn daatc(&self, j: &AssignmentMatrix) -> Result<f64, ScheduleError> {
        self.check(j)?;
        Ok(self.daatc_masks(j.masks()))
    }

    pub fn penalized(&self, j: &AssignmentMatrix) -> Result<f64, ScheduleError> {
        self.check(j)?;
        Ok(self.penalized_masks(j.masks()))
    }

    /// Whether `j` meets both the energy and the sensing-time budgets.
    pub fn is_feasible(&self, j: &AssignmentMatrix) -> Result<bool, ScheduleError> {
        self.check(j)?;
        Ok(self.energy_ok(j.masks()) && self.time_ok(j.masks()))
    }
}

/// Detected average available time of the channels under schedule `j`.
pub fn daatc_objective(j: &AssignmentMatrix, scenario: &Scenario) -> Result<f64, ScheduleError> {
    SssProblem::new(scenario)?.daatc(j)
}

/// DAATC plus `-sum(alpha)` for each violated budget family.
pub fn penalized_objective(j: &AssignmentMatrix, scenario: &Scenario) -> Result<f64, ScheduleError> {
    SssProblem::new(scenario)?.penalized(j)
}
