//! Data sensor resource allocation (DSRA).
//!
//! Data sensors share the channels found idle. Sensor `n` transmits on
//! channel `k` for `t[n][k]` seconds at `p[n][k]` watts, delivering
//! `t W log2(1 + delta p)` bits. Each channel can be used for at most its
//! access cap, each sensor for at most the transmission phase, and every
//! sensor must deliver its demand. The total energy `sum t p` is bilinear:
//! convex in the times for fixed powers (an LP, [`solve_time_lp`]) and in the
//! powers for fixed times (water-filling, [`solve_power`]).

mod baselines;
mod jtpa;

use alloc::vec::Vec;

use thiserror::Error;

pub use baselines::{run_optimal_small, run_random_channels, MAX_OPTIMAL_CHANNELS, MAX_OPTIMAL_SENSORS};
pub use jtpa::{run_jtpa, run_jtpa_with, run_pmax_scheme, JtpaOptions, JtpaStart, JtpaTrace};

use crate::model::{max_access_time, ModelError, Scenario};
use crate::numerics::{
    solve_lp, solve_min_energy_power, LpProblem, LpStatus, Matrix, NumericsError, Optimize, RowSense,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("demands cannot be met; per-sensor achievable bits at maximum power: {max_bits:?}")]
    Infeasible { max_bits: Vec<f64> },
    #[error("sensor {sensor} needs {demand_bits} bits but at most {max_bits} fit in its transmission times")]
    SensorInfeasible {
        sensor: usize,
        demand_bits: f64,
        max_bits: f64,
    },
    #[error("no transmission times meet the demands at the given powers")]
    TimesInfeasible,
    #[error("channel {channel} is not one of the {channels} scenario channels")]
    UnknownChannel { channel: usize, channels: usize },
    #[error("instance with {sensors} sensors and {channels} channels exceeds the limit of {max_sensors} x {max_channels}")]
    TooLarge {
        sensors: usize,
        channels: usize,
        max_sensors: usize,
        max_channels: usize,
    },
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("parameter `{name}` = {value} is out of range")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("no feasible single-channel assignment after {attempts} draws")]
    NoFeasibleDraw { attempts: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Slack on rate and budget checks relative to the quantity checked.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DsraInstance {
    /// Scenario indices of the channels offered to data sensors.
    pub selected_channels: Vec<usize>,
    /// Access cap of each selected channel (s).
    pub access_caps: Vec<f64>,
    /// Transmission phase `T - tau_s` (s).
    pub phase_length: f64,
    /// N x K-bar gain-to-noise ratios (1/W).
    pub gains: Matrix,
    pub demands: Vec<f64>,
    pub p_max: f64,
    pub bandwidth_hz: f64,
}

impl DsraInstance {
    pub fn num_sensors(&self) -> usize {
        self.demands.len()
    }

    pub fn num_channels(&self) -> usize {
        self.selected_channels.len()
    }

    pub fn validate(&self) -> Result<(), AllocationError> {
        let (n, k) = (self.num_sensors(), self.num_channels());
        let dims = |what, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(AllocationError::DimensionMismatch {
                    what,
                    expected,
                    found,
                })
            }
        };
        dims("access caps", k, self.access_caps.len())?;
        dims("gain rows", n, self.gains.rows())?;
        if n > 0 {
            dims("gain columns", k, self.gains.cols())?;
        }
        let check = |name, value: f64, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(AllocationError::InvalidParameter { name, value })
            }
        };
        check("phase_length", self.phase_length, self.phase_length.is_finite() && self.phase_length > 0.0)?;
        check("p_max", self.p_max, self.p_max.is_finite() && self.p_max > 0.0)?;
        check("bandwidth_hz", self.bandwidth_hz, self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0)?;
        for &c in &self.access_caps {
            check("access_caps", c, c >= 0.0 && c <= self.phase_length * (1.0 + FEASIBILITY_TOL))?;
        }
        for g in self.gains.iter() {
            check("gains", g, g.is_finite() && g > 0.0)?;
        }
        for &d in &self.demands {
            check("demands", d, d.is_finite() && d >= 0.0)?;
        }
        Ok(())
    }

    /// Rate (bit/s) of sensor `n` on channel `k` at power `p`.
    pub fn rate(&self, n: usize, k: usize, p: f64) -> f64 {
        transmission_rate(self.gains[(n, k)], p, self.bandwidth_hz)
    }

    /// Upper bound on each sensor's deliverable bits at `p_max` when it has
    /// the channels to itself: the phase is filled greedily with the fastest
    /// channels, each up to its access cap.
    pub fn max_bits_per_sensor(&self) -> Vec<f64> {
        let k = self.num_channels();
        (0..self.num_sensors())
            .map(|n| {
                let mut rates: Vec<(f64, f64)> = (0..k)
                    .map(|c| (self.rate(n, c, self.p_max), self.access_caps[c]))
                    .collect();
                rates.sort_by(|a, b| b.0.total_cmp(&a.0));
                let mut left = self.phase_length;
                let mut bits = 0.0;
                for (r, cap) in rates {
                    let t = cap.min(left);
                    bits += r * t;
                    left -= t;
                    if left <= 0.0 {
                        break;
                    }
                }
                bits
            })
            .collect()
    }

    /// Errors if some sensor cannot meet its demand even alone at `p_max`.
    pub fn precheck(&self) -> Result<(), AllocationError> {
        self.validate()?;
        let max_bits = self.max_bits_per_sensor();
        if self
            .demands
            .iter()
            .zip(&max_bits)
            .any(|(&d, &m)| d > m * (1.0 + FEASIBILITY_TOL))
        {
            return Err(AllocationError::Infeasible { max_bits });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// N x K-bar transmission times (s).
    pub times: Matrix,
    /// N x K-bar transmit powers (W).
    pub powers: Matrix,
}

impl Allocation {
    pub fn zeros(sensors: usize, channels: usize) -> Self {
        Self {
            times: Matrix::zeros(sensors, channels),
            powers: Matrix::zeros(sensors, channels),
        }
    }

    /// Bits sensor `n` delivers.
    pub fn delivered_bits(&self, inst: &DsraInstance, n: usize) -> f64 {
        (0..inst.num_channels())
            .map(|k| self.times[(n, k)] * inst.rate(n, k, self.powers[(n, k)]))
            .sum()
    }

    /// Largest relative violation of any DSRA constraint.
    pub fn max_violation(&self, inst: &DsraInstance) -> f64 {
        let (n, k) = (inst.num_sensors(), inst.num_channels());
        let mut worst: f64 = 0.0;
        for c in 0..k {
            let used: f64 = self.times.column(c).sum();
            worst = worst.max((used - inst.access_caps[c]) / inst.phase_length);
        }
        for s in 0..n {
            let used: f64 = self.times.row(s).iter().sum();
            worst = worst.max((used - inst.phase_length) / inst.phase_length);
            let d = inst.demands[s];
            if d > 0.0 {
                worst = worst.max((d - self.delivered_bits(inst, s)) / d);
            }
        }
        for t in self.times.iter() {
            worst = worst.max(-t / inst.phase_length);
        }
        for p in self.powers.iter() {
            worst = worst.max(-p / inst.p_max).max((p - inst.p_max) / inst.p_max);
        }
        worst
    }
}

/// Total transmit energy `sum t p` (J).
pub fn total_energy(a: &Allocation) -> f64 {
    a.times.dot(&a.powers)
}

/// Shannon rate `W log2(1 + gain power)` in bit/s.
pub fn transmission_rate(gain: f64, power: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * libm::log2(1.0 + gain * power)
}

/// Offers the available channels to data sensors. When more channels are
/// available than transceivers, the ones with the longest mean idle sojourn
/// `1/mu` win, lower index first on ties.
pub fn select_channels(scenario: &Scenario, available: &[usize]) -> Result<DsraInstance, AllocationError> {
    scenario.validate()?;
    let k = scenario.num_channels;
    let mut chosen: Vec<usize> = Vec::with_capacity(available.len());
    for &c in available {
        if c >= k {
            return Err(AllocationError::UnknownChannel { channel: c, channels: k });
        }
        if !chosen.contains(&c) {
            chosen.push(c);
        }
    }
    chosen.sort_unstable();
    if chosen.len() > scenario.num_transceivers {
        // longer sojourn = smaller mu; stable sort keeps index order on ties
        chosen.sort_by(|&a, &b| scenario.channels[a].mu.total_cmp(&scenario.channels[b].mu));
        chosen.truncate(scenario.num_transceivers);
        chosen.sort_unstable();
    }
    let access_caps = chosen
        .iter()
        .map(|&c| {
            max_access_time(
                &scenario.channels[c],
                scenario.collision_bound,
                scenario.period_s,
                scenario.sensing_phase_s,
            )
        })
        .collect();
    let n = scenario.num_data_sensors;
    let gains = Matrix::from_fn(n, chosen.len(), |i, j| scenario.data_gain[(i, chosen[j])]);
    let bandwidth_hz = chosen
        .first()
        .map_or(scenario.channels[0].bandwidth_hz, |&c| scenario.channels[c].bandwidth_hz);
    Ok(DsraInstance {
        selected_channels: chosen,
        access_caps,
        phase_length: scenario.transmission_phase_s(),
        gains,
        demands: scenario.demands_bits.clone(),
        p_max: scenario.p_max_w,
        bandwidth_hz,
    })
}

fn check_matrix(inst: &DsraInstance, m: &Matrix, what: &'static str) -> Result<(), AllocationError> {
    if m.rows() != inst.num_sensors() || m.cols() != inst.num_channels() {
        return Err(AllocationError::DimensionMismatch {
            what,
            expected: inst.num_sensors() * inst.num_channels(),
            found: m.rows() * m.cols(),
        });
    }
    Ok(())
}

/// Minimum-energy transmission times for fixed powers.
///
/// Times are scaled by the phase length and each demand row by its demand,
/// which keeps the LP coefficients near unity.
pub fn solve_time_lp(inst: &DsraInstance, powers: &Matrix) -> Result<Matrix, AllocationError> {
    inst.validate()?;
    check_matrix(inst, powers, "powers")?;
    let (n, k) = (inst.num_sensors(), inst.num_channels());
    let tr = inst.phase_length;
    // only cells that can carry data get a variable
    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    for s in 0..n {
        if inst.demands[s] <= 0.0 {
            continue;
        }
        for c in 0..k {
            let p = powers[(s, c)];
            if !(0.0..=inst.p_max * (1.0 + FEASIBILITY_TOL)).contains(&p) {
                return Err(AllocationError::InvalidParameter { name: "powers", value: p });
            }
            let r = inst.rate(s, c, p);
            if r > 0.0 {
                cells.push((s, c, r));
            }
        }
    }
    let mut times = Matrix::zeros(n, k);
    let active: Vec<usize> = (0..n).filter(|&s| inst.demands[s] > 0.0).collect();
    if active.is_empty() {
        return Ok(times);
    }
    let nv = cells.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    let mut senses = Vec::new();
    for c in 0..k {
        let row: Vec<f64> = cells.iter().map(|&(_, cc, _)| if cc == c { 1.0 } else { 0.0 }).collect();
        if row.iter().any(|&v| v != 0.0) {
            rows.push(row);
            rhs.push(inst.access_caps[c] / tr);
            senses.push(RowSense::Le);
        }
    }
    for &s in &active {
        let row: Vec<f64> = cells.iter().map(|&(ss, _, _)| if ss == s { 1.0 } else { 0.0 }).collect();
        rows.push(row);
        rhs.push(1.0);
        senses.push(RowSense::Le);
        let d = inst.demands[s];
        let row: Vec<f64> = cells
            .iter()
            .map(|&(ss, _, r)| if ss == s { r * tr / d } else { 0.0 })
            .collect();
        rows.push(row);
        rhs.push(1.0);
        senses.push(RowSense::Ge);
    }
    let cost: Vec<f64> = cells.iter().map(|&(s, c, _)| powers[(s, c)] / inst.p_max).collect();
    let a = Matrix::from_rows(&rows).unwrap_or_else(|| Matrix::zeros(0, nv));
    let lp = LpProblem::new(Optimize::Minimize, cost, a, rhs, senses)?;
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(AllocationError::TimesInfeasible);
    }
    for (&(s, c, _), &v) in cells.iter().zip(&sol.values) {
        times[(s, c)] = v.max(0.0) * tr;
    }
    Ok(times)
}

/// Minimum-energy powers for fixed times, one water-filling per sensor.
pub fn solve_power(inst: &DsraInstance, times: &Matrix) -> Result<Matrix, AllocationError> {
    inst.validate()?;
    check_matrix(inst, times, "times")?;
    let (n, k) = (inst.num_sensors(), inst.num_channels());
    let mut powers = Matrix::zeros(n, k);
    for s in 0..n {
        let d = inst.demands[s];
        if d <= 0.0 {
            continue;
        }
        let row_t = times.row(s);
        let row_g = inst.gains.row(s);
        let max_bits = crate::numerics::max_achievable_bits(row_t, row_g, inst.bandwidth_hz, inst.p_max)?;
        if d > max_bits * (1.0 + FEASIBILITY_TOL) {
            return Err(AllocationError::SensorInfeasible {
                sensor: s,
                demand_bits: d,
                max_bits,
            });
        }
        // LP times may undershoot the demand by solver rounding
        let sol = solve_min_energy_power(row_t, row_g, d.min(max_bits), inst.bandwidth_hz, inst.p_max)?;
        powers.row_mut(s).copy_from_slice(&sol.powers);
    }
    Ok(powers)
}

/// Zeroes times on cells without power; they carry no data.
pub(crate) fn prune_idle_times(a: &mut Allocation) {
    for (t, p) in a.times.as_mut_slice().iter_mut().zip(a.powers.as_slice()) {
        if *p <= 0.0 {
            *t = 0.0;
        }
    }
}

pub(crate) fn zero_demand_allocation(inst: &DsraInstance) -> Allocation {
    Allocation::zeros(inst.num_sensors(), inst.num_channels())
}
