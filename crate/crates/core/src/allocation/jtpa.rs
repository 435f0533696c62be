//! Joint time and power allocation by alternate convex search.
//!
//! Each iteration re-solves the times for the current powers (an LP) and
//! then the powers for those times (water-filling). Both steps are exact
//! minimizations over one block, so the energy never increases; an update
//! that would increase it by rounding is rejected and ends the run.

use alloc::vec::Vec;

use super::{
    prune_idle_times, solve_power, solve_time_lp, total_energy, zero_demand_allocation, Allocation,
    AllocationError, DsraInstance,
};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JtpaStart {
    /// Every sensor splits the phase evenly over all channels, sharing each
    /// channel's cap with the other active sensors; powers by water-filling.
    Spread,
    /// All powers at `p_max`, times from the LP. This point is already
    /// partially optimal, so the search stops where it starts.
    PMax,
    /// Runs both and keeps the lower final energy, `Spread` on ties.
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JtpaOptions {
    /// Stop once an iteration lowers the energy by less than this fraction.
    pub stop_epsilon: f64,
    pub max_iterations: usize,
    pub start: JtpaStart,
}

impl Default for JtpaOptions {
    fn default() -> Self {
        Self {
            stop_epsilon: 1e-6,
            max_iterations: 50,
            start: JtpaStart::Best,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JtpaTrace {
    /// Energy of the starting point followed by the energy after each
    /// iteration (J).
    pub objectives: Vec<f64>,
    pub allocation: Allocation,
    pub energy: f64,
    pub converged: bool,
    /// Starting point the trace comes from.
    pub start: JtpaStart,
}

impl JtpaTrace {
    pub fn iterations(&self) -> usize {
        self.objectives.len().saturating_sub(1)
    }
}

/// Alternate convex search from the [`JtpaStart::Best`] starting point.
pub fn run_jtpa(inst: &DsraInstance, stop_epsilon: f64, max_iterations: usize) -> Result<JtpaTrace, AllocationError> {
    run_jtpa_with(
        inst,
        &JtpaOptions {
            stop_epsilon,
            max_iterations,
            start: JtpaStart::Best,
        },
    )
}

pub fn run_jtpa_with(inst: &DsraInstance, opts: &JtpaOptions) -> Result<JtpaTrace, AllocationError> {
    if !(opts.stop_epsilon >= 0.0) {
        return Err(AllocationError::InvalidParameter {
            name: "stop_epsilon",
            value: opts.stop_epsilon,
        });
    }
    inst.precheck()?;
    if inst.demands.iter().all(|&d| d == 0.0) {
        return Ok(JtpaTrace {
            objectives: alloc::vec![0.0],
            allocation: zero_demand_allocation(inst),
            energy: 0.0,
            converged: true,
            start: opts.start,
        });
    }
    match opts.start {
        JtpaStart::PMax => descend(inst, pmax_start(inst)?, opts, JtpaStart::PMax),
        JtpaStart::Spread => descend(inst, spread_start(inst)?, opts, JtpaStart::Spread),
        JtpaStart::Best => {
            let from_pmax = descend(inst, pmax_start(inst)?, opts, JtpaStart::PMax)?;
            match spread_start(inst).and_then(|a| descend(inst, a, opts, JtpaStart::Spread)) {
                Ok(spread) if spread.energy <= from_pmax.energy => Ok(spread),
                _ => Ok(from_pmax),
            }
        }
    }
}

/// Times from the LP at full power.
fn pmax_start(inst: &DsraInstance) -> Result<Allocation, AllocationError> {
    let powers = Matrix::filled(inst.num_sensors(), inst.num_channels(), inst.p_max);
    let times = solve_time_lp(inst, &powers).map_err(|e| match e {
        AllocationError::TimesInfeasible => AllocationError::Infeasible {
            max_bits: inst.max_bits_per_sensor(),
        },
        e => e,
    })?;
    let mut a = Allocation { times, powers };
    for (p, t) in a.powers.as_mut_slice().iter_mut().zip(a.times.as_slice()) {
        if *t <= 0.0 {
            *p = 0.0;
        }
    }
    Ok(a)
}

fn spread_start(inst: &DsraInstance) -> Result<Allocation, AllocationError> {
    let (n, k) = (inst.num_sensors(), inst.num_channels());
    let active = inst.demands.iter().filter(|&&d| d > 0.0).count().max(1);
    let mut times = Matrix::zeros(n, k);
    for s in 0..n {
        if inst.demands[s] > 0.0 {
            for c in 0..k {
                times[(s, c)] = (inst.access_caps[c] / active as f64).min(inst.phase_length / k as f64);
            }
        }
    }
    let powers = solve_power(inst, &times)?;
    let mut a = Allocation { times, powers };
    prune_idle_times(&mut a);
    Ok(a)
}

fn descend(
    inst: &DsraInstance,
    mut current: Allocation,
    opts: &JtpaOptions,
    start: JtpaStart,
) -> Result<JtpaTrace, AllocationError> {
    let mut z = total_energy(&current);
    let mut objectives = alloc::vec![z];
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let times = solve_time_lp(inst, &current.powers)?;
        let powers = solve_power(inst, &times)?;
        let mut next = Allocation { times, powers };
        prune_idle_times(&mut next);
        let z_next = total_energy(&next);
        if z_next > z {
            // rounding only; the exact step cannot increase the energy
            objectives.push(z);
            converged = true;
            break;
        }
        let decrease = z - z_next;
        current = next;
        objectives.push(z_next);
        let stalled = decrease <= opts.stop_epsilon * z;
        z = z_next;
        if stalled {
            converged = true;
            break;
        }
    }
    Ok(JtpaTrace {
        objectives,
        energy: total_energy(&current),
        allocation: current,
        converged,
        start,
    })
}

/// Alternate search from a given feasible allocation.
pub(crate) fn descend_from(
    inst: &DsraInstance,
    start: Allocation,
    stop_epsilon: f64,
    max_iterations: usize,
) -> Result<JtpaTrace, AllocationError> {
    let opts = JtpaOptions {
        stop_epsilon,
        max_iterations,
        start: JtpaStart::Spread,
    };
    descend(inst, start, &opts, JtpaStart::Spread)
}

/// Every sensor transmits at `p_max`; times from one LP solve.
pub fn run_pmax_scheme(inst: &DsraInstance) -> Result<(Allocation, f64), AllocationError> {
    inst.precheck()?;
    let a = pmax_start(inst)?;
    let e = total_energy(&a);
    Ok((a, e))
}
