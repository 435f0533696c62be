//! Minimum-energy power allocation for one transmitter over several channels
//! with fixed transmission times.
//!
//! The problem `min Σ t_k p_k` s.t. `Σ t_k W log2(1 + δ_k p_k) >= D`,
//! `0 <= p_k <= p_max` is solved by water-filling: stationarity of the
//! Lagrangian gives `p_k = clamp(L - 1/δ_k, 0, p_max)` with water level
//! `L = νW/ln 2`, independent of `t_k`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use super::NumericsError;

#[derive(Debug, Clone, PartialEq)]
pub struct MinEnergyPower {
    pub powers: Vec<f64>,
    /// Water level `L` in watts.
    pub water_level: f64,
    /// Multiplier `ν` of the rate constraint, in joules per bit.
    pub multiplier: f64,
    pub energy: f64,
}

fn check_inputs(times: &[f64], gains: &[f64], bandwidth_hz: f64, p_max: f64) -> Result<(), NumericsError> {
    if times.len() != gains.len() {
        return Err(NumericsError::DimensionMismatch {
            what: "channel gains",
            expected: times.len(),
            found: gains.len(),
        });
    }
    let domain = |op, value: f64, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(NumericsError::Domain { op, value })
        }
    };
    for &t in times {
        domain("transmission time", t, t.is_finite() && t >= 0.0)?;
    }
    for &g in gains {
        domain("channel gain", g, g.is_finite() && g > 0.0)?;
    }
    domain("bandwidth", bandwidth_hz, bandwidth_hz.is_finite() && bandwidth_hz > 0.0)?;
    domain("maximum power", p_max, p_max.is_finite() && p_max > 0.0)
}

/// Bits deliverable when every channel with positive time runs at `p_max`.
pub fn max_achievable_bits(
    times: &[f64],
    gains: &[f64],
    bandwidth_hz: f64,
    p_max: f64,
) -> Result<f64, NumericsError> {
    check_inputs(times, gains, bandwidth_hz, p_max)?;
    Ok(times
        .iter()
        .zip(gains)
        .map(|(&t, &g)| t * bandwidth_hz * libm::log2(1.0 + g * p_max))
        .sum())
}

fn bits_at_level(times: &[f64], gains: &[f64], w: f64, p_max: f64, level: f64) -> f64 {
    times
        .iter()
        .zip(gains)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, &g)| {
            let p = (level - 1.0 / g).clamp(0.0, p_max);
            t * w * libm::log1p(g * p) / LN_2
        })
        .sum()
}

pub fn solve_min_energy_power(
    times: &[f64],
    gains: &[f64],
    demand_bits: f64,
    bandwidth_hz: f64,
    p_max: f64,
) -> Result<MinEnergyPower, NumericsError> {
    check_inputs(times, gains, bandwidth_hz, p_max)?;
    if !(demand_bits.is_finite() && demand_bits >= 0.0) {
        return Err(NumericsError::Domain {
            op: "demand bits",
            value: demand_bits,
        });
    }
    let k = times.len();
    if demand_bits == 0.0 {
        return Ok(MinEnergyPower {
            powers: vec![0.0; k],
            water_level: 0.0,
            multiplier: 0.0,
            energy: 0.0,
        });
    }
    let w = bandwidth_hz;
    let max_bits = max_achievable_bits(times, gains, w, p_max)?;
    if demand_bits > max_bits * (1.0 + 1e-12) {
        return Err(NumericsError::PowerInfeasible {
            demand_bits,
            max_bits,
        });
    }

    let used = || times.iter().zip(gains).filter(|(&t, _)| t > 0.0);
    let mut lo = used().map(|(_, &g)| 1.0 / g).fold(f64::INFINITY, f64::min);
    let mut hi = used().map(|(_, &g)| 1.0 / g + p_max).fold(0.0, f64::max);
    let level = if demand_bits >= max_bits {
        hi
    } else {
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if bits_at_level(times, gains, w, p_max, mid) < demand_bits {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        polish_level(times, gains, w, p_max, demand_bits, hi)
    };

    let powers: Vec<f64> = times
        .iter()
        .zip(gains)
        .map(|(&t, &g)| if t > 0.0 { (level - 1.0 / g).clamp(0.0, p_max) } else { 0.0 })
        .collect();
    let energy = times.iter().zip(&powers).map(|(t, p)| t * p).sum();
    Ok(MinEnergyPower {
        powers,
        water_level: level,
        multiplier: level * LN_2 / w,
        energy,
    })
}

/// Given a bracketing level, solves the rate equation in closed form for the
/// active set it implies. Falls back to `level` if the closed form leaves
/// that set or does not meet the demand.
fn polish_level(times: &[f64], gains: &[f64], w: f64, p_max: f64, demand: f64, level: f64) -> f64 {
    let mut saturated_bits = 0.0;
    let mut interior_weight = 0.0;
    let mut interior_log_gain = 0.0;
    for (&t, &g) in times.iter().zip(gains) {
        if t <= 0.0 {
            continue;
        }
        let p = level - 1.0 / g;
        if p >= p_max {
            saturated_bits += t * w * libm::log2(1.0 + g * p_max);
        } else if p > 0.0 {
            interior_weight += t * w;
            interior_log_gain += t * w * libm::log2(g);
        }
    }
    if interior_weight == 0.0 {
        return level;
    }
    let candidate = libm::exp2((demand - saturated_bits - interior_log_gain) / interior_weight);
    let same_set = times.iter().zip(gains).filter(|(&t, _)| t > 0.0).all(|(_, &g)| {
        let (a, b) = (level - 1.0 / g, candidate - 1.0 / g);
        (a >= p_max) == (b >= p_max) && (a > 0.0) == (b > 0.0)
    });
    if same_set && bits_at_level(times, gains, w, p_max, candidate) >= demand * (1.0 - 1e-12) {
        candidate
    } else {
        level
    }
}

/// Largest KKT stationarity violation of `sol` for the given instance.
pub fn kkt_residual(sol: &MinEnergyPower, times: &[f64], gains: &[f64], w: f64, p_max: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for ((&p, &t), &g) in sol.powers.iter().zip(times).zip(gains) {
        if t <= 0.0 {
            continue;
        }
        let ratio = sol.multiplier * w * g / ((1.0 + g * p) * LN_2);
        let v = if p <= 0.0 {
            ratio - 1.0
        } else if p >= p_max {
            1.0 - ratio
        } else {
            (1.0 - ratio).abs()
        };
        worst = worst.max(v);
    }
    worst
}
