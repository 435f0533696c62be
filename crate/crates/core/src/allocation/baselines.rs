//! Reference allocators: random single channels and the global optimum of
//! small instances.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use super::jtpa::descend_from;
use super::{
    prune_idle_times, run_jtpa, solve_power, total_energy, Allocation, AllocationError, DsraInstance, FEASIBILITY_TOL,
};
use crate::numerics::{solve_lp, LpProblem, LpStatus, Matrix, Optimize, RngStream, RowSense};

pub const MAX_OPTIMAL_SENSORS: usize = 4;
pub const MAX_OPTIMAL_CHANNELS: usize = 4;

const RANDOM_ATTEMPTS: usize = 100;

/// `2^s (s ln2 - 1) + 1`, which equals `-delta f'(t)` at `s = a/t` for the
/// single-channel energy `f(t) = t (2^(a/t) - 1) / delta`.
fn marginal(s: f64) -> f64 {
    let x = s * LN_2;
    x * libm::exp2(s) - libm::expm1(x)
}

fn marginal_inv(y: f64) -> f64 {
    let mut hi = 1.0;
    while marginal(hi) < y {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if marginal(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Splits one channel's access cap among the sensors assigned to it,
/// minimizing their total energy. `a` holds demands in bits per hertz.
/// Returns `None` when even full power does not fit in the cap.
fn split_channel(a: &[f64], gains: &[f64], cap: f64, phase: f64, p_max: f64) -> Option<Vec<f64>> {
    let t_min: Vec<f64> = a
        .iter()
        .zip(gains)
        .map(|(&a, &g)| a / libm::log2(1.0 + g * p_max))
        .collect();
    let need: f64 = t_min.iter().sum();
    let limit = cap.min(phase * a.len() as f64);
    if need > cap * (1.0 + FEASIBILITY_TOL) || t_min.iter().any(|&t| t > phase * (1.0 + FEASIBILITY_TOL)) {
        return None;
    }
    let at = |theta: f64| -> Vec<f64> {
        a.iter()
            .zip(gains)
            .zip(&t_min)
            .map(|((&a, &g), &tm)| (a / marginal_inv(theta * g)).clamp(tm, phase))
            .collect()
    };
    if phase * a.len() as f64 <= cap {
        return Some(vec![phase; a.len()]);
    }
    // the multiplier of the cap, bracketed in log space
    let theta_hi = a
        .iter()
        .zip(gains)
        .zip(&t_min)
        .map(|((&a, &g), &tm)| marginal(a / tm) / g)
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (libm::log(theta_hi) - 700.0, libm::log(theta_hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(libm::exp(mid)).iter().sum::<f64>() > limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(at(libm::exp(hi)))
}

/// Each sensor with data draws one channel uniformly and transmits only
/// there; times and powers are then optimal for that restriction. Draws
/// that cannot carry the demands are redrawn, up to 100 times.
pub fn run_random_channels(inst: &DsraInstance, rng: &mut RngStream) -> Result<(Allocation, f64), AllocationError> {
    inst.precheck()?;
    let (n, k) = (inst.num_sensors(), inst.num_channels());
    let active: Vec<usize> = (0..n).filter(|&s| inst.demands[s] > 0.0).collect();
    if active.is_empty() {
        return Ok((Allocation::zeros(n, k), 0.0));
    }
    if k == 0 {
        return Err(AllocationError::NoFeasibleDraw { attempts: 0 });
    }
    'draw: for _ in 0..RANDOM_ATTEMPTS {
        let picks: Vec<usize> = active.iter().map(|_| rng.below(k as u64) as usize).collect();
        let mut alloc = Allocation::zeros(n, k);
        for c in 0..k {
            let group: Vec<usize> = active
                .iter()
                .zip(&picks)
                .filter(|(_, &p)| p == c)
                .map(|(&s, _)| s)
                .collect();
            if group.is_empty() {
                continue;
            }
            let a: Vec<f64> = group.iter().map(|&s| inst.demands[s] / inst.bandwidth_hz).collect();
            let g: Vec<f64> = group.iter().map(|&s| inst.gains[(s, c)]).collect();
            let Some(times) = split_channel(&a, &g, inst.access_caps[c], inst.phase_length, inst.p_max) else {
                continue 'draw;
            };
            for ((&s, &t), (&a, &g)) in group.iter().zip(&times).zip(a.iter().zip(&g)) {
                alloc.times[(s, c)] = t;
                alloc.powers[(s, c)] = (libm::expm1(a / t * LN_2) / g).min(inst.p_max);
            }
        }
        let e = total_energy(&alloc);
        return Ok((alloc, e));
    }
    Err(AllocationError::NoFeasibleDraw {
        attempts: RANDOM_ATTEMPTS,
    })
}

const MAX_CUT_ROUNDS: usize = 200;

#[derive(Default)]
struct RowSet {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    senses: Vec<RowSense>,
}

impl RowSet {
    fn push(&mut self, row: Vec<f64>, sense: RowSense, rhs: f64) {
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }
}

/// Power above the linear zero-rate cost, `h(s) - h'(0) s`, and its slope.
fn excess_power(s: f64, w: f64, gain: f64) -> (f64, f64) {
    let x = s / w * LN_2;
    // expm1(x) - x cancels badly for small x; sum its series instead
    let excess = if x < 0.1 {
        let (mut term, mut sum) = (x, 0.0);
        for n in 2..=12 {
            term *= x / n as f64;
            sum += term;
        }
        sum
    } else {
        libm::expm1(x) - x
    };
    (excess / gain, LN_2 / (w * gain) * libm::expm1(x))
}

/// Global minimum energy of a small instance.
///
/// In the variables `(t, b)`, time and bits per cell, the energy
/// `t h(b/t)` with `h(s) = (2^(s/W) - 1)/delta` is the perspective of a
/// convex function and every constraint is linear, so the problem is jointly
/// convex. The energy is split into the linear part `h'(0) b` and an excess
/// `u >= t phi(b/t)`, `phi(s) = h(s) - h'(0) s`, which is solved by cutting
/// planes: each tangent of `phi` at `s0` lifts to the linear bound
/// `u >= t (phi(s0) - s0 phi'(s0)) + b phi'(s0)`. The LP over the cuts gives
/// a lower bound, and its times, polished by alternate search, an achievable
/// energy. Cuts are added at the LP's rates until the two agree to 1e-9.
/// If an LP round fails numerically the best point so far is kept, and the
/// result is never worse than [`run_jtpa`].
pub fn run_optimal_small(inst: &DsraInstance) -> Result<(Allocation, f64), AllocationError> {
    inst.validate()?;
    let (n, k) = (inst.num_sensors(), inst.num_channels());
    if n > MAX_OPTIMAL_SENSORS || k > MAX_OPTIMAL_CHANNELS {
        return Err(AllocationError::TooLarge {
            sensors: n,
            channels: k,
            max_sensors: MAX_OPTIMAL_SENSORS,
            max_channels: MAX_OPTIMAL_CHANNELS,
        });
    }
    inst.precheck()?;
    let active: Vec<usize> = (0..n).filter(|&s| inst.demands[s] > 0.0).collect();
    if active.is_empty() {
        return Ok((Allocation::zeros(n, k), 0.0));
    }
    let w = inst.bandwidth_hz;
    let tr = inst.phase_length;
    let cells: Vec<(usize, usize)> = active.iter().flat_map(|&s| (0..k).map(move |c| (s, c))).collect();
    // variables per cell: t / tr, b / demand, u / u0[cell]
    let nv = 3 * cells.len();
    let best_gain = |s: usize| inst.gains.row(s).iter().fold(0.0f64, |m, &g| m.max(g));
    // energy scale: all bits at the best channel's zero-rate cost
    let e0: f64 = active
        .iter()
        .map(|&s| inst.demands[s] * LN_2 / (w * best_gain(s)))
        .sum();
    // per cell: excess of sending all the sensor's bits over the whole phase
    let u0: Vec<f64> = cells
        .iter()
        .map(|&(s, c)| (tr * excess_power(inst.demands[s] / tr, w, inst.gains[(s, c)]).0).max(e0 * 1e-15))
        .collect();

    let mut rows = RowSet::default();
    for c in 0..k {
        let mut row = vec![0.0; nv];
        for (i, &(_, cc)) in cells.iter().enumerate() {
            if cc == c {
                row[3 * i] = 1.0;
            }
        }
        rows.push(row, RowSense::Le, inst.access_caps[c] / tr);
    }
    for &s in &active {
        let mut time_row = vec![0.0; nv];
        let mut bits_row = vec![0.0; nv];
        for (i, &(ss, _)) in cells.iter().enumerate() {
            if ss == s {
                time_row[3 * i] = 1.0;
                bits_row[3 * i + 1] = 1.0;
            }
        }
        rows.push(time_row, RowSense::Le, 1.0);
        rows.push(bits_row, RowSense::Ge, 1.0);
    }
    for (i, &(s, c)) in cells.iter().enumerate() {
        let mut row = vec![0.0; nv];
        row[3 * i + 1] = 1.0;
        row[3 * i] = -inst.rate(s, c, inst.p_max) * tr / inst.demands[s];
        rows.push(row, RowSense::Le, 0.0);
    }
    let cut = |i: usize, s0: f64| -> Vec<f64> {
        let (s, c) = cells[i];
        let (value, slope) = excess_power(s0, w, inst.gains[(s, c)]);
        let mut row = vec![0.0; nv];
        row[3 * i + 2] = 1.0;
        row[3 * i] = -(value - s0 * slope) * tr / u0[i];
        row[3 * i + 1] = -slope * inst.demands[s] / u0[i];
        row
    };
    for (i, &(s, c)) in cells.iter().enumerate() {
        // tangents around the rate that fills the whole phase
        let top = inst.rate(s, c, inst.p_max);
        let mut s0 = inst.demands[s] / tr / 8.0;
        while s0 <= top && s0 <= 64.0 * inst.demands[s] / tr {
            rows.push(cut(i, s0), RowSense::Ge, 0.0);
            s0 *= 2.0;
        }
    }

    let mut cost = vec![0.0; nv];
    for (i, &(s, c)) in cells.iter().enumerate() {
        cost[3 * i + 1] = LN_2 / (w * inst.gains[(s, c)]) * inst.demands[s] / e0;
        cost[3 * i + 2] = u0[i] / e0;
    }
    let mut best: Option<(Allocation, f64)> = None;
    for _ in 0..MAX_CUT_ROUNDS {
        let a = Matrix::from_rows(&rows.rows).expect("rectangular rows");
        let lp = LpProblem::new(Optimize::Minimize, cost.clone(), a, rows.rhs.clone(), rows.senses.clone())?;
        // a failed round ends the cuts; the incumbent and the JTPA points below still stand
        let Ok(sol) = solve_lp(&lp) else { break };
        if sol.status != LpStatus::Optimal {
            break;
        }
        let lower = sol.objective * e0;
        let mut times = Matrix::zeros(n, k);
        let mut rates = vec![0.0; cells.len()];
        for (i, &(s, c)) in cells.iter().enumerate() {
            let t = sol.values[3 * i].max(0.0) * tr;
            let b = sol.values[3 * i + 1].max(0.0) * inst.demands[s];
            if t > 0.0 && b > 0.0 {
                rates[i] = b / t;
                times[(s, c)] = t;
            }
        }
        if let Some(candidate) = polish(inst, times) {
            if best.as_ref().is_none_or(|b| candidate.1 < b.1) {
                best = Some(candidate);
            }
        }
        let incumbent = best.as_ref().map_or(f64::INFINITY, |b| b.1);
        if incumbent - lower <= 1e-9 * incumbent {
            break;
        }
        let mut added = false;
        for (i, &(s, c)) in cells.iter().enumerate() {
            let t = sol.values[3 * i].max(0.0) * tr;
            if t <= 0.0 || rates[i] <= 0.0 {
                continue;
            }
            let true_u = t * excess_power(rates[i], w, inst.gains[(s, c)]).0;
            let lp_u = sol.values[3 * i + 2] * u0[i];
            if true_u - lp_u > 1e-12 * lower {
                rows.push(cut(i, rates[i]), RowSense::Ge, 0.0);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    let searched = run_jtpa(inst, 1e-9, 200);
    match (best, searched) {
        (Some(b), Ok(t)) if t.energy < b.1 => Ok((t.allocation, t.energy)),
        (Some(b), _) => Ok(b),
        (None, Ok(t)) => Ok((t.allocation, t.energy)),
        (None, Err(e)) => Err(e),
    }
}

/// Makes LP times feasible, then improves them by alternate search from
/// exact water-filled powers. `None` if the times cannot carry the demands.
fn polish(inst: &DsraInstance, mut times: Matrix) -> Option<(Allocation, f64)> {
    let (n, k) = (inst.num_sensors(), inst.num_channels());
    // shrink rounding overshoot of the caps
    for c in 0..k {
        let used: f64 = times.column(c).sum();
        if used > inst.access_caps[c] {
            let f = inst.access_caps[c] / used;
            for s in 0..n {
                times[(s, c)] *= f;
            }
        }
    }
    for s in 0..n {
        let used: f64 = times.row(s).iter().sum();
        if used > inst.phase_length {
            let f = inst.phase_length / used;
            times.row_mut(s).iter_mut().for_each(|t| *t *= f);
        }
    }
    let powers = solve_power(inst, &times).ok()?;
    let mut start = Allocation { times, powers };
    prune_idle_times(&mut start);
    let trace = descend_from(inst, start, 1e-9, 200).ok()?;
    (trace.allocation.max_violation(inst) <= 1e-7).then_some((trace.allocation, trace.energy))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{instance, random_instance, W};
    use super::*;

    #[test]
    fn marginal_inverse_round_trip() {
        for &s in &[1e-6, 1e-3, 0.1, 1.0, 7.5, 30.0] {
            let back = marginal_inv(marginal(s));
            assert!((back - s).abs() <= 1e-9 * s, "{s} {back}");
        }
    }

    #[test]
    fn split_matches_brute_force() {
        // two sensors sharing a tight cap: scan the split directly
        let a = [2e3 / W, 3e3 / W];
        let g = [4e4, 1e5];
        let cap = 0.03;
        let t = split_channel(&a, &g, cap, 0.095, 0.1).unwrap();
        assert!((t[0] + t[1] - cap).abs() < 1e-12);
        let f = |t: f64, a: f64, g: f64| t * libm::expm1(a / t * LN_2) / g;
        let mut best = f64::INFINITY;
        for i in 1..100_000 {
            let t0 = cap * i as f64 / 100_000.0;
            best = best.min(f(t0, a[0], g[0]) + f(cap - t0, a[1], g[1]));
        }
        let got = f(t[0], a[0], g[0]) + f(t[1], a[1], g[1]);
        assert!(got <= best * (1.0 + 1e-9) && got >= best * (1.0 - 1e-6));
    }

    #[test]
    fn random_channels_single_channel_matches_jtpa() {
        let inst = instance(&[&[3e4]], &[0.095], &[2e3]);
        let (a, e) = run_random_channels(&inst, &mut RngStream::new(1)).unwrap();
        let j = run_jtpa(&inst, 1e-9, 50).unwrap();
        assert!((e - j.energy).abs() <= 1e-9 * e);
        assert!(a.max_violation(&inst) <= 1e-9);
    }

    #[test]
    fn random_channels_feasible_and_reproducible() {
        let mut rng = RngStream::new(6);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 3, 3, 3.0);
            let (a, e) = run_random_channels(&inst, &mut RngStream::new(2)).unwrap();
            assert!(a.max_violation(&inst) <= 1e-9);
            assert!(a.times.iter().zip(a.powers.iter()).filter(|(t, _)| *t > 0.0).count() <= 3);
            let again = run_random_channels(&inst, &mut RngStream::new(2)).unwrap();
            assert_eq!((a, e), again);
        }
    }

    #[test]
    fn random_channels_gives_up_on_impossible_draws() {
        // each sensor needs the whole cap of a channel
        let inst = instance(&[&[1e4, 1e4], &[1e4, 1e4], &[1e4, 1e4]], &[0.05, 0.05], &[2e6, 2e6, 2e6]);
        assert!(matches!(
            run_random_channels(&inst, &mut RngStream::new(0)),
            Err(AllocationError::NoFeasibleDraw { attempts: 100 })
        ));
    }

    #[test]
    fn optimal_guard_and_zero_demand() {
        let mut rng = RngStream::new(1);
        let big = random_instance(&mut rng, 5, 2, 1.0);
        assert!(matches!(run_optimal_small(&big), Err(AllocationError::TooLarge { .. })));
        let zero = instance(&[&[1e4]], &[0.095], &[0.0]);
        assert_eq!(run_optimal_small(&zero).unwrap().1, 0.0);
    }

    #[test]
    fn optimal_never_worse_than_jtpa() {
        let mut rng = RngStream::new(31);
        for case in 0..20 {
            let inst = random_instance(&mut rng, 1 + case % 4, 1 + case % 3, 1.0 + (case % 5) as f64);
            let (a, e) = run_optimal_small(&inst).unwrap();
            let j = run_jtpa(&inst, 1e-9, 50).unwrap();
            assert!(e <= j.energy * (1.0 + 1e-9), "case {case}: {e} vs {}", j.energy);
            assert!(a.max_violation(&inst) <= 1e-8, "case {case}: {}", a.max_violation(&inst));
            assert!((total_energy(&a) - e).abs() <= 1e-12 * e);
        }
    }

    #[test]
    fn optimal_single_channel_single_sensor_closed_form() {
        let inst = instance(&[&[5e4]], &[0.06], &[4e3]);
        let (a, e) = run_optimal_small(&inst).unwrap();
        let expect = 0.06 * libm::expm1(4e3 / (0.06 * W) * LN_2) / 5e4;
        assert!((e - expect).abs() <= 1e-8 * expect, "{e} {expect}");
        assert!((a.times[(0, 0)] - 0.06).abs() < 1e-9);
    }

    #[test]
    fn optimal_matches_grid_search_two_by_two() {
        let mut rng = RngStream::new(8);
        for _ in 0..3 {
            // caps small enough that the per-sensor phase never binds
            let mut inst = random_instance(&mut rng, 2, 2, 2.0);
            inst.access_caps = vec![0.03, 0.04];
            let inst = inst;
            let Ok((_, e)) = run_optimal_small(&inst) else { continue };
            // energy is non-increasing in each time, so both caps are used
            // fully; scan the share of each cap given to sensor 0
            let energy = |x: f64, y: f64| -> Option<f64> {
                let t = Matrix::from_rows(&[
                    [x * inst.access_caps[0], y * inst.access_caps[1]],
                    [(1.0 - x) * inst.access_caps[0], (1.0 - y) * inst.access_caps[1]],
                ])
                .unwrap();
                let p = solve_power(&inst, &t).ok()?;
                Some(total_energy(&Allocation { times: t, powers: p }))
            };
            let mut best = (f64::INFINITY, 0.5, 0.5);
            let steps = 200;
            for i in 0..=steps {
                for j in 0..=steps {
                    let (x, y) = (i as f64 / steps as f64, j as f64 / steps as f64);
                    if let Some(v) = energy(x, y) {
                        if v < best.0 {
                            best = (v, x, y);
                        }
                    }
                }
            }
            // refine around the coarse minimum
            let h = 1.0 / steps as f64;
            let (_, cx, cy) = best;
            for i in 0..=steps {
                for j in 0..=steps {
                    let x = (cx - h + 2.0 * h * i as f64 / steps as f64).clamp(0.0, 1.0);
                    let y = (cy - h + 2.0 * h * j as f64 / steps as f64).clamp(0.0, 1.0);
                    if let Some(v) = energy(x, y) {
                        best.0 = best.0.min(v);
                    }
                }
            }
            assert!((e - best.0).abs() <= 1e-3 * best.0, "{e} vs grid {}", best.0);
            assert!(e <= best.0 * (1.0 + 1e-9));
        }
    }
}
