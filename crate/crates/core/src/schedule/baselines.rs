//! Reference schedulers.

use alloc::vec;

use super::{AssignmentMatrix, ScheduleError, SssProblem};
use crate::model::Scenario;
use crate::numerics::RngStream;

/// Largest `M * K` the exhaustive search accepts.
pub const MAX_EXHAUSTIVE_CELLS: usize = 24;

fn reverse_bits(v: u32, width: usize) -> u32 {
    if width == 0 {
        0
    } else {
        v.reverse_bits() >> (32 - width)
    }
}

/// Maximizes the penalized objective over all `2^(MK)` schedules. Schedules
/// are visited in increasing row-major code, entry (0, 0) being the most
/// significant bit, and only a strictly better one replaces the incumbent.
pub fn run_exhaustive(scenario: &Scenario) -> Result<(AssignmentMatrix, f64), ScheduleError> {
    let problem = SssProblem::new(scenario)?;
    let (m, k) = (problem.num_sensors(), problem.num_channels());
    let cells = m * k;
    if cells > MAX_EXHAUSTIVE_CELLS {
        return Err(ScheduleError::TooLarge {
            cells,
            max: MAX_EXHAUSTIVE_CELLS,
        });
    }
    let row_bits = (1u64 << k) - 1;
    let mut masks = vec![0u32; m];
    let mut best_code = 0u64;
    let mut best = f64::NEG_INFINITY;
    for code in 0..1u64 << cells {
        for (i, mask) in masks.iter_mut().enumerate() {
            let row = (code >> ((m - 1 - i) * k)) & row_bits;
            *mask = reverse_bits(row as u32, k);
        }
        let v = problem.penalized_masks(&masks);
        if v > best {
            best = v;
            best_code = code;
        }
    }
    for (i, mask) in masks.iter_mut().enumerate() {
        *mask = reverse_bits(((best_code >> ((m - 1 - i) * k)) & row_bits) as u32, k);
    }
    let j = AssignmentMatrix::from_masks(masks, k).expect("masks within K bits");
    Ok((j, best))
}

/// Each sensor senses a uniformly drawn channel vector.
pub fn run_random(scenario: &Scenario, rng: &mut RngStream) -> Result<(AssignmentMatrix, f64), ScheduleError> {
    let problem = SssProblem::new(scenario)?;
    let (m, k) = (problem.num_sensors(), problem.num_channels());
    let masks = (0..m).map(|_| rng.below(1 << k) as u32).collect();
    let j = AssignmentMatrix::from_masks(masks, k).expect("masks within K bits");
    let v = problem.penalized_masks(j.masks());
    Ok((j, v))
}

/// Sensors in index order each add, one at a time, the affordable channel
/// with the largest positive DAATC gain (lowest index on ties).
pub fn run_greedy(scenario: &Scenario) -> Result<(AssignmentMatrix, f64), ScheduleError> {
    let problem = SssProblem::new(scenario)?;
    let (m, k) = (problem.num_sensors(), problem.num_channels());
    let mut masks = vec![0u32; m];
    let mut current = 0.0;
    for i in 0..m {
        loop {
            let mut choice = None;
            let mut best_gain = 0.0;
            for ch in 0..k {
                if masks[i] >> ch & 1 == 1 {
                    continue;
                }
                masks[i] |= 1 << ch;
                if problem.energy_ok(&masks) && problem.time_ok(&masks) {
                    let gain = problem.daatc_masks(&masks) - current;
                    if gain > best_gain {
                        best_gain = gain;
                        choice = Some(ch);
                    }
                }
                masks[i] &= !(1 << ch);
            }
            match choice {
                Some(ch) => {
                    masks[i] |= 1 << ch;
                    current = problem.daatc_masks(&masks);
                }
                None => break,
            }
        }
    }
    let j = AssignmentMatrix::from_masks(masks, k).expect("masks within K bits");
    let v = problem.penalized_masks(j.masks());
    Ok((j, v))
}

#[cfg(test)]
mod tests {
    use super::super::tests::scenario;
    use super::super::{penalized_objective, run_ce, CeParams};
    use super::*;
    use crate::numerics::Matrix;

    #[test]
    fn exhaustive_with_no_energy_is_empty() {
        let s = scenario(2, 3, 0.0);
        let (j, v) = run_exhaustive(&s).unwrap();
        assert_eq!(j, AssignmentMatrix::zeros(2, 3));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        let mut s = scenario(1, 2, 0.0011);
        s.pu_snr = Matrix::from_rows(&[&[0.02, 0.004]]).unwrap();
        s.misdetect_threshold = 0.75;
        // independent enumeration of the four 1x2 schedules
        let mut best = (f64::NEG_INFINITY, AssignmentMatrix::zeros(1, 2));
        for row in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let j = AssignmentMatrix::from_rows(&[&row]).unwrap();
            let v = penalized_objective(&j, &s).unwrap();
            if v > best.0 {
                best = (v, j);
            }
        }
        let (j, v) = run_exhaustive(&s).unwrap();
        assert_eq!(v, best.0);
        assert_eq!(j, best.1);
    }

    #[test]
    fn exhaustive_ties_prefer_smallest_code() {
        // identical channels and sensors: many optima, code order decides
        let mut s = scenario(2, 2, 0.0011);
        let c = s.channels[0];
        s.channels = vec![c, c];
        let (j, _) = run_exhaustive(&s).unwrap();
        // best value needs each channel sensed once; smallest code is [[0,1],[1,0]]
        assert_eq!(j, AssignmentMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap());
    }

    #[test]
    fn exhaustive_guard() {
        let s = scenario(5, 5, 0.01);
        assert!(matches!(
            run_exhaustive(&s),
            Err(ScheduleError::TooLarge { cells: 25, max: 24 })
        ));
    }

    #[test]
    fn greedy_picks_larger_gain_within_budget() {
        // one sensing allowed; channel 0 has the larger alpha
        let s = scenario(1, 2, 0.0011);
        let (j, v) = run_greedy(&s).unwrap();
        assert_eq!(j, AssignmentMatrix::from_rows(&[&[1, 0]]).unwrap());
        assert!((v - s.alphas()[0] * 0.9).abs() < 1e-15);
        let (j, _) = run_greedy(&scenario(3, 2, 0.0)).unwrap();
        assert_eq!(j, AssignmentMatrix::zeros(3, 2));
    }

    #[test]
    fn baselines_never_beat_exhaustive() {
        let mut rng = RngStream::new(3);
        for seed in 0..10u64 {
            let mut s = scenario(3, 3, 0.0011 * (1 + seed % 3) as f64);
            s.pu_snr = Matrix::from_fn(3, 3, |_, _| rng.uniform_in(1e-4, 2e-2));
            s.misdetect_threshold = 0.6;
            let (_, opt) = run_exhaustive(&s).unwrap();
            let (gj, g) = run_greedy(&s).unwrap();
            assert!(g <= opt);
            assert!(super::super::SssProblem::new(&s).unwrap().is_feasible(&gj).unwrap());
            let (_, r) = run_random(&s, &mut rng.substream(seed)).unwrap();
            assert!(r <= opt);
            let ce = run_ce(&s, &CeParams { num_samples: 50, ..CeParams::default() }, &RngStream::new(seed)).unwrap();
            assert!(ce.objective <= opt);
        }
    }

    #[test]
    fn random_is_reproducible() {
        let s = scenario(4, 3, 0.01);
        let a = run_random(&s, &mut RngStream::new(8)).unwrap();
        let b = run_random(&s, &mut RngStream::new(8)).unwrap();
        assert_eq!(a, b);
    }
}
