//! Cross-Entropy scheduler.
//!
//! Each iteration draws `Z` schedules from the per-sensor distribution over
//! channel vectors, keeps the best `ceil(rho Z)` of them and refits the
//! distribution to their empirical frequencies. The run stops once the
//! distribution moves less than `stop_epsilon` in Frobenius norm or after
//! `max_iterations`.

use alloc::vec;
use alloc::vec::Vec;

use super::{AssignmentMatrix, PmfMatrix, ScheduleError, SssProblem};
use crate::model::Scenario;
use crate::numerics::{Matrix, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeParams {
    /// Samples `Z` per iteration.
    pub num_samples: usize,
    /// Fraction `rho` of samples kept as the elite set.
    pub elite_fraction: f64,
    pub stop_epsilon: f64,
    pub max_iterations: usize,
}

impl Default for CeParams {
    fn default() -> Self {
        Self {
            num_samples: 4000,
            elite_fraction: 0.6,
            stop_epsilon: 1e-3,
            max_iterations: 200,
        }
    }
}

impl CeParams {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        let bad = |name, value| Err(ScheduleError::InvalidParams { name, value });
        if self.num_samples < 2 {
            return bad("num_samples", self.num_samples as f64);
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return bad("elite_fraction", self.elite_fraction);
        }
        if !(self.stop_epsilon >= 0.0) {
            return bad("stop_epsilon", self.stop_epsilon);
        }
        if self.max_iterations == 0 {
            return bad("max_iterations", 0.0);
        }
        Ok(())
    }
}

/// Size of the elite set, `ceil(rho Z)` clamped to `[1, Z]`.
pub(crate) fn elite_count(rho: f64, z: usize) -> usize {
    let n = libm::ceil(rho * z as f64 - 1e-9) as usize;
    n.clamp(1, z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeTrace {
    /// Best penalized objective seen up to and including each iteration.
    pub best_objective: Vec<f64>,
    /// Best penalized objective among each iteration's own samples.
    pub iteration_best: Vec<f64>,
    /// Frobenius distance between successive distributions.
    pub step_sizes: Vec<f64>,
    pub assignment: AssignmentMatrix,
    /// Penalized objective of `assignment`; its DAATC when feasible.
    pub objective: f64,
    pub daatc: f64,
    pub converged: bool,
}

impl CeTrace {
    pub fn iterations(&self) -> usize {
        self.best_objective.len()
    }
}

/// Inverse-CDF tables of a pmf, one per sensor.
struct Sampler {
    channels: usize,
    /// Running sums of each row, accumulated left to right.
    cum: Vec<Vec<f64>>,
    /// Last vector with positive mass, taken when rounding leaves the
    /// total just below 1.
    last: Vec<u32>,
}

impl Sampler {
    fn new(pmf: &PmfMatrix) -> Self {
        let probs = pmf.probs();
        let mut cum = Vec::with_capacity(probs.rows());
        let mut last = Vec::with_capacity(probs.rows());
        for r in 0..probs.rows() {
            let mut acc = 0.0;
            let mut l = 0;
            let row: Vec<f64> = probs
                .row(r)
                .iter()
                .enumerate()
                .map(|(c, &p)| {
                    if p > 0.0 {
                        acc += p;
                        l = c as u32;
                    }
                    acc
                })
                .collect();
            cum.push(row);
            last.push(l);
        }
        Self {
            channels: pmf.num_channels(),
            cum,
            last,
        }
    }

    fn draw(&self, rng: &mut RngStream) -> AssignmentMatrix {
        let masks = self
            .cum
            .iter()
            .zip(&self.last)
            .map(|(row, &last)| {
                let u = rng.uniform();
                // first vector whose running sum exceeds u; it has positive mass
                let c = row.partition_point(|&a| a <= u);
                if c < row.len() {
                    c as u32
                } else {
                    last
                }
            })
            .collect();
        AssignmentMatrix::from_masks(masks, self.channels).expect("vector index within 2^K")
    }
}

/// Draws one channel vector per sensor from its row of `pmf`.
pub fn sample_assignment(pmf: &PmfMatrix, rng: &mut RngStream) -> AssignmentMatrix {
    Sampler::new(pmf).draw(rng)
}

/// Refits the distribution to the `ceil(rho Z)` highest-scoring samples.
/// Equal scores keep their sample order.
pub fn elite_update(samples: &[AssignmentMatrix], scores: &[f64], rho: f64) -> Result<PmfMatrix, ScheduleError> {
    if samples.len() != scores.len() {
        return Err(ScheduleError::DimensionMismatch {
            what: "sample scores",
            expected: samples.len(),
            found: scores.len(),
        });
    }
    let Some(first) = samples.first() else {
        return Err(ScheduleError::DimensionMismatch {
            what: "samples",
            expected: 1,
            found: 0,
        });
    };
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(ScheduleError::InvalidParams {
            name: "elite_fraction",
            value: rho,
        });
    }
    let (m, k) = (first.num_sensors(), first.num_channels());
    for s in samples {
        s.check_dims(m, k)?;
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let n = elite_count(rho, samples.len());
    let mut probs = Matrix::zeros(m, 1 << k);
    for &i in &order[..n] {
        for (row, &mask) in samples[i].masks().iter().enumerate() {
            probs[(row, mask as usize)] += 1.0;
        }
    }
    let probs = probs.map(|c| c / n as f64);
    Ok(PmfMatrix::from_matrix(probs, k).expect("counting measure"))
}

/// Runs the Cross-Entropy scheduler. Sample `z` of iteration `i` draws from
/// `rng.substream2(i, z)`, so results do not depend on evaluation order.
pub fn run_ce(scenario: &Scenario, params: &CeParams, rng: &RngStream) -> Result<CeTrace, ScheduleError> {
    params.validate()?;
    let problem = SssProblem::new(scenario)?;
    run_ce_on(&problem, params, rng)
}

pub(crate) fn run_ce_on(problem: &SssProblem, params: &CeParams, rng: &RngStream) -> Result<CeTrace, ScheduleError> {
    params.validate()?;
    let (m, k) = (problem.num_sensors(), problem.num_channels());
    let z = params.num_samples;
    let mut pmf = PmfMatrix::uniform(m, k);
    let mut best = AssignmentMatrix::zeros(m, k);
    let mut best_score = f64::NEG_INFINITY;
    let mut trace = CeTrace {
        best_objective: Vec::new(),
        iteration_best: Vec::new(),
        step_sizes: Vec::new(),
        assignment: best.clone(),
        objective: 0.0,
        daatc: 0.0,
        converged: false,
    };
    let mut samples = Vec::with_capacity(z);
    let mut scores = vec![0.0; z];
    for it in 0..params.max_iterations {
        samples.clear();
        let sampler = Sampler::new(&pmf);
        for s in 0..z {
            let mut sub = rng.substream2(it as u64, s as u64);
            samples.push(sampler.draw(&mut sub));
        }
        let mut it_best = 0;
        for (s, j) in samples.iter().enumerate() {
            scores[s] = problem.penalized_masks(j.masks());
            if scores[s] > scores[it_best] {
                it_best = s;
            }
        }
        if scores[it_best] > best_score {
            best_score = scores[it_best];
            best = samples[it_best].clone();
        }
        trace.iteration_best.push(scores[it_best]);
        trace.best_objective.push(best_score);

        let next = elite_update(&samples, &scores, params.elite_fraction)?;
        let step = next.frobenius_distance(&pmf);
        trace.step_sizes.push(step);
        pmf = next;
        if step <= params.stop_epsilon {
            trace.converged = true;
            break;
        }
    }
    trace.objective = problem.penalized_masks(best.masks());
    trace.daatc = problem.daatc_masks(best.masks());
    trace.assignment = best;
    Ok(trace)
}
