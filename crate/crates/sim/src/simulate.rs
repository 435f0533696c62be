//! One sensing phase with random PU states and detector outcomes.

use hcrsn_core::detection::{protection_indicator, single_detection_prob};
use hcrsn_core::model::{stationary_probs, Scenario};
use hcrsn_core::schedule::AssignmentMatrix;
use hcrsn_core::RngStream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodOutcome {
    /// Ground-truth PU activity per channel.
    pub pu_active: Vec<bool>,
    /// Channels offered to data sensors: fused decision idle and the
    /// protection requirement met.
    pub available: Vec<usize>,
    /// Subset of `available` whose PU was actually active (mis-detections).
    pub leaked: Vec<usize>,
}

/// Simulates the sensing phase of one period under schedule `j`.
///
/// Each channel's PU state is drawn from its stationary distribution. Every
/// assigned sensor reports presence with probability `p_d` (PU active) or
/// `p_f` (PU idle), and the reports are OR-fused.
pub fn simulate_period(scenario: &Scenario, j: &AssignmentMatrix, rng: &mut RngStream) -> PeriodOutcome {
    let cfg = scenario.detector();
    let k = scenario.num_channels;
    let mut out = PeriodOutcome {
        pu_active: Vec::with_capacity(k),
        available: Vec::new(),
        leaked: Vec::new(),
    };
    for c in 0..k {
        let (p_active, _) = stationary_probs(&scenario.channels[c]);
        let active = rng.bernoulli(p_active);
        out.pu_active.push(active);
        let mut busy = false;
        for m in j.sensors_on(c) {
            let p = if active {
                single_detection_prob(&cfg, scenario.pu_snr[(m, c)])
            } else {
                scenario.target_false_alarm
            };
            // draw for every sensor so the stream does not depend on earlier reports
            busy |= rng.bernoulli(p);
        }
        let snrs = j.sensors_on(c).map(|m| scenario.pu_snr[(m, c)]);
        if !busy && protection_indicator(&cfg, snrs, scenario.misdetect_threshold) == 1 {
            out.available.push(c);
            if active {
                out.leaked.push(c);
            }
        }
    }
    out
}
