//! Network scenario and the exponential ON-OFF primary-user channel model.
//!
//! A channel alternates between `Active` (PU transmitting) and `Inactive`
//! (idle) with exponential sojourns: an Active period ends at rate `lambda`,
//! an Inactive one at rate `mu`.

use alloc::vec::Vec;

use thiserror::Error;

use crate::detection::DetectorConfig;
use crate::numerics::{Matrix, RngStream};

/// Largest channel count accepted, bounded by the 2^K vector table of the
/// scheduler.
pub const MAX_CHANNELS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` = {value} is out of range")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{channels} channels exceed the supported maximum of {max}")]
    TooManyChannels { channels: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Active -> Inactive transition rate (1/s).
    pub lambda: f64,
    /// Inactive -> Active transition rate (1/s).
    pub mu: f64,
    pub bandwidth_hz: f64,
}

impl ChannelParams {
    pub fn new(lambda: f64, mu: f64, bandwidth_hz: f64) -> Result<Self, ModelError> {
        let ch = Self {
            lambda,
            mu,
            bandwidth_hz,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        positive("lambda", self.lambda)?;
        positive("mu", self.mu)?;
        positive("bandwidth_hz", self.bandwidth_hz)
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value })
    }
}

fn open_probability(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value })
    }
}

/// `(p_active, p_inactive)`.
pub fn stationary_probs(ch: &ChannelParams) -> (f64, f64) {
    let s = ch.lambda + ch.mu;
    let p_inactive = ch.lambda / s;
    (1.0 - p_inactive, p_inactive)
}

/// Mean idle time the channel offers, `(1/mu) * p_inactive`.
pub fn mean_available_time(ch: &ChannelParams) -> f64 {
    stationary_probs(ch).1 / ch.mu
}

/// Longest access keeping the collision probability at or below `collision_bound`,
/// capped at the transmission phase `period - tau_s`.
pub fn max_access_time(ch: &ChannelParams, collision_bound: f64, period: f64, tau_s: f64) -> f64 {
    let cap = period - tau_s;
    let p_inactive = stationary_probs(ch).1;
    if collision_bound >= p_inactive {
        return cap;
    }
    let analytic = -libm::log1p(-collision_bound / p_inactive) / ch.mu;
    analytic.min(cap)
}

/// Probability that the PU returns while a secondary transmits for
/// `access_time` from the start of an idle period.
pub fn collision_probability(ch: &ChannelParams, access_time: f64) -> f64 {
    let p_inactive = stationary_probs(ch).1;
    -p_inactive * libm::expm1(-ch.mu * access_time)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PuState {
    Active,
    Inactive,
}

impl PuState {
    fn flip(self) -> Self {
        match self {
            PuState::Active => PuState::Inactive,
            PuState::Inactive => PuState::Active,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnOffTrajectory {
    pub initial_state: PuState,
    /// Strictly increasing, all within `(0, horizon]`.
    pub transition_times: Vec<f64>,
    pub horizon: f64,
}

impl OnOffTrajectory {
    pub fn state_at(&self, t: f64) -> PuState {
        let flips = self.transition_times.partition_point(|&x| x <= t);
        if flips % 2 == 0 {
            self.initial_state
        } else {
            self.initial_state.flip()
        }
    }

    /// `(start, end, state)` for each sojourn clipped to the horizon.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, PuState)> + '_ {
        let n = self.transition_times.len();
        (0..=n).map(move |i| {
            let start = if i == 0 { 0.0 } else { self.transition_times[i - 1] };
            let end = if i == n { self.horizon } else { self.transition_times[i] };
            let state = if i % 2 == 0 {
                self.initial_state
            } else {
                self.initial_state.flip()
            };
            (start, end, state)
        })
    }

    pub fn time_in(&self, state: PuState) -> f64 {
        self.segments()
            .filter(|s| s.2 == state)
            .map(|(a, b, _)| b - a)
            .sum()
    }

    /// Number of transitions out of `state` within the horizon.
    pub fn exits_from(&self, state: PuState) -> usize {
        let first = if self.initial_state == state { 0 } else { 1 };
        let n = self.transition_times.len();
        if n <= first {
            0
        } else {
            (n - first).div_ceil(2)
        }
    }
}

fn draw_initial_state(ch: &ChannelParams, rng: &mut RngStream) -> PuState {
    if rng.uniform() < stationary_probs(ch).1 {
        PuState::Inactive
    } else {
        PuState::Active
    }
}

fn draw_sojourn(ch: &ChannelParams, state: PuState, rng: &mut RngStream) -> f64 {
    match state {
        PuState::Active => rng.exponential(ch.lambda),
        PuState::Inactive => rng.exponential(ch.mu),
    }
}

/// Stationary trajectory on `[0, horizon]`. The initial state is drawn first,
/// then one sojourn per state visited.
pub fn sample_trajectory(ch: &ChannelParams, horizon: f64, rng: &mut RngStream) -> OnOffTrajectory {
    let initial_state = draw_initial_state(ch, rng);
    let mut state = initial_state;
    let mut t = 0.0;
    let mut transition_times = Vec::new();
    loop {
        t += draw_sojourn(ch, state, rng);
        if t > horizon {
            break;
        }
        transition_times.push(t);
        state = state.flip();
    }
    OnOffTrajectory {
        initial_state,
        transition_times,
        horizon,
    }
}

/// Fraction of `num_trials` stationary starts in which the channel is idle at
/// time 0 and the PU returns within `access_time`. Each trial draws the same
/// first two variates as [`sample_trajectory`].
pub fn empirical_collision_rate(
    ch: &ChannelParams,
    access_time: f64,
    num_trials: u64,
    rng: &mut RngStream,
) -> f64 {
    if num_trials == 0 || access_time <= 0.0 {
        return 0.0;
    }
    let mut hits = 0u64;
    for _ in 0..num_trials {
        let state = draw_initial_state(ch, rng);
        let sojourn = draw_sojourn(ch, state, rng);
        if state == PuState::Inactive && sojourn <= access_time {
            hits += 1;
        }
    }
    hits as f64 / num_trials as f64
}

/// Static description of one network instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub num_spectrum_sensors: usize,
    pub num_data_sensors: usize,
    pub num_channels: usize,
    pub num_transceivers: usize,
    pub channels: Vec<ChannelParams>,
    pub period_s: f64,
    pub sensing_phase_s: f64,
    pub mini_slot_s: f64,
    /// Energy of one sensing mini-slot.
    pub sensing_energy_j: f64,
    /// Harvesting rate `pi_m` of each spectrum sensor.
    pub harvest_rates_w: Vec<f64>,
    pub target_false_alarm: f64,
    pub samples_per_sensing: u32,
    pub misdetect_threshold: f64,
    pub collision_bound: f64,
    /// M x K linear PU SNR at each spectrum sensor.
    pub pu_snr: Matrix,
    /// N x K linear gain-to-noise ratio (1/W) from each data sensor to the sink.
    pub data_gain: Matrix,
    pub demands_bits: Vec<f64>,
    pub p_max_w: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ModelError> {
        let (m, n, k) = (self.num_spectrum_sensors, self.num_data_sensors, self.num_channels);
        for (what, v) in [
            ("spectrum sensor count", m),
            ("data sensor count", n),
            ("channel count", k),
            ("transceiver count", self.num_transceivers),
        ] {
            if v == 0 {
                return Err(ModelError::DimensionMismatch {
                    what,
                    expected: 1,
                    found: 0,
                });
            }
        }
        if k > MAX_CHANNELS {
            return Err(ModelError::TooManyChannels {
                channels: k,
                max: MAX_CHANNELS,
            });
        }
        let dims = |what, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(ModelError::DimensionMismatch {
                    what,
                    expected,
                    found,
                })
            }
        };
        dims("channels", k, self.channels.len())?;
        dims("harvest rates", m, self.harvest_rates_w.len())?;
        dims("demands", n, self.demands_bits.len())?;
        dims("pu_snr rows", m, self.pu_snr.rows())?;
        dims("pu_snr columns", k, self.pu_snr.cols())?;
        dims("data_gain rows", n, self.data_gain.rows())?;
        dims("data_gain columns", k, self.data_gain.cols())?;
        for ch in &self.channels {
            ch.validate()?;
        }
        positive("period_s", self.period_s)?;
        positive("sensing_phase_s", self.sensing_phase_s)?;
        positive("mini_slot_s", self.mini_slot_s)?;
        if self.mini_slot_s > self.sensing_phase_s {
            return Err(ModelError::InvalidParameter {
                name: "mini_slot_s",
                value: self.mini_slot_s,
            });
        }
        if self.sensing_phase_s >= self.period_s {
            return Err(ModelError::InvalidParameter {
                name: "sensing_phase_s",
                value: self.sensing_phase_s,
            });
        }
        non_negative("sensing_energy_j", self.sensing_energy_j)?;
        for &pi in &self.harvest_rates_w {
            non_negative("harvest_rates_w", pi)?;
        }
        open_probability("target_false_alarm", self.target_false_alarm)?;
        open_probability("misdetect_threshold", self.misdetect_threshold)?;
        open_probability("collision_bound", self.collision_bound)?;
        if self.samples_per_sensing == 0 {
            return Err(ModelError::InvalidParameter {
                name: "samples_per_sensing",
                value: 0.0,
            });
        }
        for g in self.pu_snr.iter() {
            positive("pu_snr", g)?;
        }
        for g in self.data_gain.iter() {
            positive("data_gain", g)?;
        }
        for &d in &self.demands_bits {
            non_negative("demands_bits", d)?;
        }
        positive("p_max_w", self.p_max_w)
    }

    /// Mean available time of every channel.
    pub fn alphas(&self) -> Vec<f64> {
        self.channels.iter().map(mean_available_time).collect()
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            target_false_alarm: self.target_false_alarm,
            samples: self.samples_per_sensing,
            noise_variance: 1.0,
        }
    }

    /// Length of the data transmission phase, `T - tau_s`.
    pub fn transmission_phase_s(&self) -> f64 {
        self.period_s - self.sensing_phase_s
    }

    /// Energy spectrum sensor `m` harvests in one period.
    pub fn energy_budget_j(&self, m: usize) -> f64 {
        self.harvest_rates_w[m] * self.period_s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(lambda: f64, mu: f64) -> ChannelParams {
        ChannelParams::new(lambda, mu, 6e6).unwrap()
    }

    #[test]
    fn stationary_probabilities() {
        assert_eq!(stationary_probs(&ch(1.3, 1.3)), (0.5, 0.5));
        assert_eq!(stationary_probs(&ch(1.8, 1.8)), (0.5, 0.5));
        let (a, i) = stationary_probs(&ch(0.6, 0.4));
        assert!((a - 0.4).abs() < 1e-15 && (i - 0.6).abs() < 1e-15);
        assert!((a + i - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn mean_available_time_values() {
        assert!((mean_available_time(&ch(0.6, 0.4)) - 1.5).abs() < 1e-14);
        assert!((mean_available_time(&ch(0.7, 0.7)) - 1.0 / 1.4).abs() < 1e-14);
        // increasing in lambda at fixed mu
        for &(l, m) in &[(0.3, 0.5), (1.0, 2.0), (2.0, 0.3)] {
            let h = 1e-6;
            let d = (mean_available_time(&ch(l + h, m)) - mean_available_time(&ch(l, m))) / h;
            assert!(d > 0.0);
            let exact = 1.0 / (l + m) / (l + m);
            assert!((d - exact).abs() < 1e-4 * exact);
        }
    }

    #[test]
    fn access_time_cap_and_bound() {
        let c = ch(0.6, 0.4);
        let uncapped = -(1.0f64 - 0.1 / 0.6).ln() / 0.4;
        assert!((uncapped - 0.4558).abs() < 1e-4);
        assert!((max_access_time(&c, 0.1, 0.1, 0.005) - 0.095).abs() < 1e-15);
        assert!((max_access_time(&c, 0.1, 10.0, 0.005) - uncapped).abs() < 1e-12);
        assert_eq!(max_access_time(&c, 0.99, 0.1, 0.005), 0.1 - 0.005);
        assert!(max_access_time(&c, 1e-12, 10.0, 0.005) < 1e-10);
        let t = max_access_time(&c, 0.1, 10.0, 0.005);
        assert!(collision_probability(&c, t) <= 0.1 + 1e-12);
    }

    #[test]
    fn collision_probability_values() {
        let c = ch(0.6, 0.4);
        assert_eq!(collision_probability(&c, 0.0), 0.0);
        let v = collision_probability(&c, 0.095);
        assert!((v - 0.6 * (1.0 - (-0.038f64).exp())).abs() < 1e-15);
        assert!((v - 0.02237).abs() < 1e-5);
        assert!((collision_probability(&c, 1e6) - 0.6).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 0..100 {
            let p = collision_probability(&c, i as f64 * 0.1);
            assert!(p >= prev && p <= 0.6);
            prev = p;
        }
    }

    #[test]
    fn trajectories_match_stationary_statistics() {
        let c = ch(0.6, 0.4);
        let horizon = 10.0 / 0.4;
        let mut rng = RngStream::new(7);
        let (mut inactive, mut total, mut exits) = (0.0, 0.0, 0usize);
        for _ in 0..100_000 {
            let tr = sample_trajectory(&c, horizon, &mut rng);
            inactive += tr.time_in(PuState::Inactive);
            total += tr.horizon;
            exits += tr.exits_from(PuState::Inactive);
        }
        let frac = inactive / total;
        assert!((frac - 0.6).abs() < 0.01 * 0.6, "{frac}");
        // censored-exponential estimate of the mean idle sojourn
        let mean = inactive / exits as f64;
        assert!((mean - 2.5).abs() < 0.01 * 2.5, "{mean}");
    }

    #[test]
    fn trajectory_shape() {
        let c = ch(0.6, 0.4);
        let mut rng = RngStream::new(3);
        let tr = sample_trajectory(&c, 50.0, &mut rng);
        assert!(tr.transition_times.windows(2).all(|w| w[0] < w[1]));
        assert!(tr.transition_times.iter().all(|&t| t > 0.0 && t <= 50.0));
        let short = sample_trajectory(&c, 1e-12, &mut RngStream::new(3));
        assert!(short.transition_times.is_empty());
        assert_eq!(short.state_at(0.0), short.initial_state);
        let again = sample_trajectory(&c, 50.0, &mut RngStream::new(3));
        assert_eq!(tr, again);
    }

    #[test]
    fn segments_cover_horizon() {
        let tr = OnOffTrajectory {
            initial_state: PuState::Active,
            transition_times: alloc::vec![1.0, 3.0],
            horizon: 4.0,
        };
        assert_eq!(tr.time_in(PuState::Active), 2.0);
        assert_eq!(tr.time_in(PuState::Inactive), 2.0);
        assert_eq!(tr.exits_from(PuState::Active), 1);
        assert_eq!(tr.exits_from(PuState::Inactive), 1);
        assert_eq!(tr.state_at(2.0), PuState::Inactive);
        assert_eq!(tr.state_at(3.5), PuState::Active);
    }

    #[test]
    fn empirical_collision_matches_formula() {
        assert_eq!(empirical_collision_rate(&ch(0.6, 0.4), 0.0, 1000, &mut RngStream::new(1)), 0.0);
        let mut rng = RngStream::new(99);
        let cases = [(0.6, 0.4, 0.095), (1.2, 0.3, 0.5), (0.5, 2.0, 0.2), (2.0, 1.0, 1.0)];
        for &(l, m, t) in &cases {
            let c = ch(l, m);
            let p = collision_probability(&c, t);
            let n = 1_000_000;
            let e = empirical_collision_rate(&c, t, n, &mut rng);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((e - p).abs() <= 3.0 * se, "{l} {m} {t}: {e} vs {p}");
        }
    }

    #[test]
    fn invalid_channels_rejected() {
        assert!(ChannelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, -1.0).is_err());
    }
}
