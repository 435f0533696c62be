//! Energy-detector statistics and Logic-OR cooperative fusion.

use crate::numerics::gaussian::{tail, tail_inv};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Per-sensor false-alarm target `p_f`, in `(0, 1)`.
    pub target_false_alarm: f64,
    /// Samples `U` per sensing window.
    pub samples: u32,
    /// Noise variance; 1 makes `gamma` a plain SNR.
    pub noise_variance: f64,
}

impl DetectorConfig {
    pub fn new(target_false_alarm: f64, samples: u32) -> Self {
        Self {
            target_false_alarm,
            samples,
            noise_variance: 1.0,
        }
    }

    fn sqrt_u(&self) -> f64 {
        libm::sqrt(self.samples as f64)
    }

    fn q_inv_pf(&self) -> f64 {
        tail_inv(self.target_false_alarm)
    }
}

/// Threshold `eps = sigma^2 (1 + Qinv(p_f) / sqrt(U))` meeting the false-alarm target.
pub fn detection_threshold(cfg: &DetectorConfig) -> f64 {
    cfg.noise_variance * (1.0 + cfg.q_inv_pf() / cfg.sqrt_u())
}

/// False-alarm probability of a detector with threshold `eps`.
pub fn false_alarm_prob(cfg: &DetectorConfig, eps: f64) -> f64 {
    tail((eps / cfg.noise_variance - 1.0) * cfg.sqrt_u())
}

/// Detection probability of one sensor at linear SNR `gamma`.
pub fn single_detection_prob(cfg: &DetectorConfig, gamma: f64) -> f64 {
    let arg = (cfg.q_inv_pf() - cfg.sqrt_u() * gamma) / libm::sqrt(2.0 * gamma + 1.0);
    tail(arg)
}

/// Fused false alarm of `num_assigned` sensors under Logic-OR.
pub fn fused_false_alarm(num_assigned: usize, p_f: f64) -> f64 {
    1.0 - libm::pow(1.0 - p_f, num_assigned as f64)
}

/// Probability that every sensor in `snrs` misses an active PU.
pub fn fused_misdetection<I>(cfg: &DetectorConfig, snrs: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    snrs.into_iter()
        .map(|g| 1.0 - single_detection_prob(cfg, g))
        .product()
}

pub fn fused_detection<I>(cfg: &DetectorConfig, snrs: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    1.0 - fused_misdetection(cfg, snrs)
}

/// 1 when the fused mis-detection probability is strictly below `md_thr`.
pub fn protection_indicator<I>(cfg: &DetectorConfig, snrs: I, md_thr: f64) -> u8
where
    I: IntoIterator<Item = f64>,
{
    u8::from(fused_misdetection(cfg, snrs) < md_thr)
}
