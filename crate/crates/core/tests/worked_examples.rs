//! Worked numbers for each building block, checked through the public API.

use hcrsn_core::detection::{
    detection_threshold, false_alarm_prob, fused_detection, fused_false_alarm, protection_indicator,
    single_detection_prob, DetectorConfig,
};
use hcrsn_core::model::{
    collision_probability, empirical_collision_rate, max_access_time, mean_available_time, stationary_probs,
    ChannelParams,
};
use hcrsn_core::numerics::{gaussian_tail_q, gaussian_tail_q_inv, solve_min_energy_power};
use hcrsn_core::RngStream;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn gaussian_tail_reference_points() {
    assert_eq!(gaussian_tail_q(0.0).unwrap(), 0.5);
    assert!(close(gaussian_tail_q(1.2816).unwrap(), 0.1, 1e-4));
    assert!(close(gaussian_tail_q_inv(0.1).unwrap(), 1.2816, 1e-4));
    assert!(gaussian_tail_q(f64::NAN).is_err());
    assert!(gaussian_tail_q_inv(1.0).is_err());
}

#[test]
fn channel_one_statistics() {
    let ch = ChannelParams::new(0.6, 0.4, 6e6).unwrap();
    let (active, inactive) = stationary_probs(&ch);
    assert!(close(active, 0.4, 1e-15) && close(inactive, 0.6, 1e-15));
    assert!(close(mean_available_time(&ch), 1.5, 1e-12));
    assert!(close(max_access_time(&ch, 0.1, 0.1, 0.005), 0.095, 1e-15));
    assert!(close(collision_probability(&ch, 0.095), 0.6 * (1.0 - (-0.038f64).exp()), 1e-15));
}

#[test]
fn collision_rate_agrees_with_closed_form() {
    let ch = ChannelParams::new(1.2, 1.6, 6e6).unwrap();
    let p = collision_probability(&ch, 0.05);
    let trials = 200_000u64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    let est = empirical_collision_rate(&ch, 0.05, trials, &mut RngStream::new(5));
    assert!((est - p).abs() <= 3.0 * se, "{est} vs {p}");
}

#[test]
fn detector_numbers() {
    let cfg = DetectorConfig::new(0.1, 6000);
    let eps = detection_threshold(&cfg);
    assert!(close(eps, 1.016546, 2e-6));
    assert!(close(false_alarm_prob(&cfg, eps), 0.1, 1e-9));
    let pd = single_detection_prob(&cfg, 0.01);
    assert!(close(pd, 0.3078, 5e-4));
    assert!(close(fused_false_alarm(2, 0.1), 0.19, 1e-15));
    let two = fused_detection(&cfg, [0.01, 0.01]);
    assert!(close(two, 1.0 - (1.0 - pd) * (1.0 - pd), 1e-12));
    assert_eq!(protection_indicator(&cfg, [0.01, 0.01], 0.9), 1);
    assert_eq!(protection_indicator(&cfg, core::iter::empty(), 0.9), 0);
}

#[test]
fn single_channel_power_closed_form() {
    let sol = solve_min_energy_power(&[1.0], &[1.0], 6e6, 6e6, 2.0).unwrap();
    assert!(close(sol.powers[0], 1.0, 1e-9));
    let zero = solve_min_energy_power(&[0.5, 0.5], &[1.0, 2.0], 0.0, 6e6, 1.0).unwrap();
    assert!(zero.powers.iter().all(|&p| p == 0.0));
}
