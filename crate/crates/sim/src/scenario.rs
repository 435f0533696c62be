//! Random network instances and their on-disk form.

use std::f64::consts::PI;
use std::path::Path;

use hcrsn_core::model::{ChannelParams, Scenario};
use hcrsn_core::{Matrix, RngStream};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Transition rates `(lambda, mu)` of the seven reference channels, 1/s.
pub const REFERENCE_RATES: [(f64, f64); 7] = [
    (0.6, 0.4),
    (0.8, 0.8),
    (1.0, 0.6),
    (1.2, 1.6),
    (1.4, 1.2),
    (1.6, 1.4),
    (1.8, 1.8),
];

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySpec {
    pub sensor_area_radius_m: f64,
    pub pu_area_radius_m: f64,
    pub pu_tx_power_w: f64,
    pub noise_power_dbm: f64,
    pub path_loss_exponent: f64,
    /// Distances are clamped from below so path loss stays finite.
    pub min_distance_m: f64,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self {
            sensor_area_radius_m: 20.0,
            pu_area_radius_m: 200.0,
            pu_tx_power_w: 1e-3,
            noise_power_dbm: -80.0,
            path_loss_exponent: 3.5,
            min_distance_m: 1.0,
        }
    }
}

impl GeometrySpec {
    pub fn noise_power_w(&self) -> f64 {
        10f64.powf((self.noise_power_dbm - 30.0) / 10.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let checks = [
            ("sensor_area_radius_m", self.sensor_area_radius_m),
            ("pu_area_radius_m", self.pu_area_radius_m),
            ("pu_tx_power_w", self.pu_tx_power_w),
            ("path_loss_exponent", self.path_loss_exponent),
            ("min_distance_m", self.min_distance_m),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.noise_power_dbm.is_finite() {
            return Err(SimError::Usage("noise_power_dbm must be finite".into()));
        }
        Ok(())
    }

    fn path_gain(&self, d: f64) -> f64 {
        d.max(self.min_distance_m).powf(-self.path_loss_exponent)
    }
}

/// Node and channel counts `(M, N, K, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub spectrum_sensors: usize,
    pub data_sensors: usize,
    pub channels: usize,
    pub transceivers: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Self {
            spectrum_sensors: 10,
            data_sensors: 30,
            channels: 7,
            transceivers: 5,
        }
    }
}

/// Scalar settings that are not drawn at random. The defaults are the
/// settings every experiment starts from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    pub period_s: f64,
    pub sensing_phase_s: f64,
    pub mini_slot_s: f64,
    pub sensing_energy_j: f64,
    pub harvest_rate_w: f64,
    pub target_false_alarm: f64,
    pub samples_per_sensing: u32,
    pub misdetect_threshold: f64,
    pub collision_bound: f64,
    pub bandwidth_hz: f64,
    pub demand_bits: f64,
    pub p_max_w: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            period_s: 0.1,
            sensing_phase_s: 0.005,
            mini_slot_s: 0.001,
            sensing_energy_j: 0.11e-3,
            harvest_rate_w: 7e-3,
            target_false_alarm: 0.1,
            samples_per_sensing: 6000,
            misdetect_threshold: 0.9,
            collision_bound: 0.1,
            bandwidth_hz: 6e6,
            demand_bits: 3e3,
            p_max_w: 0.1,
        }
    }
}

fn uniform_in_disk(rng: &mut RngStream, radius: f64) -> (f64, f64) {
    let r = radius * rng.uniform().sqrt();
    let theta = 2.0 * PI * rng.uniform();
    (r * theta.cos(), r * theta.sin())
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Draws one network instance.
///
/// Sensors are uniform in the sensor disk around the sink at the origin and
/// one PU per channel is uniform in the PU disk. PU SNRs are
/// `P_pu d^-a / noise`. Data-sensor gains are `h d^-a / noise` with
/// `h ~ Exp(1)` (Rayleigh power fading), so rates are `W log2(1 + gain p)`.
/// Channel rates cycle through [`REFERENCE_RATES`].
pub fn generate_scenario(
    geom: &GeometrySpec,
    counts: Counts,
    settings: &Settings,
    rng: &mut RngStream,
) -> Result<Scenario, SimError> {
    geom.validate()?;
    let Counts {
        spectrum_sensors: m,
        data_sensors: n,
        channels: k,
        transceivers: b,
    } = counts;
    let noise = geom.noise_power_w();
    let spectrum: Vec<_> = (0..m).map(|_| uniform_in_disk(rng, geom.sensor_area_radius_m)).collect();
    let data: Vec<_> = (0..n).map(|_| uniform_in_disk(rng, geom.sensor_area_radius_m)).collect();
    let pus: Vec<_> = (0..k).map(|_| uniform_in_disk(rng, geom.pu_area_radius_m)).collect();
    let pu_snr = Matrix::from_fn(m, k, |i, c| geom.pu_tx_power_w * geom.path_gain(distance(spectrum[i], pus[c])) / noise);
    let mut fading = || rng.exponential(1.0);
    let data_gain = Matrix::from_fn(n, k, |i, _| fading() * geom.path_gain(distance(data[i], (0.0, 0.0))) / noise);

    let mut channels = Vec::with_capacity(k);
    for c in 0..k {
        let (lambda, mu) = REFERENCE_RATES[c % REFERENCE_RATES.len()];
        channels.push(ChannelParams::new(lambda, mu, settings.bandwidth_hz)?);
    }
    let scenario = Scenario {
        num_spectrum_sensors: m,
        num_data_sensors: n,
        num_channels: k,
        num_transceivers: b,
        channels,
        period_s: settings.period_s,
        sensing_phase_s: settings.sensing_phase_s,
        mini_slot_s: settings.mini_slot_s,
        sensing_energy_j: settings.sensing_energy_j,
        harvest_rates_w: vec![settings.harvest_rate_w; m],
        target_false_alarm: settings.target_false_alarm,
        samples_per_sensing: settings.samples_per_sensing,
        misdetect_threshold: settings.misdetect_threshold,
        collision_bound: settings.collision_bound,
        pu_snr,
        data_gain,
        demands_bits: vec![settings.demand_bits; n],
        p_max_w: settings.p_max_w,
    };
    scenario.validate()?;
    Ok(scenario)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRecord {
    lambda_per_s: f64,
    mu_per_s: f64,
    bandwidth_hz: f64,
}

/// Scenario file layout. Matrices are stored as lists of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    num_spectrum_sensors: usize,
    num_data_sensors: usize,
    num_channels: usize,
    num_transceivers: usize,
    period_s: f64,
    sensing_phase_s: f64,
    mini_slot_s: f64,
    sensing_energy_j: f64,
    target_false_alarm: f64,
    samples_per_sensing: u32,
    misdetect_threshold: f64,
    collision_bound: f64,
    p_max_w: f64,
    harvest_rates_w: Vec<f64>,
    demands_bits: Vec<f64>,
    pu_snr_linear: Vec<Vec<f64>>,
    data_gain_per_w: Vec<Vec<f64>>,
    channels: Vec<ChannelRecord>,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn matrix_of(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<Matrix, String> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(format!("{what}: every row needs {cols} entries"));
    }
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, cols));
    }
    Matrix::from_rows(rows).ok_or_else(|| format!("{what}: ragged rows"))
}

pub fn scenario_to_toml(s: &Scenario) -> String {
    let file = ScenarioFile {
        schema_version: SCHEMA_VERSION,
        num_spectrum_sensors: s.num_spectrum_sensors,
        num_data_sensors: s.num_data_sensors,
        num_channels: s.num_channels,
        num_transceivers: s.num_transceivers,
        period_s: s.period_s,
        sensing_phase_s: s.sensing_phase_s,
        mini_slot_s: s.mini_slot_s,
        sensing_energy_j: s.sensing_energy_j,
        target_false_alarm: s.target_false_alarm,
        samples_per_sensing: s.samples_per_sensing,
        misdetect_threshold: s.misdetect_threshold,
        collision_bound: s.collision_bound,
        p_max_w: s.p_max_w,
        harvest_rates_w: s.harvest_rates_w.clone(),
        demands_bits: s.demands_bits.clone(),
        pu_snr_linear: rows_of(&s.pu_snr),
        data_gain_per_w: rows_of(&s.data_gain),
        channels: s
            .channels
            .iter()
            .map(|c| ChannelRecord {
                lambda_per_s: c.lambda,
                mu_per_s: c.mu,
                bandwidth_hz: c.bandwidth_hz,
            })
            .collect(),
    };
    toml::to_string(&file).expect("scenario fields are always representable")
}

/// Parses and validates a scenario file body.
pub fn scenario_from_toml(text: &str) -> Result<Scenario, String> {
    let f: ScenarioFile = toml::from_str(text).map_err(|e| e.to_string())?;
    if f.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            f.schema_version
        ));
    }
    let channels = f
        .channels
        .iter()
        .map(|c| ChannelParams::new(c.lambda_per_s, c.mu_per_s, c.bandwidth_hz))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let s = Scenario {
        num_spectrum_sensors: f.num_spectrum_sensors,
        num_data_sensors: f.num_data_sensors,
        num_channels: f.num_channels,
        num_transceivers: f.num_transceivers,
        channels,
        period_s: f.period_s,
        sensing_phase_s: f.sensing_phase_s,
        mini_slot_s: f.mini_slot_s,
        sensing_energy_j: f.sensing_energy_j,
        harvest_rates_w: f.harvest_rates_w,
        target_false_alarm: f.target_false_alarm,
        samples_per_sensing: f.samples_per_sensing,
        misdetect_threshold: f.misdetect_threshold,
        collision_bound: f.collision_bound,
        pu_snr: matrix_of(&f.pu_snr_linear, f.num_channels, "pu_snr_linear")?,
        data_gain: matrix_of(&f.data_gain_per_w, f.num_channels, "data_gain_per_w")?,
        demands_bits: f.demands_bits,
        p_max_w: f.p_max_w,
    };
    s.validate().map_err(|e| e.to_string())?;
    Ok(s)
}

pub fn save_scenario(s: &Scenario, path: &Path) -> Result<(), SimError> {
    std::fs::write(path, scenario_to_toml(s)).map_err(|e| SimError::io(path, e))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    scenario_from_toml(&text).map_err(|message| SimError::Format {
        path: path.to_path_buf(),
        message,
    })
}
