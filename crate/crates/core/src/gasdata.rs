//! Synthetic sewer-gas mixtures and the sensor-array response model.
//!
//! A mixture grid is the Cartesian product of per-gas concentration levels
//! and a humidity/temperature climate grid. Every grid point becomes one
//! labeled record whose features are the climate values followed by one
//! response per sensor:
//!
//! ```text
//! r = gain * log10(1 + C_target / r0) * (1 + b_h (H - 65)/100 + b_t (T - 20)/100)
//!   + sum_{j != target} kappa_j * log10(1 + C_j / r0_j)
//!   + eps,   eps ~ N(0, sigma^2)
//! ```
//!
//! Responses are floored at zero (a calibrated resistance ratio is never
//! negative). Labels come from the true concentrations, never from the noisy
//! responses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Instance, SAFE, UNSAFE};
use crate::error::{Error, Result};
use crate::numerics::rng::{derive_stream, tags, RngStream};

pub const REFERENCE_HUMIDITY: f64 = 65.0;
pub const REFERENCE_TEMPERATURE: f64 = 20.0;

/// One gas of the mixture with its concentration levels (ppm) and limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasSpec {
    pub name: String,
    pub levels: Vec<f64>,
    pub safety_upper: f64,
    pub safety_lower: f64,
}

/// A metal-oxide sensor targeting one gas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub target_gas: String,
    pub r0: f64,
    pub range_min: f64,
    pub range_max: f64,
    pub gain: f64,
    #[serde(default)]
    pub cross_gain: BTreeMap<String, f64>,
    pub humidity_coeff: f64,
    pub temperature_coeff: f64,
    pub noise_sigma: f64,
}

/// Ground-truth mixture at one climate point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSample {
    pub humidity: f64,
    pub temperature: f64,
    pub concentrations: BTreeMap<String, f64>,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub gas_specs: Vec<GasSpec>,
    pub sensor_specs: Vec<SensorSpec>,
    pub humidity_grid: Vec<f64>,
    pub temperature_grid: Vec<f64>,
    pub seed: u64,
    pub label_noise_rate: f64,
    /// When set, every gas must have exactly this many levels above its
    /// upper safety limit.
    pub levels_above_limit: Option<usize>,
}

fn gas(name: &str, levels: &[f64], lower: f64, upper: f64) -> GasSpec {
    GasSpec {
        name: name.to_string(),
        levels: levels.to_vec(),
        safety_upper: upper,
        safety_lower: lower,
    }
}

pub const DEFAULT_CROSS_GAIN: f64 = 0.05;

fn sensor(target: &str, r0: f64, range: (f64, f64), gain: f64, gases: &[&str]) -> SensorSpec {
    SensorSpec {
        target_gas: target.to_string(),
        r0,
        range_min: range.0,
        range_max: range.1,
        gain,
        cross_gain: gases
            .iter()
            .filter(|g| **g != target)
            .map(|g| (g.to_string(), DEFAULT_CROSS_GAIN))
            .collect(),
        humidity_coeff: 0.1,
        temperature_coeff: 0.05,
        noise_sigma: 0.05,
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        let names = ["no2", "co", "h2s", "nh3", "ch4"];
        SynthConfig {
            gas_specs: vec![
                gas("no2", &[0.0, 1.0, 3.0, 10.0], 0.25, 5.0),
                gas("co", &[10.0, 35.0, 70.0, 200.0], 35.0, 100.0),
                gas("h2s", &[10.0, 30.0, 70.0, 150.0], 50.0, 100.0),
                gas("nh3", &[5.0, 20.0, 35.0, 60.0], 25.0, 40.0),
                gas("ch4", &[1000.0, 3000.0, 7000.0, 12000.0], 5000.0, 10000.0),
            ],
            // base-resistance references and ranges of MiCS-4514, MQ-7,
            // MQ-136, MQ-135 and MQ-4; gains keep every response below 8
            sensor_specs: vec![
                sensor("no2", 0.25, (0.25, 5.0), 4.0, &names),
                sensor("co", 100.0, (20.0, 1000.0), 12.0, &names),
                sensor("h2s", 10.0, (1.0, 100.0), 5.0, &names),
                sensor("nh3", 100.0, (10.0, 300.0), 30.0, &names),
                sensor("ch4", 1000.0, (300.0, 10000.0), 5.5, &names),
            ],
            humidity_grid: vec![60.0, 65.0, 70.0, 75.0],
            temperature_grid: vec![20.0, 30.0, 40.0, 50.0],
            seed: 42,
            label_noise_rate: 0.0,
            levels_above_limit: Some(1),
        }
    }
}

impl SynthConfig {
    /// Reduced grid (2,048 records) used by the fast benchmark profile.
    pub fn fast() -> Self {
        SynthConfig {
            humidity_grid: vec![60.0, 75.0],
            temperature_grid: vec![30.0],
            ..SynthConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gas_specs.is_empty() {
            return Err(Error::config("no gases configured"));
        }
        let mut names = std::collections::BTreeSet::new();
        for g in &self.gas_specs {
            if !names.insert(g.name.as_str()) {
                return Err(Error::config(format!("duplicate gas {}", g.name)));
            }
            if g.levels.is_empty() {
                return Err(Error::config(format!("gas {} has no levels", g.name)));
            }
            if g.levels.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
                return Err(Error::config(format!(
                    "gas {} has a negative or non-finite level",
                    g.name
                )));
            }
            if g.levels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config(format!(
                    "levels of {} are not strictly increasing",
                    g.name
                )));
            }
            if g.safety_lower > g.safety_upper {
                return Err(Error::config(format!("gas {}: lower limit above upper limit", g.name)));
            }
            if let Some(expected) = self.levels_above_limit {
                let above = g.levels.iter().filter(|&&l| l > g.safety_upper).count();
                if above != expected {
                    return Err(Error::config(format!(
                        "gas {} has {above} levels above its limit, expected {expected}",
                        g.name
                    )));
                }
            }
        }
        if self.sensor_specs.is_empty() {
            return Err(Error::config("no sensors configured"));
        }
        for s in &self.sensor_specs {
            if !names.contains(s.target_gas.as_str()) {
                return Err(Error::config(format!("sensor targets unknown gas {}", s.target_gas)));
            }
            if !(s.r0 > 0.0) {
                return Err(Error::config(format!("sensor {}: r0 must be positive", s.target_gas)));
            }
            if !(s.range_min < s.range_max) {
                return Err(Error::config(format!("sensor {}: empty range", s.target_gas)));
            }
            if !(s.noise_sigma >= 0.0) {
                return Err(Error::config(format!("sensor {}: negative noise", s.target_gas)));
            }
            for (g, &k) in &s.cross_gain {
                if !names.contains(g.as_str()) || *g == s.target_gas {
                    return Err(Error::config(format!(
                        "sensor {}: cross gain for invalid gas {g}",
                        s.target_gas
                    )));
                }
                if !(k >= 0.0 && k < s.gain) {
                    return Err(Error::config(format!(
                        "sensor {}: cross gain {k} for {g} must lie in [0, gain)",
                        s.target_gas
                    )));
                }
            }
        }
        for g in &self.gas_specs {
            if !self.sensor_specs.iter().any(|s| s.target_gas == g.name) {
                return Err(Error::config(format!("gas {} has no sensor", g.name)));
            }
        }
        if self.humidity_grid.is_empty() || self.temperature_grid.is_empty() {
            return Err(Error::config("climate grids must be non-empty"));
        }
        if !(0.0..=1.0).contains(&self.label_noise_rate) {
            return Err(Error::config("label_noise_rate must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Column names of the synthesized dataset.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = vec!["humidity".to_string(), "temperature".to_string()];
        names.extend(self.sensor_specs.iter().map(|s| format!("in_{}", s.target_gas)));
        names
    }

    /// Number of grid points.
    pub fn grid_size(&self) -> usize {
        self.gas_specs.iter().map(|g| g.levels.len()).product::<usize>()
            * self.humidity_grid.len()
            * self.temperature_grid.len()
    }

    fn r0_by_gas(&self) -> BTreeMap<String, f64> {
        self.sensor_specs.iter().map(|s| (s.target_gas.clone(), s.r0)).collect()
    }
}

/// Every grid point, humidity outermost, then temperature, then the gases in
/// configured order with the last gas varying fastest.
pub fn enumerate_mixtures(config: &SynthConfig) -> Result<Vec<MixtureSample>> {
    if let Some(g) = config.gas_specs.iter().find(|g| g.levels.is_empty()) {
        return Err(Error::config(format!("gas {} has no levels", g.name)));
    }
    if config.gas_specs.is_empty() {
        return Err(Error::config("no gases configured"));
    }
    let mut out = Vec::with_capacity(config.grid_size());
    let radices: Vec<usize> = config.gas_specs.iter().map(|g| g.levels.len()).collect();
    let combos: usize = radices.iter().product();
    for &h in &config.humidity_grid {
        for &t in &config.temperature_grid {
            for mut code in 0..combos {
                let mut digits = vec![0usize; radices.len()];
                for (d, &r) in digits.iter_mut().zip(&radices).rev() {
                    *d = code % r;
                    code /= r;
                }
                let concentrations = config
                    .gas_specs
                    .iter()
                    .zip(&digits)
                    .map(|(g, &d)| (g.name.clone(), g.levels[d]))
                    .collect();
                let mut sample = MixtureSample {
                    humidity: h,
                    temperature: t,
                    concentrations,
                    label: SAFE,
                };
                sample.label = label_sample(&sample, &config.gas_specs)?;
                out.push(sample);
            }
        }
    }
    Ok(out)
}

/// Deterministic label: unsafe iff some concentration strictly exceeds its
/// gas's upper safety limit.
pub fn label_sample(sample: &MixtureSample, gas_specs: &[GasSpec]) -> Result<u8> {
    for key in sample.concentrations.keys() {
        if !gas_specs.iter().any(|g| &g.name == key) {
            return Err(Error::data(format!("unknown gas {key}")));
        }
    }
    let mut unsafe_ = false;
    for g in gas_specs {
        let c = sample
            .concentrations
            .get(&g.name)
            .ok_or_else(|| Error::data(format!("sample lacks gas {}", g.name)))?;
        if *c > g.safety_upper {
            unsafe_ = true;
        }
    }
    Ok(if unsafe_ { UNSAFE } else { SAFE })
}

/// Flips `label` with probability `rate`, using the stream of record `index`.
pub fn apply_label_noise(label: u8, rate: f64, seed: u64, index: usize) -> u8 {
    if rate <= 0.0 {
        return label;
    }
    let mut s = derive_stream(seed, &[tags::LABEL_NOISE, index as u64]);
    if s.uniform() < rate {
        1 - label
    } else {
        label
    }
}

/// Response of one sensor to one mixture. One normal variate is drawn from
/// `rng` on every call, even when `noise_sigma` is zero.
pub fn sensor_response(
    sensor: &SensorSpec,
    r0_by_gas: &BTreeMap<String, f64>,
    sample: &MixtureSample,
    rng: &mut RngStream,
) -> Result<f64> {
    if let Some((g, c)) = sample.concentrations.iter().find(|(_, c)| !(**c >= 0.0)) {
        return Err(Error::data(format!("negative concentration {c} for {g}")));
    }
    let target = *sample
        .concentrations
        .get(&sensor.target_gas)
        .ok_or_else(|| Error::data(format!("sample lacks gas {}", sensor.target_gas)))?;
    let modulation = 1.0
        + sensor.humidity_coeff * (sample.humidity - REFERENCE_HUMIDITY) / 100.0
        + sensor.temperature_coeff * (sample.temperature - REFERENCE_TEMPERATURE) / 100.0;
    let mut r = sensor.gain * (1.0 + target / sensor.r0).log10() * modulation;
    for (g, &kappa) in &sensor.cross_gain {
        if g == &sensor.target_gas || kappa == 0.0 {
            continue;
        }
        let c = sample.concentrations.get(g).copied().unwrap_or(0.0);
        let r0 = r0_by_gas
            .get(g)
            .copied()
            .ok_or_else(|| Error::data(format!("no reference resistance for {g}")))?;
        r += kappa * (1.0 + c / r0).log10();
    }
    let eps = rng.normal();
    r += sensor.noise_sigma * eps;
    Ok(r.max(0.0))
}

/// Builds the labeled dataset. Record `i` draws its sensor noise from stream
/// `(seed, [SENSOR_NOISE, i])`, so any partition of the grid reproduces the
/// same records.
pub fn synthesize_dataset(config: &SynthConfig) -> Result<Dataset> {
    config.validate()?;
    let mixtures = enumerate_mixtures(config)?;
    let r0 = config.r0_by_gas();
    let mut instances = Vec::with_capacity(mixtures.len());
    for (i, m) in mixtures.iter().enumerate() {
        let mut rng = derive_stream(config.seed, &[tags::SENSOR_NOISE, i as u64]);
        let mut features = Vec::with_capacity(2 + config.sensor_specs.len());
        features.push(m.humidity);
        features.push(m.temperature);
        for s in &config.sensor_specs {
            features.push(sensor_response(s, &r0, m, &mut rng)?);
        }
        let label = apply_label_noise(m.label, config.label_noise_rate, config.seed, i);
        instances.push(Instance { features, label });
    }
    Dataset::new(config.feature_names(), instances)
}
