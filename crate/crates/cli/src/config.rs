//! Run configuration file (TOML).
//!
//! Every section has defaults, so an empty file is the reference system. Sweep
//! axes refer to fields by dotted path, e.g. `chain.dac_bits`.

use rfwpt::channel::ErPosition;
use rfwpt::optimizer::SwarmConfig;
use rfwpt::rectenna::RectennaParams;
use rfwpt::power::PowerParams;
use rfwpt::signal::{PhaseWord, RappHpa, ToneSet};
use rfwpt::system::{Profile, SystemConfig, SystemModel};
use rfwpt::{SwarmConfig64, SystemConfig64, ToneSet64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Paper,
    #[default]
    Desk,
}

impl From<ProfileName> for Profile {
    fn from(p: ProfileName) -> Self {
        match p {
            ProfileName::Paper => Profile::Paper,
            ProfileName::Desk => Profile::Desk,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatName {
    /// Flat CSV with a header row.
    Table,
    /// JSON document.
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformSection {
    pub tones: usize,
    pub bandwidth_hz: f64,
    /// Tone amplitudes (V) for `simulate`; defaults to 0.5 V on every tone.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<f64>>,
    /// Tone phases (rad) for `simulate`; defaults to zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
    /// Phase-shifter selections for `simulate`; defaults to all zeros.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_word: Option<Vec<u32>>,
}

impl Default for WaveformSection {
    fn default() -> Self {
        Self {
            tones: 8,
            bandwidth_hz: 10e6,
            amplitudes: None,
            phases: None,
            phase_word: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainSection {
    pub dac_bits: u32,
    pub dac_range_v: f64,
    pub dac_sample_rate_hz: f64,
    pub carrier_hz: f64,
    /// Overrides the profile's simulation carrier.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim_carrier_hz: Option<f64>,
    /// Overrides the profile's passband sample rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim_sample_rate_hz: Option<f64>,
    pub hpa_gain: f64,
    pub hpa_saturation_v: f64,
    pub hpa_smoothness: f64,
    pub ps_bits: u32,
    pub ps_insertion_loss_db: f64,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            dac_bits: 3,
            dac_range_v: 1.0,
            dac_sample_rate_hz: 100e6,
            carrier_hz: 5.18e9,
            sim_carrier_hz: None,
            sim_sample_rate_hz: None,
            hpa_gain: 10.0,
            hpa_saturation_v: 10.0,
            hpa_smoothness: 4.0,
            ps_bits: 3,
            ps_insertion_loss_db: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArraySection {
    /// Square array with `rows = cols = √elements`; overrides rows and cols.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
    pub rows: usize,
    pub cols: usize,
    pub boresight: f64,
}

impl Default for ArraySection {
    fn default() -> Self {
        Self {
            elements: None,
            rows: 5,
            cols: 5,
            boresight: 2.0,
        }
    }
}

/// Receiver position (m). The array lies in the x–z plane facing +y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReceiverSection {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for ReceiverSection {
    fn default() -> Self {
        Self { x: 0.0, y: 3.0, z: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RectennaSection {
    pub source_resistance_ohm: f64,
    pub load_resistance_ohm: f64,
    pub saturation_current_a: f64,
    pub thermal_voltage_v: f64,
    pub ideality: f64,
}

impl Default for RectennaSection {
    fn default() -> Self {
        Self {
            source_resistance_ohm: 50.0,
            load_resistance_ohm: 1600.0,
            saturation_current_a: 5e-6,
            thermal_voltage_v: 25.86e-3,
            ideality: 1.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerSection {
    pub supply_voltage_v: f64,
    pub unit_current_a: f64,
    pub parasitic_capacitance_f: f64,
    pub correction: f64,
    pub mixer_w: f64,
    pub local_oscillator_w: f64,
    pub hpa_input_resistance_ohm: f64,
    pub hpa_output_resistance_ohm: f64,
}

impl Default for PowerSection {
    fn default() -> Self {
        Self {
            supply_voltage_v: 3.0,
            unit_current_a: 10e-6,
            parasitic_capacitance_f: 1e-12,
            correction: 1.0,
            mixer_w: 23e-3,
            local_oscillator_w: 5e-3,
            hpa_input_resistance_ohm: 1.0,
            hpa_output_resistance_ohm: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwarmSection {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_fraction: f64,
    pub seed: u64,
    pub amplitude_max_v: f64,
    pub required_dc_w: f64,
    pub penalty: f64,
}

impl Default for SwarmSection {
    fn default() -> Self {
        let d = SwarmConfig64::default();
        Self {
            particles: d.particles,
            iterations: d.iterations,
            inertia: d.inertia,
            cognitive: d.cognitive,
            social: d.social,
            velocity_fraction: d.velocity_fraction,
            seed: d.seed,
            amplitude_max_v: d.amplitude_max,
            required_dc_w: d.required_dc,
            penalty: d.penalty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<FormatName>,
}

/// Assignments for one sweep point and the resulting config.
pub type SweepPoint = (Vec<(String, toml::Value)>, Result<RunConfig, CliError>);

/// One sweep axis: a dotted parameter path and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub profile: ProfileName,
    pub waveform: WaveformSection,
    pub chain: ChainSection,
    pub array: ArraySection,
    pub receiver: ReceiverSection,
    pub rectenna: RectennaSection,
    pub power: PowerSection,
    pub swarm: SwarmSection,
    pub output: OutputSection,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    fn to_value(&self) -> Result<toml::Value, CliError> {
        toml::Value::try_from(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Validates the physical configuration and every sweep axis.
    pub fn check(&self) -> Result<(), CliError> {
        self.system()?;
        self.swarm_config()?.validate()?;
        if let Some(a) = &self.waveform.amplitudes {
            if a.len() != self.waveform.tones {
                return Err(CliError::config("waveform.amplitudes", "length must equal waveform.tones"));
            }
        }
        if let Some(p) = &self.waveform.phases {
            if p.len() != self.waveform.tones {
                return Err(CliError::config("waveform.phases", "length must equal waveform.tones"));
            }
        }
        if !self.sweep.is_empty() {
            let base = self.to_value()?;
            for axis in &self.sweep {
                if axis.values.is_empty() {
                    return Err(CliError::config(&format!("sweep.{}", axis.path), "value list is empty"));
                }
                if axis.path == "sweep" || axis.path.starts_with("sweep.") {
                    return Err(CliError::config(&axis.path, "cannot sweep the sweep list"));
                }
                for v in &axis.values {
                    let mut probe = base.clone();
                    assign(&mut probe, &axis.path, v.clone())?;
                    let _: RunConfig = probe
                        .try_into()
                        .map_err(|e: toml::de::Error| CliError::config(&axis.path, e.message()))?;
                }
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> Profile {
        self.profile.into()
    }

    fn array_shape(&self) -> Result<(usize, usize), CliError> {
        match self.array.elements {
            None => Ok((self.array.rows, self.array.cols)),
            Some(n) => {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n || n == 0 {
                    return Err(CliError::config("array.elements", "must be a positive perfect square"));
                }
                Ok((side, side))
            }
        }
    }

    pub fn system(&self) -> Result<SystemConfig64, CliError> {
        let mut sys = SystemConfig::reference(self.waveform.tones.max(1), self.profile());
        sys.tone_count = self.waveform.tones;
        sys.bandwidth = self.waveform.bandwidth_hz;
        let c = &self.chain;
        sys.chain.dac_bits = c.dac_bits;
        sys.chain.dac_range = c.dac_range_v;
        sys.chain.dac_sample_rate = c.dac_sample_rate_hz;
        sys.chain.carrier = c.carrier_hz;
        sys.chain.hpa = RappHpa {
            gain: c.hpa_gain,
            saturation: c.hpa_saturation_v,
            smoothness: c.hpa_smoothness,
        };
        sys.chain.ps_bits = c.ps_bits;
        if !c.ps_insertion_loss_db.is_finite() || c.ps_insertion_loss_db < 0.0 {
            return Err(CliError::config("chain.ps_insertion_loss_db", "must be a finite, non-negative dB value"));
        }
        sys.chain.ps_insertion_loss = 10f64.powf(c.ps_insertion_loss_db / 10.0);
        let (rows, cols) = self.array_shape()?;
        sys.array.rows = rows;
        sys.array.cols = cols;
        sys.array.boresight = self.array.boresight;
        sys.receiver = ErPosition::new(self.receiver.x, self.receiver.y, self.receiver.z);
        let r = &self.rectenna;
        sys.rectenna = RectennaParams {
            source_resistance: r.source_resistance_ohm,
            load_resistance: r.load_resistance_ohm,
            saturation_current: r.saturation_current_a,
            thermal_voltage: r.thermal_voltage_v,
            ideality: r.ideality,
        };
        let p = &self.power;
        sys.power = PowerParams {
            supply_voltage: p.supply_voltage_v,
            unit_current: p.unit_current_a,
            parasitic_capacitance: p.parasitic_capacitance_f,
            correction: p.correction,
            mixer: p.mixer_w,
            local_oscillator: p.local_oscillator_w,
            hpa_input_resistance: p.hpa_input_resistance_ohm,
            hpa_output_resistance: p.hpa_output_resistance_ohm,
        };
        if sys.tone_count == 0 {
            return Err(CliError::config("waveform.tones", "at least one tone is required"));
        }
        sys.apply_profile(self.profile());
        if let Some(f) = c.sim_carrier_hz {
            sys.chain.sim_carrier = f;
        }
        if let Some(f) = c.sim_sample_rate_hz {
            sys.chain.sim_sample_rate = f;
        }
        sys.validate()?;
        Ok(sys)
    }

    pub fn model(&self) -> Result<rfwpt::SystemModel64, CliError> {
        Ok(SystemModel::new(self.system()?)?)
    }

    pub fn swarm_config(&self) -> Result<SwarmConfig64, CliError> {
        let s = &self.swarm;
        Ok(SwarmConfig {
            particles: s.particles,
            iterations: s.iterations,
            inertia: s.inertia,
            cognitive: s.cognitive,
            social: s.social,
            velocity_fraction: s.velocity_fraction,
            seed: s.seed,
            amplitude_max: s.amplitude_max_v,
            required_dc: s.required_dc_w,
            penalty: s.penalty,
        })
    }

    /// Tones and phase word for a single simulation.
    pub fn design(&self, model: &rfwpt::SystemModel64) -> Result<(ToneSet64, PhaseWord), CliError> {
        let k = self.waveform.tones;
        let amps = self.waveform.amplitudes.clone().unwrap_or_else(|| vec![0.5; k]);
        let phases = self.waveform.phases.clone().unwrap_or_else(|| vec![0.0; k]);
        let tones = ToneSet::new(amps, phases, model.tone_spacing())
            .map_err(|e| CliError::config("waveform", &e.to_string()))?;
        let word = match &self.waveform.phase_word {
            Some(w) => PhaseWord::new(w.clone(), model.ps_bits()),
            None => PhaseWord::zeros(model.elements(), model.ps_bits()),
        }
        .map_err(|e| CliError::config("waveform.phase_word", &e.to_string()))?;
        if word.len() != model.elements() {
            return Err(CliError::config(
                "waveform.phase_word",
                &format!("needs {} entries, one per element", model.elements()),
            ));
        }
        Ok((tones, word))
    }

    /// Cartesian product of the sweep axes, first axis slowest. Each point is
    /// the list of `(path, value)` assignments and the resulting config.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>, CliError> {
        let mut base = self.clone();
        base.sweep.clear();
        let base = base.to_value()?;
        let mut combos: Vec<Vec<(String, toml::Value)>> = vec![vec![]];
        for axis in &self.sweep {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push((axis.path.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        Ok(combos
            .into_iter()
            .map(|assignment| {
                let mut value = base.clone();
                let cfg = assignment
                    .iter()
                    .try_for_each(|(p, v)| assign(&mut value, p, v.clone()))
                    .and_then(|_| {
                        let cfg: RunConfig = value
                            .try_into()
                            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
                        cfg.check()?;
                        Ok(cfg)
                    });
                (assignment, cfg)
            })
            .collect())
    }
}

/// Sets `path` (dotted) inside a TOML table. Every parent must already be a table.
pub fn assign(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<(), CliError> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::config(path, "empty parameter path"))?;
    let mut node = root;
    for part in parts {
        node = node
            .get_mut(part)
            .filter(|n| n.is_table())
            .ok_or_else(|| CliError::config(path, &format!("unknown section `{part}`")))?;
    }
    match node.as_table_mut() {
        Some(t) => {
            t.insert(leaf.to_string(), value);
            Ok(())
        }
        None => Err(CliError::config(path, "parent is not a section")),
    }
}
