//! Transmitter power consumption: DAC, mixer, local oscillator, HPA and the
//! generated signal power.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{SampledSignal, ToneSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams<T> {
    /// DAC supply voltage `V_dd` (V).
    pub supply_voltage: T,
    /// LSB unit current source `I` (A).
    pub unit_current: T,
    /// Switch parasitic capacitance `C_p` (F).
    pub parasitic_capacitance: T,
    /// Second-order correction factor `α`.
    pub correction: T,
    /// Mixer consumption (W).
    pub mixer: T,
    /// Local oscillator consumption (W).
    pub local_oscillator: T,
    pub hpa_input_resistance: T,
    pub hpa_output_resistance: T,
}

impl<T: Scalar> PowerParams<T> {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("power.supply_voltage", self.supply_voltage),
            ("power.unit_current", self.unit_current),
            ("power.parasitic_capacitance", self.parasitic_capacitance),
            ("power.correction", self.correction),
            ("power.mixer", self.mixer),
            ("power.local_oscillator", self.local_oscillator),
            ("power.hpa_input_resistance", self.hpa_input_resistance),
            ("power.hpa_output_resistance", self.hpa_output_resistance),
        ];
        for (field, v) in checks {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::config(field, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Component-wise consumption; `total` is exactly the sum of the other five.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown<T> {
    pub dac: T,
    pub mixer: T,
    pub local_oscillator: T,
    /// May be negative for deeply saturated drive (output power below input power).
    pub hpa: T,
    pub signal: T,
    pub total: T,
}

/// `P_dac = α [V_dd I (2^{n_b} − 1) + C_p f_s V_dd² n_b] / 2`.
pub fn dac_power<T: Scalar>(bits: u32, sample_rate: T, params: &PowerParams<T>) -> T {
    let levels = T::lit(2f64.powi(bits as i32) - 1.0);
    let static_part = params.supply_voltage * params.unit_current * levels;
    let switching = params.parasitic_capacitance
        * sample_rate
        * params.supply_voltage
        * params.supply_voltage
        * T::lit(bits as f64);
    params.correction * (static_part + switching) / T::lit(2.0)
}

/// `P_out − P_in` with `P = E|x|²/R` over one period.
pub fn hpa_power<T: Scalar>(x_mix: &SampledSignal<T>, x_hpa: &SampledSignal<T>, params: &PowerParams<T>) -> Result<T> {
    if x_mix.len() != x_hpa.len() || x_mix.sample_rate() != x_hpa.sample_rate() {
        return Err(Error::Domain("HPA input and output must share rate and length".into()));
    }
    Ok(hpa_power_from_means(x_mix.mean_power(), x_hpa.mean_power(), params))
}

pub(crate) fn hpa_power_from_means<T: Scalar>(mean_in: T, mean_out: T, params: &PowerParams<T>) -> T {
    mean_out / params.hpa_output_resistance - mean_in / params.hpa_input_resistance
}

/// `P_s = (1/K) Σ |X_k|²`.
pub fn signal_power<T: Scalar>(tones: &ToneSet<T>) -> T {
    let sum: T = tones.amplitudes().iter().map(|&a| a * a).sum();
    sum / T::from_usize_lossy(tones.len())
}

pub fn total_power<T: Scalar>(dac: T, hpa: T, signal: T, params: &PowerParams<T>) -> PowerBreakdown<T> {
    PowerBreakdown {
        dac,
        mixer: params.mixer,
        local_oscillator: params.local_oscillator,
        hpa,
        signal,
        total: dac + params.mixer + params.local_oscillator + hpa + signal,
    }
}
