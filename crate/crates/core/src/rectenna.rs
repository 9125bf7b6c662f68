//! Single-diode rectenna. The DC output voltage solves
//! `e^{v/(ηV₀)} (1 + v/(R_L I₀)) = ⟨e^{√R_s r(t)/(ηV₀)}⟩_T`,
//! which has the closed form `v = ηV₀ W(c e^c ⟨…⟩) − R_L I₀` with `c = R_L I₀/(ηV₀)`.
//!
//! The periodic mean on the right is carried as a logarithm throughout:
//! realistic received amplitudes overflow the exponential otherwise.

use crate::error::{Error, Result, Stage};
use crate::lambert::lambert_w0_ln;
use crate::scalar::Scalar;
use crate::signal::SampledSignal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectennaParams<T> {
    /// Antenna source resistance `R_s` (Ω), matched to the rectifier input.
    pub source_resistance: T,
    /// Load resistance `R_L` (Ω).
    pub load_resistance: T,
    /// Diode reverse saturation current `I₀` (A).
    pub saturation_current: T,
    /// Thermal voltage `V₀` (V).
    pub thermal_voltage: T,
    /// Diode ideality factor `η`.
    pub ideality: T,
}

impl<T: Scalar> RectennaParams<T> {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("rectenna.source_resistance", self.source_resistance),
            ("rectenna.load_resistance", self.load_resistance),
            ("rectenna.saturation_current", self.saturation_current),
            ("rectenna.thermal_voltage", self.thermal_voltage),
        ];
        for (field, v) in checks {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::config(field, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.ideality >= T::one()) || !self.ideality.is_finite() {
            return Err(Error::config("rectenna.ideality", "must be at least 1"));
        }
        Ok(())
    }

    /// `ηV₀`.
    pub fn diode_voltage(&self) -> T {
        self.ideality * self.thermal_voltage
    }

    /// `R_L I₀`.
    pub fn load_drop(&self) -> T {
        self.load_resistance * self.saturation_current
    }

    /// `c = R_L I₀ / (ηV₀)`.
    pub fn load_ratio(&self) -> T {
        self.load_drop() / self.diode_voltage()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarvestResult<T> {
    pub v_out_dc: T,
    pub p_out_dc: T,
    /// `ln ⟨e^{√R_s r/(ηV₀)}⟩_T`.
    pub rhs_log: T,
}

/// `ln(1/n Σ e^{s_i})` without overflow.
pub fn log_mean_exp<T: Scalar>(values: impl IntoIterator<Item = T> + Clone) -> T {
    let max = values.clone().into_iter().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    let mut n = 0usize;
    let mut sum = T::zero();
    for v in values {
        sum = sum + (v - max).exp();
        n += 1;
    }
    max + (sum / T::from_usize_lossy(n)).ln()
}

/// Logarithm of the periodic mean of the diode exponential over one period of `r`.
pub fn rhs_log_mean<T: Scalar>(r: &SampledSignal<T>, params: &RectennaParams<T>) -> T {
    rhs_log_from_samples(r.samples().iter().map(|s| s.re), params)
}

pub(crate) fn rhs_log_from_samples<T: Scalar>(
    samples: impl Iterator<Item = T> + Clone,
    params: &RectennaParams<T>,
) -> T {
    let k = params.source_resistance.sqrt() / params.diode_voltage();
    log_mean_exp(samples.map(move |v| k * v))
}

/// Closed-form DC output voltage from the log periodic mean.
pub fn dc_output_voltage<T: Scalar>(rhs_log: T, params: &RectennaParams<T>) -> Result<T> {
    if !rhs_log.is_finite() {
        return Err(Error::numerical(Stage::Rectenna, format!("periodic mean log {rhs_log} is not finite")));
    }
    if rhs_log == T::zero() {
        return Ok(T::zero());
    }
    let c = params.load_ratio();
    let w = lambert_w0_ln(c + c.ln() + rhs_log)?;
    Ok(params.diode_voltage() * w - params.load_drop())
}

/// `p = v² / R_L`.
pub fn harvested_power<T: Scalar>(v_out: T, load_resistance: T) -> T {
    v_out * v_out / load_resistance
}

/// Harvested DC voltage and power for a received RF period.
pub fn harvest<T: Scalar>(r: &SampledSignal<T>, params: &RectennaParams<T>) -> Result<HarvestResult<T>> {
    harvest_from_log(rhs_log_mean(r, params), params)
}

pub(crate) fn harvest_from_log<T: Scalar>(rhs_log: T, params: &RectennaParams<T>) -> Result<HarvestResult<T>> {
    let v = dc_output_voltage(rhs_log, params)?;
    Ok(HarvestResult {
        v_out_dc: v,
        p_out_dc: harvested_power(v, params.load_resistance),
        rhs_log,
    })
}

/// Bracketed bisection on the implicit diode equation, in log form:
/// `v/(ηV₀) + ln(1 + v/(R_L I₀)) = rhs_log`.
///
/// Independent of the Lambert-W route; used to cross-check it.
pub fn solve_implicit_oracle<T: Scalar>(rhs_log: T, params: &RectennaParams<T>) -> Result<T> {
    if !rhs_log.is_finite() {
        return Err(Error::numerical(Stage::Rectenna, "periodic mean log is not finite"));
    }
    let nv = params.diode_voltage();
    let drop = params.load_drop();
    let residual = |v: T| v / nv + (v / drop).ln_1p() - rhs_log;
    let mut lo = -drop * (T::one() - T::lit(1e-9));
    let mut hi = nv.max(drop);
    if residual(lo) > T::zero() {
        return Err(Error::numerical(Stage::Rectenna, "lower bracket lies above the root"));
    }
    let mut grow = 0;
    while residual(hi) < T::zero() {
        lo = hi;
        hi = hi * T::lit(2.0);
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::numerical(Stage::Rectenna, "failed to bracket the diode equation root"));
        }
    }
    let tol = T::lit(1e-12);
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        if residual(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}
