//! End-to-end model: tones and phase word in, harvested DC power and
//! transmitter consumption out.

use num_complex::Complex;

use crate::channel::{apply_band_gains, element_positions, received_signal, ArrayGeometry, ChannelMatrix, ErPosition};
use crate::error::{Error, Result, Stage};
use crate::fft::{checked_bin, FftPair};
use crate::power::{dac_power, hpa_power, hpa_power_from_means, signal_power, total_power, PowerBreakdown, PowerParams};
use crate::rectenna::{harvest, harvest_from_log, rhs_log_from_samples, HarvestResult, RectennaParams};
use crate::scalar::Scalar;
use crate::signal::{self,
    apply_phase_shifters, cutoff_bin, element_scale, fill_tone_bins, hpa_rapp, lowpass_filter, passband_plan,
    quantize_dac, samples_per_period, synthesize_multitone, upconvert, PhaseWord, Quantizer, RappHpa,
    SampledSignal, ToneSet,
};

/// Transmitter hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig<T> {
    pub dac_bits: u32,
    /// DAC full-scale `A` (V); the input range is `[-A, A]`.
    pub dac_range: T,
    pub dac_sample_rate: T,
    /// Physical RF carrier; sets the array spacing and per-bin wavelengths.
    pub carrier: T,
    /// Carrier used when sampling the passband period. Equal to `carrier` for
    /// faithful runs, smaller for desk-scale runs.
    pub sim_carrier: T,
    pub sim_sample_rate: T,
    pub hpa: RappHpa<T>,
    pub ps_bits: u32,
    /// Linear power ratio (≥ 1).
    pub ps_insertion_loss: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig<T> {
    pub rows: usize,
    pub cols: usize,
    /// Boresight exponent `b` of the element radiation profile.
    pub boresight: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<T> {
    pub tone_count: usize,
    /// Baseband bandwidth `K·Δf`.
    pub bandwidth: T,
    pub chain: ChainConfig<T>,
    pub array: ArrayConfig<T>,
    pub receiver: ErPosition<T>,
    pub rectenna: RectennaParams<T>,
    pub power: PowerParams<T>,
}

/// How the passband is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Passband sampled at the physical carrier.
    Paper,
    /// Carrier snapped to `64·Δf` for sampling; wavelengths stay physical.
    Desk,
}

/// Carrier bin used by the desk profile.
pub const DESK_CARRIER_BINS: usize = 64;

/// Oversampling margin over passband Nyquist used for the default simulation rate.
pub const SIM_RATE_MARGIN: f64 = 2.5;

impl<T: Scalar> SystemConfig<T> {
    /// Reference system: 3 m boresight receiver, 10 MHz bandwidth, 100 MHz DAC,
    /// 5.18 GHz carrier, 5×5 array and the reference component values.
    pub fn reference(tone_count: usize, profile: Profile) -> Self {
        let lit = T::lit;
        let mut cfg = Self {
            tone_count,
            bandwidth: lit(10e6),
            chain: ChainConfig {
                dac_bits: 3,
                dac_range: lit(1.0),
                dac_sample_rate: lit(100e6),
                carrier: lit(5.18e9),
                sim_carrier: lit(5.18e9),
                sim_sample_rate: lit(0.0),
                hpa: RappHpa {
                    gain: lit(10.0),
                    saturation: lit(10.0),
                    smoothness: lit(4.0),
                },
                ps_bits: 3,
                ps_insertion_loss: lit(10f64.powf(0.05)),
            },
            array: ArrayConfig {
                rows: 5,
                cols: 5,
                boresight: lit(2.0),
            },
            receiver: ErPosition::boresight(lit(3.0)),
            rectenna: RectennaParams {
                source_resistance: lit(50.0),
                load_resistance: lit(1600.0),
                saturation_current: lit(5e-6),
                thermal_voltage: lit(25.86e-3),
                ideality: lit(1.05),
            },
            power: PowerParams {
                supply_voltage: lit(3.0),
                unit_current: lit(10e-6),
                parasitic_capacitance: lit(1e-12),
                correction: lit(1.0),
                mixer: lit(23e-3),
                local_oscillator: lit(5e-3),
                hpa_input_resistance: lit(1.0),
                hpa_output_resistance: lit(1.0),
            },
        };
        cfg.apply_profile(profile);
        cfg
    }

    pub fn tone_spacing(&self) -> T {
        self.bandwidth / T::from_usize_lossy(self.tone_count.max(1))
    }

    pub fn elements(&self) -> usize {
        self.array.rows * self.array.cols
    }

    /// Sets the simulation carrier and rate for `profile` from the current
    /// physical carrier, bandwidth and tone count.
    pub fn apply_profile(&mut self, profile: Profile) {
        let spacing = self.tone_spacing();
        let carrier_bins = match profile {
            Profile::Paper => (self.chain.carrier / spacing).as_f64().round().max(1.0) as usize,
            Profile::Desk => DESK_CARRIER_BINS,
        };
        self.chain.sim_carrier = T::from_usize_lossy(carrier_bins) * spacing;
        self.chain.sim_sample_rate = T::from_usize_lossy(default_sim_bins(carrier_bins, self.tone_count)) * spacing;
    }

    pub fn validate(&self) -> Result<()> {
        if self.tone_count == 0 {
            return Err(Error::config("waveform.tones", "at least one tone is required"));
        }
        if !(self.bandwidth > T::zero()) {
            return Err(Error::config("waveform.bandwidth", "must be positive"));
        }
        let c = &self.chain;
        if !(1..=24).contains(&c.dac_bits) {
            return Err(Error::config("chain.dac_bits", "must be in 1..=24"));
        }
        if !(c.dac_range > T::zero()) {
            return Err(Error::config("chain.dac_range", "must be positive"));
        }
        if !(1..=16).contains(&c.ps_bits) {
            return Err(Error::config("chain.ps_bits", "must be in 1..=16"));
        }
        if !(c.ps_insertion_loss >= T::one()) {
            return Err(Error::config("chain.ps_insertion_loss", "linear loss must be at least 1 (0 dB)"));
        }
        if !(c.carrier > T::zero()) {
            return Err(Error::config("chain.carrier", "must be positive"));
        }
        RappHpa::new(c.hpa.gain, c.hpa.saturation, c.hpa.smoothness)?;
        let spacing = self.tone_spacing();
        let digital = samples_per_period(c.dac_sample_rate, spacing, "chain.dac_sample_rate")?;
        if digital < 2 * self.tone_count {
            return Err(Error::config("chain.dac_sample_rate", "must be at least twice the bandwidth"));
        }
        passband_plan(self.bandwidth, c.sim_carrier, c.sim_sample_rate, spacing)?;
        if self.array.rows == 0 || self.array.cols == 0 {
            return Err(Error::config("array", "rows and columns must be at least 1"));
        }
        if !(self.array.boresight >= T::zero()) {
            return Err(Error::config("array.boresight", "must be non-negative"));
        }
        self.rectenna.validate()?;
        self.power.validate()?;
        Ok(())
    }
}

/// Smallest sample count per period at or above `SIM_RATE_MARGIN × (carrier + K)` bins.
pub fn default_sim_bins(carrier_bins: usize, tone_count: usize) -> usize {
    // 2.5 × n rounded up, in integers.
    (5 * (carrier_bins + tone_count)).div_ceil(2)
}

/// Harvest and consumption for one transmit configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub harvest: HarvestResult<T>,
    pub breakdown: PowerBreakdown<T>,
}

/// Every intermediate waveform of one pass through the chain.
#[derive(Debug, Clone)]
pub struct StageReport<T> {
    pub digital: SampledSignal<T>,
    pub dac: SampledSignal<T>,
    pub lowpass: SampledSignal<T>,
    /// Filter-domain spectrum of `lowpass` (exact zeros above the bandwidth).
    pub lowpass_spectrum: Vec<Complex<T>>,
    pub mixer: SampledSignal<T>,
    pub hpa: SampledSignal<T>,
    pub receiver: SampledSignal<T>,
    pub evaluation: Evaluation<T>,
}

/// Precomputed geometry, channel and transforms for a validated configuration.
#[derive(Debug, Clone)]
pub struct SystemModel<T: Scalar> {
    config: SystemConfig<T>,
    spacing: T,
    half_width: usize,
    carrier_bin: usize,
    geometry: ArrayGeometry<T>,
    channel: ChannelMatrix<T>,
    quantizer: Quantizer<T>,
    dac_power: T,
    digital_fft: FftPair<T>,
    sim_fft: FftPair<T>,
}

impl<T: Scalar> SystemModel<T> {
    pub fn new(config: SystemConfig<T>) -> Result<Self> {
        config.validate()?;
        let spacing = config.tone_spacing();
        let chain = &config.chain;
        let digital_len = samples_per_period(chain.dac_sample_rate, spacing, "chain.dac_sample_rate")?;
        let (carrier_bin, sim_len) = passband_plan(config.bandwidth, chain.sim_carrier, chain.sim_sample_rate, spacing)?;
        let half_width = cutoff_bin(config.bandwidth, spacing);
        let geometry = element_positions(config.array.rows, config.array.cols, chain.carrier)?;
        let channel = ChannelMatrix::build(
            &geometry,
            &config.receiver,
            chain.carrier,
            spacing,
            carrier_bin,
            half_width,
            config.array.boresight,
        )?;
        Ok(Self {
            spacing,
            half_width,
            carrier_bin,
            geometry,
            channel,
            quantizer: Quantizer::new(chain.dac_bits, chain.dac_range),
            dac_power: dac_power(chain.dac_bits, chain.dac_sample_rate, &config.power),
            digital_fft: FftPair::new(digital_len),
            sim_fft: FftPair::new(sim_len),
            config,
        })
    }

    pub fn config(&self) -> &SystemConfig<T> {
        &self.config
    }

    pub fn tone_count(&self) -> usize {
        self.config.tone_count
    }

    pub fn tone_spacing(&self) -> T {
        self.spacing
    }

    pub fn elements(&self) -> usize {
        self.geometry.len()
    }

    pub fn ps_bits(&self) -> u32 {
        self.config.chain.ps_bits
    }

    pub fn geometry(&self) -> &ArrayGeometry<T> {
        &self.geometry
    }

    pub fn channel(&self) -> &ChannelMatrix<T> {
        &self.channel
    }

    pub fn digital_len(&self) -> usize {
        self.digital_fft.len()
    }

    pub fn sim_len(&self) -> usize {
        self.sim_fft.len()
    }

    fn check_inputs(&self, tones: &ToneSet<T>, word: &PhaseWord) -> Result<()> {
        if tones.len() != self.config.tone_count {
            return Err(Error::Domain(format!(
                "{} tones given, model expects {}",
                tones.len(),
                self.config.tone_count
            )));
        }
        let rel = ((tones.spacing() - self.spacing) / self.spacing).abs();
        if rel > T::lit(1e-9) {
            return Err(Error::Domain("tone spacing does not match the model".into()));
        }
        if word.len() != self.elements() || word.bits() != self.ps_bits() {
            return Err(Error::Domain(format!(
                "phase word must have {} entries of {} bits",
                self.elements(),
                self.ps_bits()
            )));
        }
        Ok(())
    }

    /// Superposed per-bin channel gain for `word`, including the element feed scale.
    pub fn beam_gains(&self, word: &PhaseWord) -> Result<Vec<Complex<T>>> {
        let scale = element_scale(self.config.chain.ps_insertion_loss, word.len());
        let weights: Vec<Complex<T>> = (0..word.len()).map(|i| word.phasor::<T>(i) * scale).collect();
        self.channel.combine(&weights)
    }

    /// Fast spectral evaluation of the whole chain.
    pub fn evaluate(&self, tones: &ToneSet<T>, word: &PhaseWord) -> Result<Evaluation<T>> {
        self.check_inputs(tones, word)?;
        let zero = Complex::new(T::zero(), T::zero());
        let digital_len = self.digital_fft.len();
        let sim_len = self.sim_fft.len();

        let mut digital = vec![zero; digital_len];
        fill_tone_bins(tones, &mut digital);
        self.digital_fft.inverse(&mut digital);
        for s in digital.iter_mut() {
            *s = Complex::new(self.quantizer.quantize(s.re), self.quantizer.quantize(s.im));
        }
        self.digital_fft.forward(&mut digital);

        // Low-pass and mixer in one step: in-band bins move up to the carrier.
        let mut pass = vec![zero; sim_len];
        let scale = T::from_usize_lossy(sim_len) / T::from_usize_lossy(digital_len);
        let w = self.half_width as isize;
        for off in -w..=w {
            if let Some(src) = checked_bin(off, digital_len) {
                pass[(self.carrier_bin as isize + off) as usize] = digital[src] * scale;
            }
        }
        self.sim_fft.inverse(&mut pass);

        let hpa = &self.config.chain.hpa;
        let n = T::from_usize_lossy(sim_len);
        let mut mean_in = T::zero();
        let mut mean_out = T::zero();
        for s in pass.iter_mut() {
            let x = s.re;
            let y = hpa.apply(x);
            mean_in = mean_in + x * x;
            mean_out = mean_out + y * y;
            *s = Complex::new(y, T::zero());
        }
        mean_in = mean_in / n;
        mean_out = mean_out / n;
        self.sim_fft.forward(&mut pass);

        let gains = self.beam_gains(word)?;
        let received = apply_band_gains(&pass, &gains, self.carrier_bin, self.half_width, &self.sim_fft);
        let rhs = rhs_log_from_samples(received.iter().copied(), &self.config.rectenna);
        let harvest = harvest_from_log(rhs, &self.config.rectenna)?;

        let p_hpa = hpa_power_from_means(mean_in, mean_out, &self.config.power);
        let breakdown = total_power(self.dac_power, p_hpa, signal_power(tones), &self.config.power);
        check_finite(&harvest, &breakdown)?;
        Ok(Evaluation { harvest, breakdown })
    }

    /// Runs the chain stage by stage through the public signal operations,
    /// keeping every intermediate waveform.
    pub fn simulate(&self, tones: &ToneSet<T>, word: &PhaseWord) -> Result<StageReport<T>> {
        self.check_inputs(tones, word)?;
        let chain = &self.config.chain;
        let bw = self.config.bandwidth;
        let digital = synthesize_multitone(tones, chain.dac_sample_rate)?;
        let dac = quantize_dac(&digital, chain.dac_bits, chain.dac_range);
        let lowpass_spectrum = signal::lowpass_spectrum(&dac, bw);
        let lowpass = lowpass_filter(&dac, bw);
        let mixer = upconvert(&lowpass, bw, chain.sim_carrier, chain.sim_sample_rate)?;
        let amplified = hpa_rapp(&mixer, &chain.hpa);
        let elements = apply_phase_shifters(&amplified, word, chain.ps_insertion_loss)?;
        let receiver = received_signal(&elements, &self.channel)?;
        let harvest = harvest(&receiver, &self.config.rectenna)?;
        let p_hpa = hpa_power(&mixer, &amplified, &self.config.power)?;
        let breakdown = total_power(self.dac_power, p_hpa, signal_power(tones), &self.config.power);
        check_finite(&harvest, &breakdown)?;
        Ok(StageReport {
            digital,
            dac,
            lowpass,
            lowpass_spectrum,
            mixer,
            hpa: amplified,
            receiver,
            evaluation: Evaluation { harvest, breakdown },
        })
    }
}

fn check_finite<T: Scalar>(h: &HarvestResult<T>, b: &PowerBreakdown<T>) -> Result<()> {
    if !h.v_out_dc.is_finite() || !h.p_out_dc.is_finite() {
        return Err(Error::numerical(Stage::Rectenna, "non-finite harvested power"));
    }
    if !b.hpa.is_finite() || !b.total.is_finite() {
        return Err(Error::numerical(Stage::Power, "non-finite power consumption"));
    }
    Ok(())
}
