//! Transmit signal chain: multi-tone synthesis, DAC quantization, brick-wall
//! low-pass filtering, upconversion, Rapp power amplifier and quantized phase
//! shifters feeding the array elements.
//!
//! Every signal spans exactly one fundamental period `1/Δf`, so all sample
//! rates (and the carrier) must be integer multiples of the tone spacing.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft::{analytic_weight, checked_bin, signed_bin, FftPair};
use crate::scalar::{round_half_away, Scalar};

/// Number of samples in one fundamental period at `rate`.
pub fn samples_per_period<T: Scalar>(rate: T, spacing: T, field: &str) -> Result<usize> {
    if !(spacing > T::zero()) || !spacing.is_finite() {
        return Err(Error::config("tone_spacing", "must be positive and finite"));
    }
    let ratio = (rate / spacing).as_f64();
    let n = ratio.round();
    if !ratio.is_finite() || n < 1.0 {
        return Err(Error::config(field, format!("rate {rate} is below the tone spacing {spacing}")));
    }
    if (ratio - n).abs() > 1e-6 * n {
        return Err(Error::config(
            field,
            format!("{rate} Hz is not an integer multiple of the tone spacing {spacing} Hz"),
        ));
    }
    Ok(n as usize)
}

/// Amplitudes and phases of a `K`-tone baseband waveform with tone `k` at `k·Δf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneSet<T> {
    amplitudes: Vec<T>,
    phases: Vec<T>,
    spacing: T,
}

impl<T: Scalar> ToneSet<T> {
    /// Builds a tone set. Phases are wrapped into `[0, 2π)`.
    pub fn new(amplitudes: Vec<T>, phases: Vec<T>, spacing: T) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Domain("a tone set needs at least one tone".into()));
        }
        if amplitudes.len() != phases.len() {
            return Err(Error::Domain(format!(
                "{} amplitudes but {} phases",
                amplitudes.len(),
                phases.len()
            )));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::Domain("tone spacing must be positive".into()));
        }
        if let Some(a) = amplitudes.iter().find(|a| !(**a >= T::zero()) || !a.is_finite()) {
            return Err(Error::Domain(format!("tone amplitude {a} must be finite and non-negative")));
        }
        let two_pi = T::TAU();
        let mut wrapped = Vec::with_capacity(phases.len());
        for &p in &phases {
            if !p.is_finite() {
                return Err(Error::Domain(format!("tone phase {p} is not finite")));
            }
            let mut w = p % two_pi;
            if w < T::zero() {
                w = w + two_pi;
            }
            if w >= two_pi {
                w = T::zero();
            }
            wrapped.push(w);
        }
        Ok(Self {
            amplitudes,
            phases: wrapped,
            spacing,
        })
    }

    pub fn zeros(count: usize, spacing: T) -> Result<Self> {
        Self::new(vec![T::zero(); count], vec![T::zero(); count], spacing)
    }

    /// Equal amplitudes, all phases zero.
    pub fn uniform(count: usize, amplitude: T, spacing: T) -> Result<Self> {
        Self::new(vec![amplitude; count], vec![T::zero(); count], spacing)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Baseband bandwidth `K·Δf`.
    pub fn bandwidth(&self) -> T {
        T::from_usize_lossy(self.len()) * self.spacing
    }
}

/// Whether the samples are a complex baseband envelope or a real RF waveform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalDomain {
    BasebandComplex,
    PassbandReal,
}

/// One fundamental period of a uniformly sampled signal.
///
/// Passband signals keep their samples in the real part; the imaginary part is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    samples: Vec<Complex<T>>,
    sample_rate: T,
    spacing: T,
    domain: SignalDomain,
}

impl<T: Scalar> SampledSignal<T> {
    pub fn new(samples: Vec<Complex<T>>, sample_rate: T, spacing: T, domain: SignalDomain) -> Result<Self> {
        let n = samples_per_period(sample_rate, spacing, "sample_rate")?;
        if samples.len() != n {
            return Err(Error::Domain(format!(
                "{} samples do not span one period ({n} expected at {sample_rate} Hz)",
                samples.len()
            )));
        }
        let samples = match domain {
            SignalDomain::BasebandComplex => samples,
            SignalDomain::PassbandReal => samples.into_iter().map(|s| Complex::new(s.re, T::zero())).collect(),
        };
        Ok(Self {
            samples,
            sample_rate,
            spacing,
            domain,
        })
    }

    pub fn passband(samples: Vec<T>, sample_rate: T, spacing: T) -> Result<Self> {
        let samples = samples.into_iter().map(|s| Complex::new(s, T::zero())).collect();
        Self::new(samples, sample_rate, spacing, SignalDomain::PassbandReal)
    }

    pub fn baseband(samples: Vec<Complex<T>>, sample_rate: T, spacing: T) -> Result<Self> {
        Self::new(samples, sample_rate, spacing, SignalDomain::BasebandComplex)
    }

    pub fn zeros_like(&self) -> Self {
        self.with_samples(vec![Complex::new(T::zero(), T::zero()); self.len()])
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self {
            samples,
            sample_rate: self.sample_rate,
            spacing: self.spacing,
            domain: self.domain,
        }
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    /// Real parts of the samples (the waveform itself for passband signals).
    pub fn real(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.re).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn tone_spacing(&self) -> T {
        self.spacing
    }

    pub fn domain(&self) -> SignalDomain {
        self.domain
    }

    /// Length of the period in seconds.
    pub fn period(&self) -> T {
        T::one() / self.spacing
    }

    /// Time-average of `|x|²` over the period.
    pub fn mean_power(&self) -> T {
        let sum: T = self.samples.iter().map(|s| s.norm_sqr()).sum();
        sum / T::from_usize_lossy(self.len())
    }

    /// Unnormalized DFT of the samples. Bin `m` sits at `signed_bin(m)·Δf`.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        let mut buf = self.samples.clone();
        FftPair::new(buf.len()).forward(&mut buf);
        buf
    }
}

/// Evaluates `x(nT_s) = (1/K) Σ X_k e^{j(2π k Δf n T_s + φ_k)}` over one period.
pub fn synthesize_multitone<T: Scalar>(tones: &ToneSet<T>, sample_rate: T) -> Result<SampledSignal<T>> {
    let len = samples_per_period(sample_rate, tones.spacing(), "dac_sample_rate")?;
    let k = tones.len();
    if len < 2 * k {
        return Err(Error::config(
            "dac_sample_rate",
            format!("{sample_rate} Hz is below twice the bandwidth {}", tones.bandwidth()),
        ));
    }
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    fill_tone_bins(tones, &mut buf);
    FftPair::new(len).inverse(&mut buf);
    SampledSignal::baseband(buf, sample_rate, tones.spacing())
}

/// Writes the tone coefficients into bins `0..K`, scaled for a normalized
/// inverse DFT of length `buf.len()`.
pub(crate) fn fill_tone_bins<T: Scalar>(tones: &ToneSet<T>, buf: &mut [Complex<T>]) {
    let scale = T::from_usize_lossy(buf.len()) / T::from_usize_lossy(tones.len());
    for (k, (&a, &p)) in tones.amplitudes().iter().zip(tones.phases()).enumerate() {
        buf[k] = Complex::from_polar(a * scale, p);
    }
}

/// Uniform mid-tread quantizer with step `2A/2^bits`, saturating at `±A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer<T> {
    step: T,
    range: T,
}

impl<T: Scalar> Quantizer<T> {
    pub fn new(bits: u32, range: T) -> Self {
        let levels = T::lit(2f64.powi(bits as i32));
        Self {
            step: T::lit(2.0) * range / levels,
            range,
        }
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn range(&self) -> T {
        self.range
    }

    #[inline]
    pub fn quantize(&self, v: T) -> T {
        let clamped = v.max(-self.range).min(self.range);
        round_half_away(clamped / self.step) * self.step
    }
}

/// Quantizes the in-phase and quadrature components independently.
pub fn quantize_dac<T: Scalar>(x: &SampledSignal<T>, bits: u32, range: T) -> SampledSignal<T> {
    let q = Quantizer::new(bits, range);
    let samples = x
        .samples()
        .iter()
        .map(|s| match x.domain() {
            SignalDomain::BasebandComplex => Complex::new(q.quantize(s.re), q.quantize(s.im)),
            SignalDomain::PassbandReal => Complex::new(q.quantize(s.re), T::zero()),
        })
        .collect();
    x.with_samples(samples)
}

/// Highest bin index whose frequency does not exceed `cutoff`.
pub(crate) fn cutoff_bin<T: Scalar>(cutoff: T, spacing: T) -> usize {
    let r = (cutoff / spacing).as_f64();
    (r + 1e-9 * r.max(1.0)).floor().max(0.0) as usize
}

/// Spectrum of the brick-wall low-pass output: the DFT of `x` with every bin
/// at `|f| > cutoff` set to zero.
pub fn lowpass_spectrum<T: Scalar>(x: &SampledSignal<T>, cutoff: T) -> Vec<Complex<T>> {
    let len = x.len();
    let keep = cutoff_bin(cutoff, x.tone_spacing());
    let mut buf = x.spectrum();
    for (m, v) in buf.iter_mut().enumerate() {
        if signed_bin(m, len).unsigned_abs() > keep {
            *v = Complex::new(T::zero(), T::zero());
        }
    }
    buf
}

/// Ideal brick-wall low-pass: zeroes every DFT bin with `|f| > cutoff`.
pub fn lowpass_filter<T: Scalar>(x: &SampledSignal<T>, cutoff: T) -> SampledSignal<T> {
    let mut buf = lowpass_spectrum(x, cutoff);
    FftPair::new(buf.len()).inverse(&mut buf);
    if x.domain() == SignalDomain::PassbandReal {
        for v in buf.iter_mut() {
            v.im = T::zero();
        }
    }
    x.with_samples(buf)
}

/// Validates the passband sampling plan and returns `(carrier bin, samples per period)`.
pub fn passband_plan<T: Scalar>(bandwidth: T, carrier: T, sim_rate: T, spacing: T) -> Result<(usize, usize)> {
    let half_width = cutoff_bin(bandwidth, spacing);
    let carrier_bin = samples_per_period(carrier, spacing, "sim_carrier")?;
    let len = samples_per_period(sim_rate, spacing, "sim_sample_rate")?;
    if carrier_bin <= half_width {
        return Err(Error::config(
            "sim_carrier",
            format!("carrier {carrier} Hz must exceed the bandwidth {bandwidth} Hz"),
        ));
    }
    if len < 2 * (carrier_bin + half_width) {
        return Err(Error::config(
            "sim_sample_rate",
            format!(
                "{sim_rate} Hz violates Nyquist for carrier {carrier} Hz plus bandwidth {bandwidth} Hz"
            ),
        ));
    }
    Ok((carrier_bin, len))
}

/// Mixer: `x_mix(t) = Re{x(t) e^{j2π f_ca t}}` sampled at `sim_rate`.
///
/// The baseband period is resampled exactly by spectral interpolation; bins
/// beyond `bandwidth` are not carried over.
pub fn upconvert<T: Scalar>(
    x: &SampledSignal<T>,
    bandwidth: T,
    carrier: T,
    sim_rate: T,
) -> Result<SampledSignal<T>> {
    if x.domain() != SignalDomain::BasebandComplex {
        return Err(Error::Domain("upconversion expects a complex baseband signal".into()));
    }
    let spacing = x.tone_spacing();
    let (carrier_bin, len) = passband_plan(bandwidth, carrier, sim_rate, spacing)?;
    let half_width = cutoff_bin(bandwidth, spacing) as isize;
    let mut base = x.samples().to_vec();
    FftPair::new(base.len()).forward(&mut base);
    let scale = T::from_usize_lossy(len) / T::from_usize_lossy(base.len());
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    for offset in -half_width..=half_width {
        if let Some(src) = checked_bin(offset, base.len()) {
            buf[(carrier_bin as isize + offset) as usize] = base[src] * scale;
        }
    }
    FftPair::new(len).inverse(&mut buf);
    let real = buf.into_iter().map(|v| v.re).collect();
    SampledSignal::passband(real, sim_rate, spacing)
}

/// Rapp solid-state amplifier: `y = Gx (1 + (G|x|/A_s)^{2β})^{-1/(2β)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RappHpa<T> {
    pub gain: T,
    pub saturation: T,
    pub smoothness: T,
}

impl<T: Scalar> RappHpa<T> {
    pub fn new(gain: T, saturation: T, smoothness: T) -> Result<Self> {
        if !(gain > T::zero()) {
            return Err(Error::config("hpa_gain", "must be positive"));
        }
        if !(saturation > T::zero()) {
            return Err(Error::config("hpa_saturation", "must be positive"));
        }
        if !(smoothness >= T::one()) {
            return Err(Error::config("hpa_smoothness", "must be at least 1"));
        }
        Ok(Self {
            gain,
            saturation,
            smoothness,
        })
    }

    /// Output magnitude for input magnitude `mag ≥ 0`.
    #[inline]
    pub fn output_magnitude(&self, mag: T) -> T {
        let two_beta = T::lit(2.0) * self.smoothness;
        let u = self.gain * mag / self.saturation;
        let y = if u <= T::one() {
            self.gain * mag * (T::one() + u.powf(two_beta)).powf(-two_beta.recip())
        } else {
            // Factor out the saturation level so large inputs stay finite.
            self.saturation * (-(u.powf(-two_beta)).ln_1p() / two_beta).exp()
        };
        // The exact output is strictly below A_s; keep that after rounding.
        y.min(self.saturation - self.saturation * T::epsilon())
    }

    #[inline]
    pub fn apply(&self, x: T) -> T {
        let y = self.output_magnitude(x.abs());
        if x < T::zero() {
            -y
        } else {
            y
        }
    }

    /// AM/AM applied to a complex envelope sample.
    #[inline]
    pub fn apply_complex(&self, s: Complex<T>) -> Complex<T> {
        let mag = s.norm();
        if mag == T::zero() {
            return s;
        }
        s * (self.output_magnitude(mag) / mag)
    }
}

/// Applies the Rapp model sample by sample.
pub fn hpa_rapp<T: Scalar>(x: &SampledSignal<T>, hpa: &RappHpa<T>) -> SampledSignal<T> {
    let samples = x
        .samples()
        .iter()
        .map(|&s| match x.domain() {
            SignalDomain::PassbandReal => Complex::new(hpa.apply(s.re), T::zero()),
            SignalDomain::BasebandComplex => hpa.apply_complex(s),
        })
        .collect();
    x.with_samples(samples)
}

/// Quantized phase-shift selections `b ∈ {0, …, 2^B − 1}`, one per array element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseWord {
    words: Vec<u32>,
    bits: u32,
}

impl PhaseWord {
    pub fn new(words: Vec<u32>, bits: u32) -> Result<Self> {
        if bits == 0 || bits > 16 {
            return Err(Error::Domain(format!("phase-shifter resolution {bits} must be in 1..=16 bits")));
        }
        let levels = 1u32 << bits;
        if let Some(w) = words.iter().find(|&&w| w >= levels) {
            return Err(Error::Domain(format!("phase word {w} is outside 0..{levels}")));
        }
        Ok(Self { words, bits })
    }

    pub fn zeros(elements: usize, bits: u32) -> Result<Self> {
        Self::new(vec![0; elements], bits)
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn levels(&self) -> u32 {
        1 << self.bits
    }

    /// `e^{-j2πb/2^B}` for element `i`, exact at multiples of a quarter turn.
    pub fn phasor<T: Scalar>(&self, i: usize) -> Complex<T> {
        let b = self.words[i];
        let levels = self.levels();
        if (4 * b as u64).is_multiple_of(levels as u64) {
            let turn = ((4 * b as u64) / levels as u64) % 4;
            let (o, z) = (T::one(), T::zero());
            return match turn {
                0 => Complex::new(o, z),
                1 => Complex::new(z, -o),
                2 => Complex::new(-o, z),
                _ => Complex::new(z, o),
            };
        }
        let angle = T::TAU() * T::lit(b as f64) / T::lit(levels as f64);
        Complex::new(angle.cos(), -angle.sin())
    }
}

/// Per-element amplitude scale `1/√(L_ps·N)`.
pub fn element_scale<T: Scalar>(insertion_loss: T, elements: usize) -> T {
    (insertion_loss * T::from_usize_lossy(elements)).sqrt().recip()
}

/// Imaginary part of the analytic signal of a real periodic waveform.
pub fn hilbert<T: Scalar>(x: &SampledSignal<T>) -> Vec<T> {
    let len = x.len();
    let fft = FftPair::new(len);
    let mut buf: Vec<Complex<T>> = x.real().into_iter().map(|v| Complex::new(v, T::zero())).collect();
    fft.forward(&mut buf);
    for (p, v) in buf.iter_mut().enumerate() {
        *v = *v * analytic_weight::<T>(p, len);
    }
    fft.inverse(&mut buf);
    buf.into_iter().map(|v| v.im).collect()
}

/// Feeds one signal through the `N` phase shifters and returns the per-element waveforms.
///
/// For passband input the rotation acts on the analytic signal, i.e.
/// `Re{e^{-jθ}(x + jx̂)} = x cos θ + x̂ sin θ`.
pub fn apply_phase_shifters<T: Scalar>(
    x: &SampledSignal<T>,
    word: &PhaseWord,
    insertion_loss: T,
) -> Result<Vec<SampledSignal<T>>> {
    if word.is_empty() {
        return Err(Error::Domain("phase word has no elements".into()));
    }
    if !(insertion_loss >= T::one()) {
        return Err(Error::config("ps_insertion_loss", "linear insertion loss must be at least 1"));
    }
    let scale = element_scale(insertion_loss, word.len());
    let mut quadrature: Option<Vec<T>> = None;
    let mut out = Vec::with_capacity(word.len());
    for i in 0..word.len() {
        let rot: Complex<T> = word.phasor(i);
        let samples = match x.domain() {
            SignalDomain::BasebandComplex => x.samples().iter().map(|&s| s * rot * scale).collect(),
            SignalDomain::PassbandReal => {
                if rot.im == T::zero() {
                    x.samples().iter().map(|s| Complex::new(s.re * rot.re * scale, T::zero())).collect()
                } else {
                    let q = quadrature.get_or_insert_with(|| hilbert(x));
                    // Re{(c - js)(x + jq)} = c x + s q with rot = c - js.
                    let (c, s) = (rot.re, -rot.im);
                    x.samples()
                        .iter()
                        .zip(q.iter())
                        .map(|(v, &h)| Complex::new((c * v.re + s * h) * scale, T::zero()))
                        .collect()
                }
            }
        };
        out.push(x.with_samples(samples));
    }
    Ok(out)
}
