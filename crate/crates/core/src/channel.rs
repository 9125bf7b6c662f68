//! Near-field line-of-sight channel between a uniform planar array and the
//! energy receiver.
//!
//! The array lies in the x–z plane, centred on the origin, with every element
//! radiating towards +y. Element `(i, l)` (row `i`, column `l`) has flat index
//! `i·H + l`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft::{analytic_weight, FftPair};
use crate::scalar::{Scalar, SPEED_OF_LIGHT};
use crate::signal::{SampledSignal, SignalDomain};

pub type Point3<T> = [T; 3];

fn sub<T: Scalar>(a: Point3<T>, b: Point3<T>) -> Point3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm<T: Scalar>(v: Point3<T>) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn wavelength<T: Scalar>(frequency: T) -> T {
    T::lit(SPEED_OF_LIGHT) / frequency
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry<T> {
    rows: usize,
    cols: usize,
    spacing: T,
    positions: Vec<Point3<T>>,
}

impl<T: Scalar> ArrayGeometry<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Distance between adjacent elements (`λ_c/2`).
    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn positions(&self) -> &[Point3<T>] {
        &self.positions
    }

    pub fn position(&self, row: usize, col: usize) -> Point3<T> {
        self.positions[row * self.cols + col]
    }
}

/// Half-wavelength `rows × cols` grid at carrier `carrier` Hz.
pub fn element_positions<T: Scalar>(rows: usize, cols: usize, carrier: T) -> Result<ArrayGeometry<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::config("array", "rows and columns must be at least 1"));
    }
    if !(carrier > T::zero()) {
        return Err(Error::config("carrier", "must be positive"));
    }
    let spacing = wavelength(carrier) / T::lit(2.0);
    let half = T::lit(0.5);
    let row_mid = T::from_usize_lossy(rows - 1) * half;
    let col_mid = T::from_usize_lossy(cols - 1) * half;
    let mut positions = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for l in 0..cols {
            let x = (T::from_usize_lossy(l) - col_mid) * spacing;
            let z = (row_mid - T::from_usize_lossy(i)) * spacing;
            positions.push([x, T::zero(), z]);
        }
    }
    Ok(ArrayGeometry {
        rows,
        cols,
        spacing,
        positions,
    })
}

/// Energy-receiver location in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErPosition<T> {
    pub p: Point3<T>,
}

impl<T: Scalar> ErPosition<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { p: [x, y, z] }
    }

    /// On boresight at `distance` metres.
    pub fn boresight(distance: T) -> Self {
        Self::new(T::zero(), distance, T::zero())
    }
}

/// Element radiation profile `F(θ) = 2(b+1) cos^b θ` on the front half-space.
pub fn radiation_profile<T: Scalar>(theta: T, boresight: T) -> T {
    if theta < T::zero() || theta >= T::FRAC_PI_2() {
        return T::zero();
    }
    profile_from_cos(theta.cos(), boresight)
}

fn profile_from_cos<T: Scalar>(cos_theta: T, boresight: T) -> T {
    if cos_theta <= T::zero() {
        return T::zero();
    }
    T::lit(2.0) * (boresight + T::one()) * cos_theta.powf(boresight)
}

/// `H = λ √F(θ) / (4πd) · e^{-j2πd/λ}` for element `element` at `frequency` Hz.
pub fn channel_coefficient<T: Scalar>(
    geom: &ArrayGeometry<T>,
    er: &ErPosition<T>,
    element: usize,
    frequency: T,
    boresight: T,
) -> Result<Complex<T>> {
    let v = sub(er.p, geom.positions[element]);
    let d = norm(v);
    if !(d > T::zero()) {
        return Err(Error::Domain(format!("receiver coincides with element {element}")));
    }
    let lambda = wavelength(frequency);
    // Angle from the element boresight (+y).
    let gain = profile_from_cos(v[1] / d, boresight);
    let amplitude = lambda * gain.sqrt() / (T::lit(4.0) * T::PI() * d);
    let turns = d / lambda;
    let frac = turns - turns.floor();
    Ok(Complex::from_polar(amplitude, -T::TAU() * frac))
}

/// Coefficient for nominal tone `k`, i.e. at RF frequency `f_ca + kΔf`.
pub fn tone_coefficient<T: Scalar>(
    geom: &ArrayGeometry<T>,
    er: &ErPosition<T>,
    element: usize,
    carrier: T,
    spacing: T,
    k: usize,
    boresight: T,
) -> Result<Complex<T>> {
    channel_coefficient(geom, er, element, carrier + T::from_usize_lossy(k) * spacing, boresight)
}

/// Per-element, per-bin channel coefficients over the RF band
/// `[f_ca − W·Δf, f_ca + W·Δf]`.
///
/// `center_bin` is the carrier's DFT bin in the simulated passband period;
/// coefficients are evaluated at the physical carrier plus the bin offset,
/// so the simulated carrier may differ from the physical one.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix<T> {
    center_bin: usize,
    half_width: usize,
    // [element][offset + half_width]
    coefficients: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> ChannelMatrix<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        geom: &ArrayGeometry<T>,
        er: &ErPosition<T>,
        carrier: T,
        spacing: T,
        center_bin: usize,
        half_width: usize,
        boresight: T,
    ) -> Result<Self> {
        if center_bin <= half_width {
            return Err(Error::config("sim_carrier", "carrier bin must exceed the band half-width"));
        }
        let mut coefficients = Vec::with_capacity(geom.len());
        for e in 0..geom.len() {
            let row = (-(half_width as isize)..=half_width as isize)
                .map(|off| {
                    let f = carrier + T::lit(off as f64) * spacing;
                    channel_coefficient(geom, er, e, f, boresight)
                })
                .collect::<Result<Vec<_>>>()?;
            coefficients.push(row);
        }
        Ok(Self {
            center_bin,
            half_width,
            coefficients,
        })
    }

    /// Wraps raw coefficients (`[element][offset + half_width]`).
    pub fn from_coefficients(center_bin: usize, half_width: usize, coefficients: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if center_bin <= half_width {
            return Err(Error::Domain("carrier bin must exceed the band half-width".into()));
        }
        if coefficients.iter().any(|row| row.len() != 2 * half_width + 1) {
            return Err(Error::Domain(format!("every element needs {} bin coefficients", 2 * half_width + 1)));
        }
        Ok(Self {
            center_bin,
            half_width,
            coefficients,
        })
    }

    pub fn elements(&self) -> usize {
        self.coefficients.len()
    }

    pub fn center_bin(&self) -> usize {
        self.center_bin
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Coefficient of `element` at bin offset `offset` from the carrier.
    pub fn coefficient(&self, element: usize, offset: isize) -> Complex<T> {
        self.coefficients[element][(offset + self.half_width as isize) as usize]
    }

    /// Effective per-bin gain `Σ_e H_e(f) w_e` for element excitations `weights`.
    pub fn combine(&self, weights: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if weights.len() != self.elements() {
            return Err(Error::Domain(format!(
                "{} element weights for a {}-element channel",
                weights.len(),
                self.elements()
            )));
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); 2 * self.half_width + 1];
        for (row, &w) in self.coefficients.iter().zip(weights) {
            for (acc, &h) in out.iter_mut().zip(row) {
                *acc = *acc + h * w;
            }
        }
        Ok(out)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if 2 * (self.center_bin + self.half_width) > len {
            return Err(Error::Domain(format!(
                "passband period of {len} samples cannot hold band edge bin {}",
                self.center_bin + self.half_width
            )));
        }
        Ok(())
    }
}

/// Filters a real passband spectrum through per-bin gains and resynthesizes the
/// real waveform. Bins outside the channel band are dropped.
pub(crate) fn apply_band_gains<T: Scalar>(
    spectrum: &[Complex<T>],
    gains: &[Complex<T>],
    center_bin: usize,
    half_width: usize,
    fft: &FftPair<T>,
) -> Vec<T> {
    let len = spectrum.len();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    for (i, &g) in gains.iter().enumerate() {
        let p = center_bin + i - half_width;
        buf[p] = spectrum[p] * g * analytic_weight::<T>(p, len);
    }
    fft.inverse(&mut buf);
    buf.into_iter().map(|v| v.re).collect()
}

/// RF signal at the receiver: every element's waveform is decomposed onto the
/// in-band frequency bins, weighted by that element's coefficient at the bin
/// frequency and summed.
pub fn received_signal<T: Scalar>(
    per_element: &[SampledSignal<T>],
    channel: &ChannelMatrix<T>,
) -> Result<SampledSignal<T>> {
    let first = per_element
        .first()
        .ok_or_else(|| Error::Domain("no element signals".into()))?;
    if per_element.len() != channel.elements() {
        return Err(Error::Domain(format!(
            "{} element signals for a {}-element channel",
            per_element.len(),
            channel.elements()
        )));
    }
    let len = first.len();
    if per_element
        .iter()
        .any(|s| s.len() != len || s.sample_rate() != first.sample_rate() || s.domain() != SignalDomain::PassbandReal)
    {
        return Err(Error::Domain("element signals must be real passband with equal rate and length".into()));
    }
    channel.check_len(len)?;
    let fft = FftPair::new(len);
    let (c, w) = (channel.center_bin, channel.half_width);
    let mut acc = vec![Complex::new(T::zero(), T::zero()); len];
    for (e, sig) in per_element.iter().enumerate() {
        let mut buf = sig.samples().to_vec();
        fft.forward(&mut buf);
        for off in -(w as isize)..=w as isize {
            let p = (c as isize + off) as usize;
            acc[p] = acc[p] + buf[p] * channel.coefficient(e, off);
        }
    }
    let unit = vec![Complex::new(T::one(), T::zero()); 2 * w + 1];
    let samples = apply_band_gains(&acc, &unit, c, w, &fft);
    SampledSignal::passband(samples, first.sample_rate(), first.tone_spacing())
}
