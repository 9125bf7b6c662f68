//! Simulation and optimization of an analog multi-antenna RF wireless power
//! transfer link.
//!
//! The transmit chain (multi-tone synthesis, DAC, low-pass filter, mixer,
//! Rapp amplifier, quantized phase shifters) drives a uniform planar array;
//! a near-field line-of-sight channel carries the signal to a single-diode
//! rectenna whose DC output is obtained in closed form through the Lambert W
//! function. [`optimizer`] searches tone amplitudes, phases and phase-shifter
//! settings that minimize transmitter consumption while meeting a harvested
//! power target.
//!
//! All models are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the double-precision instantiation used by the CLI.

// `!(x > 0)` is used on purpose: it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod fft;
pub mod lambert;
pub mod optimizer;
pub mod power;
pub mod rectenna;
pub mod scalar;
pub mod signal;
pub mod system;

pub use error::{Error, Result, Stage};
pub use num_complex::Complex;
pub use scalar::Scalar;

pub type ToneSet64 = signal::ToneSet<f64>;
pub type SampledSignal64 = signal::SampledSignal<f64>;
pub type RappHpa64 = signal::RappHpa<f64>;
pub type ArrayGeometry64 = channel::ArrayGeometry<f64>;
pub type ErPosition64 = channel::ErPosition<f64>;
pub type ChannelMatrix64 = channel::ChannelMatrix<f64>;
pub type RectennaParams64 = rectenna::RectennaParams<f64>;
pub type HarvestResult64 = rectenna::HarvestResult<f64>;
pub type PowerParams64 = power::PowerParams<f64>;
pub type PowerBreakdown64 = power::PowerBreakdown<f64>;
pub type ChainConfig64 = system::ChainConfig<f64>;
pub type SystemConfig64 = system::SystemConfig<f64>;
pub type SystemModel64 = system::SystemModel<f64>;
pub type SwarmConfig64 = optimizer::SwarmConfig<f64>;
pub type WptProblem64 = optimizer::WptProblem<f64>;
pub type OptimizationResult64 = optimizer::OptimizationResult<f64>;

pub type ToneSet32 = signal::ToneSet<f32>;
pub type SystemModel32 = system::SystemModel<f32>;
