//! Joint waveform and beamforming design by particle swarm optimization.
//!
//! A particle is `z = [X_0..X_{K-1}, φ_0..φ_{K-1}, b̄_0..b̄_{N-1}]` with the
//! phase-shifter selections relaxed to `b̄ ∈ [0, 1]`.

mod grid;
mod problem;
mod pso;

pub use grid::{brute_force_grid, GridResolution, MAX_GRID_POINTS};
pub use problem::{decode_particle, WptProblem};
pub use pso::{derive_seed, minimize, Objective, Particle, SwarmOutcome};

use crate::power::PowerBreakdown;
use crate::scalar::Scalar;
use crate::signal::{PhaseWord, ToneSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmConfig<T> {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: T,
    pub cognitive: T,
    pub social: T,
    /// Velocity limit as a fraction of each dimension's range.
    pub velocity_fraction: T,
    pub seed: u64,
    /// Upper bound on tone amplitudes (V).
    pub amplitude_max: T,
    /// Required harvested DC power (W).
    pub required_dc: T,
    /// Finite stand-in for the infinite infeasibility penalty (W).
    pub penalty: T,
}

impl<T: Scalar> Default for SwarmConfig<T> {
    fn default() -> Self {
        Self {
            particles: 30,
            iterations: 300,
            inertia: T::lit(0.729),
            cognitive: T::lit(1.49445),
            social: T::lit(1.49445),
            velocity_fraction: T::lit(0.2),
            seed: 1,
            amplitude_max: T::lit(300.0),
            required_dc: T::lit(20e-6),
            penalty: T::lit(1e6),
        }
    }
}

impl<T: Scalar> SwarmConfig<T> {
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        if self.particles < 2 {
            return Err(Error::config("swarm.particles", "need at least 2 particles"));
        }
        if !(self.inertia >= T::zero() && self.inertia <= T::one()) {
            return Err(Error::config("swarm.inertia", "must be in [0, 1]"));
        }
        if !(self.cognitive > T::zero()) || !(self.social > T::zero()) {
            return Err(Error::config("swarm.cognitive", "cognitive and social weights must be positive"));
        }
        if !(self.velocity_fraction > T::zero()) {
            return Err(Error::config("swarm.velocity_fraction", "must be positive"));
        }
        if !(self.amplitude_max > T::zero()) || !self.amplitude_max.is_finite() {
            return Err(Error::config("swarm.amplitude_max", "must be positive and finite"));
        }
        if !(self.required_dc >= T::zero()) || !self.required_dc.is_finite() {
            return Err(Error::config("swarm.required_dc", "must be non-negative and finite"));
        }
        if !(self.penalty > T::zero()) || !self.penalty.is_finite() {
            return Err(Error::config("swarm.penalty", "must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub tones: ToneSet<T>,
    pub phase_word: PhaseWord,
    pub breakdown: PowerBreakdown<T>,
    pub v_out_dc: T,
    pub p_out_dc: T,
    pub feasible: bool,
    /// Objective value of the returned solution.
    pub fitness: T,
    /// Global-best objective after initialization and after every iteration.
    pub fitness_trace: Vec<T>,
    pub evaluations: usize,
}

/// Runs the swarm on the penalized design problem and decodes the best particle.
pub fn pso_run<T: Scalar>(config: &SwarmConfig<T>, problem: &WptProblem<T>) -> crate::Result<OptimizationResult<T>> {
    config.validate()?;
    let outcome = minimize(problem, config)?;
    problem.result_for(&outcome.best_position, outcome.fitness_trace, outcome.evaluations)
}
