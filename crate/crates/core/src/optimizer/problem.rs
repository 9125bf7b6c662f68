use super::{Objective, OptimizationResult, SwarmConfig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{PhaseWord, ToneSet};
use crate::system::{Evaluation, SystemModel};

/// Splits a particle into tones and a phase word. Relaxed selections map to
/// `b = ⌊b̄ (2^B − 1)⌋`, clamped to the valid range.
pub fn decode_particle<T: Scalar>(
    z: &[T],
    tone_count: usize,
    elements: usize,
    bits: u32,
    spacing: T,
) -> Result<(ToneSet<T>, PhaseWord)> {
    if z.len() != 2 * tone_count + elements {
        return Err(Error::Domain(format!(
            "particle has {} entries, expected {}",
            z.len(),
            2 * tone_count + elements
        )));
    }
    let amplitudes = z[..tone_count].iter().map(|&a| a.max(T::zero())).collect();
    let phases = z[tone_count..2 * tone_count].to_vec();
    let tones = ToneSet::new(amplitudes, phases, spacing)?;
    let top = (1u32 << bits) - 1;
    let scale = T::lit(top as f64);
    let words = z[2 * tone_count..]
        .iter()
        .map(|&b| {
            let v = (b * scale).floor().as_f64();
            if v.is_nan() || v < 0.0 {
                0
            } else {
                (v as u32).min(top)
            }
        })
        .collect();
    Ok((tones, PhaseWord::new(words, bits)?))
}

/// Penalized design objective: `P_c` when the harvest requirement is met,
/// otherwise `penalty + (P_dc − p_out)/P_dc`.
#[derive(Debug, Clone)]
pub struct WptProblem<T: Scalar> {
    model: SystemModel<T>,
    required_dc: T,
    penalty: T,
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> WptProblem<T> {
    pub fn new(model: SystemModel<T>, amplitude_max: T, required_dc: T, penalty: T) -> Self {
        let k = model.tone_count();
        let n = model.elements();
        let lower = vec![T::zero(); 2 * k + n];
        let mut upper = Vec::with_capacity(2 * k + n);
        upper.extend(std::iter::repeat_n(amplitude_max, k));
        upper.extend(std::iter::repeat_n(T::TAU(), k));
        upper.extend(std::iter::repeat_n(T::one(), n));
        Self {
            model,
            required_dc,
            penalty,
            lower,
            upper,
        }
    }

    pub fn from_swarm(model: SystemModel<T>, swarm: &SwarmConfig<T>) -> Self {
        Self::new(model, swarm.amplitude_max, swarm.required_dc, swarm.penalty)
    }

    pub fn model(&self) -> &SystemModel<T> {
        &self.model
    }

    pub fn required_dc(&self) -> T {
        self.required_dc
    }

    pub fn penalty(&self) -> T {
        self.penalty
    }

    pub fn amplitude_max(&self) -> T {
        self.upper[0]
    }

    pub fn decode(&self, z: &[T]) -> Result<(ToneSet<T>, PhaseWord)> {
        decode_particle(
            z,
            self.model.tone_count(),
            self.model.elements(),
            self.model.ps_bits(),
            self.model.tone_spacing(),
        )
    }

    pub fn is_feasible(&self, e: &Evaluation<T>) -> bool {
        e.harvest.p_out_dc >= self.required_dc
    }

    pub fn penalized(&self, e: &Evaluation<T>) -> T {
        if self.is_feasible(e) {
            e.breakdown.total
        } else {
            self.penalty + (self.required_dc - e.harvest.p_out_dc) / self.required_dc
        }
    }

    /// Objective for already decoded design variables.
    pub fn fitness_decoded(&self, tones: &ToneSet<T>, word: &PhaseWord) -> Result<T> {
        Ok(self.penalized(&self.model.evaluate(tones, word)?))
    }

    pub fn fitness(&self, z: &[T]) -> Result<T> {
        let (tones, word) = self.decode(z)?;
        self.fitness_decoded(&tones, &word)
    }

    pub(crate) fn result_from_design(
        &self,
        tones: ToneSet<T>,
        phase_word: PhaseWord,
        fitness_trace: Vec<T>,
        evaluations: usize,
    ) -> Result<OptimizationResult<T>> {
        let e = self.model.evaluate(&tones, &phase_word)?;
        Ok(OptimizationResult {
            feasible: self.is_feasible(&e),
            fitness: self.penalized(&e),
            breakdown: e.breakdown,
            v_out_dc: e.harvest.v_out_dc,
            p_out_dc: e.harvest.p_out_dc,
            tones,
            phase_word,
            fitness_trace,
            evaluations,
        })
    }

    pub(crate) fn result_for(
        &self,
        z: &[T],
        fitness_trace: Vec<T>,
        evaluations: usize,
    ) -> Result<OptimizationResult<T>> {
        let (tones, word) = self.decode(z)?;
        self.result_from_design(tones, word, fitness_trace, evaluations)
    }
}

impl<T: Scalar> Objective<T> for WptProblem<T> {
    fn lower(&self) -> &[T] {
        &self.lower
    }

    fn upper(&self) -> &[T] {
        &self.upper
    }

    fn evaluate(&self, z: &[T]) -> Result<T> {
        self.fitness(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Profile, SystemConfig};

    #[test]
    fn decode_examples() {
        let z = [0.5, 1.0, 0.0, 1.0, 0.5];
        let (tones, word) = decode_particle(&z, 1, 3, 3, 1.0).unwrap();
        assert_eq!(tones.amplitudes(), &[0.5]);
        assert_eq!(tones.phases(), &[1.0]);
        assert_eq!(word.words(), &[0, 7, 3]);
        assert!(decode_particle(&z, 2, 3, 3, 1.0).is_err());
    }

    fn problem(required: f64) -> WptProblem<f64> {
        let model = SystemModel::new(SystemConfig::reference(8, Profile::Desk)).unwrap();
        WptProblem::new(model, 300.0, required, 1e6)
    }

    fn particle(amp: f64) -> Vec<f64> {
        let mut z = vec![amp; 8];
        z.extend(vec![0.0; 8]);
        z.extend(vec![0.0; 25]);
        z
    }

    #[test]
    fn feasible_fitness_is_total_power() {
        let p = problem(20e-6);
        let z = particle(0.5);
        let (t, w) = p.decode(&z).unwrap();
        let e = p.model().evaluate(&t, &w).unwrap();
        assert!(e.harvest.p_out_dc >= 20e-6);
        assert_eq!(p.fitness(&z).unwrap(), e.breakdown.total);
    }

    #[test]
    fn zero_amplitudes_are_penalized() {
        let p = problem(20e-6);
        let f = p.fitness(&particle(0.0)).unwrap();
        assert!(f > 1e6);
        assert_eq!(f, 1e6 + 1.0);
    }

    #[test]
    fn infeasible_ranking_follows_violation() {
        let p = problem(1.0); // unreachable requirement
        let weak = p.fitness(&particle(0.05)).unwrap();
        let strong = p.fitness(&particle(0.2)).unwrap();
        assert!(weak > 1e6 && strong > 1e6);
        assert!(strong < weak);
    }

    #[test]
    fn fitness_is_deterministic() {
        let p = problem(20e-6);
        let z = particle(0.37);
        let a = p.fitness(&z).unwrap();
        for _ in 0..5 {
            assert_eq!(p.fitness(&z).unwrap().to_bits(), a.to_bits());
        }
    }
}
