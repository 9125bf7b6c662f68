use rayon::prelude::*;

use super::{OptimizationResult, WptProblem};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{PhaseWord, ToneSet};

/// Largest grid `brute_force_grid` will enumerate.
pub const MAX_GRID_POINTS: u128 = 10_000_000;

/// Points per continuous dimension. Amplitudes span `[0, X_max]` inclusive,
/// phases `{2πj/P : j < P}`; phase words are enumerated exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridResolution {
    pub amplitude_points: usize,
    pub phase_points: usize,
}

impl GridResolution {
    pub fn points(&self, tone_count: usize, elements: usize, bits: u32) -> u128 {
        let per_tone = self.amplitude_points as u128 * self.phase_points as u128;
        let words = 1u128 << (bits as u128 * elements as u128).min(127);
        (0..tone_count).fold(words, |acc, _| acc.saturating_mul(per_tone))
    }
}

/// Exhaustive grid search of the penalized objective. Ties go to the lowest
/// grid index.
pub fn brute_force_grid<T: Scalar>(res: GridResolution, problem: &WptProblem<T>) -> Result<OptimizationResult<T>> {
    let model = problem.model();
    let k = model.tone_count();
    let n = model.elements();
    let bits = model.ps_bits();
    if res.amplitude_points == 0 || res.phase_points == 0 {
        return Err(Error::Domain("grid needs at least one point per dimension".into()));
    }
    let points = res.points(k, n, bits);
    if points > MAX_GRID_POINTS || (bits as usize) * n >= 64 {
        return Err(Error::GridTooLarge {
            points,
            limit: MAX_GRID_POINTS,
        });
    }
    let amp_step = if res.amplitude_points > 1 {
        problem.amplitude_max() / T::from_usize_lossy(res.amplitude_points - 1)
    } else {
        T::zero()
    };
    let phase_step = T::TAU() / T::from_usize_lossy(res.phase_points);
    let levels = 1u64 << bits;
    let spacing = model.tone_spacing();

    let design = |mut idx: u64| -> Result<(ToneSet<T>, PhaseWord)> {
        let mut words = vec![0u32; n];
        for w in words.iter_mut() {
            *w = (idx % levels) as u32;
            idx /= levels;
        }
        let mut amps = vec![T::zero(); k];
        let mut phases = vec![T::zero(); k];
        for t in 0..k {
            phases[t] = phase_step * T::lit((idx % res.phase_points as u64) as f64);
            idx /= res.phase_points as u64;
            amps[t] = amp_step * T::lit((idx % res.amplitude_points as u64) as f64);
            idx /= res.amplitude_points as u64;
        }
        Ok((ToneSet::new(amps, phases, spacing)?, PhaseWord::new(words, bits)?))
    };

    let (best_idx, best_fit) = (0..points as u64)
        .into_par_iter()
        .map(|i| -> Result<(u64, T)> {
            let (tones, word) = design(i)?;
            Ok((i, problem.fitness_decoded(&tones, &word)?))
        })
        .try_reduce(
            || (u64::MAX, T::infinity()),
            |a, b| {
                Ok(if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
            },
        )?;
    let (tones, word) = design(best_idx)?;
    problem.result_from_design(tones, word, vec![best_fit], points as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Profile, SystemConfig, SystemModel};

    fn toy(rows: usize, cols: usize, bits: u32, k: usize) -> WptProblem<f64> {
        let mut cfg = SystemConfig::reference(k, Profile::Desk);
        cfg.array.rows = rows;
        cfg.array.cols = cols;
        cfg.chain.ps_bits = bits;
        WptProblem::new(SystemModel::new(cfg).unwrap(), 1.0, 20e-6, 1e6)
    }

    #[test]
    fn tiny_grid_counts_and_optimum() {
        let p = toy(1, 1, 1, 1);
        let res = GridResolution {
            amplitude_points: 11,
            phase_points: 8,
        };
        assert_eq!(res.points(1, 1, 1), 176);
        let best = brute_force_grid(res, &p).unwrap();
        assert_eq!(best.evaluations, 176);
        // Exhaustive re-check of the minimum.
        let mut min = f64::INFINITY;
        for a in 0..11 {
            for ph in 0..8 {
                for b in 0..2 {
                    let t = ToneSet::new(vec![0.1 * a as f64], vec![std::f64::consts::TAU / 8.0 * ph as f64], p.model().tone_spacing()).unwrap();
                    let w = PhaseWord::new(vec![b], 1).unwrap();
                    min = min.min(p.fitness_decoded(&t, &w).unwrap());
                }
            }
        }
        assert_eq!(best.fitness, min);
        // A single element cannot reach 20 µW under the 1 V DAC range.
        assert!(!best.feasible);
    }

    #[test]
    fn grid_with_feasible_points_returns_feasible() {
        let p = toy(1, 2, 1, 1);
        let best = brute_force_grid(GridResolution { amplitude_points: 21, phase_points: 16 }, &p).unwrap();
        assert_eq!(best.evaluations, 1344);
        assert!(best.feasible);
        assert!(best.fitness < 1e3);
    }

    #[test]
    fn refining_never_hurts() {
        let p = toy(1, 1, 1, 1);
        let coarse = brute_force_grid(GridResolution { amplitude_points: 6, phase_points: 4 }, &p).unwrap();
        let fine = brute_force_grid(GridResolution { amplitude_points: 11, phase_points: 8 }, &p).unwrap();
        assert!(fine.fitness <= coarse.fitness);
    }

    #[test]
    fn oversized_grids_are_refused() {
        let p = toy(5, 5, 3, 8);
        let err = brute_force_grid(GridResolution { amplitude_points: 21, phase_points: 16 }, &p).unwrap_err();
        assert!(matches!(err, Error::GridTooLarge { .. }));
    }
}
