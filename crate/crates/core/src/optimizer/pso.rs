//! Global-best PSO with inertia, per-dimension velocity limits and clamped
//! positions.
//!
//! Each particle draws its random numbers from its own stream keyed by
//! `(seed, iteration, particle)`, so results do not depend on how fitness
//! evaluations are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SwarmConfig;
use crate::error::Result;
use crate::scalar::Scalar;

/// Box-bounded minimization target.
pub trait Objective<T: Scalar>: Sync {
    fn lower(&self) -> &[T];
    fn upper(&self) -> &[T];
    fn evaluate(&self, z: &[T]) -> Result<T>;

    fn dimension(&self) -> usize {
        self.lower().len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle<T> {
    pub position: Vec<T>,
    pub velocity: Vec<T>,
    pub fitness: T,
    pub best_position: Vec<T>,
    pub best_fitness: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmOutcome<T> {
    pub best_position: Vec<T>,
    pub best_fitness: T,
    pub fitness_trace: Vec<T>,
    pub evaluations: usize,
    pub particles: Vec<Particle<T>>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Deterministic child seed, e.g. one per sweep point.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix(splitmix(seed) ^ index)
}

fn substream(seed: u64, iteration: usize, particle: usize) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ iteration as u64) ^ particle as u64);
    ChaCha8Rng::seed_from_u64(key)
}

/// Uniform draw in the open interval (0, 1).
fn open_unit<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return T::lit(u);
        }
    }
}

/// Minimizes `objective` starting from a uniform random swarm with zero velocities.
pub fn minimize<T: Scalar, O: Objective<T>>(objective: &O, config: &SwarmConfig<T>) -> Result<SwarmOutcome<T>> {
    let lower = objective.lower();
    let upper = objective.upper();
    let dim = lower.len();
    let vmax: Vec<T> = lower
        .iter()
        .zip(upper)
        .map(|(&lo, &hi)| (hi - lo) * config.velocity_fraction)
        .collect();

    let mut swarm: Vec<Particle<T>> = (0..config.particles)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(config.seed, 0, i);
            let position: Vec<T> = (0..dim)
                .map(|j| {
                    let u: f64 = rng.random();
                    (lower[j] + (upper[j] - lower[j]) * T::lit(u)).min(upper[j])
                })
                .collect();
            let fitness = objective.evaluate(&position)?;
            Ok(Particle {
                best_position: position.clone(),
                best_fitness: fitness,
                velocity: vec![T::zero(); dim],
                position,
                fitness,
            })
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, p) in swarm.iter().enumerate() {
        if p.fitness < swarm[best].fitness {
            best = i;
        }
    }
    let mut best_position = swarm[best].position.clone();
    let mut best_fitness = swarm[best].fitness;
    let mut trace = Vec::with_capacity(config.iterations + 1);
    trace.push(best_fitness);
    let mut evaluations = config.particles;

    for t in 1..=config.iterations {
        let global = &best_position;
        swarm.par_iter_mut().enumerate().try_for_each(|(i, p)| -> Result<()> {
            let mut rng = substream(config.seed, t, i);
            for j in 0..dim {
                let r1: T = open_unit(&mut rng);
                let r2: T = open_unit(&mut rng);
                let x = p.position[j];
                let v = config.inertia * p.velocity[j]
                    + config.cognitive * r1 * (p.best_position[j] - x)
                    + config.social * r2 * (global[j] - x);
                let v = v.max(-vmax[j]).min(vmax[j]);
                let mut next = x + v;
                let mut v = v;
                if next < lower[j] {
                    next = lower[j];
                    v = T::zero();
                } else if next > upper[j] {
                    next = upper[j];
                    v = T::zero();
                }
                p.position[j] = next;
                p.velocity[j] = v;
            }
            p.fitness = objective.evaluate(&p.position)?;
            if p.fitness < p.best_fitness {
                p.best_fitness = p.fitness;
                p.best_position.clone_from(&p.position);
            }
            Ok(())
        })?;
        evaluations += config.particles;
        // Synchronous global-best update; ties keep the incumbent.
        for p in &swarm {
            if p.best_fitness < best_fitness {
                best_fitness = p.best_fitness;
                best_position.clone_from(&p.best_position);
            }
        }
        trace.push(best_fitness);
    }

    Ok(SwarmOutcome {
        best_position,
        best_fitness,
        fitness_trace: trace,
        evaluations,
        particles: swarm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Sphere {
        lo: Vec<f64>,
        hi: Vec<f64>,
        centre: f64,
    }

    impl Objective<f64> for Sphere {
        fn lower(&self) -> &[f64] {
            &self.lo
        }
        fn upper(&self) -> &[f64] {
            &self.hi
        }
        fn evaluate(&self, z: &[f64]) -> Result<f64> {
            Ok(z.iter().map(|x| (x - self.centre) * (x - self.centre)).sum())
        }
    }

    fn sphere(dim: usize) -> Sphere {
        Sphere {
            lo: vec![-5.0; dim],
            hi: vec![5.0; dim],
            centre: 1.5,
        }
    }

    fn config(particles: usize, iterations: usize, seed: u64) -> SwarmConfig<f64> {
        SwarmConfig {
            particles,
            iterations,
            seed,
            ..SwarmConfig::default()
        }
    }

    #[test]
    fn converges_on_a_sphere() {
        let out = minimize(&sphere(6), &config(20, 300, 7)).unwrap();
        assert!(out.best_fitness < 1e-8, "{}", out.best_fitness);
        for x in &out.best_position {
            assert!((x - 1.5).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_iterations_returns_initial_best() {
        let s = sphere(3);
        let out = minimize(&s, &config(10, 0, 3)).unwrap();
        let init_best = out
            .particles
            .iter()
            .map(|p| p.fitness)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(out.best_fitness, init_best);
        assert_eq!(out.fitness_trace, vec![init_best]);
        assert_eq!(out.evaluations, 10);
    }

    #[test]
    fn trace_is_monotone_and_positions_bounded() {
        let s = sphere(4);
        let out = minimize(&s, &config(12, 60, 11)).unwrap();
        assert!(out.fitness_trace.windows(2).all(|w| w[1] <= w[0]));
        for p in &out.particles {
            for (j, x) in p.position.iter().enumerate() {
                assert!(*x >= s.lo[j] && *x <= s.hi[j]);
            }
            assert!(p.best_fitness <= p.fitness);
        }
    }

    #[test]
    fn equal_seeds_are_bit_identical() {
        let s = sphere(5);
        let a = minimize(&s, &config(15, 40, 99)).unwrap();
        let b = minimize(&s, &config(15, 40, 99)).unwrap();
        assert_eq!(a, b);
        let c = minimize(&s, &config(15, 40, 100)).unwrap();
        assert_ne!(a.best_position, c.best_position);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let s = sphere(5);
        let a = minimize(&s, &config(15, 40, 5)).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| minimize(&s, &config(15, 40, 5))).unwrap();
        assert_eq!(a, b);
    }
}
