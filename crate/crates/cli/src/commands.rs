use rayon::prelude::*;
use rfwpt::optimizer::{derive_seed, pso_run, WptProblem};
use rfwpt::system::StageReport;
use rfwpt::OptimizationResult64;

use crate::config::RunConfig;
use crate::error::CliError;

/// One pass through the chain with the tones and phase word from the config.
pub fn simulate(cfg: &RunConfig) -> Result<StageReport<f64>, CliError> {
    let model = cfg.model()?;
    let (tones, word) = cfg.design(&model)?;
    Ok(model.simulate(&tones, &word)?)
}

/// Swarm optimization of the configured system.
pub fn optimize(cfg: &RunConfig) -> Result<OptimizationResult64, CliError> {
    let model = cfg.model()?;
    let swarm = cfg.swarm_config()?;
    let problem = WptProblem::from_swarm(model, &swarm);
    Ok(pso_run(&swarm, &problem)?)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: usize,
    pub seed: u64,
    /// `path=value` pairs joined by `;`.
    pub assignment: String,
    pub outcome: Result<OptimizationResult64, String>,
}

/// Seed used for sweep point `index`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// One optimization per sweep point, in sweep order. A failing point is
/// recorded in its row and the sweep carries on.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let base_seed = cfg.swarm.seed;
    let points = cfg.sweep_points()?;
    Ok(points
        .into_par_iter()
        .enumerate()
        .map(|(i, (assignment, point_cfg))| {
            let seed = point_seed(base_seed, i);
            let assignment = assignment
                .iter()
                .map(|(p, v)| format!("{p}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            let outcome = point_cfg
                .and_then(|mut c| {
                    c.swarm.seed = seed;
                    optimize(&c)
                })
                .map_err(|e| e.to_string());
            SweepRow {
                point: i,
                seed,
                assignment,
                outcome,
            }
        })
        .collect())
}
