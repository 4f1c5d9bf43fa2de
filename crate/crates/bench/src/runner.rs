//! Parallel Monte Carlo runs.
//!
//! Trials run on the rayon pool in chunks; their results are folded in trial
//! order, so the averages are bit-identical to a sequential run and do not
//! depend on the thread count.

use rayon::prelude::*;
use rrccm_core::beamformer::{AlgorithmConfig, AlgorithmId};
use rrccm_core::metrics::SinrModel;
use rrccm_core::signal::ScenarioConfig;
use rrccm_core::trial::{run_trial, trial_seed, Accumulator, AveragedSeries};

use crate::error::{Error, Result};
use crate::setup::Setup;

/// Trials held in memory at once before folding.
const CHUNK: usize = 64;

/// Averages every algorithm over `trials` realizations of `scenario`.
/// Trial `k` uses seed [`trial_seed`]`(master_seed, k)`; failed runs are
/// excluded per algorithm and counted in [`AveragedSeries::excluded`].
pub fn run_experiment(
    scenario: &ScenarioConfig,
    algorithms: &[(String, AlgorithmConfig)],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<AveragedSeries>> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if algorithms.is_empty() {
        return Err(Error::Config("no algorithms to run".into()));
    }
    scenario.validate()?;
    let names: Vec<String> = algorithms.iter().map(|(n, _)| n.clone()).collect();
    let mut acc = Accumulator::new(&names, scenario.n_snapshots);
    for start in (0..trials).step_by(CHUNK) {
        let end = (start + CHUNK).min(trials);
        let runs = (start..end)
            .into_par_iter()
            .map(|k| {
                let sc = ScenarioConfig {
                    seed: trial_seed(master_seed, k as u64),
                    ..scenario.clone()
                };
                run_trial(&sc, algorithms)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for run in &runs {
            acc.add(run)?;
        }
    }
    let series = acc.finish();
    for s in &series {
        if s.excluded > 0 {
            log::warn!("{}: {} of {} trials excluded", s.name, s.excluded, trials);
        }
    }
    Ok(series)
}

/// Processor configurations for `ids` under the setup's tuning tables.
pub fn configs(setup: &Setup, ids: &[AlgorithmId], rank: Option<usize>) -> Result<Vec<(String, AlgorithmConfig)>> {
    let m = setup.scenario.geometry.elements;
    ids.iter()
        .map(|id| {
            let config = id
                .config(setup.tuning(id.structure), m, rank)
                .map_err(|e| Error::Config(format!("{id}: {e}")))?;
            Ok((id.name(), config))
        })
        .collect()
}

/// Optimal SINR of each stationary epoch, as `(first snapshot, dB)` with
/// snapshots numbered from 1.
pub fn sinr_bounds(scenario: &ScenarioConfig) -> Result<Vec<(usize, f64)>> {
    let noise = scenario.noise_variance();
    scenario
        .epochs()
        .iter()
        .map(|e| {
            let model = SinrModel::new(&scenario.geometry, e.sources, noise)?;
            Ok((e.start + 1, model.optimal_sinr_db()?))
        })
        .collect()
}

/// Final-snapshot results of every algorithm at every rank in `ranks`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub rank: usize,
    pub algorithm: String,
    pub sinr_db: f64,
    pub cm_cost: f64,
    pub weight_err: f64,
    pub trials: usize,
    pub excluded: usize,
}

/// Runs all `(algorithm, rank)` pairs on shared realizations.
pub fn sweep_rank(
    setup: &Setup,
    ids: &[AlgorithmId],
    ranks: std::ops::RangeInclusive<usize>,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepPoint>> {
    if ranks.is_empty() {
        return Err(Error::Config("empty rank range".into()));
    }
    let mut labelled = Vec::new();
    let mut keys = Vec::new();
    for r in ranks {
        for (name, config) in configs(setup, ids, Some(r))? {
            labelled.push((format!("{name}@{r}"), config));
            keys.push((r, name));
        }
    }
    let series = run_experiment(&setup.scenario, &labelled, trials, master_seed)?;
    Ok(keys
        .into_iter()
        .zip(series)
        .map(|((rank, algorithm), s)| SweepPoint {
            rank,
            algorithm,
            sinr_db: s.sinr_db.last().copied().unwrap_or(f64::NAN),
            cm_cost: s.cm_cost.last().copied().unwrap_or(f64::NAN),
            weight_err: s.weight_err.last().copied().unwrap_or(f64::NAN),
            trials: s.trials,
            excluded: s.excluded,
        })
        .collect())
}
