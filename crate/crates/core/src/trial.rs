//! One Monte Carlo realization, and the running averages over many.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beamformer::{AlgorithmConfig, Beamformer};
use crate::dfp::{cm_cost, mvdr_weight};
use crate::metrics::{sample_covariance, weight_error, SinrModel};
use crate::signal::{generate_snapshots, ScenarioConfig};
use crate::{CVector, Error, Result, C64};

/// Per-snapshot figures of one algorithm in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotMetrics {
    /// SINR of the weight after adapting on this snapshot.
    pub sinr_db: f64,
    /// `(|y|² − 1)²` of the a priori output.
    pub cm_cost: f64,
    /// `‖w − w_mvdr‖²`, with the reference scaled to the same look response.
    pub weight_err: f64,
    pub selected_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub name: String,
    pub result: Result<Vec<SnapshotMetrics>>,
}

/// Seed of trial `k` under `master`.
pub fn trial_seed(master: u64, k: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(k.wrapping_add(2));
    rng.next_u64()
}

/// Per-epoch references: analytic SINR model and the unit-response MVDR
/// weight on that epoch's sample covariance.
struct EpochReference {
    start: usize,
    end: usize,
    model: SinrModel,
    mvdr_unit: CVector,
}

/// Runs every algorithm on the same realization of `scenario`.
///
/// Scenario or reference failures abort the trial; an algorithm error only
/// marks that algorithm's run as failed.
pub fn run_trial(scenario: &ScenarioConfig, algorithms: &[(String, AlgorithmConfig)]) -> Result<Vec<AlgorithmRun>> {
    let batch = generate_snapshots(scenario)?;
    let a0 = scenario.desired_steering();
    let noise = batch.noise_variance;
    let mut references = Vec::new();
    for epoch in scenario.epochs() {
        let model = SinrModel::new(&scenario.geometry, epoch.sources, noise)?;
        let block = batch.data.columns(epoch.start, epoch.len()).into_owned();
        let r_hat = sample_covariance(&block)?;
        references.push(EpochReference {
            start: epoch.start,
            end: epoch.end,
            model,
            mvdr_unit: mvdr_weight(&r_hat, &a0, 1.0)?,
        });
    }

    Ok(algorithms
        .iter()
        .map(|(name, config)| AlgorithmRun {
            name: name.clone(),
            result: run_algorithm(config, &a0, &batch.data, &references),
        })
        .collect())
}

fn run_algorithm(
    config: &AlgorithmConfig,
    a0: &CVector,
    data: &crate::CMatrix,
    references: &[EpochReference],
) -> Result<Vec<SnapshotMetrics>> {
    let mut bf = Beamformer::new(config, a0)?;
    let response = C64::new(bf.look_response(), 0.0);
    let mut out = Vec::with_capacity(data.ncols());
    for reference in references {
        let w_ref = &reference.mvdr_unit * response;
        for i in reference.start..reference.end {
            let x = data.column(i).into_owned();
            let y = bf.step(&x)?;
            let w = bf.weight()?;
            if !w.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidConfig("weights diverged"));
            }
            out.push(SnapshotMetrics {
                sinr_db: reference.model.sinr_db(&w)?,
                cm_cost: cm_cost(y),
                weight_err: weight_error(&w, &w_ref),
                selected_rank: bf.rank(),
            });
        }
    }
    Ok(out)
}

/// Trial-averaged metrics of one algorithm, one entry per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedSeries {
    pub name: String,
    pub sinr_db: Vec<f64>,
    pub cm_cost: Vec<f64>,
    pub weight_err: Vec<f64>,
    /// Mean selected rank (fractional when the rank adapts).
    pub selected_rank: Vec<f64>,
    pub trials: usize,
    pub excluded: usize,
}

/// Running sums that turn into [`AveragedSeries`]. Merging is associative
/// and commutative, so trials can be reduced in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    series: Vec<AveragedSeries>,
}

impl Accumulator {
    pub fn new(names: &[String], n_snapshots: usize) -> Self {
        Self {
            series: names
                .iter()
                .map(|name| AveragedSeries {
                    name: name.clone(),
                    sinr_db: vec![0.0; n_snapshots],
                    cm_cost: vec![0.0; n_snapshots],
                    weight_err: vec![0.0; n_snapshots],
                    selected_rank: vec![0.0; n_snapshots],
                    trials: 0,
                    excluded: 0,
                })
                .collect(),
        }
    }

    pub fn add(&mut self, runs: &[AlgorithmRun]) -> Result<()> {
        if runs.len() != self.series.len() {
            return Err(Error::Dimension {
                expected: self.series.len(),
                got: runs.len(),
            });
        }
        for (series, run) in self.series.iter_mut().zip(runs) {
            match &run.result {
                Ok(metrics) => {
                    if metrics.len() != series.sinr_db.len() {
                        return Err(Error::Dimension {
                            expected: series.sinr_db.len(),
                            got: metrics.len(),
                        });
                    }
                    for (i, m) in metrics.iter().enumerate() {
                        series.sinr_db[i] += m.sinr_db;
                        series.cm_cost[i] += m.cm_cost;
                        series.weight_err[i] += m.weight_err;
                        series.selected_rank[i] += m.selected_rank as f64;
                    }
                    series.trials += 1;
                }
                Err(err) => {
                    log::debug!("{}: trial excluded: {err}", series.name);
                    series.excluded += 1;
                }
            }
        }
        Ok(())
    }

    pub fn merge(mut self, other: Self) -> Result<Self> {
        if self.series.len() != other.series.len() {
            return Err(Error::Dimension {
                expected: self.series.len(),
                got: other.series.len(),
            });
        }
        for (a, b) in self.series.iter_mut().zip(other.series) {
            for (x, y) in a.sinr_db.iter_mut().zip(&b.sinr_db) {
                *x += y;
            }
            for (x, y) in a.cm_cost.iter_mut().zip(&b.cm_cost) {
                *x += y;
            }
            for (x, y) in a.weight_err.iter_mut().zip(&b.weight_err) {
                *x += y;
            }
            for (x, y) in a.selected_rank.iter_mut().zip(&b.selected_rank) {
                *x += y;
            }
            a.trials += b.trials;
            a.excluded += b.excluded;
        }
        Ok(self)
    }

    /// Divides by the number of successful trials. Series without any
    /// successful trial come out as NaN.
    pub fn finish(self) -> Vec<AveragedSeries> {
        self.series
            .into_iter()
            .map(|mut s| {
                let k = s.trials as f64;
                for v in s
                    .sinr_db
                    .iter_mut()
                    .chain(s.cm_cost.iter_mut())
                    .chain(s.weight_err.iter_mut())
                    .chain(s.selected_rank.iter_mut())
                {
                    *v = if s.trials == 0 { f64::NAN } else { *v / k };
                }
                s
            })
            .collect()
    }
}

/// Sequential Monte Carlo over `trials` realizations.
pub fn run_trials_sequential(
    scenario: &ScenarioConfig,
    algorithms: &[(String, AlgorithmConfig)],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<AveragedSeries>> {
    let names: Vec<String> = algorithms.iter().map(|(n, _)| n.clone()).collect();
    let mut acc = Accumulator::new(&names, scenario.n_snapshots);
    for k in 0..trials {
        let sc = ScenarioConfig {
            seed: trial_seed(master_seed, k as u64),
            ..scenario.clone()
        };
        acc.add(&run_trial(&sc, algorithms)?)?;
    }
    Ok(acc.finish())
}
