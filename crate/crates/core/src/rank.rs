//! Automatic rank selection for the direct-form processor.
//!
//! A single master filter pair is adapted at `r_max`. Each candidate rank `j`
//! is the leading `m × j` block of the master `T` with the leading `j`
//! entries of the master `w̄`, scored by the exponentially weighted CM cost
//! of its a priori output.

use alloc::vec::Vec;

use crate::dfp::{cm_cost, DfpHyperParams, DfpState, DEGENERATE_SUBSPACE};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct RankAdaptParams {
    pub r_min: usize,
    pub r_max: usize,
    /// Weight `ϱ` of the cost recursion.
    pub rho: f64,
    /// Stop re-selecting after this many snapshots.
    pub freeze_after: Option<usize>,
    /// Rescale each truncated `w̄` so the candidate meets the look-direction
    /// constraint before it is scored or used.
    pub rescale_candidates: bool,
    /// Master filter configuration; its `rank` is overridden by `r_max`.
    pub master: DfpHyperParams,
}

impl RankAdaptParams {
    pub fn new(r_min: usize, r_max: usize, master: DfpHyperParams) -> Self {
        Self {
            r_min,
            r_max,
            rho: 0.998,
            freeze_after: None,
            rescale_candidates: true,
            master: DfpHyperParams { rank: r_max, ..master },
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.r_min == 0 || self.r_min > self.r_max || self.r_max > m {
            return Err(Error::InvalidConfig("rank bounds must satisfy 1 ≤ r_min ≤ r_max ≤ m"));
        }
        if !(self.rho >= 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidConfig("ϱ must lie in [0, 1]"));
        }
        if self.master.rank != self.r_max {
            return Err(Error::InvalidConfig("master rank must equal r_max"));
        }
        self.master.validate(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankAdaptState {
    pub master: DfpState,
    /// `J[j − r_min]` for `j = r_min..=r_max`.
    pub costs: Vec<f64>,
    pub current_r: usize,
    pub r_min: usize,
    pub snapshots_seen: usize,
}

impl RankAdaptState {
    pub fn init(params: &RankAdaptParams, a0: &CVector) -> Result<Self> {
        params.validate(a0.len())?;
        Ok(Self {
            master: DfpState::init(&params.master, a0)?,
            costs: alloc::vec![0.0; params.r_max - params.r_min + 1],
            current_r: params.r_min,
            r_min: params.r_min,
            snapshots_seen: 0,
        })
    }

    pub fn r_max(&self) -> usize {
        self.r_min + self.costs.len() - 1
    }

    /// Leading `j` columns of `T` and entries of `w̄`, optionally rescaled so
    /// that `w̄ⱼᴴ Tⱼᴴ a₀ = γ`.
    pub fn candidate(&self, j: usize, gamma: Option<f64>) -> Result<(CMatrix, CVector)> {
        if j < self.r_min || j > self.r_max() {
            return Err(Error::InvalidConfig("candidate rank outside [r_min, r_max]"));
        }
        let t = self.master.t.columns(0, j).into_owned();
        let mut w = self.master.w_bar.rows(0, j).into_owned();
        if let Some(gamma) = gamma {
            let response = w.dotc(&t.ad_mul(&self.master.a0));
            if !(response.norm() > DEGENERATE_SUBSPACE * gamma) {
                return Err(Error::DegenerateSubspace);
            }
            w *= C64::new(gamma, 0.0) / response.conj();
        }
        Ok((t, w))
    }

    /// Full-rank weight of the candidate currently selected.
    pub fn output_weight(&self, params: &RankAdaptParams) -> Result<CVector> {
        let (t, w) = self.candidate(self.current_r, self.rescale_gamma(params))?;
        Ok(t * w)
    }

    fn rescale_gamma(&self, params: &RankAdaptParams) -> Option<f64> {
        params.rescale_candidates.then_some(params.master.gamma)
    }

    /// Scores every candidate on `x` with the current (pre-update) filters.
    pub fn cost_update(&mut self, params: &RankAdaptParams, x: &CVector) -> Result<Vec<C64>> {
        let gamma = self.rescale_gamma(params);
        let mut outputs = Vec::with_capacity(self.costs.len());
        for idx in 0..self.costs.len() {
            let (t, w) = self.candidate(self.r_min + idx, gamma)?;
            let y = w.dotc(&t.ad_mul(x));
            self.costs[idx] = params.rho * self.costs[idx] + cm_cost(y);
            outputs.push(y);
        }
        Ok(outputs)
    }

    /// Scores the candidates, adapts the master filters, then re-selects
    /// the rank. Returns the a priori output of the rank in use before the
    /// step.
    pub fn step(&mut self, params: &RankAdaptParams, x: &CVector) -> Result<C64> {
        let outputs = self.cost_update(params, x)?;
        let y = outputs[self.current_r - self.r_min];
        self.master.step(&params.master, x)?;
        self.snapshots_seen += 1;
        let frozen = params.freeze_after.is_some_and(|n| self.snapshots_seen > n);
        if !frozen {
            self.current_r = select_rank(&self.costs, self.r_min);
        }
        Ok(y)
    }
}

/// `r_min + argmin J`, ties to the smallest rank. NaN costs never win.
pub fn select_rank(costs: &[f64], r_min: usize) -> usize {
    let mut best = 0;
    for (idx, cost) in costs.iter().enumerate() {
        if *cost < costs[best] || (costs[best].is_nan() && !cost.is_nan()) {
            best = idx;
        }
    }
    r_min + best
}
