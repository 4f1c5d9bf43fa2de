//! Uniform handle over the adaptive processors so a runner can drive any of
//! them snapshot by snapshot.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::complexity::Structure;
use crate::dfp::{DfpHyperParams, DfpState};
use crate::gsc::{GscHyperParams, GscState};
use crate::rank::{RankAdaptParams, RankAdaptState};
use crate::scenario::Tuning;
use crate::{CVector, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmKind {
    Sg,
    Gs,
    Rls,
    Rgs,
    /// Full-rank CCM with stochastic gradient (`T = I` held fixed).
    FullRankSg,
    /// Full-rank CCM with RLS (`T = I` held fixed).
    FullRankRls,
    AutoSg,
    AutoGs,
    AutoRls,
    AutoRgs,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 10] = [
        AlgorithmKind::Sg,
        AlgorithmKind::Gs,
        AlgorithmKind::Rls,
        AlgorithmKind::Rgs,
        AlgorithmKind::FullRankSg,
        AlgorithmKind::FullRankRls,
        AlgorithmKind::AutoSg,
        AlgorithmKind::AutoGs,
        AlgorithmKind::AutoRls,
        AlgorithmKind::AutoRgs,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmKind::Sg => "sg",
            AlgorithmKind::Gs => "gs",
            AlgorithmKind::Rls => "rls",
            AlgorithmKind::Rgs => "rgs",
            AlgorithmKind::FullRankSg => "fr-sg",
            AlgorithmKind::FullRankRls => "fr-rls",
            AlgorithmKind::AutoSg => "auto-sg",
            AlgorithmKind::AutoGs => "auto-gs",
            AlgorithmKind::AutoRls => "auto-rls",
            AlgorithmKind::AutoRgs => "auto-rgs",
        }
    }

    pub fn is_rls(&self) -> bool {
        matches!(
            self,
            AlgorithmKind::Rls
                | AlgorithmKind::Rgs
                | AlgorithmKind::FullRankRls
                | AlgorithmKind::AutoRls
                | AlgorithmKind::AutoRgs
        )
    }

    pub fn uses_gs(&self) -> bool {
        matches!(
            self,
            AlgorithmKind::Gs | AlgorithmKind::Rgs | AlgorithmKind::AutoGs | AlgorithmKind::AutoRgs
        )
    }

    pub fn is_adaptive_rank(&self) -> bool {
        matches!(
            self,
            AlgorithmKind::AutoSg | AlgorithmKind::AutoGs | AlgorithmKind::AutoRls | AlgorithmKind::AutoRgs
        )
    }

    pub fn is_full_rank(&self) -> bool {
        matches!(self, AlgorithmKind::FullRankSg | AlgorithmKind::FullRankRls)
    }
}

/// Algorithm and structure, written `dfp-sg`, `gsc-rgs`, `dfp-auto-rls`, …
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgorithmId {
    pub structure: Structure,
    pub kind: AlgorithmKind,
}

impl AlgorithmId {
    pub const fn new(structure: Structure, kind: AlgorithmKind) -> Self {
        Self { structure, kind }
    }

    /// Builds the processor configuration from a preset's tuning table.
    /// `rank` overrides the tuned rank of fixed-rank variants.
    /// Checked against the array size `m`, so a bad rank is reported here
    /// rather than on the first snapshot.
    pub fn config(&self, tuning: &Tuning, m: usize, rank: Option<usize>) -> Result<AlgorithmConfig> {
        let config = self.build(tuning, m, rank)?;
        config.validate(m)?;
        Ok(config)
    }

    fn build(&self, tuning: &Tuning, m: usize, rank: Option<usize>) -> Result<AlgorithmConfig> {
        let r = rank.unwrap_or(tuning.rank);
        let (steps, delta) = if self.kind.uses_gs() {
            (tuning.gs, tuning.rgs_delta)
        } else {
            (tuning.sg, tuning.rls_delta)
        };
        match self.structure {
            Structure::Dfp => {
                let base = |r: usize| {
                    let p = if self.kind.is_rls() {
                        DfpHyperParams::rls(r, tuning.alpha, delta, delta)
                    } else {
                        DfpHyperParams::sg(r, steps.mu_t, steps.mu_w)
                    };
                    p.with_gs(self.kind.uses_gs()).with_gamma(tuning.gamma)
                };
                if self.kind.is_full_rank() {
                    let mut p = base(m);
                    p.freeze_transform = true;
                    Ok(AlgorithmConfig::Dfp(p))
                } else if self.kind.is_adaptive_rank() {
                    let mut p = RankAdaptParams::new(tuning.r_min, tuning.r_max, base(tuning.r_max));
                    p.rho = tuning.rho;
                    Ok(AlgorithmConfig::Auto(p))
                } else {
                    Ok(AlgorithmConfig::Dfp(base(r)))
                }
            }
            Structure::Gsc => {
                if self.kind.is_full_rank() || self.kind.is_adaptive_rank() {
                    return Err(Error::InvalidConfig(
                        "full-rank and rank-adaptive variants exist only for the direct form",
                    ));
                }
                let p = if self.kind.is_rls() {
                    GscHyperParams::rls(r, tuning.alpha, delta, delta)
                } else {
                    GscHyperParams::sg(r, steps.mu_t, steps.mu_w)
                };
                Ok(AlgorithmConfig::Gsc(
                    p.with_gs(self.kind.uses_gs()).with_gamma(tuning.gamma),
                ))
            }
        }
    }

    pub fn name(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.structure, self.kind.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    /// Accepts `<structure>-<kind>` or a bare kind, which means the direct form.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (structure, kind) = match s.split_once('-') {
            Some((head, rest)) if head == "dfp" || head == "gsc" => (head.parse()?, rest),
            _ => (Structure::Dfp, s.as_str()),
        };
        let kind = AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.as_str() == kind)
            .ok_or(Error::UnknownAlgorithm)?;
        Ok(Self { structure, kind })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmConfig {
    Dfp(DfpHyperParams),
    Gsc(GscHyperParams),
    Auto(RankAdaptParams),
}

impl AlgorithmConfig {
    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            AlgorithmConfig::Dfp(p) => p.validate(m),
            AlgorithmConfig::Gsc(p) => p.validate(m),
            AlgorithmConfig::Auto(p) => p.validate(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Beamformer {
    Dfp {
        state: DfpState,
        params: DfpHyperParams,
    },
    Gsc {
        state: GscState,
        params: GscHyperParams,
    },
    Auto {
        state: RankAdaptState,
        params: RankAdaptParams,
    },
}

impl Beamformer {
    pub fn new(config: &AlgorithmConfig, a0: &CVector) -> Result<Self> {
        Ok(match config {
            AlgorithmConfig::Dfp(p) => Beamformer::Dfp {
                state: DfpState::init(p, a0)?,
                params: p.clone(),
            },
            AlgorithmConfig::Gsc(p) => Beamformer::Gsc {
                state: GscState::init(p, a0)?,
                params: p.clone(),
            },
            AlgorithmConfig::Auto(p) => Beamformer::Auto {
                state: RankAdaptState::init(p, a0)?,
                params: p.clone(),
            },
        })
    }

    /// Adapts on one snapshot and returns the a priori output.
    pub fn step(&mut self, x: &CVector) -> Result<C64> {
        match self {
            Beamformer::Dfp { state, params } => state.step(params, x),
            Beamformer::Gsc { state, params } => state.step(params, x),
            Beamformer::Auto { state, params } => state.step(params, x),
        }
    }

    /// Equivalent full-rank weight currently in use.
    pub fn weight(&self) -> Result<CVector> {
        match self {
            Beamformer::Dfp { state, .. } => Ok(state.equivalent_weight()),
            Beamformer::Gsc { state, .. } => Ok(state.w_full.clone()),
            Beamformer::Auto { state, params } => state.output_weight(params),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Beamformer::Dfp { state, .. } => state.rank(),
            Beamformer::Gsc { state, .. } => state.rank(),
            Beamformer::Auto { state, .. } => state.current_r,
        }
    }

    /// The look-direction response `wᴴa₀` the structure maintains.
    pub fn look_response(&self) -> f64 {
        match self {
            Beamformer::Dfp { params, .. } => params.gamma,
            Beamformer::Gsc { state, params } => params.gamma * state.a0.norm_squared(),
            Beamformer::Auto { params, .. } => params.master.gamma,
        }
    }
}
