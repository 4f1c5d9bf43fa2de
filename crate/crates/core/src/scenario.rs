//! Named experiment presets and per-structure tuning tables.

use alloc::vec;
use alloc::vec::Vec;

use crate::beamformer::{AlgorithmId, AlgorithmKind};
use crate::complexity::Structure;
use crate::signal::{ArrayGeometry, ChangeEvent, ScenarioConfig, SourceSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes {
    pub mu_t: f64,
    pub mu_w: f64,
}

/// Hyperparameters for every algorithm of one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuning {
    pub rank: usize,
    pub gamma: f64,
    pub sg: StepSizes,
    pub gs: StepSizes,
    pub alpha: f64,
    /// `δ = δ̄` for the RLS variant.
    pub rls_delta: f64,
    /// `δ = δ̄` for the RLS variant with orthonormalization.
    pub rgs_delta: f64,
    pub r_min: usize,
    pub r_max: usize,
    pub rho: f64,
}

impl Default for Tuning {
    fn default() -> Self {
        Self {
            rank: 5,
            gamma: 1.0,
            sg: StepSizes {
                mu_t: 0.003,
                mu_w: 0.003,
            },
            gs: StepSizes {
                mu_t: 0.0023,
                mu_w: 0.003,
            },
            alpha: 0.998,
            rls_delta: 0.025,
            rgs_delta: 0.02,
            r_min: 3,
            r_max: 7,
            rho: 0.998,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub scenario: ScenarioConfig,
    pub dfp: Tuning,
    pub gsc: Tuning,
    pub algorithms: Vec<AlgorithmId>,
    /// Inclusive rank range for sweeps.
    pub rank_range: (usize, usize),
}

impl Preset {
    pub fn tuning(&self, structure: Structure) -> &Tuning {
        match structure {
            Structure::Dfp => &self.dfp,
            Structure::Gsc => &self.gsc,
        }
    }
}

pub const PRESET_NAMES: [&str; 5] = ["fig4", "fig5", "fig6", "fig7", "fig8"];

pub const DESIRED_DOA_DEG: f64 = 72.0;
const INTERFERERS_Q7: [f64; 6] = [34.0, 51.0, 93.0, 112.0, 131.0, 152.0];
const INTERFERERS_Q10: [f64; 9] = [20.0, 34.0, 47.0, 58.0, 93.0, 107.0, 122.0, 139.0, 158.0];
const INTERFERERS_Q8: [f64; 7] = [20.0, 34.0, 51.0, 93.0, 112.0, 131.0, 152.0];
const LATE_INTERFERERS: [f64; 3] = [60.0, 122.0, 165.0];

fn sources(interferers: &[f64]) -> Vec<SourceSpec> {
    let mut s = vec![SourceSpec::desired(DESIRED_DOA_DEG)];
    s.extend(interferers.iter().map(|&doa| SourceSpec::interferer(doa)));
    s
}

fn scenario(sources: Vec<SourceSpec>, n_snapshots: usize) -> ScenarioConfig {
    ScenarioConfig {
        geometry: ArrayGeometry::half_wavelength(32),
        sources,
        snr_db: 10.0,
        n_snapshots,
        seed: 1,
        change_events: Vec::new(),
    }
}

fn ids(structure: Structure, kinds: &[AlgorithmKind]) -> Vec<AlgorithmId> {
    kinds.iter().map(|&k| AlgorithmId::new(structure, k)).collect()
}

const FIXED: [AlgorithmKind; 4] = [
    AlgorithmKind::Sg,
    AlgorithmKind::Gs,
    AlgorithmKind::Rls,
    AlgorithmKind::Rgs,
];

fn fig4_tuning() -> Tuning {
    Tuning::default()
}

/// The direct-form look response is `γ`; the canceller's is `γ‖a₀‖² = γm`.
/// Using `γ = 1/m` there gives both structures unit response.
fn fig5_tuning(m: usize) -> Tuning {
    Tuning {
        gamma: 1.0 / m as f64,
        sg: StepSizes {
            mu_t: 0.0025,
            mu_w: 0.002,
        },
        gs: StepSizes {
            mu_t: 0.003,
            mu_w: 0.003,
        },
        rls_delta: 0.01,
        rgs_delta: 0.0093,
        ..Tuning::default()
    }
}

fn fig7_tuning() -> Tuning {
    Tuning {
        sg: StepSizes {
            mu_t: 0.003,
            mu_w: 0.004,
        },
        gs: StepSizes {
            mu_t: 0.003,
            mu_w: 0.001,
        },
        rls_delta: 0.03,
        rgs_delta: 0.026,
        ..Tuning::default()
    }
}

fn fig8_tuning() -> Tuning {
    Tuning {
        sg: StepSizes {
            mu_t: 0.003,
            mu_w: 0.0038,
        },
        gs: StepSizes {
            mu_t: 0.003,
            mu_w: 0.001,
        },
        rls_delta: 0.033,
        rgs_delta: 0.028,
        ..Tuning::default()
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let m = 32;
    let p = match name {
        "fig4" => Preset {
            name: "fig4",
            scenario: scenario(sources(&INTERFERERS_Q7), 500),
            dfp: fig4_tuning(),
            gsc: fig5_tuning(m),
            algorithms: ids(Structure::Dfp, &FIXED),
            rank_range: (1, 16),
        },
        "fig5" => Preset {
            name: "fig5",
            scenario: scenario(sources(&INTERFERERS_Q7), 500),
            dfp: fig4_tuning(),
            gsc: fig5_tuning(m),
            algorithms: ids(Structure::Gsc, &FIXED),
            rank_range: (1, 16),
        },
        "fig6" => Preset {
            name: "fig6",
            scenario: scenario(sources(&INTERFERERS_Q7), 500),
            dfp: fig4_tuning(),
            gsc: fig5_tuning(m),
            algorithms: ids(Structure::Dfp, &[AlgorithmKind::Sg, AlgorithmKind::Rls]),
            rank_range: (1, 16),
        },
        "fig7" => Preset {
            name: "fig7",
            scenario: scenario(sources(&INTERFERERS_Q10), 500),
            dfp: fig7_tuning(),
            gsc: fig5_tuning(m),
            algorithms: ids(
                Structure::Dfp,
                &[
                    AlgorithmKind::AutoSg,
                    AlgorithmKind::AutoGs,
                    AlgorithmKind::AutoRls,
                    AlgorithmKind::AutoRgs,
                ],
            ),
            rank_range: (3, 7),
        },
        "fig8" => {
            let mut sc = scenario(sources(&INTERFERERS_Q8), 1000);
            let mut later = sources(&INTERFERERS_Q8);
            later.extend(LATE_INTERFERERS.iter().map(|&doa| SourceSpec::interferer(doa)));
            sc.change_events.push(ChangeEvent {
                at: 500,
                sources: later,
            });
            Preset {
                name: "fig8",
                scenario: sc,
                dfp: fig8_tuning(),
                gsc: fig5_tuning(m),
                algorithms: ids(Structure::Dfp, &FIXED),
                rank_range: (3, 7),
            }
        }
        _ => return Err(Error::InvalidConfig("unknown preset")),
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            p.scenario.validate().unwrap();
            assert_eq!(p.scenario.geometry.elements, 32);
            assert_eq!(p.scenario.snr_db, 10.0);
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn caption_parameters() {
        let p = preset("fig4").unwrap();
        assert_eq!(p.scenario.sources.len(), 7);
        assert_eq!(p.scenario.n_snapshots, 500);
        assert_eq!(
            p.dfp.sg,
            StepSizes {
                mu_t: 0.003,
                mu_w: 0.003
            }
        );
        assert_eq!(p.dfp.rank, 5);
        assert_eq!(preset("fig7").unwrap().scenario.sources.len(), 10);
        let fig8 = preset("fig8").unwrap();
        assert_eq!(fig8.scenario.sources.len(), 8);
        assert_eq!(fig8.scenario.change_events[0].sources.len(), 11);
        assert_eq!(fig8.scenario.change_events[0].at, 500);
    }
}
