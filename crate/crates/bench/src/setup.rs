//! Experiment setups: the built-in presets, or a scenario file.
//!
//! Scenario files are TOML. Angles are in degrees and powers in dB:
//!
//! ```toml
//! name = "two-jammers"
//! elements = 16
//! spacing_ratio = 0.5        # optional
//! snr_db = 10.0
//! snapshots = 400
//! seed = 7                   # optional
//! algorithms = ["dfp-sg", "dfp-rls", "gsc-rls"]   # optional
//!
//! [[source]]
//! doa = 72.0
//! desired = true
//!
//! [[source]]
//! doa = 40.0
//! power_db = 3.0             # optional, default 0
//! constellation = "quaternary"   # optional, default binary
//!
//! [[change]]                 # optional, source set from snapshot `at` on
//! at = 200
//! [[change.source]]
//! doa = 72.0
//! desired = true
//!
//! [dfp]                      # optional tuning overrides, same keys for [gsc]
//! rank = 4
//! mu_t = 0.002
//! ```
//!
//! Unlisted tuning keys keep the values of the `fig4` preset.

use std::path::Path;

use rrccm_core::beamformer::AlgorithmId;
use rrccm_core::complexity::Structure;
use rrccm_core::scenario::{preset, Tuning, PRESET_NAMES};
use rrccm_core::signal::{ArrayGeometry, ChangeEvent, Constellation, ScenarioConfig, SourceSpec};
use serde::Deserialize;

use crate::error::{Error, Result};

/// Everything needed to run an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub name: String,
    pub scenario: ScenarioConfig,
    pub dfp: Tuning,
    pub gsc: Tuning,
    pub algorithms: Vec<AlgorithmId>,
}

impl Setup {
    pub fn from_preset(name: &str) -> Result<Self> {
        let p = preset(name).map_err(|_| {
            Error::Config(format!(
                "unknown preset `{name}` (expected a file or one of {})",
                PRESET_NAMES.join(", ")
            ))
        })?;
        Ok(Self {
            name: p.name.to_string(),
            scenario: p.scenario,
            dfp: p.dfp,
            gsc: p.gsc,
            algorithms: p.algorithms,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ScenarioFile = toml::from_str(&text).map_err(|source| Error::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        let fallback = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        file.into_setup(fallback)
    }

    /// A preset name, or else a path to a scenario file.
    pub fn resolve(arg: &str) -> Result<Self> {
        if PRESET_NAMES.contains(&arg) {
            return Self::from_preset(arg);
        }
        let path = Path::new(arg);
        if path.exists() {
            Self::from_file(path)
        } else {
            Self::from_preset(arg)
        }
    }

    pub fn tuning(&self, structure: Structure) -> &Tuning {
        match structure {
            Structure::Dfp => &self.dfp,
            Structure::Gsc => &self.gsc,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: Option<String>,
    elements: usize,
    #[serde(default = "half")]
    spacing_ratio: f64,
    snr_db: f64,
    snapshots: usize,
    #[serde(default = "one")]
    seed: u64,
    #[serde(default)]
    algorithms: Vec<String>,
    #[serde(rename = "source")]
    sources: Vec<SourceEntry>,
    #[serde(default, rename = "change")]
    changes: Vec<ChangeEntry>,
    #[serde(default)]
    dfp: TuningEntry,
    #[serde(default)]
    gsc: TuningEntry,
}

fn half() -> f64 {
    0.5
}

fn one() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceEntry {
    doa: f64,
    #[serde(default)]
    power_db: f64,
    #[serde(default)]
    constellation: ConstellationName,
    #[serde(default)]
    desired: bool,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ConstellationName {
    #[default]
    Binary,
    Quaternary,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChangeEntry {
    at: usize,
    #[serde(rename = "source")]
    sources: Vec<SourceEntry>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TuningEntry {
    rank: Option<usize>,
    gamma: Option<f64>,
    mu_t: Option<f64>,
    mu_w: Option<f64>,
    gs_mu_t: Option<f64>,
    gs_mu_w: Option<f64>,
    alpha: Option<f64>,
    rls_delta: Option<f64>,
    rgs_delta: Option<f64>,
    r_min: Option<usize>,
    r_max: Option<usize>,
    rho: Option<f64>,
}

impl TuningEntry {
    fn apply(&self, mut t: Tuning) -> Tuning {
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set! {
            rank => t.rank,
            gamma => t.gamma,
            mu_t => t.sg.mu_t,
            mu_w => t.sg.mu_w,
            gs_mu_t => t.gs.mu_t,
            gs_mu_w => t.gs.mu_w,
            alpha => t.alpha,
            rls_delta => t.rls_delta,
            rgs_delta => t.rgs_delta,
            r_min => t.r_min,
            r_max => t.r_max,
            rho => t.rho,
        }
        t
    }
}

impl SourceEntry {
    fn spec(&self) -> SourceSpec {
        SourceSpec {
            doa_deg: self.doa,
            amplitude: 10f64.powf(self.power_db / 20.0),
            constellation: match self.constellation {
                ConstellationName::Binary => Constellation::Binary,
                ConstellationName::Quaternary => Constellation::Quaternary,
            },
            is_desired: self.desired,
        }
    }
}

impl ScenarioFile {
    fn into_setup(self, fallback_name: &str) -> Result<Setup> {
        let base = preset("fig4")?;
        let scenario = ScenarioConfig {
            geometry: ArrayGeometry::new(self.elements, self.spacing_ratio)?,
            sources: self.sources.iter().map(SourceEntry::spec).collect(),
            snr_db: self.snr_db,
            n_snapshots: self.snapshots,
            seed: self.seed,
            change_events: self
                .changes
                .iter()
                .map(|c| ChangeEvent {
                    at: c.at,
                    sources: c.sources.iter().map(SourceEntry::spec).collect(),
                })
                .collect(),
        };
        scenario.validate()?;
        let algorithms = if self.algorithms.is_empty() {
            base.algorithms
        } else {
            parse_algorithms(&self.algorithms.join(","))?
        };
        let mut gsc = base.gsc;
        // The canceller's default γ is tied to the array size.
        gsc.gamma = 1.0 / self.elements as f64;
        let m = self.elements;
        Ok(Setup {
            name: self.name.unwrap_or_else(|| fallback_name.to_string()),
            scenario,
            dfp: self.dfp.apply(fit_ranks(base.dfp, m, m)),
            gsc: self.gsc.apply(fit_ranks(gsc, m, m - 1)),
            algorithms,
        })
    }
}

/// Caps inherited rank defaults at what an `m`-element array supports.
/// Explicit overrides are applied afterwards and are not clamped.
fn fit_ranks(mut t: Tuning, m: usize, most: usize) -> Tuning {
    let most = most.max(1);
    t.rank = t.rank.min(most);
    t.r_max = t.r_max.min(m).max(1);
    t.r_min = t.r_min.min(t.r_max);
    t
}

/// Comma-separated algorithm ids such as `dfp-sg,gsc-rls,auto-rgs`.
pub fn parse_algorithms(list: &str) -> Result<Vec<AlgorithmId>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("unknown algorithm `{s}`"))))
        .collect::<Result<Vec<_>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(Error::Config("empty algorithm list".into()))
            } else {
                Ok(v)
            }
        })
}
