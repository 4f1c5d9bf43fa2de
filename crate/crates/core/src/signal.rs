//! Uniform linear array signal model.
//!
//! Snapshot `i` is `x(i) = Σₖ Cₖ dₖ(i) a(θₖ) + n(i)` with unit-modulus symbols
//! `dₖ(i)`, real amplitudes `Cₖ` and circular white Gaussian noise `n(i)`.
//!
//! Angles follow the `cos θ` convention: broadside is `θ = 90°`. Steering
//! vectors have unit-modulus entries, so `‖a(θ)‖² = m` (they are *not*
//! unit-norm).

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, CVector, Error, Result, C64};

const SYMBOL_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    /// Number of sensor elements `m`.
    pub elements: usize,
    /// Inter-element spacing over carrier wavelength, `u / λc`.
    pub spacing_ratio: f64,
}

impl ArrayGeometry {
    pub fn new(elements: usize, spacing_ratio: f64) -> Result<Self> {
        let geometry = Self {
            elements,
            spacing_ratio,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    /// Half-wavelength spaced array of `elements` sensors.
    pub fn half_wavelength(elements: usize) -> Self {
        Self {
            elements,
            spacing_ratio: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements == 0 {
            return Err(Error::InvalidConfig("array needs at least one element"));
        }
        if !(self.spacing_ratio > 0.0) || !self.spacing_ratio.is_finite() {
            return Err(Error::InvalidConfig("element spacing ratio must be positive"));
        }
        Ok(())
    }
}

/// Constant-modulus symbol alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Constellation {
    /// Real antipodal symbols `±1`.
    #[default]
    Binary,
    /// `(±1 ± j)/√2`.
    Quaternary,
}

impl Constellation {
    pub fn points(&self) -> &'static [C64] {
        const BINARY: [C64; 2] = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        const QUATERNARY: [C64; 4] = [
            C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            C64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            C64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            C64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        ];
        match self {
            Constellation::Binary => &BINARY,
            Constellation::Quaternary => &QUATERNARY,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        let points = self.points();
        points[rng.random_range(0..points.len())]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub doa_deg: f64,
    /// Real amplitude `Cₖ`; the source power is `Cₖ²`.
    pub amplitude: f64,
    pub constellation: Constellation,
    pub is_desired: bool,
}

impl SourceSpec {
    pub fn desired(doa_deg: f64) -> Self {
        Self {
            doa_deg,
            amplitude: 1.0,
            constellation: Constellation::Binary,
            is_desired: true,
        }
    }

    pub fn interferer(doa_deg: f64) -> Self {
        Self {
            is_desired: false,
            ..Self::desired(doa_deg)
        }
    }
}

/// Step change of the active source set at snapshot index `at` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeEvent {
    pub at: usize,
    pub sources: Vec<SourceSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: ArrayGeometry,
    pub sources: Vec<SourceSpec>,
    /// Input SNR of the desired source in dB.
    pub snr_db: f64,
    pub n_snapshots: usize,
    pub seed: u64,
    pub change_events: Vec<ChangeEvent>,
}

/// A stationary stretch `[start, end)` of a scenario.
#[derive(Debug, Clone, Copy)]
pub struct Epoch<'a> {
    pub start: usize,
    pub end: usize,
    pub sources: &'a [SourceSpec],
}

impl Epoch<'_> {
    pub fn desired(&self) -> &SourceSpec {
        self.sources
            .iter()
            .find(|s| s.is_desired)
            .expect("validated epoch has a desired source")
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.n_snapshots == 0 {
            return Err(Error::InvalidConfig("scenario needs at least one snapshot"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidConfig("SNR must be finite"));
        }
        validate_sources(&self.sources, self.geometry.elements)?;
        let mut previous = 0;
        for event in &self.change_events {
            if event.at <= previous || event.at >= self.n_snapshots {
                return Err(Error::InvalidConfig(
                    "change events must be strictly increasing and inside (0, N)",
                ));
            }
            validate_sources(&event.sources, self.geometry.elements)?;
            previous = event.at;
        }
        let d0 = self.desired().doa_deg;
        if self
            .change_events
            .iter()
            .any(|e| e.sources.iter().any(|s| s.is_desired && s.doa_deg != d0))
        {
            return Err(Error::InvalidConfig("the desired DOA must stay fixed across epochs"));
        }
        Ok(())
    }

    /// The desired source of the first epoch.
    pub fn desired(&self) -> &SourceSpec {
        self.sources.iter().find(|s| s.is_desired).unwrap_or(&self.sources[0])
    }

    /// Noise variance per element, referenced to the desired source power.
    pub fn noise_variance(&self) -> f64 {
        let c0 = self.desired().amplitude;
        noise_variance_for_snr(self.snr_db, c0 * c0)
    }

    pub fn epochs(&self) -> Vec<Epoch<'_>> {
        let mut epochs = Vec::with_capacity(self.change_events.len() + 1);
        let mut start = 0;
        let mut sources = self.sources.as_slice();
        for event in &self.change_events {
            epochs.push(Epoch {
                start,
                end: event.at,
                sources,
            });
            start = event.at;
            sources = &event.sources;
        }
        epochs.push(Epoch {
            start,
            end: self.n_snapshots,
            sources,
        });
        epochs
    }

    pub fn desired_steering(&self) -> CVector {
        steering_vector(&self.geometry, self.desired().doa_deg)
    }
}

fn validate_sources(sources: &[SourceSpec], elements: usize) -> Result<()> {
    if sources.is_empty() {
        return Err(Error::InvalidConfig("source list is empty"));
    }
    if sources.len() > elements {
        return Err(Error::InvalidConfig("more sources than array elements"));
    }
    if sources.iter().filter(|s| s.is_desired).count() != 1 {
        return Err(Error::InvalidConfig("exactly one source must be desired"));
    }
    for (k, s) in sources.iter().enumerate() {
        if !(s.amplitude > 0.0) || !s.amplitude.is_finite() {
            return Err(Error::InvalidConfig("source amplitudes must be positive"));
        }
        if !s.doa_deg.is_finite() {
            return Err(Error::InvalidConfig("source DOA must be finite"));
        }
        let cos_k = libm::cos(s.doa_deg.to_radians());
        if sources[..k]
            .iter()
            .any(|o| libm::fabs(libm::cos(o.doa_deg.to_radians()) - cos_k) < 1e-9)
        {
            return Err(Error::InvalidConfig("source DOAs must be pairwise distinct"));
        }
    }
    Ok(())
}

/// `a(θ)ₖ = exp(−2πj · k · (u/λc) · cos θ)` for `k = 0..m`.
pub fn steering_vector(geometry: &ArrayGeometry, doa_deg: f64) -> CVector {
    let phase_step = -2.0 * PI * geometry.spacing_ratio * libm::cos(doa_deg.to_radians());
    CVector::from_fn(geometry.elements, |k, _| {
        let phase = phase_step * k as f64;
        C64::new(libm::cos(phase), libm::sin(phase))
    })
}

pub fn noise_variance_for_snr(snr_db: f64, signal_power: f64) -> f64 {
    signal_power / libm::pow(10.0, snr_db / 10.0)
}

/// Received data and ground truth for one scenario realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotBatch {
    /// `m × N`, column `i` is `x(i)`.
    pub data: CMatrix,
    /// Symbols of the sources active at each snapshot, in source-list order.
    pub symbols: Vec<CVector>,
    pub noise_variance: f64,
}

impl SnapshotBatch {
    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    pub fn snapshot(&self, i: usize) -> CVector {
        self.data.column(i).into_owned()
    }
}

/// Draws a batch deterministically from `config.seed`.
///
/// Symbols and noise come from two independent ChaCha streams consumed in
/// snapshot order, so growing `n_snapshots` only appends columns.
pub fn generate_snapshots(config: &ScenarioConfig) -> Result<SnapshotBatch> {
    config.validate()?;
    let m = config.geometry.elements;
    let n = config.n_snapshots;
    let noise_variance = config.noise_variance();
    let noise_scale = libm::sqrt(noise_variance / 2.0);

    let mut symbol_rng = ChaCha8Rng::seed_from_u64(config.seed);
    symbol_rng.set_stream(SYMBOL_STREAM);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
    noise_rng.set_stream(NOISE_STREAM);

    let mut data = CMatrix::zeros(m, n);
    let mut symbols = Vec::with_capacity(n);
    for epoch in config.epochs() {
        let steering: Vec<CVector> = epoch
            .sources
            .iter()
            .map(|s| steering_vector(&config.geometry, s.doa_deg))
            .collect();
        for i in epoch.start..epoch.end {
            let d = CVector::from_iterator(
                epoch.sources.len(),
                epoch.sources.iter().map(|s| s.constellation.draw(&mut symbol_rng)),
            );
            let mut column = data.column_mut(i);
            for (k, (source, a)) in epoch.sources.iter().zip(&steering).enumerate() {
                column.axpy(d[k] * source.amplitude, a, C64::new(1.0, 0.0));
            }
            for entry in column.iter_mut() {
                let re: f64 = noise_rng.sample(StandardNormal);
                let im: f64 = noise_rng.sample(StandardNormal);
                *entry += C64::new(re, im) * noise_scale;
            }
            symbols.push(d);
        }
    }
    Ok(SnapshotBatch {
        data,
        symbols,
        noise_variance,
    })
}
