#![allow(dead_code)]

use rrccm_core::signal::{generate_snapshots, ArrayGeometry, ScenarioConfig, SourceSpec};
use rrccm_core::{CMatrix, CVector, C64};

pub fn scenario(m: usize, doas: &[f64], n: usize, seed: u64) -> ScenarioConfig {
    let mut sources = vec![SourceSpec::desired(doas[0])];
    sources.extend(doas[1..].iter().map(|&d| SourceSpec::interferer(d)));
    ScenarioConfig {
        geometry: ArrayGeometry::half_wavelength(m),
        sources,
        snr_db: 10.0,
        n_snapshots: n,
        seed,
        change_events: Vec::new(),
    }
}

/// Desired steering vector and the snapshots as a list of columns.
pub fn snapshots(sc: &ScenarioConfig) -> (CVector, Vec<CVector>) {
    let batch = generate_snapshots(sc).unwrap();
    let xs = (0..batch.len()).map(|i| batch.snapshot(i)).collect();
    (sc.desired_steering(), xs)
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `‖a − b‖ / max(1, ‖b‖)`.
pub fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

pub fn rel_err_v(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

pub fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `[I_r; 0]`.
pub fn leading_identity(m: usize, r: usize) -> CMatrix {
    CMatrix::from_fn(m, r, |i, j| if i == j { c(1.0) } else { c(0.0) })
}
