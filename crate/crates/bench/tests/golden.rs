//! Golden-file regression tests for the state-dump format and the
//! recursions behind it. Set `UPDATE_GOLDEN=1` to rewrite the files after an
//! intended change.

use std::path::PathBuf;

use rrccm::dump::SavedState;
use rrccm::setup::parse_algorithms;
use rrccm_core::beamformer::{AlgorithmConfig, Beamformer};
use rrccm_core::scenario::preset;
use rrccm_core::signal::{generate_snapshots, ArrayGeometry, ScenarioConfig, SourceSpec};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn final_state(id: &str) -> SavedState {
    let sc = ScenarioConfig {
        geometry: ArrayGeometry::half_wavelength(4),
        sources: vec![SourceSpec::desired(75.0), SourceSpec::interferer(130.0)],
        snr_db: 10.0,
        n_snapshots: 6,
        seed: 42,
        change_events: Vec::new(),
    };
    let id = parse_algorithms(id).unwrap()[0];
    let mut tuning = preset("fig4").unwrap().tuning(id.structure).clone();
    tuning.rank = 2;
    tuning.r_min = 1;
    tuning.r_max = 3;
    let config = id.config(&tuning, 4, None).unwrap();
    let batch = generate_snapshots(&sc).unwrap();
    let mut bf = Beamformer::new(&config, &sc.desired_steering()).unwrap();
    for i in 0..batch.len() {
        bf.step(&batch.snapshot(i)).unwrap();
    }
    match (bf, config) {
        (Beamformer::Dfp { state, .. }, AlgorithmConfig::Dfp(_)) => SavedState::Dfp(state),
        (Beamformer::Gsc { state, .. }, AlgorithmConfig::Gsc(_)) => SavedState::Gsc(state),
        (Beamformer::Auto { state, .. }, AlgorithmConfig::Auto(_)) => SavedState::Auto(state),
        _ => unreachable!(),
    }
}

fn check(id: &str, file: &str) {
    let text = final_state(id).to_text();
    let path = golden_path(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(
        text, golden,
        "{file} differs; rerun with UPDATE_GOLDEN=1 if the change is intended"
    );
    assert_eq!(SavedState::parse(&golden).unwrap().to_text(), golden);
}

#[test]
fn dfp_rls_state() {
    check("dfp-rls", "dfp-rls.state");
}

#[test]
fn dfp_gs_state() {
    check("dfp-gs", "dfp-gs.state");
}

#[test]
fn gsc_rgs_state() {
    check("gsc-rgs", "gsc-rgs.state");
}

#[test]
fn rank_adaptive_state() {
    check("auto-sg", "auto-sg.state");
}
