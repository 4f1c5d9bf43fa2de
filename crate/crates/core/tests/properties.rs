mod common;

use common::*;
use proptest::prelude::*;
use rrccm_core::complexity::{complexity_eval, CostedAlgorithm, Structure};
use rrccm_core::convexity::{binary_symbol_set, hessian_psd_check};
use rrccm_core::dfp::{DfpHyperParams, DfpState};
use rrccm_core::gsc::{GscHyperParams, GscState};
use rrccm_core::linalg::{gram_schmidt_orthonormalize, InverseTracker};
use rrccm_core::rank::select_rank;
use rrccm_core::signal::{steering_vector, ArrayGeometry};
use rrccm_core::{CMatrix, CVector, C64};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), rows * cols).prop_map(move |v| CMatrix::from_vec(rows, cols, v))
}

fn vector(n: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(complex(), n).prop_map(CVector::from_vec)
}

/// Desired DOA plus two interferers at least 8° apart.
fn doas() -> impl Strategy<Value = [f64; 3]> {
    (20.0f64..160.0, 8.0f64..60.0, 8.0f64..60.0).prop_map(|(d, a, b)| [d, (d + a).min(175.0), (d - b).max(5.0)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complexity_counts_are_nonnegative(m in 2u64..300, r_frac in 0.0f64..1.0) {
        let r = 1 + ((m - 1) as f64 * r_frac) as u64;
        let r = r.min(m - 1);
        for structure in Structure::ALL {
            for alg in CostedAlgorithm::ALL {
                prop_assert!(complexity_eval(alg, structure, m, r).is_ok(), "{alg} {structure} m={m} r={r}");
            }
        }
    }

    #[test]
    fn rank_choice_ignores_cost_scale(costs in prop::collection::vec(0.0f64..100.0, 1..8), scale in 1e-3f64..1e3, r_min in 1usize..4) {
        let scaled: Vec<f64> = costs.iter().map(|c| c * scale).collect();
        let r = select_rank(&costs, r_min);
        prop_assert_eq!(r, select_rank(&scaled, r_min));
        prop_assert!(r >= r_min && r < r_min + costs.len());
        let best = costs[r - r_min];
        prop_assert!(costs.iter().all(|&c| c >= best));
        prop_assert!(costs[..r - r_min].iter().all(|&c| c > best));
    }

    #[test]
    fn steering_entries_are_unit_modulus(m in 1usize..40, doa in 0.0f64..180.0, ratio in 0.1f64..1.0) {
        let a = steering_vector(&ArrayGeometry::new(m, ratio).unwrap(), doa);
        prop_assert_eq!(a[0], C64::new(1.0, 0.0));
        for v in a.iter() {
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_schmidt_is_orthonormal_and_keeps_span(t in matrix(7, 3)) {
        let q = gram_schmidt_orthonormalize(&t).unwrap();
        prop_assert!((q.adjoint() * &q - eye(3)).norm() < 1e-10);
        let residual = &t - &q * (q.adjoint() * &t);
        prop_assert!(residual.norm() < 1e-10 * t.norm().max(1.0));
    }

    #[test]
    fn inverse_tracker_stays_hermitian(us in prop::collection::vec(vector(4), 1..20), w in 0.0f64..5.0) {
        let mut tracker = InverseTracker::new(4, 0.5, 0.97).unwrap();
        for u in &us {
            tracker.update(u, w).unwrap();
        }
        let phi = tracker.phi();
        prop_assert!((phi - phi.adjoint()).norm() <= 1e-10 * phi.norm().max(1.0));
    }

    #[test]
    fn hessian_is_psd_when_condition_holds(varsigma in vector(4), d0_term in 1.0f64..4.0) {
        let (h, min_eig) = hessian_psd_check(&varsigma, &binary_symbol_set(4), d0_term).unwrap();
        prop_assert!((&h - h.adjoint()).norm() <= 1e-10);
        prop_assert!(min_eig >= -1e-8, "{min_eig}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_direct_form_step_meets_the_constraint(doas in doas(), seed in 0u64..1000, gamma in 0.5f64..2.0) {
        let (a, xs) = snapshots(&scenario(10, &doas, 60, seed));
        let variants = [
            DfpHyperParams::sg(3, 1e-3, 1e-3),
            DfpHyperParams::sg(3, 1e-3, 1e-3).with_gs(true),
            DfpHyperParams::rls(3, 0.998, 0.025, 0.02),
            DfpHyperParams::rls(3, 0.998, 0.025, 0.02).with_gs(true),
        ];
        for params in variants {
            let params = params.with_gamma(gamma);
            let mut state = DfpState::init(&params, &a).unwrap();
            prop_assert!(state.constraint_residual(gamma) <= 1e-6);
            for x in &xs {
                state.step(&params, x).unwrap();
                prop_assert!(state.constraint_residual(gamma) <= 1e-6, "{params:?}");
            }
        }
    }

    #[test]
    fn every_canceller_step_meets_the_constraint(doas in doas(), seed in 0u64..1000) {
        let (a, xs) = snapshots(&scenario(10, &doas, 60, seed));
        let gamma = 0.1;
        let variants = [
            GscHyperParams::sg(3, 1e-3, 1e-3),
            GscHyperParams::sg(3, 1e-3, 1e-3).with_gs(true),
            GscHyperParams::rls(3, 0.998, 0.01, 0.0093),
            GscHyperParams::rls(3, 0.998, 0.01, 0.0093).with_gs(true),
        ];
        for params in variants {
            let params = params.with_gamma(gamma);
            let mut state = GscState::init(&params, &a).unwrap();
            for x in &xs {
                state.step(&params, x).unwrap();
                prop_assert!(state.constraint_residual(gamma) <= 1e-10);
            }
        }
    }
}

proptest! {
    #[test]
    fn sg_counts_linear_rls_quadratic_in_m(r in 1u64..8, m in 16u64..128) {
        use rrccm_core::complexity::{complexity_eval_by_id, Structure};
        for structure in [Structure::Dfp, Structure::Gsc] {
            let adds = |id: &str, m: u64| complexity_eval_by_id(id, structure, m, r).unwrap().additions as i64;
            let second = |id: &str| adds(id, m + 2) - 2 * adds(id, m + 1) + adds(id, m);
            let third = |id: &str| adds(id, m + 3) - 3 * adds(id, m + 2) + 3 * adds(id, m + 1) - adds(id, m);
            prop_assert!(second("JIO-CCM-RLS") > 0);
            prop_assert_eq!(third("JIO-CCM-RLS"), 0);
            if structure == Structure::Dfp {
                prop_assert_eq!(second("JIO-CCM-SG"), 0);
            }
        }
    }
}
