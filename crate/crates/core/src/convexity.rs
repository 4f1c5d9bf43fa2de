//! Convexity of the constrained CM cost in the interference responses
//! `ς̃ₖ = Cₖ wᴴ a(θₖ)`, `k ≥ 1`, for a noise-free array.

use alloc::vec::Vec;

use crate::{CMatrix, CVector, Error, Result, C64};

/// Slack on the product `γ²|d₀|²C₀²` so that exact boundary cases are not
/// lost to rounding.
const BOUNDARY_SLACK: f64 = 1e-12;

/// `γ² |d₀|² C₀² ≥ 1`.
pub fn convexity_condition(d0_mod: f64, c0: f64, gamma: f64) -> bool {
    gamma * gamma * d0_mod * d0_mod * c0 * c0 >= 1.0 - BOUNDARY_SLACK
}

/// Sample average of
///
/// ```text
/// 2 [ (κ − 1) d̃d̃ᴴ + (ς̃ᴴd̃d̃ᴴς̃) d̃d̃ᴴ + d̃d̃ᴴς̃ς̃ᴴd̃d̃ᴴ ]
/// ```
///
/// over `symbol_samples`, with `κ = d0_term = |d₀|²C₀²γ²`. Returns the
/// Hessian and its smallest eigenvalue.
pub fn hessian_psd_check(varsigma: &CVector, symbol_samples: &[CVector], d0_term: f64) -> Result<(CMatrix, f64)> {
    if symbol_samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let n = varsigma.len();
    if n == 0 {
        return Err(Error::InvalidConfig("the Hessian needs at least one interferer"));
    }
    let mut h = CMatrix::zeros(n, n);
    for d in symbol_samples {
        if d.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: d.len(),
            });
        }
        let proj = d.dotc(varsigma); // d̃ᴴς̃
        let outer = d * d.adjoint();
        let scale = d0_term - 1.0 + proj.norm_sqr();
        h += &outer * C64::new(scale, 0.0);
        // d̃d̃ᴴς̃ς̃ᴴd̃d̃ᴴ = v vᴴ with v = d̃ (d̃ᴴς̃)
        let v = d * proj;
        h += &v * v.adjoint();
    }
    h *= C64::new(2.0 / symbol_samples.len() as f64, 0.0);
    crate::linalg::hermitian_symmetrize(&mut h);
    let min_eig = h
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok((h, min_eig))
}

/// All `2ⁿ` vectors with entries `±1`; averaging over them gives exact
/// expectations for independent binary symbols.
pub fn binary_symbol_set(n: usize) -> Vec<CVector> {
    assert!(n < 24, "binary symbol enumeration is exponential in n");
    (0..1usize << n)
        .map(|bits| {
            CVector::from_fn(n, |k, _| {
                if bits >> k & 1 == 1 {
                    C64::new(-1.0, 0.0)
                } else {
                    C64::new(1.0, 0.0)
                }
            })
        })
        .collect()
}
