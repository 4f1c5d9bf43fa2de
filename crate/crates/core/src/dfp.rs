//! Direct-form processor: joint adaptation of the transformation matrix `T`
//! (`m × r`) and the reduced-rank filter `w̄` (`r`) under
//! `w̄ᴴ Tᴴ a₀ = γ`.
//!
//! Every step follows the same order: compute the output with the current
//! pair, update `T` with the *old* `w̄`, recompute the output and the reduced
//! quantities `ā = Tᴴa₀`, `x̄ = Tᴴx` with the *new* `T`, then update `w̄`.

use crate::linalg::{
    gram_schmidt_orthonormalize, hermitian_symmetrize, orthonormalize_completing, project_out, InverseTracker,
};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative size of `ā` below which the subspace is considered to have lost
/// the look direction.
pub const DEGENERATE_SUBSPACE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adaptation {
    /// Stochastic gradient with step sizes for `T` and `w̄`.
    Sg { mu_t: f64, mu_w: f64 },
    /// Recursive least squares with forgetting factor `alpha` and inverse
    /// initializations `Φ(0) = δI`, `Φ̄(0) = δ̄I`.
    Rls { alpha: f64, delta: f64, delta_bar: f64 },
}

impl Adaptation {
    pub fn is_rls(&self) -> bool {
        matches!(self, Adaptation::Rls { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfpHyperParams {
    pub rank: usize,
    pub adaptation: Adaptation,
    pub gamma: f64,
    /// Orthonormalize `T` after each update (`TᴴT = I`).
    pub use_gs: bool,
    /// Use the unnormalized projector `I − a₀a₀ᴴ` in the SG update of `T`.
    /// Since `‖a₀‖² = m`, this does not preserve the constraint; it exists to
    /// compare against the normalized form.
    pub literal_table1: bool,
    /// Never update `T`. With `rank == m` this is the full-rank CCM filter.
    pub freeze_transform: bool,
}

impl DfpHyperParams {
    pub fn sg(rank: usize, mu_t: f64, mu_w: f64) -> Self {
        Self {
            rank,
            adaptation: Adaptation::Sg { mu_t, mu_w },
            gamma: 1.0,
            use_gs: false,
            literal_table1: false,
            freeze_transform: false,
        }
    }

    pub fn rls(rank: usize, alpha: f64, delta: f64, delta_bar: f64) -> Self {
        Self {
            adaptation: Adaptation::Rls {
                alpha,
                delta,
                delta_bar,
            },
            ..Self::sg(rank, 0.0, 0.0)
        }
    }

    pub fn with_gs(mut self, use_gs: bool) -> Self {
        self.use_gs = use_gs;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.rank == 0 || self.rank > m {
            return Err(Error::InvalidConfig("rank must satisfy 1 ≤ r ≤ m"));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidConfig("γ must be positive"));
        }
        match self.adaptation {
            Adaptation::Sg { mu_t, mu_w } => {
                if !(mu_t >= 0.0 && mu_w >= 0.0) || !(mu_t + mu_w).is_finite() {
                    return Err(Error::InvalidConfig("step sizes must be non-negative"));
                }
            }
            Adaptation::Rls {
                alpha,
                delta,
                delta_bar,
            } => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::InvalidConfig("forgetting factor must lie in (0, 1]"));
                }
                if !(delta > 0.0 && delta_bar > 0.0) {
                    return Err(Error::InvalidConfig("δ and δ̄ must be positive"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfpState {
    /// Transformation matrix `T` (`m × r`).
    pub t: CMatrix,
    /// Reduced-rank filter `w̄`.
    pub w_bar: CVector,
    /// `Φ ≈ R̂⁻¹` with `R̂ = Σ αⁱ⁻ˡ |y|² x xᴴ` (RLS only).
    pub phi: Option<InverseTracker>,
    /// `Φ̄ ≈ R̂̄⁻¹` in the reduced domain (RLS only).
    pub phi_bar: Option<InverseTracker>,
    /// `p̂ = Σ αⁱ⁻ˡ y* x`.
    pub p_hat: CVector,
    /// `p̂̄ = Σ αⁱ⁻ˡ y* x̄`.
    pub p_bar_hat: CVector,
    pub a0: CVector,
    /// Columns replaced by the last orthonormalization (see
    /// [`orthonormalize_completing`]).
    pub replaced_columns: usize,
}

impl DfpState {
    /// `T = [I_r; 0]`, `w̄ ∝ Tᴴ a_γ` scaled so that `w̄ᴴ Tᴴ a₀ = γ`.
    pub fn init(params: &DfpHyperParams, a0: &CVector) -> Result<Self> {
        let m = a0.len();
        params.validate(m)?;
        let r = params.rank;
        let t = CMatrix::identity(m, r);
        let a_gamma = a0 * C64::new(params.gamma, 0.0);
        let projected = t.ad_mul(&a_gamma);
        let energy = projected.norm_squared();
        if !(energy > 0.0) {
            return Err(Error::UnreachableConstraint);
        }
        let mut w_bar = projected.unscale(energy);
        // The table initialization gives w̄ᴴ Tᴴ a₀ = 1/γ.
        let response = w_bar.dotc(&t.ad_mul(a0));
        w_bar *= C64::new(params.gamma / response.re, 0.0);

        let (phi, phi_bar) = match params.adaptation {
            Adaptation::Rls {
                alpha,
                delta,
                delta_bar,
            } => (
                Some(InverseTracker::new(m, delta, alpha)?),
                Some(InverseTracker::new(r, delta_bar, alpha)?),
            ),
            Adaptation::Sg { .. } => (None, None),
        };
        Ok(Self {
            t,
            w_bar,
            phi,
            phi_bar,
            p_hat: CVector::zeros(m),
            p_bar_hat: CVector::zeros(r),
            a0: a0.clone(),
            replaced_columns: 0,
        })
    }

    pub fn rank(&self) -> usize {
        self.w_bar.len()
    }

    /// `y = w̄ᴴ (Tᴴ x)`.
    pub fn output(&self, x: &CVector) -> C64 {
        self.w_bar.dotc(&self.t.ad_mul(x))
    }

    /// Full-rank equivalent weight `w = T w̄`.
    pub fn equivalent_weight(&self) -> CVector {
        &self.t * &self.w_bar
    }

    /// `|w̄ᴴ Tᴴ a₀ − γ|`.
    pub fn constraint_residual(&self, gamma: f64) -> f64 {
        (self.w_bar.dotc(&self.t.ad_mul(&self.a0)) - gamma).norm()
    }

    /// One stochastic-gradient iteration; returns the a priori output.
    pub fn sg_step(&mut self, params: &DfpHyperParams, x: &CVector) -> Result<C64> {
        self.sg_iteration(params, x, false)
    }

    /// One RLS iteration; returns the a priori output.
    pub fn rls_step(&mut self, params: &DfpHyperParams, x: &CVector) -> Result<C64> {
        self.rls_iteration(params, x, false)
    }

    /// The SG or RLS iteration selected by `params`, with `T`
    /// orthonormalized between its update and the update of `w̄`, and `w̄`
    /// rescaled afterwards so the constraint holds exactly.
    pub fn gs_step(&mut self, params: &DfpHyperParams, x: &CVector) -> Result<C64> {
        match params.adaptation {
            Adaptation::Sg { .. } => self.sg_iteration(params, x, true),
            Adaptation::Rls { .. } => self.rls_iteration(params, x, true),
        }
    }

    /// Dispatches on `params.adaptation` and `params.use_gs`.
    pub fn step(&mut self, params: &DfpHyperParams, x: &CVector) -> Result<C64> {
        match (params.adaptation, params.use_gs) {
            (_, true) => self.gs_step(params, x),
            (Adaptation::Sg { .. }, false) => self.sg_step(params, x),
            (Adaptation::Rls { .. }, false) => self.rls_step(params, x),
        }
    }

    fn check_dims(&self, x: &CVector) -> Result<()> {
        if x.len() != self.a0.len() {
            return Err(Error::Dimension {
                expected: self.a0.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn sg_iteration(&mut self, params: &DfpHyperParams, x: &CVector, orthonormalize: bool) -> Result<C64> {
        self.check_dims(x)?;
        let Adaptation::Sg { mu_t, mu_w } = params.adaptation else {
            return Err(Error::InvalidConfig("SG step on an RLS configuration"));
        };
        let y_prior = self.output(x);
        let e = y_prior.norm_sqr() - 1.0;

        if !params.freeze_transform {
            let px = if params.literal_table1 {
                x - &self.a0 * self.a0.dotc(x)
            } else {
                project_out(&self.a0, x)
            };
            // T ← T − μ_T e y* (P_a x) w̄ᴴ
            let scale = C64::new(-mu_t * e, 0.0) * y_prior.conj();
            self.t.gerc(scale, &px, &self.w_bar, C64::new(1.0, 0.0));
            if orthonormalize {
                self.t = gram_schmidt_orthonormalize(&self.t)?;
                self.replaced_columns = 0;
            }
        }

        let x_bar = self.t.ad_mul(x);
        let y = self.w_bar.dotc(&x_bar);
        let e = y.norm_sqr() - 1.0;
        let a_bar = self.t.ad_mul(&self.a0);
        if a_bar.norm() < DEGENERATE_SUBSPACE * self.a0.norm() {
            return Err(Error::DegenerateSubspace);
        }
        let direction = project_out(&a_bar, &x_bar);
        self.w_bar
            .axpy(C64::new(-mu_w * e, 0.0) * y.conj(), &direction, C64::new(1.0, 0.0));
        if orthonormalize {
            self.restore_constraint(&a_bar, params.gamma)?;
        }
        Ok(y_prior)
    }

    fn rls_iteration(&mut self, params: &DfpHyperParams, x: &CVector, orthonormalize: bool) -> Result<C64> {
        self.check_dims(x)?;
        let Adaptation::Rls { alpha, .. } = params.adaptation else {
            return Err(Error::InvalidConfig("RLS step on an SG configuration"));
        };
        let (Some(phi), Some(phi_bar)) = (self.phi.as_mut(), self.phi_bar.as_mut()) else {
            return Err(Error::InvalidConfig("RLS state has no inverse trackers"));
        };
        let alpha_c = C64::new(alpha, 0.0);

        let y_prior = self.w_bar.dotc(&self.t.ad_mul(x));
        self.p_hat = &self.p_hat * alpha_c + x * y_prior.conj();
        phi.update(x, y_prior.norm_sqr())?;

        if !params.freeze_transform {
            let (t, _) = rls_transform_update(phi.phi(), &self.p_hat, &self.a0, &self.w_bar, params.gamma)?;
            if orthonormalize {
                // The update is rank one, so all but one column come from the
                // previous basis.
                let (q, replaced) = orthonormalize_completing(&t, Some(&self.t));
                self.t = q;
                self.replaced_columns = replaced;
            } else {
                self.t = t;
            }
        }

        let x_bar = self.t.ad_mul(x);
        let y = self.w_bar.dotc(&x_bar);
        let a_bar = self.t.ad_mul(&self.a0);
        if a_bar.norm() < DEGENERATE_SUBSPACE * self.a0.norm() {
            return Err(Error::DegenerateSubspace);
        }
        self.p_bar_hat = &self.p_bar_hat * alpha_c + &x_bar * y.conj();
        phi_bar.update(&x_bar, y.norm_sqr())?;
        self.w_bar = constrained_solution(phi_bar.phi(), &self.p_bar_hat, &a_bar, params.gamma)?.0;
        if orthonormalize {
            self.restore_constraint(&a_bar, params.gamma)?;
        }
        Ok(y_prior)
    }

    /// Rescales `w̄` by a complex factor so that `w̄ᴴ ā = γ`.
    fn restore_constraint(&mut self, a_bar: &CVector, gamma: f64) -> Result<()> {
        let response = self.w_bar.dotc(a_bar);
        if !(response.norm() > DEGENERATE_SUBSPACE * gamma) {
            return Err(Error::DegenerateSubspace);
        }
        self.w_bar *= C64::new(gamma, 0.0) / response.conj();
        Ok(())
    }
}

/// Constant-modulus cost `(|y|² − 1)²`.
pub fn cm_cost(y: C64) -> f64 {
    let e = y.norm_sqr() - 1.0;
    e * e
}

/// `Φ (p − λ a)` with the multiplier `λ = (aᴴΦp − γ)/(aᴴΦa)` chosen so that
/// the result `v` satisfies `vᴴ a = γ`. Returns `(v, λ)`.
pub fn constrained_solution(phi: &CMatrix, p: &CVector, a: &CVector, gamma: f64) -> Result<(CVector, C64)> {
    let phi_a = phi * a;
    let denom = a.dotc(&phi_a).re;
    if !(denom.abs() > f64::EPSILON * phi.norm() * a.norm_squared()) || !denom.is_finite() {
        return Err(Error::Singular);
    }
    let phi_p = phi * p;
    let lambda = (a.dotc(&phi_p) - gamma) / denom;
    Ok((phi_p - phi_a * lambda, lambda))
}

/// Least-squares update of the transformation matrix for a known `w̄`:
/// the minimum-Frobenius-norm `T` with `T w̄ = p̂_R`, i.e.
/// `T = p̂_R w̄ᴴ / ‖w̄‖²` where `p̂_R = Φ(p̂ − λ a₀)` meets the constraint.
/// Returns `(T, λ)`.
pub fn rls_transform_update(
    phi: &CMatrix,
    p_hat: &CVector,
    a0: &CVector,
    w_bar: &CVector,
    gamma: f64,
) -> Result<(CMatrix, C64)> {
    let w_energy = w_bar.norm_squared();
    if !(w_energy > 0.0) {
        return Err(Error::ZeroWeight);
    }
    let (p_r, lambda) = constrained_solution(phi, p_hat, a0, gamma)?;
    Ok((&p_r * w_bar.adjoint() / C64::new(w_energy, 0.0), lambda))
}

/// `γ R⁻¹a₀ / (a₀ᴴR⁻¹a₀)` with `R` loaded by `10⁻⁶ · tr(R)/m`.
pub fn mvdr_weight(r_hat: &CMatrix, a0: &CVector, gamma: f64) -> Result<CVector> {
    let m = a0.len();
    if r_hat.shape() != (m, m) {
        return Err(Error::Dimension {
            expected: m,
            got: r_hat.nrows(),
        });
    }
    let mut loaded = r_hat.clone();
    hermitian_symmetrize(&mut loaded);
    let loading = 1e-6 * loaded.trace().re / m as f64;
    for i in 0..m {
        loaded[(i, i)] += loading;
    }
    let chol = loaded.cholesky().ok_or(Error::NotPositiveDefinite)?;
    // The complex factorization happily takes square roots of negative pivots.
    if chol
        .l_dirty()
        .diagonal()
        .iter()
        .any(|d| !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re)
    {
        return Err(Error::NotPositiveDefinite);
    }
    let r_inv_a = chol.solve(a0);
    let denom = a0.dotc(&r_inv_a).re;
    if !(denom > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(r_inv_a * C64::new(gamma / denom, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{steering_vector, ArrayGeometry};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn a0(m: usize) -> CVector {
        steering_vector(&ArrayGeometry::half_wavelength(m), 63.0)
    }

    #[test]
    fn init_meets_constraint_for_any_gamma() {
        for gamma in [0.3, 1.0, 2.5] {
            let params = DfpHyperParams::sg(3, 0.01, 0.01).with_gamma(gamma);
            let state = DfpState::init(&params, &a0(8)).unwrap();
            assert!(state.constraint_residual(gamma) < 1e-12);
            assert_eq!(state.t, CMatrix::identity(8, 3));
        }
    }

    #[test]
    fn init_with_unit_gamma_is_the_table_initialization() {
        let a = a0(6);
        let state = DfpState::init(&DfpHyperParams::sg(4, 0.1, 0.1), &a).unwrap();
        let projected = a.rows(0, 4).into_owned();
        let expected = &projected / C64::new(projected.norm_squared(), 0.0);
        assert!((state.w_bar - expected).norm() < 1e-15);
    }

    #[test]
    fn full_rank_init_is_identity() {
        let state = DfpState::init(&DfpHyperParams::rls(5, 0.99, 0.1, 0.1), &a0(5)).unwrap();
        assert_eq!(state.t, CMatrix::identity(5, 5));
        assert_eq!(state.phi.as_ref().unwrap().dim(), 5);
    }

    #[test]
    fn init_rejects_unreachable_constraint() {
        let mut a = CVector::zeros(4);
        a[3] = C64::new(1.0, 0.0);
        assert_eq!(
            DfpState::init(&DfpHyperParams::sg(2, 0.1, 0.1), &a),
            Err(Error::UnreachableConstraint)
        );
        assert!(DfpState::init(&DfpHyperParams::sg(5, 0.1, 0.1), &a).is_err());
    }

    #[test]
    fn output_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = DfpState::init(&DfpHyperParams::sg(4, 0.1, 0.1), &a0(4)).unwrap();
        let x = random_vector(&mut rng, 4);
        state.w_bar = CVector::zeros(4);
        assert_eq!(state.output(&x), C64::new(0.0, 0.0));
        state.w_bar[0] = C64::new(1.0, 0.0);
        assert!((state.output(&x) - x[0]).norm() < 1e-15);

        state.t = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        state.w_bar = random_vector(&mut rng, 4);
        let two_stage = state.t.adjoint() * &x;
        let expected: C64 = state
            .w_bar
            .iter()
            .zip(two_stage.iter())
            .map(|(w, v)| w.conj() * v)
            .sum();
        assert!((state.output(&x) - expected).norm() < 1e-12);
    }

    #[test]
    fn cm_cost_values() {
        assert_eq!(cm_cost(C64::new(0.6, 0.8)), 0.0_f64.max(cm_cost(C64::new(0.6, 0.8))));
        assert!(cm_cost(C64::new(0.6, 0.8)) < 1e-30);
        assert_eq!(cm_cost(C64::new(0.0, 0.0)), 1.0);
        assert!((cm_cost(C64::new(2f64.sqrt(), 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_steps_leave_state_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = DfpHyperParams::sg(3, 0.0, 0.0);
        let mut state = DfpState::init(&params, &a0(8)).unwrap();
        let before = state.clone();
        let x = random_vector(&mut rng, 8);
        let y = state.sg_step(&params, &x).unwrap();
        assert_eq!(y, before.output(&x));
        assert_eq!(state, before);
    }

    #[test]
    fn sg_preserves_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for use_gs in [false, true] {
            let params = DfpHyperParams::sg(3, 0.05, 0.05).with_gs(use_gs).with_gamma(1.7);
            let mut state = DfpState::init(&params, &a0(8)).unwrap();
            for _ in 0..200 {
                state.step(&params, &random_vector(&mut rng, 8)).unwrap();
                assert!(state.constraint_residual(1.7) < 1e-6);
            }
            if use_gs {
                let gram = state.t.ad_mul(&state.t);
                assert!((gram - CMatrix::identity(3, 3)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn literal_projector_breaks_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut params = DfpHyperParams::sg(3, 0.05, 0.05);
        params.literal_table1 = true;
        let mut state = DfpState::init(&params, &a0(8)).unwrap();
        for _ in 0..50 {
            state.step(&params, &random_vector(&mut rng, 8)).unwrap();
        }
        assert!(state.constraint_residual(1.0) > 1e-6);
    }

    #[test]
    fn rls_meets_constraint_after_every_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for use_gs in [false, true] {
            let params = DfpHyperParams::rls(3, 0.98, 0.1, 0.1).with_gs(use_gs);
            let mut state = DfpState::init(&params, &a0(8)).unwrap();
            for _ in 0..100 {
                state.step(&params, &random_vector(&mut rng, 8)).unwrap();
                assert!(state.constraint_residual(1.0) < 1e-8);
            }
        }
    }

    #[test]
    fn rls_zero_snapshot_only_forgets() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let params = DfpHyperParams::rls(3, 0.9, 0.1, 0.2);
        let mut state = DfpState::init(&params, &a0(6)).unwrap();
        for _ in 0..5 {
            state.rls_step(&params, &random_vector(&mut rng, 6)).unwrap();
        }
        let before = state.clone();
        state.rls_step(&params, &CVector::zeros(6)).unwrap();
        assert!((&state.p_hat - &before.p_hat * C64::new(0.9, 0.0)).norm() < 1e-14);
        let scaled = before.phi.as_ref().unwrap().phi() / C64::new(0.9, 0.0);
        assert!((state.phi.as_ref().unwrap().phi() - scaled).norm() < 1e-10);
    }

    #[test]
    fn rls_transform_is_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let params = DfpHyperParams::rls(4, 0.98, 0.1, 0.1);
        let mut state = DfpState::init(&params, &a0(8)).unwrap();
        for _ in 0..30 {
            state.rls_step(&params, &random_vector(&mut rng, 8)).unwrap();
        }
        let sv = state.t.clone().singular_values();
        let mut sorted: alloc::vec::Vec<f64> = sv.iter().copied().collect();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(sorted[1] < 1e-10 * sorted[0]);
    }

    #[test]
    fn rls_transform_rejects_zero_weight() {
        let phi = CMatrix::identity(3, 3);
        let a = a0(3);
        assert_eq!(
            rls_transform_update(&phi, &a, &a, &CVector::zeros(2), 1.0).unwrap_err(),
            Error::ZeroWeight
        );
        assert_eq!(
            rls_transform_update(
                &CMatrix::zeros(3, 3),
                &a,
                &a,
                &CVector::from_element(2, C64::new(1.0, 0.0)),
                1.0
            )
            .unwrap_err(),
            Error::Singular
        );
    }

    #[test]
    fn mvdr_white_covariance() {
        let a = a0(6);
        let w = mvdr_weight(&CMatrix::identity(6, 6), &a, 2.0).unwrap();
        assert!((w - &a * C64::new(2.0 / 6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mvdr_single_source_is_matched_filter() {
        let a = a0(8);
        let r = &a * a.adjoint() + CMatrix::identity(8, 8) * C64::new(0.1, 0.0);
        let w = mvdr_weight(&r, &a, 1.0).unwrap();
        assert!((w.dotc(&a) - 1.0).norm() < 1e-10);
        assert!((w - &a / C64::new(8.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn mvdr_rejects_indefinite() {
        let r = CMatrix::identity(3, 3) * C64::new(-1.0, 0.0);
        assert_eq!(mvdr_weight(&r, &a0(3), 1.0), Err(Error::NotPositiveDefinite));
    }
}
