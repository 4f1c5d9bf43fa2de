//! Generalized sidelobe canceller: the weight is split into the fixed
//! quiescent part `a_γ = γ a₀` and an adaptive part living in the blocked
//! subspace,
//!
//! ```text
//! w = a_γ − Bᴴ T w̄,        B a₀ = 0,
//! ```
//!
//! so `wᴴa₀ = γ‖a₀‖²` holds for every `T` and `w̄`.

use crate::dfp::Adaptation;
use crate::linalg::{blocking_matrix, gram_schmidt_orthonormalize, orthonormalize_completing, InverseTracker};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct GscHyperParams {
    pub rank: usize,
    pub adaptation: Adaptation,
    pub gamma: f64,
    pub use_gs: bool,
}

impl GscHyperParams {
    pub fn sg(rank: usize, mu_t: f64, mu_w: f64) -> Self {
        Self {
            rank,
            adaptation: Adaptation::Sg { mu_t, mu_w },
            gamma: 1.0,
            use_gs: false,
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
        if m < 2 {
            return Err(Error::InvalidConfig("the GSC needs at least two elements"));
        }
        if self.rank == 0 || self.rank > m - 1 {
            return Err(Error::Dimension {
                expected: m - 1,
                got: self.rank,
            });
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

/// Per-snapshot quantities of the modified received vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GscTransform {
    /// `y = wᴴx`.
    pub y: C64,
    /// `x̃ = y* x`.
    pub x_tilde: CVector,
    /// `x̃_B = B x̃`.
    pub x_tilde_b: CVector,
    /// `d₀ = a_γᴴ x̃`.
    pub d0: C64,
    /// `e = 1 − wᴴx̃ = 1 − |y|²`.
    pub e: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GscState {
    /// Blocking matrix, `(m−1) × m`.
    pub b: CMatrix,
    /// `(m−1) × r`.
    pub t: CMatrix,
    pub w_bar: CVector,
    pub phi_xb: Option<InverseTracker>,
    pub phi_bar_xb: Option<InverseTracker>,
    pub a_gamma: CVector,
    /// `w = a_γ − Bᴴ T w̄`, kept in sync with `t` and `w_bar`.
    pub w_full: CVector,
    pub a0: CVector,
    pub replaced_columns: usize,
}

impl GscState {
    /// `T = [I_r; 0]`, `w̄ = γ e₁`, so the initial weight is `γ (a₀ − Bᴴ[I_r; 0] e₁)`.
    pub fn init(params: &GscHyperParams, a0: &CVector) -> Result<Self> {
        let m = a0.len();
        params.validate(m)?;
        let r = params.rank;
        let b = blocking_matrix(a0)?;
        let t = CMatrix::identity(m - 1, r);
        let mut w_bar = CVector::zeros(r);
        w_bar[0] = C64::new(params.gamma, 0.0);
        let (phi_xb, phi_bar_xb) = match params.adaptation {
            Adaptation::Rls {
                alpha,
                delta,
                delta_bar,
            } => (
                Some(InverseTracker::new(m - 1, delta, alpha)?),
                Some(InverseTracker::new(r, delta_bar, alpha)?),
            ),
            Adaptation::Sg { .. } => (None, None),
        };
        let a_gamma = a0 * C64::new(params.gamma, 0.0);
        let mut state = Self {
            b,
            t,
            w_bar,
            phi_xb,
            phi_bar_xb,
            a_gamma,
            w_full: CVector::zeros(m),
            a0: a0.clone(),
            replaced_columns: 0,
        };
        state.refresh_weight();
        Ok(state)
    }

    pub fn rank(&self) -> usize {
        self.w_bar.len()
    }

    pub fn refresh_weight(&mut self) {
        self.w_full = self.weight_for(&self.t, &self.w_bar);
    }

    fn weight_for(&self, t: &CMatrix, w_bar: &CVector) -> CVector {
        let mut w = self.a_gamma.clone();
        w.gemv_ad(C64::new(-1.0, 0.0), &self.b, &(t * w_bar), C64::new(1.0, 0.0));
        w
    }

    pub fn output(&self, x: &CVector) -> C64 {
        self.w_full.dotc(x)
    }

    /// `|wᴴa₀ − γ‖a₀‖²|`.
    pub fn constraint_residual(&self, gamma: f64) -> f64 {
        (self.w_full.dotc(&self.a0) - gamma * self.a0.norm_squared()).norm()
    }

    /// Modified received vector and errors for the current weight.
    pub fn transform(&self, x: &CVector) -> GscTransform {
        let y = self.output(x);
        let x_tilde = x * y.conj();
        let x_tilde_b = &self.b * &x_tilde;
        let d0 = self.a_gamma.dotc(&x_tilde);
        let e = C64::new(1.0, 0.0) - self.w_full.dotc(&x_tilde);
        GscTransform {
            y,
            x_tilde,
            x_tilde_b,
            d0,
            e,
        }
    }

    pub fn sg_step(&mut self, params: &GscHyperParams, x: &CVector) -> Result<C64> {
        self.sg_iteration(params, x, false)
    }

    pub fn rls_step(&mut self, params: &GscHyperParams, x: &CVector) -> Result<C64> {
        self.rls_iteration(params, x, false)
    }

    /// As [`step`](Self::step) with `T` orthonormalized right after its
    /// update.
    pub fn gs_step(&mut self, params: &GscHyperParams, x: &CVector) -> Result<C64> {
        match params.adaptation {
            Adaptation::Sg { .. } => self.sg_iteration(params, x, true),
            Adaptation::Rls { .. } => self.rls_iteration(params, x, true),
        }
    }

    pub fn step(&mut self, params: &GscHyperParams, x: &CVector) -> Result<C64> {
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

    fn sg_iteration(&mut self, params: &GscHyperParams, x: &CVector, orthonormalize: bool) -> Result<C64> {
        self.check_dims(x)?;
        let Adaptation::Sg { mu_t, mu_w } = params.adaptation else {
            return Err(Error::InvalidConfig("SG step on an RLS configuration"));
        };
        let first = self.transform(x);
        self.t.gerc(
            -first.e.conj() * mu_t,
            &first.x_tilde_b,
            &self.w_bar,
            C64::new(1.0, 0.0),
        );
        if orthonormalize {
            self.t = gram_schmidt_orthonormalize(&self.t)?;
            self.replaced_columns = 0;
        }
        self.refresh_weight();

        let second = self.transform(x);
        let x_bar_b = self.t.ad_mul(&second.x_tilde_b);
        self.w_bar.axpy(-second.e.conj() * mu_w, &x_bar_b, C64::new(1.0, 0.0));
        self.refresh_weight();
        Ok(first.y)
    }

    fn rls_iteration(&mut self, params: &GscHyperParams, x: &CVector, orthonormalize: bool) -> Result<C64> {
        self.check_dims(x)?;
        if !params.adaptation.is_rls() {
            return Err(Error::InvalidConfig("RLS step on an SG configuration"));
        }
        let first = self.transform(x);
        let k_b = self
            .phi_xb
            .as_mut()
            .ok_or(Error::InvalidConfig("RLS state has no inverse trackers"))?
            .update(&first.x_tilde_b, 1.0)?;

        let w_energy = self.w_bar.norm_squared();
        if !(w_energy > 0.0) {
            return Err(Error::ZeroWeight);
        }
        // e_w̄ = (1 − x̃ᴴw) w̄ᴴ/‖w̄‖²
        let bracket = C64::new(1.0, 0.0) - first.x_tilde.dotc(&self.w_full);
        let coeff = -bracket / C64::new(w_energy, 0.0);
        if orthonormalize {
            let mut t = self.t.clone();
            t.gerc(coeff, &k_b, &self.w_bar, C64::new(1.0, 0.0));
            let (q, replaced) = orthonormalize_completing(&t, Some(&self.t));
            self.t = q;
            self.replaced_columns = replaced;
        } else {
            self.t.gerc(coeff, &k_b, &self.w_bar, C64::new(1.0, 0.0));
        }

        let x_bar_b = self.t.ad_mul(&first.x_tilde_b);
        let k_bar = self
            .phi_bar_xb
            .as_mut()
            .ok_or(Error::InvalidConfig("RLS state has no inverse trackers"))?
            .update(&x_bar_b, 1.0)?;
        self.refresh_weight();
        let e = C64::new(1.0, 0.0) - self.w_full.dotc(&first.x_tilde);
        self.w_bar.axpy(-e.conj(), &k_bar, C64::new(1.0, 0.0));
        self.refresh_weight();
        Ok(first.y)
    }
}
