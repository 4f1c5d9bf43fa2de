//! Output SINR against the analytic interference-plus-noise covariance, and
//! related figures of merit.

use crate::signal::{steering_vector, ArrayGeometry, SourceSpec};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Reported instead of `−∞` when the look-direction response vanishes.
pub const SINR_FLOOR_DB: f64 = -300.0;
/// Reported instead of `+∞` when interference and noise vanish.
pub const SINR_CAP_DB: f64 = 300.0;

/// Desired steering, power and interference-plus-noise covariance of one
/// stationary stretch.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrModel {
    pub a0: CVector,
    pub desired_power: f64,
    /// `R_in = Σ_{k≥1} C_k² a_k a_kᴴ + σ²I`.
    pub r_in: CMatrix,
}

impl SinrModel {
    pub fn new(geometry: &ArrayGeometry, sources: &[SourceSpec], noise_variance: f64) -> Result<Self> {
        let desired = sources
            .iter()
            .find(|s| s.is_desired)
            .ok_or(Error::InvalidConfig("exactly one source must be desired"))?;
        let m = geometry.elements;
        let mut r_in = CMatrix::identity(m, m) * C64::new(noise_variance, 0.0);
        for s in sources.iter().filter(|s| !s.is_desired) {
            let a = steering_vector(geometry, s.doa_deg);
            r_in.gerc(C64::new(s.amplitude * s.amplitude, 0.0), &a, &a, C64::new(1.0, 0.0));
        }
        Ok(Self {
            a0: steering_vector(geometry, desired.doa_deg),
            desired_power: desired.amplitude * desired.amplitude,
            r_in,
        })
    }

    /// Output SINR of `w` in dB.
    pub fn sinr_db(&self, w: &CVector) -> Result<f64> {
        if w.len() != self.a0.len() {
            return Err(Error::Dimension {
                expected: self.a0.len(),
                got: w.len(),
            });
        }
        if w.iter().all(|v| *v == C64::new(0.0, 0.0)) {
            return Err(Error::ZeroWeight);
        }
        let signal = self.desired_power * w.dotc(&self.a0).norm_sqr();
        let disturbance = w.dotc(&(&self.r_in * w)).re;
        Ok(ratio_db(signal, disturbance))
    }

    /// `C₀² a₀ᴴ R_in⁻¹ a₀`, the SINR of the optimal MVDR weight, in dB.
    pub fn optimal_sinr_db(&self) -> Result<f64> {
        let chol = self.r_in.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let quad = self.a0.dotc(&chol.solve(&self.a0)).re;
        Ok(ratio_db(self.desired_power * quad, 1.0))
    }

    /// MVDR weight on the analytic covariance, `γ R_in⁻¹a₀ / (a₀ᴴR_in⁻¹a₀)`.
    pub fn optimal_weight(&self, gamma: f64) -> Result<CVector> {
        let chol = self.r_in.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let r_inv_a = chol.solve(&self.a0);
        let quad = self.a0.dotc(&r_inv_a).re;
        Ok(r_inv_a * C64::new(gamma / quad, 0.0))
    }
}

fn ratio_db(signal: f64, disturbance: f64) -> f64 {
    if !(signal > 0.0) {
        return SINR_FLOOR_DB;
    }
    if !(disturbance > 0.0) {
        log::warn!("interference-plus-noise power vanished; SINR capped at {SINR_CAP_DB} dB");
        return SINR_CAP_DB;
    }
    (10.0 * libm::log10(signal / disturbance)).clamp(SINR_FLOOR_DB, SINR_CAP_DB)
}

/// `‖w − w_ref‖²`.
pub fn weight_error(w: &CVector, w_ref: &CVector) -> f64 {
    (w - w_ref).norm_squared()
}

/// `(1/N) Σ x xᴴ` over the columns of `data`.
pub fn sample_covariance(data: &CMatrix) -> Result<CMatrix> {
    if data.ncols() == 0 {
        return Err(Error::EmptySamples);
    }
    Ok(data * data.adjoint() / C64::new(data.ncols() as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> ArrayGeometry {
        ArrayGeometry::half_wavelength(32)
    }

    #[test]
    fn matched_filter_without_interference() {
        let model = SinrModel::new(&geometry(), &[SourceSpec::desired(90.0)], 0.1).unwrap();
        let sinr = model.sinr_db(&model.a0.clone()).unwrap();
        assert!((sinr - 10.0 * libm::log10(320.0)).abs() < 1e-10);
        assert!((sinr - 25.05).abs() < 0.01);
        assert!((model.optimal_sinr_db().unwrap() - sinr).abs() < 1e-9);
    }

    #[test]
    fn guards() {
        let model = SinrModel::new(&geometry(), &[SourceSpec::desired(90.0)], 0.1).unwrap();
        assert_eq!(model.sinr_db(&CVector::zeros(32)), Err(Error::ZeroWeight));
        let mut orth = CVector::zeros(32);
        orth[0] = C64::new(1.0, 0.0);
        // Broadside steering is all ones, so [1, −1, 0, …] is orthogonal.
        orth[1] = C64::new(-1.0, 0.0);
        assert_eq!(model.sinr_db(&orth).unwrap(), SINR_FLOOR_DB);

        let noiseless = SinrModel::new(&geometry(), &[SourceSpec::desired(90.0)], 0.0).unwrap();
        assert_eq!(noiseless.sinr_db(&noiseless.a0.clone()).unwrap(), SINR_CAP_DB);
    }

    #[test]
    fn scale_invariance_and_optimality() {
        let sources = [
            SourceSpec::desired(72.0),
            SourceSpec::interferer(40.0),
            SourceSpec::interferer(120.0),
        ];
        let model = SinrModel::new(&geometry(), &sources, 0.1).unwrap();
        let w = model.optimal_weight(1.0).unwrap();
        assert!((w.dotc(&model.a0) - 1.0).norm() < 1e-10);
        let best = model.sinr_db(&w).unwrap();
        assert!((best - model.optimal_sinr_db().unwrap()).abs() < 1e-9);
        let scaled = &w * C64::new(0.0, 3.0);
        assert!((model.sinr_db(&scaled).unwrap() - best).abs() < 1e-9);
        assert!(model.sinr_db(&model.a0.clone()).unwrap() < best);
    }

    #[test]
    fn covariance_of_columns() {
        let data = CMatrix::from_fn(3, 4, |i, j| C64::new((i + j) as f64, i as f64));
        let r = sample_covariance(&data).unwrap();
        let mut direct = CMatrix::zeros(3, 3);
        for j in 0..4 {
            let c = data.column(j);
            direct += c * c.adjoint();
        }
        assert!((r - direct / C64::new(4.0, 0.0)).norm() < 1e-12);
        assert_eq!(sample_covariance(&CMatrix::zeros(3, 0)), Err(Error::EmptySamples));
        assert_eq!(
            weight_error(&CVector::zeros(2), &CVector::from_element(2, C64::new(0.0, 1.0))),
            2.0
        );
    }
}
