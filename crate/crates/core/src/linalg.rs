//! Complex linear-algebra kernels used by the adaptive recursions.

use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative residual below which a Gram–Schmidt column counts as dependent.
pub const DEGENERATE_RESIDUAL: f64 = 1e-12;

/// Running inverse `Φ` of an exponentially weighted, rank-one updated Gram
/// matrix, maintained with the matrix inversion lemma.
///
/// Starting from `Φ(0) = δ I`, after updates `(u₁, w₁) … (uₙ, wₙ)` it equals
/// the inverse of `αⁿ δ⁻¹ I + Σₗ αⁿ⁻ˡ wₗ uₗ uₗᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseTracker {
    phi: CMatrix,
    loading: f64,
    forgetting: f64,
}

impl InverseTracker {
    pub fn new(dim: usize, loading: f64, forgetting: f64) -> Result<Self> {
        if !(loading > 0.0) || !loading.is_finite() {
            return Err(Error::InvalidConfig("inverse loading δ must be positive"));
        }
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::InvalidConfig("forgetting factor must lie in (0, 1]"));
        }
        Ok(Self {
            phi: CMatrix::identity(dim, dim) * C64::new(loading, 0.0),
            loading,
            forgetting,
        })
    }

    /// Tracker resumed from a saved inverse estimate, e.g. one read back
    /// from a state dump. `loading` is only recorded.
    pub fn from_parts(phi: CMatrix, loading: f64, forgetting: f64) -> Result<Self> {
        if !phi.is_square() {
            return Err(Error::Dimension {
                expected: phi.nrows(),
                got: phi.ncols(),
            });
        }
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::InvalidConfig("forgetting factor must lie in (0, 1]"));
        }
        Ok(Self {
            phi,
            loading,
            forgetting,
        })
    }

    pub fn phi(&self) -> &CMatrix {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn loading(&self) -> f64 {
        self.loading
    }

    pub fn forgetting(&self) -> f64 {
        self.forgetting
    }

    /// Folds `weight · u uᴴ` into the tracked Gram matrix and returns the gain
    /// `k = α⁻¹Φu / (1/weight + α⁻¹uᴴΦu)`.
    ///
    /// A zero weight (or zero `u`) carries no information: the gain is zero
    /// and only the forgetting `Φ ← α⁻¹Φ` is applied.
    pub fn update(&mut self, u: &CVector, weight: f64) -> Result<CVector> {
        if u.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: u.len(),
            });
        }
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::InvalidConfig("update weight must be finite and non-negative"));
        }
        let inv_alpha = 1.0 / self.forgetting;
        let phi_u = &self.phi * u;
        let quad = u.dotc(&phi_u).re;
        if weight == 0.0 || quad == 0.0 {
            self.phi *= C64::new(inv_alpha, 0.0);
            return Ok(CVector::zeros(self.dim()));
        }
        // Multiplying numerator and denominator by `weight` keeps small
        // weights away from 1/weight overflow.
        let gain = &phi_u * C64::new(inv_alpha * weight / (1.0 + inv_alpha * weight * quad), 0.0);
        self.phi
            .gerc(C64::new(-inv_alpha, 0.0), &gain, &phi_u, C64::new(inv_alpha, 0.0));
        hermitian_symmetrize(&mut self.phi);
        Ok(gain)
    }
}

/// `A ← (A + Aᴴ)/2`.
pub fn hermitian_symmetrize(a: &mut CMatrix) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
}

/// Orthonormalizes the columns of `t` (modified Gram–Schmidt with one
/// re-orthogonalization pass).
///
/// Column `j` of the result lies in the span of the first `j + 1` input
/// columns. A column whose residual falls below [`DEGENERATE_RESIDUAL`] times
/// its own norm is reported as [`Error::DegenerateColumn`].
pub fn gram_schmidt_orthonormalize(t: &CMatrix) -> Result<CMatrix> {
    let mut q = t.clone();
    for j in 0..q.ncols() {
        let input_norm = t.column(j).norm();
        let residual = orthogonalize_against(&mut q, j);
        if !(residual > DEGENERATE_RESIDUAL * input_norm) {
            return Err(Error::DegenerateColumn { column: j });
        }
        q.column_mut(j).unscale_mut(residual);
    }
    Ok(q)
}

/// Like [`gram_schmidt_orthonormalize`] but never fails on dependent columns.
///
/// A degenerate column `j` is replaced by the first usable candidate among the
/// columns of `fallback` (column `j` first, then the others in order), and
/// failing that by the coordinate axis with the largest component outside the
/// columns accepted so far. Returns the orthonormal matrix and the number of
/// replaced columns.
///
/// The output satisfies `QᴴQ = I` whenever `t` has at most as many columns as
/// rows; the span is only preserved when nothing was replaced.
pub fn orthonormalize_completing(t: &CMatrix, fallback: Option<&CMatrix>) -> (CMatrix, usize) {
    let (rows, cols) = t.shape();
    let mut q = t.clone();
    let mut replaced = 0;
    for j in 0..cols {
        let input_norm = t.column(j).norm();
        let mut residual = orthogonalize_against(&mut q, j);
        if residual > DEGENERATE_RESIDUAL * input_norm && residual.is_finite() {
            q.column_mut(j).unscale_mut(residual);
            continue;
        }
        replaced += 1;
        let mut accepted = false;
        if let Some(fb) = fallback.filter(|fb| fb.nrows() == rows) {
            let order = core::iter::once(j)
                .filter(|&c| c < fb.ncols())
                .chain((0..fb.ncols()).filter(|&c| c != j));
            for c in order {
                let norm = fb.column(c).norm();
                q.set_column(j, &fb.column(c));
                residual = orthogonalize_against(&mut q, j);
                if residual > COMPLETION_ACCEPT * norm && residual.is_finite() {
                    accepted = true;
                    break;
                }
            }
        }
        if !accepted {
            let best = (0..rows)
                .map(|k| {
                    let inside: f64 = (0..j).map(|l| q[(k, l)].norm_sqr()).sum();
                    (k, 1.0 - inside)
                })
                .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc })
                .0;
            q.column_mut(j).fill(C64::new(0.0, 0.0));
            q[(best, j)] = C64::new(1.0, 0.0);
            residual = orthogonalize_against(&mut q, j);
        }
        q.column_mut(j).unscale_mut(residual);
    }
    (q, replaced)
}

/// Minimum relative residual for a completion candidate to be used.
const COMPLETION_ACCEPT: f64 = 1e-6;

/// Removes from column `j` its components along columns `0..j` (assumed
/// orthonormal), twice, and returns the remaining norm.
fn orthogonalize_against(q: &mut CMatrix, j: usize) -> f64 {
    for _ in 0..2 {
        for l in 0..j {
            let coeff = q.column(l).dotc(&q.column(j));
            let (left, mut right) = q.columns_range_pair_mut(l, j);
            right.axpy(-coeff, &left, C64::new(1.0, 0.0));
        }
    }
    q.column(j).norm()
}

/// Signal blocking matrix `B` of size `(m−1) × m` with `B a₀ = 0` and
/// orthonormal rows.
///
/// The rows are an orthonormal basis of the complement of `a₀`, completed from
/// the coordinate axes; each row is phased so that its first non-negligible
/// entry is real and positive.
pub fn blocking_matrix(a0: &CVector) -> Result<CMatrix> {
    let m = a0.len();
    let norm = a0.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroSteering);
    }
    let mut seed = CMatrix::zeros(m, m);
    seed.set_column(0, &a0.unscale(norm));
    let (basis, _) = orthonormalize_completing(&seed, None);
    let mut b = basis.columns(1, m - 1).adjoint();
    for mut row in b.row_iter_mut() {
        if let Some(lead) = row.iter().copied().find(|z| z.norm() > 1e-9) {
            let phase = lead.conj() / lead.norm();
            row *= phase;
        }
    }
    Ok(b)
}

/// Projects `x` onto the orthogonal complement of `a`:
/// `x − a (aᴴx)/(aᴴa)`.
pub fn project_out(a: &CVector, x: &CVector) -> CVector {
    let aa = a.norm_squared();
    if aa == 0.0 {
        return x.clone();
    }
    x - a * (a.dotc(x) / aa)
}

/// Equivalent of `‖(I − QQᴴ) A‖_F` for an orthonormal `Q`: how far the columns
/// of `a` stick out of `span(Q)`.
pub fn projection_residual(q: &CMatrix, a: &CMatrix) -> f64 {
    let coeffs = q.ad_mul(a);
    (a - q * coeffs).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        random_matrix(rng, n, 1).column(0).into_owned()
    }

    fn identity_defect(q: &CMatrix) -> f64 {
        (q.ad_mul(q) - CMatrix::identity(q.ncols(), q.ncols())).norm()
    }

    #[test]
    fn sherman_morrison_by_hand() {
        let mut tracker = InverseTracker::new(3, 1.0, 1.0).unwrap();
        let e1 = CVector::from_fn(3, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        let gain = tracker.update(&e1, 1.0).unwrap();
        assert!((gain.clone() - e1.clone() * C64::new(0.5, 0.0)).norm() < 1e-15);
        let mut expected = CMatrix::identity(3, 3);
        expected[(0, 0)] = C64::new(0.5, 0.0);
        assert!((tracker.phi() - expected).norm() < 1e-15);
    }

    #[test]
    fn zero_input_only_forgets() {
        let mut tracker = InverseTracker::new(4, 0.3, 0.9).unwrap();
        let before = tracker.phi().clone();
        let gain = tracker.update(&CVector::zeros(4), 2.0).unwrap();
        assert_eq!(gain, CVector::zeros(4));
        assert!((tracker.phi() - before.clone() / C64::new(0.9, 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_vector(&mut rng, 4);
        let gain = tracker.update(&u, 0.0).unwrap();
        assert_eq!(gain, CVector::zeros(4));
        assert!((tracker.phi() - before / C64::new(0.81, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn tracks_direct_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (dim, alpha, delta) = (8, 0.97, 0.5);
        let mut tracker = InverseTracker::new(dim, delta, alpha).unwrap();
        let mut gram = CMatrix::identity(dim, dim) * C64::new(1.0 / delta, 0.0);
        for _ in 0..50 {
            let u = random_vector(&mut rng, dim);
            let w: f64 = rng.random_range(0.1..3.0);
            tracker.update(&u, w).unwrap();
            gram = gram * C64::new(alpha, 0.0) + (&u * u.adjoint()) * C64::new(w, 0.0);
        }
        let direct = gram.try_inverse().unwrap();
        let rel = (tracker.phi() - &direct).norm() / direct.norm();
        assert!(rel < 1e-8, "relative error {rel}");
    }

    #[test]
    fn tracker_rejects_bad_inputs() {
        assert!(InverseTracker::new(3, 0.0, 0.9).is_err());
        assert!(InverseTracker::new(3, 1.0, 1.5).is_err());
        let mut tracker = InverseTracker::new(3, 1.0, 0.9).unwrap();
        assert!(tracker.update(&CVector::zeros(2), 1.0).is_err());
        assert!(tracker.update(&CVector::zeros(3), -1.0).is_err());
    }

    #[test]
    fn gram_schmidt_keeps_orthonormal_input() {
        let t = CMatrix::identity(6, 3);
        let q = gram_schmidt_orthonormalize(&t).unwrap();
        assert!((q - t).norm() < 1e-15);
    }

    #[test]
    fn gram_schmidt_flags_proportional_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut t = random_matrix(&mut rng, 5, 3);
        let scaled = t.column(0) * C64::new(2.0, -1.0);
        t.set_column(1, &scaled);
        assert_eq!(
            gram_schmidt_orthonormalize(&t),
            Err(Error::DegenerateColumn { column: 1 })
        );
    }

    #[test]
    fn gram_schmidt_matches_qr_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = random_matrix(&mut rng, 8, 3);
        let q = gram_schmidt_orthonormalize(&t).unwrap();
        assert!(identity_defect(&q) < 1e-10);
        assert!(projection_residual(&q, &t) < 1e-9);
        // Column j only uses the first j + 1 inputs: compare with QR.
        let qr = t.clone().qr();
        let q_ref = qr.q();
        for j in 0..3 {
            let overlap = q.column(j).dotc(&q_ref.column(j)).norm();
            assert!((overlap - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gram_schmidt_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let t = random_matrix(&mut rng, 10, 4);
        let once = gram_schmidt_orthonormalize(&t).unwrap();
        let twice = gram_schmidt_orthonormalize(&once).unwrap();
        assert!((once - twice).norm() < 1e-12);
    }

    #[test]
    fn completing_fills_rank_one_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = random_vector(&mut rng, 7);
        let w = random_vector(&mut rng, 4);
        let t = &p * w.adjoint();
        let (q, replaced) = orthonormalize_completing(&t, None);
        assert_eq!(replaced, 3);
        assert!(identity_defect(&q) < 1e-12);
        let first = q.column(0).dotc(&p).norm() / p.norm();
        assert!((first - 1.0).abs() < 1e-12);

        // With a fallback basis the replacements come from it, in column order.
        let previous = gram_schmidt_orthonormalize(&random_matrix(&mut rng, 7, 4)).unwrap();
        let (q, replaced) = orthonormalize_completing(&t, Some(&previous));
        assert_eq!(replaced, 3);
        assert!(identity_defect(&q) < 1e-12);
        let basis = CMatrix::from_columns(&[p.clone(), previous.column(1).into_owned()]);
        let basis = gram_schmidt_orthonormalize(&basis).unwrap();
        assert!(projection_residual(&basis, &q.columns(1, 1).into_owned()) < 1e-10);
    }

    #[test]
    fn blocking_matrix_two_elements() {
        let a0 = CVector::from_element(2, C64::new(1.0, 0.0));
        let b = blocking_matrix(&a0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(b.shape(), (1, 2));
        assert!((b[(0, 0)] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((b[(0, 1)] - C64::new(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn blocking_matrix_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a0 = random_vector(&mut rng, 8);
        let b = blocking_matrix(&a0).unwrap();
        assert_eq!(b.shape(), (7, 8));
        assert!((&b * &a0).norm() < 1e-12);
        assert!((&b * b.adjoint() - CMatrix::identity(7, 7)).norm() < 1e-10);
        // Rows span the complement of a0 computed independently by QR of [a0 | I].
        let stacked = CMatrix::from_fn(8, 9, |i, j| match j {
            0 => a0[i],
            _ if i == j - 1 => C64::new(1.0, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        let q = stacked.qr().q();
        let complement = q.columns(1, 7).into_owned();
        assert!(projection_residual(&complement, &b.adjoint()) < 1e-10);
        for row in b.row_iter() {
            let lead = row.iter().find(|z| z.norm() > 1e-9).unwrap();
            assert!(lead.im.abs() < 1e-12 && lead.re > 0.0);
        }
        assert_eq!(blocking_matrix(&CVector::zeros(4)), Err(Error::ZeroSteering));
    }

    #[test]
    fn symmetrize_makes_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut a = random_matrix(&mut rng, 5, 5);
        hermitian_symmetrize(&mut a);
        assert!((a.adjoint() - &a).norm() < 1e-15);
    }
}
