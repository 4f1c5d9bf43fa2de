//! Reduced-rank constrained constant-modulus (CCM) adaptive beamforming.
//!
//! A bank of full-rank adaptive filters (the transformation matrix) maps each
//! array snapshot into an `r`-dimensional subspace, and a reduced-rank filter
//! operating on that subspace produces the beamformer output. Both are adapted
//! jointly, one half-step after the other, under the constant-modulus
//! criterion with a look-direction constraint.
//!
//! Two processor structures are provided:
//!
//! * [`dfp`]: direct-form processor, `y = w̄ᴴ Tᴴ x` subject to `w̄ᴴ Tᴴ a(θ₀) = γ`,
//! * [`gsc`]: generalized sidelobe canceller, `w = a_γ − Bᴴ T w̄`,
//!
//! each with stochastic-gradient and recursive-least-squares adaptation and an
//! optional Gram–Schmidt orthonormalization of the transformation matrix.
//! [`rank`] adds automatic rank selection for the direct form.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the Monte Carlo
//! runner and the command line live in the `rrccm` companion crate.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod beamformer;
pub mod complexity;
pub mod convexity;
pub mod dfp;
mod error;
pub mod gsc;
pub mod linalg;
pub mod metrics;
pub mod rank;
pub mod scenario;
pub mod signal;
pub mod trial;

pub use nalgebra;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
