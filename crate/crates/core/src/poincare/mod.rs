//! Fourier expansions of weight-0 Niebur–Poincaré series, the sesqui-harmonic Ĵ_m,
//! weight-3/2 Maass–Poincaré series, their Kloosterman–Bessel coefficients and
//! finite-difference differential operators.

mod expansion;
mod ops;
mod sums;

pub use expansion::{
    assemble_f32, eisenstein_g0, eisenstein_g0_expansion, f32_expansion, j_m, jm_expansion, niebur_expansion, niebur_g, EvalOptions, Evaluation, Expansion,
    JHat, Profile, Term,
};
pub use ops::{laplacian0, laplacian_k, xi_op, DEFAULT_LAPLACIAN_STEP, DEFAULT_XI_STEP};
pub use sums::{bcoeff, bcoeff_ds, coeff_c, Acceleration, CoeffResult, DerivativeResult, SumOptions};

pub(crate) use sums::accelerate as accelerate_terms;

/// f64 J_ν for c-sums outside this module.
pub(crate) fn sums_bessel(nu: f64) -> impl Fn(f64) -> Result<f64, PoincareError> {
    let b = sums::BesselF64::new(nu, false);
    move |x| b.value(x)
}

use thiserror::Error;

use crate::kloosterman::KloostermanError;
use crate::numerics::NumericsError;

#[derive(Debug, Error)]
pub enum PoincareError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} did not converge: spread {spread:.3e} > tol {tol:.3e} at c_max = {c_max}")]
    Convergence { what: String, c_max: u64, spread: f64, tol: f64 },
    #[error("derivative routes disagree: termwise {termwise} vs difference {difference} (c-sum spread {spread:.3e})")]
    RouteDisagreement { termwise: f64, difference: f64, spread: f64 },
    #[error("Richardson disagreement {residual:.3e} exceeds tol {tol:.3e}")]
    Richardson { residual: f64, tol: f64 },
    #[error("finite-difference noise {noise:.3e} exceeds tol {tol:.3e}")]
    StencilNoise { noise: f64, tol: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Kloosterman(#[from] KloostermanError),
}
