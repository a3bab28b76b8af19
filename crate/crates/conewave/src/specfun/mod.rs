//! Real-order Bessel and Hankel special functions: the numerical bedrock
//! for the spectral engine. Pure functions of value inputs, safe for
//! unrestricted parallel invocation.

mod bessel;
mod fast;
mod gamma;
mod hankel0;
mod phase;

pub use bessel::{bessel_j, bessel_j_derivative, bessel_j_eval, bessel_j_sequence, BesselEval, EvalMethod};
pub use fast::BesselOrder;
pub use gamma::{gamma, ln_gamma};
pub use hankel0::{hankel0_minus, hankel0_plus, hankel0_plus_complex};
pub use phase::{hankel1, phase_decompose, PhaseDecomposition};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Quadrature(#[from] crate::quad::QuadError),
}
