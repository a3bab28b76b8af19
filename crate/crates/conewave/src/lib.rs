//! Spectral engine for wave and Schrödinger flows on a product cone
//! `X = (0,∞) × Y` with metric `dr² + r² h`, under scaling-critical
//! electromagnetic potentials `A = 𝒜(x̂)/r` (magnetic, a 1-form on the
//! cross-section `Y`) and `V = a(x̂)/r²` (electric).
//!
//! The operator `ℒ = -Δ_g + (|𝒜|² + i div 𝒜 + a)/r² + 2i 𝒜·∇/r` separates
//! into an angular operator `L` on `Y` and a radial Bessel operator per
//! angular mode: eigenvalues `μ_k` of `L` drive Bessel orders
//! `ν_k = √(μ_k + (n-2)²/4)`, and the Hankel transform `ℋ_ν` diagonalizes
//! the radial part. Everything downstream (propagators, the spectral
//! measure in its two closed forms, dispersive-decay and Strichartz
//! experiments) is built on this separation.
//!
//! The crate is organized by layer:
//!
//! * [`quad`] — Gauss–Legendre rules and adaptive Gauss–Kronrod quadrature.
//! * [`specfun`] — real-order Bessel/Hankel functions, phase decompositions,
//!   and the gamma function. The numerical bedrock.
//! * [`cross_section`] — the angular operator on `Y`: analytic spectra on
//!   round spheres, a spherical-harmonic Galerkin solver on `S²`, and the
//!   functional calculus `F(√P)` on `Y`.
//! * [`geometry`] — geodesic flow on `Y`: distance and length spectra, the
//!   non-resonance gate at time `π`, conjugate radii, curvature criteria,
//!   and the cone chord quantities `d`, `d̃`.
//! * [`propagator`] — radial grids, Hankel transforms, operator kernels,
//!   wave evolution, Littlewood–Paley bands and Sobolev norms.
//! * [`spectral_measure`] — `dE_√ℒ(λ; x, y)` in Bessel-series and
//!   oscillatory (Cheeger–Taylor type) form, the resolvent, and Stone's
//!   formula, each cross-validating the others.
//! * [`estimates`] — decay-exponent fits, admissible-pair bookkeeping,
//!   Strichartz ratios and the sharpness counterexample.
//!
//! A guide with worked examples lives in `book/`; its code snippets are
//! compiled and run as doc-tests of this crate.

pub mod cross_section;
pub mod estimates;
pub mod geometry;
pub mod propagator;
pub mod quad;
pub mod specfun;
pub mod spectral_measure;

#[cfg(doctest)]
mod book_doctests;

pub use num_complex::Complex64;

/// Cone dimension `n ≥ 3`; the cross-section has dimension `n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeDim(pub usize);

impl ConeDim {
    pub fn new(n: usize) -> Option<Self> {
        (n >= 3).then_some(ConeDim(n))
    }

    /// `(n-2)/2`, the exponent separating radial Bessel orders.
    pub fn half_shift(self) -> f64 {
        (self.0 as f64 - 2.0) / 2.0
    }

    /// `(n-2)²/4`, the shift from `L` to the strictly positive `P`.
    pub fn shift(self) -> f64 {
        let h = self.half_shift();
        h * h
    }
}
