//! Exact Laplacian spectra under the adiabatic metric family
//! `g_h = g_F + h^{-2} g_H` for two explicit model families:
//!
//! * linear foliations on the flat 2-torus, with slope either exactly
//!   rational or declared irrational, and
//! * invariant flows on Riemannian Heisenberg manifolds with a
//!   left-invariant normal-form metric.
//!
//! On top of the closed-form spectra the crate provides certified
//! eigenvalue counting, heat-trace summation with proven tail bounds,
//! semiclassical Weyl coefficients, and classification of
//! small-eigenvalue branches `λ(h) = Θ(h^{2k})`.

pub mod asymptotics;
pub mod error;
pub mod heat;
pub mod heisenberg;
pub mod quad;
pub mod slope;
pub mod spectrum;
pub mod step;
pub mod torus;

pub use error::{Error, Result};
pub use slope::SlopeParam;
pub use spectrum::{CountMode, EigenvalueEntry, SpectrumSlice};
pub use step::StepFunction;

/// Formats a float with 17 significant digits, stable across runs.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}
