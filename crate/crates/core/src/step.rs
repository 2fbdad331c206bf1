//! Pure-point distribution functions (leafwise spectrum counting).

use crate::error::{Error, Result};

/// A right-continuous, nondecreasing step function given by its jump
/// locations and sizes; `value(τ)` sums the sizes with location `≤ τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    jumps: Vec<(f64, f64)>,
}

impl StepFunction {
    pub fn new(jumps: Vec<(f64, f64)>) -> Result<Self> {
        for w in jumps.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::precondition(
                    "jump locations must be strictly increasing",
                ));
            }
        }
        for &(loc, size) in &jumps {
            if !loc.is_finite() || !(size > 0.0) {
                return Err(Error::precondition(
                    "jump sizes must be positive and finite",
                ));
            }
        }
        Ok(StepFunction { jumps })
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.jumps
            .iter()
            .take_while(|&&(loc, _)| loc <= tau)
            .map(|&(_, size)| size)
            .sum()
    }

    /// `∫_{-∞}^{λ} (λ − τ)^e dN(τ)` for a pure-point `N`: the sum of
    /// `size · (λ − loc)^e` over jumps with `loc ≤ λ`.
    pub fn stieltjes_moment(&self, lambda: f64, exponent: f64) -> Result<f64> {
        if !(exponent >= 0.0) {
            return Err(Error::precondition("moment exponent must be >= 0"));
        }
        Ok(self
            .jumps
            .iter()
            .take_while(|&&(loc, _)| loc <= lambda)
            .map(|&(loc, size)| size * (lambda - loc).powf(exponent))
            .sum())
    }
}
