//! Exact Laplacian spectra on Riemannian Heisenberg manifolds Γ\H
//! with a left-invariant normal-form metric, and the adiabatic
//! specializations used in the limit theorems.

use crate::error::{Error, Result};
use crate::spectrum::SpectrumSlice;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI2: f64 = 4.0 * PI * PI;

/// Left-invariant metric in normal form: upper 2×2 block
/// `[[h11, h12], [h12, h22]]` plus the central entry `g33`.
#[derive(Debug, Clone, Copy)]
pub struct HeisenbergMetric {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    pub g33: f64,
}

impl HeisenbergMetric {
    pub fn new(h11: f64, h12: f64, h22: f64, g33: f64) -> Result<Self> {
        let m = HeisenbergMetric { h11, h12, h22, g33 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h11 > 0.0) || !(self.g33 > 0.0) || !(self.det2() > 0.0) {
            return Err(Error::precondition(
                "metric requires h11 > 0, g33 > 0 and h11*h22 - h12^2 > 0",
            ));
        }
        Ok(())
    }

    /// Determinant of the upper 2×2 block.
    pub fn det2(&self) -> f64 {
        self.h11 * self.h22 - self.h12 * self.h12
    }

    /// Smaller eigenvalue of the upper block (equals that of its
    /// adjugate `[[h22, -h12], [-h12, h11]]`; same trace and
    /// determinant).
    fn sigma_min(&self) -> f64 {
        let tr = self.h11 + self.h22;
        let d = ((self.h11 - self.h22).powi(2) + 4.0 * self.h12 * self.h12).sqrt();
        0.5 * (tr - d)
    }

    /// Σ₁ eigenvalue on functions: `4π²(h22 a² − 2 h12 ab + h11 b²)/det2`.
    pub fn sigma1_function(&self, a: i64, b: i64) -> f64 {
        let (a, b) = (a as f64, b as f64);
        FOUR_PI2 * (self.h22 * a * a - 2.0 * self.h12 * a * b + self.h11 * b * b) / self.det2()
    }

    /// Σ₂ eigenvalue: `4π²c²/g33 + 2πc(2k+1)/√det2`, multiplicity 2c.
    pub fn sigma2(&self, c: i64, k: i64) -> f64 {
        let cf = c as f64;
        FOUR_PI2 * cf * cf / self.g33 + TWO_PI * cf * (2 * k + 1) as f64 / self.det2().sqrt()
    }

    /// Complete function (0-form) spectrum below `cutoff`.
    ///
    /// Σ₁ completeness: `λ(a,b) ≥ 4π² σ_min (a²+b²)/det2`, so the
    /// index disk `a²+b² ≤ Λ det2/(4π² σ_min)` suffices. Σ₂
    /// completeness: both terms are positive, so `c ≤ √(Λ g33)/(2π)`
    /// and per c `(2k+1) ≤ Λ√det2/(2πc)`.
    pub fn function_spectrum(&self, cutoff: f64) -> Result<SpectrumSlice> {
        self.validate()?;
        if !(cutoff > 0.0) {
            return Err(Error::precondition("cutoff must be > 0"));
        }
        let det2 = self.det2();
        let n = (cutoff * det2 / (FOUR_PI2 * self.sigma_min()))
            .sqrt()
            .floor() as i64
            + 1;
        let mut s1 = Vec::new();
        for a in -n..=n {
            for b in -n..=n {
                let lam = self.sigma1_function(a, b);
                if lam <= cutoff {
                    s1.push((lam, 1));
                }
            }
        }
        let s1 = SpectrumSlice::from_values(
            cutoff,
            true,
            format!("heis Sigma1 functions: |a|,|b| <= {n} from lambda >= 4pi^2 sigma_min (a^2+b^2)/det2"),
            s1,
        )?;

        let cmax = (cutoff * self.g33).sqrt() / TWO_PI;
        let cmax = cmax.floor() as i64 + 1;
        let mut s2 = Vec::new();
        for c in 1..=cmax {
            let kbound = cutoff * det2.sqrt() / (TWO_PI * c as f64);
            let kmax = (0.5 * (kbound - 1.0)).floor() as i64 + 1;
            for k in 0..=kmax.max(0) {
                let mu = self.sigma2(c, k);
                if mu <= cutoff {
                    s2.push((mu, 2 * c as u64));
                }
            }
        }
        let s2 = SpectrumSlice::from_values(
            cutoff,
            true,
            format!("heis Sigma2: c <= {cmax} from 4pi^2 c^2/g33 <= Lambda; (2k+1) <= Lambda sqrt(det2)/(2 pi c)"),
            s2,
        )?;
        s1.merge(&s2)
    }

    /// G = g33/(h11 h22), the central curvature scale entering the
    /// one-form families (diagonal metrics only).
    fn one_form_g(&self) -> f64 {
        self.g33 / (self.h11 * self.h22)
    }

    /// Σ₁ one-form pair at lattice mode (a, b), diagonal metric:
    /// with `Q = a²/h11 + b²/h22` and `G = g33/(h11 h22)`,
    /// `λ± = 4π²Q + (G ± √(G² + 16π²GQ))/2`, each of multiplicity 2.
    ///
    /// The radical argument is `G² + 16π²GQ` (Q itself, not 4π²Q):
    /// this is the form that reproduces the adiabatic closed forms
    /// `λ_{h,±}(a,b) = 4π²(a²+h²b²) + (1 ± √(1+16π²(a²+h²b²)))/2`
    /// at diag(1, h⁻², h⁻²), and it keeps λ₋ ≥ 0 (the alternative
    /// with 4π²Q under the root goes negative).
    pub fn sigma1_one_form(&self, a: i64, b: i64) -> (f64, f64) {
        let (af, bf) = (a as f64, b as f64);
        let q = af * af / self.h11 + bf * bf / self.h22;
        let g = self.one_form_g();
        let rad = (g * g + 4.0 * FOUR_PI2 * g * q).sqrt();
        (
            FOUR_PI2 * q + 0.5 * (g - rad),
            FOUR_PI2 * q + 0.5 * (g + rad),
        )
    }

    /// Σ₃ one-form pair at (c ≥ 1, k ≥ 0), diagonal metric, each of
    /// multiplicity 2c. `r = √(h11 h22)`.
    pub fn sigma3(&self, c: i64, k: i64) -> (f64, f64) {
        let r = (self.h11 * self.h22).sqrt();
        let g = self.one_form_g();
        let cf = c as f64;
        let kf = k as f64;
        let base = FOUR_PI2 * cf * cf / self.g33 + TWO_PI * cf * (2.0 * kf + 1.0) / r;
        let x = 4.0 * PI * cf / r + g;
        let y = 16.0 * PI * kf * cf * self.g33 / (r * r * r);
        let rad = (x * x + y).sqrt();
        (base + 0.5 * (g - rad), base + 0.5 * (g + rad))
    }

    /// Complete one-form spectrum below `cutoff`; requires `h12 == 0`
    /// exactly (the closed forms hold for diagonal metrics only).
    ///
    /// Enumeration bounds, recorded in the provenance string:
    /// * Σ₁: `√(G²+16π²GQ) ≤ G + 4π√(GQ)` gives
    ///   `λ₋ ≥ 4π²Q − 2π√(GQ)`, hence `λ₋ ≤ Λ` forces
    ///   `√Q ≤ (√G + √(G + 4Λ))/(4π)`.
    /// * Σ₂: identical to the function-spectrum bound with
    ///   `r = √(h11 h22)` in place of `√det2`.
    /// * Σ₃: `√(x²+y) ≤ x + √y` gives
    ///   `μ₋ ≥ 4π²c²/g33 + 4πck/r − 2√(πckg33/r³)·√...`, i.e.
    ///   `μ₋ ≥ 4π²c²/g33 + v·k − w·√k` with `v = 4πc/r`,
    ///   `w = 2√(πc g33/r³)`; solving the quadratic in √k bounds k.
    pub fn one_form_spectrum(&self, cutoff: f64) -> Result<SpectrumSlice> {
        self.validate()?;
        if self.h12 != 0.0 {
            return Err(Error::precondition(
                "one-form formula requires a diagonal metric (h12 = 0)",
            ));
        }
        if !(cutoff > 0.0) {
            return Err(Error::precondition("cutoff must be > 0"));
        }
        let g = self.one_form_g();
        let r = (self.h11 * self.h22).sqrt();

        // Sigma1
        let q_root = (g.sqrt() + (g + 4.0 * cutoff).sqrt()) / (4.0 * PI);
        let qmax = q_root * q_root;
        let amax = (qmax * self.h11).sqrt().floor() as i64 + 1;
        let bmax = (qmax * self.h22).sqrt().floor() as i64 + 1;
        let mut s1 = Vec::new();
        for a in -amax..=amax {
            for b in -bmax..=bmax {
                let (lo, hi) = self.sigma1_one_form(a, b);
                if lo <= cutoff {
                    s1.push((lo, 2));
                }
                if hi <= cutoff {
                    s1.push((hi, 2));
                }
            }
        }
        let s1 = SpectrumSlice::from_values(
            cutoff,
            true,
            format!(
                "heis Sigma1 one-forms: |a| <= {amax}, |b| <= {bmax} from sqrt(Q) <= (sqrt(G)+sqrt(G+4 Lambda))/(4 pi)"
            ),
            s1,
        )?;

        // Sigma2 (same closed form as functions; det2 = h11*h22 here)
        let cmax2 = (cutoff * self.g33).sqrt() / TWO_PI;
        let cmax2 = cmax2.floor() as i64 + 1;
        let mut s2 = Vec::new();
        for c in 1..=cmax2 {
            let kbound = cutoff * r / (TWO_PI * c as f64);
            let kmax = (0.5 * (kbound - 1.0)).floor() as i64 + 1;
            for k in 0..=kmax.max(0) {
                let mu = self.sigma2(c, k);
                if mu <= cutoff {
                    s2.push((mu, 2 * c as u64));
                }
            }
        }
        let s2 = SpectrumSlice::from_values(
            cutoff,
            true,
            format!("heis Sigma2 one-forms: c <= {cmax2}; (2k+1) <= Lambda r/(2 pi c)"),
            s2,
        )?;

        // Sigma3: mu- >= 4pi^2 c^2/g33 + v k - w sqrt(k)
        let cmax3 = ((cutoff + 0.25 * g) * self.g33).sqrt() / TWO_PI;
        let cmax3 = cmax3.floor() as i64 + 1;
        let mut s3 = Vec::new();
        for c in 1..=cmax3 {
            let cf = c as f64;
            let v = 4.0 * PI * cf / r;
            let w = 2.0 * (PI * cf * self.g33 / (r * r * r)).sqrt();
            let slack = cutoff - FOUR_PI2 * cf * cf / self.g33 + 0.25 * g;
            if slack < 0.0 {
                continue;
            }
            let s_root = (w + (w * w + 4.0 * v * slack).sqrt()) / (2.0 * v);
            let kmax = (s_root * s_root).floor() as i64 + 1;
            for k in 0..=kmax {
                let (lo, hi) = self.sigma3(c, k);
                if lo <= cutoff {
                    s3.push((lo, 2 * c as u64));
                }
                if hi <= cutoff {
                    s3.push((hi, 2 * c as u64));
                }
            }
        }
        let s3 = SpectrumSlice::from_values(
            cutoff,
            true,
            format!(
                "heis Sigma3: c <= {cmax3}, k bounded via sqrt(x^2+y) <= x+sqrt(y): mu- >= 4pi^2c^2/g33 - G/4 + v k - w sqrt(k)"
            ),
            s3,
        )?;

        s1.merge(&s2)?.merge(&s3)
    }
}

/// The adiabatic family on Γ\H for the invariant flow of direction
/// parameter α; the metric degenerates transversally as h → 0.
#[derive(Debug, Clone, Copy)]
pub struct HeisenbergAdiabaticModel {
    pub h: f64,
    pub alpha: f64,
}

impl HeisenbergAdiabaticModel {
    pub fn new(h: f64, alpha: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() || !alpha.is_finite() {
            return Err(Error::precondition("require h > 0 and finite alpha"));
        }
        Ok(HeisenbergAdiabaticModel { h, alpha })
    }

    /// True iff the adiabatic metric is diagonal (α = 0), which is
    /// what the one-form closed forms require.
    pub fn is_diagonal(&self) -> bool {
        self.alpha == 0.0
    }

    /// The adiabatic metric in normal form:
    /// `h11 = (1 + h⁻²α²)/(1+α²)`, `h12 = α(1 − h⁻²)/(1+α²)`,
    /// `h22 = (α² + h⁻²)/(1+α²)`, `g33 = h⁻²`.
    /// Identity: `det2 = h⁻²` for every α.
    pub fn metric(&self) -> HeisenbergMetric {
        let a = self.alpha;
        let hinv2 = 1.0 / (self.h * self.h);
        let d = 1.0 + a * a;
        HeisenbergMetric {
            h11: (1.0 + hinv2 * a * a) / d,
            h12: a * (1.0 - hinv2) / d,
            h22: (a * a + hinv2) / d,
            g33: hinv2,
        }
    }

    /// Complete spectrum of Δ_h on `degree`-forms below `cutoff`.
    /// Degrees 0 and 3 coincide, as do 1 and 2 (Poincaré duality);
    /// degrees 1, 2 are only available for the diagonal case α = 0.
    pub fn form_spectrum(&self, degree: u8, cutoff: f64) -> Result<SpectrumSlice> {
        match degree {
            0 | 3 => self.metric().function_spectrum(cutoff),
            1 | 2 => {
                if !self.is_diagonal() {
                    return Err(Error::precondition(
                        "one/two-form spectra require alpha = 0 (diagonal adiabatic metric)",
                    ));
                }
                self.metric().one_form_spectrum(cutoff)
            }
            _ => Err(Error::precondition(format!(
                "Heisenberg form degree must be 0..=3 (got {degree})"
            ))),
        }
    }
}
