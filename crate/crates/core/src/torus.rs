//! Exact spectra and counting functions for the linear foliation on
//! the flat 2-torus, plus the leafwise spectrum distribution function
//! for both slope classes.

use crate::asymptotics::{BranchSamples, Sdf};
use crate::error::{Error, Result};
use crate::slope::SlopeParam;
use crate::spectrum::{CountMode, SpectrumSlice};
use crate::step::StepFunction;
use rayon::prelude::*;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// The linear foliation of slope α on T² with adiabatic parameter h.
#[derive(Debug, Clone, Copy)]
pub struct TorusModel {
    pub slope: SlopeParam,
    pub h: f64,
}

impl TorusModel {
    pub fn new(slope: SlopeParam, h: f64) -> Result<Self> {
        slope.validate()?;
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::precondition("adiabatic parameter h must be > 0"));
        }
        Ok(TorusModel { slope, h })
    }

    /// Eigenvalue of Δ_h at the lattice mode (k, l):
    /// `(2π)² [(k+αl)² + h²(−αk+l)²] / (1+α²)`.
    pub fn eigenvalue(&self, k: i64, l: i64) -> f64 {
        let a = self.slope.value();
        let (k, l) = (k as f64, l as f64);
        let u = k + a * l;
        let v = -a * k + l;
        TWO_PI * TWO_PI * (u * u + self.h * self.h * v * v) / (1.0 + a * a)
    }

    /// Index radius certifying completeness below `cutoff`: rotating
    /// (k,l) to orthonormal coordinates u, v gives `u² + h²v² ≤
    /// Λ/(2π)²`, hence `k² + l² = u² + v² ≤ (Λ/(2π)²)(1 + h⁻²)`.
    fn index_radius(&self, cutoff: f64) -> i64 {
        let r2 = cutoff / (TWO_PI * TWO_PI) * (1.0 + 1.0 / (self.h * self.h));
        r2.sqrt().floor() as i64 + 1
    }

    /// Complete spectrum slice for the Laplacian on `degree`-forms.
    ///
    /// Degrees 0 and 2 coincide (Hodge star). The one-form Laplacian
    /// on a flat 2-torus splits into two scalar copies, so degree 1 is
    /// the degree-0 slice with every multiplicity doubled; in
    /// particular the zero eigenvalue has multiplicity 2 = b₁(T²).
    pub fn spectrum(&self, degree: u8, cutoff: f64) -> Result<SpectrumSlice> {
        if !(cutoff > 0.0) {
            return Err(Error::precondition("cutoff must be > 0"));
        }
        match degree {
            0 | 2 => self.scalar_spectrum(cutoff),
            1 => {
                let s = self.scalar_spectrum(cutoff)?.scale_multiplicities(2)?;
                Ok(s)
            }
            _ => Err(Error::precondition(format!(
                "torus form degree must be 0, 1 or 2 (got {degree})"
            ))),
        }
    }

    fn scalar_spectrum(&self, cutoff: f64) -> Result<SpectrumSlice> {
        let n = self.index_radius(cutoff);
        let mut values = Vec::new();
        for k in -n..=n {
            for l in -n..=n {
                let lam = self.eigenvalue(k, l);
                if lam <= cutoff {
                    values.push((lam, 1));
                }
            }
        }
        SpectrumSlice::from_values(
            cutoff,
            true,
            format!("torus scalar: |k|,|l| <= {n} from k^2+l^2 <= (Lambda/(2pi)^2)(1+h^-2)"),
            values,
        )
    }

    /// Streaming lattice count of eigenvalues `< λ` (Open) or `≤ λ`
    /// (Closed), never materializing a slice. Iterates l over its
    /// certified range and solves the quadratic in k per l; the
    /// candidate k-window is widened by one index on each side and
    /// every candidate is re-checked against the exact eigenvalue
    /// formula, so the count agrees with the slice path bit-for-bit.
    pub fn count_exact(&self, lambda: f64, degree: u8, mode: CountMode) -> Result<u64> {
        let factor: u64 = match degree {
            0 | 2 => 1,
            1 => 2,
            _ => {
                return Err(Error::precondition(format!(
                    "torus form degree must be 0, 1 or 2 (got {degree})"
                )))
            }
        };
        if lambda < 0.0 || (lambda == 0.0 && mode == CountMode::Open) {
            return Ok(0);
        }
        if lambda == 0.0 {
            return Ok(factor); // only (0,0)
        }
        let a = self.slope.value();
        let h = self.h;
        let n = self.index_radius(lambda);
        // (k+al)^2 + h^2(l-ak)^2 <= lq, expanded in k:
        let big_a = 1.0 + h * h * a * a;
        let lq = lambda * (1.0 + a * a) / (TWO_PI * TWO_PI);
        let per_l = |l: i64| -> u64 {
            let lf = l as f64;
            let big_b = 2.0 * a * lf * (1.0 - h * h);
            let big_c = lf * lf * (a * a + h * h);
            let disc = big_b * big_b - 4.0 * big_a * (big_c - lq);
            let (klo, khi) = if disc >= 0.0 {
                let s = disc.sqrt();
                (
                    ((-big_b - s) / (2.0 * big_a)).floor() as i64 - 1,
                    ((-big_b + s) / (2.0 * big_a)).ceil() as i64 + 1,
                )
            } else {
                // near-tangent window around the vertex
                let k0 = (-big_b / (2.0 * big_a)).round() as i64;
                (k0 - 2, k0 + 2)
            };
            let mut c = 0u64;
            for k in klo..=khi {
                let lam = self.eigenvalue(k, l);
                let keep = match mode {
                    CountMode::Closed => lam <= lambda,
                    CountMode::Open => lam < lambda,
                };
                if keep {
                    c += 1;
                }
            }
            c
        };
        let count: u64 = (-n..=n).into_par_iter().map(per_l).sum();
        Ok(count * factor)
    }
}

/// The h⁻¹ coefficient of the eigenvalue-counting asymptotics
/// `N_h(λ) = C(λ)·h⁻¹ + o(h⁻¹)`.
///
/// Irrational slope: `λ/(4π)`. Rational slope p/q:
/// `Σ_{|k| < √λ√(p²+q²)/(2π)} (λ − 4π²k²/(p²+q²))^{1/2} / (π√(p²+q²))`.
pub fn predicted_coefficient(slope: SlopeParam, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::precondition("lambda must be > 0"));
    }
    match slope {
        SlopeParam::Irrational(_) => Ok(lambda / (4.0 * PI)),
        SlopeParam::Rational(p, q) => {
            let s = (p * p + q * q) as f64;
            let bound = lambda.sqrt() * s.sqrt() / TWO_PI;
            let term = |k: f64| -> f64 {
                let rest = lambda - TWO_PI * TWO_PI * k * k / s;
                if rest > 0.0 {
                    rest.sqrt() / (PI * s.sqrt())
                } else {
                    0.0
                }
            };
            let mut sum = term(0.0);
            let kmax = bound.floor() as i64 + 1;
            for k in 1..=kmax {
                sum += 2.0 * term(k as f64);
            }
            Ok(sum)
        }
    }
}

/// Leading-term prediction for the count itself: coefficient / h.
pub fn predicted_count(slope: SlopeParam, lambda: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::precondition("h must be > 0"));
    }
    Ok(predicted_coefficient(slope, lambda)? / h)
}

/// Leafwise spectrum distribution function N_F.
///
/// Irrational slope: the continuous form `N_F(λ) = (1/π)√λ` with
/// density `1/(2π√τ)`. Rational slope p/q: a pure-point function with
/// jumps at `4π²k²/(p²+q²)`, of size `1/√(p²+q²)` at k=0 and
/// `2/√(p²+q²)` for each |k| ≥ 1; jumps are generated up to
/// `jump_bound`.
pub fn leafwise_sdf(slope: SlopeParam, jump_bound: f64) -> Result<Sdf> {
    slope.validate()?;
    match slope {
        SlopeParam::Irrational(_) => Ok(Sdf::Continuous {
            value: Box::new(|lam: f64| if lam > 0.0 { lam.sqrt() / PI } else { 0.0 }),
            density: Box::new(|tau: f64| {
                if tau > 0.0 {
                    1.0 / (TWO_PI * tau.sqrt())
                } else {
                    0.0
                }
            }),
        }),
        SlopeParam::Rational(p, q) => {
            if !(jump_bound >= 0.0) {
                return Err(Error::precondition("jump bound must be >= 0"));
            }
            let s = (p * p + q * q) as f64;
            let size0 = 1.0 / s.sqrt();
            let mut jumps = vec![(0.0, size0)];
            let mut k = 1i64;
            loop {
                let loc = TWO_PI * TWO_PI * (k * k) as f64 / s;
                if loc > jump_bound {
                    break;
                }
                jumps.push((loc, 2.0 * size0));
                k += 1;
            }
            Ok(Sdf::Step(StepFunction::new(jumps)?))
        }
    }
}

/// Mode-tracked eigenvalue branches λ_{kl}(h) sampled over `h_grid`.
///
/// Each branch follows a fixed lattice mode (k, l) across the grid,
/// i.e. the continuous-in-h eigenvalue curves. Branches are ordered
/// by their adiabatic limit `(2π)²(k+αl)²/(1+α²)` over a symmetric
/// index box just large enough to supply `count` curves; degree 1
/// doubles every curve. This tracking is the right pairing for
/// irrational slopes, where index-sorted pairing across h follows
/// ever-better rational approximants instead of a single curve.
pub fn eigenvalue_curves(
    slope: SlopeParam,
    h_grid: &[f64],
    degree: u8,
    count: usize,
) -> Result<Vec<BranchSamples>> {
    if h_grid.is_empty() {
        return Err(Error::precondition("h grid must be nonempty"));
    }
    let dup: usize = match degree {
        0 | 2 => 1,
        1 => 2,
        _ => {
            return Err(Error::precondition(format!(
                "torus form degree must be 0, 1 or 2 (got {degree})"
            )))
        }
    };
    let scalar_needed = count.div_ceil(dup);
    let a = slope.value();
    let mut n = 1i64;
    while ((2 * n + 1) * (2 * n + 1)) < scalar_needed as i64 {
        n += 1;
    }
    let mut modes: Vec<(f64, i64, i64)> = Vec::new();
    for k in -n..=n {
        for l in -n..=n {
            let u = k as f64 + a * l as f64;
            let limit = TWO_PI * TWO_PI * u * u / (1.0 + a * a);
            modes.push((limit, k, l));
        }
    }
    modes.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then((x.1.abs() + x.2.abs()).cmp(&(y.1.abs() + y.2.abs())))
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    let mut curves = Vec::with_capacity(count);
    'outer: for &(_, k, l) in &modes {
        for _ in 0..dup {
            if curves.len() == count {
                break 'outer;
            }
            let values: Vec<f64> = h_grid
                .iter()
                .map(|&h| TorusModel { slope, h }.eigenvalue(k, l))
                .collect();
            curves.push(BranchSamples::new(h_grid.to_vec(), values)?);
        }
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn irr_sqrt2() -> SlopeParam {
        SlopeParam::irrational(std::f64::consts::SQRT_2).unwrap()
    }

    #[test]
    fn eigenvalue_exact_substitutions() {
        let m = TorusModel::new(SlopeParam::rational(0, 1).unwrap(), 0.3).unwrap();
        assert_eq!(m.eigenvalue(0, 0), 0.0);
        let m = TorusModel::new(SlopeParam::rational(0, 1).unwrap(), 1.0).unwrap();
        assert!((m.eigenvalue(1, 0) - 4.0 * PI * PI).abs() < 1e-12);
        let m = TorusModel::new(SlopeParam::rational(1, 1).unwrap(), 0.5).unwrap();
        assert!((m.eigenvalue(1, -1) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn product_metric_spectrum_entries() {
        // alpha = 0, h = 1: round 2-torus, lambda = 4pi^2(k^2+l^2)
        let m = TorusModel::new(SlopeParam::rational(0, 1).unwrap(), 1.0).unwrap();
        let s = m.spectrum(0, 350.0).unwrap();
        let e = s.entries();
        assert_eq!(e[0].value, 0.0);
        assert_eq!(e[0].multiplicity, 1);
        assert!((e[1].value - 4.0 * PI * PI).abs() < 1e-9);
        assert_eq!(e[1].multiplicity, 4);
        assert!((e[2].value - 8.0 * PI * PI).abs() < 1e-9);
        assert_eq!(e[2].multiplicity, 4);
    }

    #[test]
    fn degree_two_equals_degree_zero() {
        let m = TorusModel::new(irr_sqrt2(), 0.2).unwrap();
        let s0 = m.spectrum(0, 200.0).unwrap();
        let s2 = m.spectrum(2, 200.0).unwrap();
        assert_eq!(s0.entries(), s2.entries());
    }

    #[test]
    fn degree_one_zero_multiplicity_two() {
        let m = TorusModel::new(irr_sqrt2(), 0.5).unwrap();
        let s = m.spectrum(1, 1e-6).unwrap();
        assert_eq!(s.entries().len(), 1);
        assert_eq!(s.entries()[0].value, 0.0);
        assert_eq!(s.entries()[0].multiplicity, 2);
    }

    #[test]
    fn count_small_h_vertical_modes() {
        // alpha=0, h=0.01, lambda=1: modes (0,l), 4pi^2 h^2 l^2 < 1 -> |l| <= 15
        let m = TorusModel::new(SlopeParam::rational(0, 1).unwrap(), 0.01).unwrap();
        assert_eq!(m.count_exact(1.0, 0, CountMode::Open).unwrap(), 31);
    }

    #[test]
    fn count_edge_cases() {
        let m = TorusModel::new(irr_sqrt2(), 0.3).unwrap();
        assert_eq!(m.count_exact(-1.0, 0, CountMode::Open).unwrap(), 0);
        assert_eq!(m.count_exact(-1.0, 0, CountMode::Closed).unwrap(), 0);
        assert_eq!(m.count_exact(0.0, 0, CountMode::Closed).unwrap(), 1);
        assert_eq!(m.count_exact(0.0, 1, CountMode::Closed).unwrap(), 2);
        assert_eq!(m.count_exact(0.0, 0, CountMode::Open).unwrap(), 0);
    }

    #[test]
    fn streaming_matches_slice_counts() {
        let cutoff = 120.0;
        for slope in [
            irr_sqrt2(),
            SlopeParam::rational(1, 2).unwrap(),
            SlopeParam::rational(0, 1).unwrap(),
        ] {
            let m = TorusModel::new(slope, 0.35).unwrap();
            let s = m.spectrum(0, cutoff).unwrap();
            for i in 0..100 {
                let lam = cutoff * (i as f64 + 0.5) / 100.0;
                for mode in [CountMode::Open, CountMode::Closed] {
                    assert_eq!(
                        m.count_exact(lam, 0, mode).unwrap(),
                        s.count_below(lam, mode).unwrap(),
                        "slope {slope:?} lambda {lam}"
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_bound_sound_against_larger_box() {
        let cutoff = 60.0;
        for slope in [irr_sqrt2(), SlopeParam::rational(1, 2).unwrap()] {
            let m = TorusModel::new(slope, 0.4).unwrap();
            let s = m.spectrum(0, cutoff).unwrap();
            let n = m.index_radius(cutoff) * 2;
            let mut brute = 0u64;
            for k in -n..=n {
                for l in -n..=n {
                    if m.eigenvalue(k, l) <= cutoff {
                        brute += 1;
                    }
                }
            }
            assert_eq!(brute, s.total_multiplicity());
        }
    }

    #[test]
    fn predicted_coefficient_examples() {
        let c = predicted_coefficient(irr_sqrt2(), 10.0).unwrap();
        assert!((c - 10.0 / (4.0 * PI)).abs() < 1e-14);
        // alpha = 0: only k=0 survives at lambda=1 since 4pi^2 > 1
        let c = predicted_coefficient(SlopeParam::rational(0, 1).unwrap(), 1.0).unwrap();
        assert!((c - 1.0 / PI).abs() < 1e-14);
        let c = predicted_coefficient(SlopeParam::rational(1, 1).unwrap(), 1.0).unwrap();
        assert!((c - 1.0 / (PI * 2.0f64.sqrt())).abs() < 1e-14);
        assert!(
            (predicted_count(SlopeParam::rational(0, 1).unwrap(), 1.0, 0.01).unwrap() - 100.0 / PI)
                .abs()
                < 1e-10
        );
    }

    #[test]
    fn leafwise_sdf_shapes() {
        match leafwise_sdf(irr_sqrt2(), 0.0).unwrap() {
            Sdf::Continuous { value, .. } => {
                assert!((value(PI * PI) - 1.0).abs() < 1e-14);
                assert_eq!(value(-1.0), 0.0);
            }
            _ => panic!("expected continuous SDF"),
        }
        match leafwise_sdf(SlopeParam::rational(0, 1).unwrap(), 50.0).unwrap() {
            Sdf::Step(f) => {
                let j = f.jumps();
                assert_eq!(j.len(), 2);
                assert_eq!(j[0], (0.0, 1.0));
                assert!((j[1].0 - 4.0 * PI * PI).abs() < 1e-12);
                assert_eq!(j[1].1, 2.0);
            }
            _ => panic!("expected step SDF"),
        }
    }

    #[test]
    fn nonzero_modes_positive_for_irrational() {
        let m = TorusModel::new(irr_sqrt2(), 0.1).unwrap();
        for k in -6..=6i64 {
            for l in -6..=6i64 {
                if (k, l) != (0, 0) {
                    assert!(m.eigenvalue(k, l) > 0.0);
                }
            }
        }
    }

    #[test]
    fn curves_follow_fixed_modes() {
        let grid = [0.1, 0.05, 0.02, 0.01];
        let curves = eigenvalue_curves(irr_sqrt2(), &grid, 0, 5).unwrap();
        assert_eq!(curves.len(), 5);
        // first curve is the constant zero mode
        assert!(curves[0].values().iter().all(|&v| v == 0.0));
        // all other curves converge to a positive limit
        for c in &curves[1..] {
            assert!(c.values().iter().all(|&v| v > 0.1));
        }
    }
}
