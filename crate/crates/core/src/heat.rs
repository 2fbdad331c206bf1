//! Heat-trace summation with certified truncation bounds, and the
//! adiabatic limit integral for the Heisenberg flow.

use crate::error::{Error, Result};
use crate::heisenberg::HeisenbergAdiabaticModel;
use crate::quad::adaptive_simpson;
use crate::spectrum::SpectrumSlice;
use crate::torus::TorusModel;
use std::f64::consts::PI;

/// A computed heat trace together with a certified bound on the
/// omitted spectral tail.
#[derive(Debug, Clone, Copy)]
pub struct HeatTraceResult {
    pub t: f64,
    pub h: f64,
    pub value: f64,
    pub truncation_bound: f64,
}

type SliceGen = Box<dyn Fn(f64) -> Result<SpectrumSlice> + Send + Sync>;
type CountBound = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A complete-slice generator plus a proven upper bound on its
/// counting function, from which heat-trace tail bounds are derived.
pub struct SpectrumSource {
    label: String,
    h: f64,
    generate: SliceGen,
    /// Certified bound on N(λ): the index-box size of the enumeration
    /// certificate, multiplicities included. Sound for every λ ≥ 0.
    count_bound: CountBound,
}

impl SpectrumSource {
    pub fn from_parts(
        label: impl Into<String>,
        h: f64,
        generate: SliceGen,
        count_bound: CountBound,
    ) -> Self {
        SpectrumSource {
            label: label.into(),
            h,
            generate,
            count_bound,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn torus(model: TorusModel, degree: u8) -> Result<Self> {
        model.spectrum(degree, 1.0)?; // validate degree early
        let h = model.h;
        let mult = if degree == 1 { 2.0 } else { 1.0 };
        let hinv2 = 1.0 + 1.0 / (h * h);
        let count_bound = move |lam: f64| {
            let n = (lam.max(0.0) * hinv2 / (4.0 * PI * PI)).sqrt().floor() + 1.0;
            mult * (2.0 * n + 1.0) * (2.0 * n + 1.0)
        };
        Ok(SpectrumSource {
            label: format!("torus degree {degree} h={h}"),
            h,
            generate: Box::new(move |cutoff| model.spectrum(degree, cutoff)),
            count_bound: Box::new(count_bound),
        })
    }

    pub fn heisenberg(model: HeisenbergAdiabaticModel, degree: u8) -> Result<Self> {
        model.form_spectrum(degree, 1.0)?;
        let h = model.h;
        let metric = model.metric();
        let count_bound: CountBound = match degree {
            0 | 3 => Box::new(move |lam: f64| heis_function_count_bound(&metric, lam)),
            _ => Box::new(move |lam: f64| heis_one_form_count_bound(&metric, lam)),
        };
        Ok(SpectrumSource {
            label: format!("heisenberg degree {degree} h={h} alpha={}", model.alpha),
            h,
            generate: Box::new(move |cutoff| model.form_spectrum(degree, cutoff)),
            count_bound,
        })
    }
}

fn heis_function_count_bound(m: &crate::heisenberg::HeisenbergMetric, lam: f64) -> f64 {
    let lam = lam.max(0.0);
    let det2 = m.det2();
    let tr = m.h11 + m.h22;
    let disc = ((m.h11 - m.h22).powi(2) + 4.0 * m.h12 * m.h12).sqrt();
    let sigma_min = 0.5 * (tr - disc);
    let n = (lam * det2 / (4.0 * PI * PI * sigma_min)).sqrt().floor() + 1.0;
    let s1 = (2.0 * n + 1.0) * (2.0 * n + 1.0);
    // Sigma2: sum over c of 2c * (#k), #k <= lam sqrt(det2)/(4 pi c) + 1
    let cmax = (lam * m.g33).sqrt() / (2.0 * PI) + 1.0;
    let s2 = cmax * (lam * det2.sqrt() / (2.0 * PI) + 2.0 * (cmax + 1.0));
    s1 + s2
}

fn heis_one_form_count_bound(m: &crate::heisenberg::HeisenbergMetric, lam: f64) -> f64 {
    let lam = lam.max(0.0);
    let g = m.g33 / (m.h11 * m.h22);
    let r = (m.h11 * m.h22).sqrt();
    let q_root = (g.sqrt() + (g + 4.0 * lam).sqrt()) / (4.0 * PI);
    let qmax = q_root * q_root;
    let amax = (qmax * m.h11).sqrt().floor() + 1.0;
    let bmax = (qmax * m.h22).sqrt().floor() + 1.0;
    let s1 = 4.0 * (2.0 * amax + 1.0) * (2.0 * bmax + 1.0);
    let cmax2 = (lam * m.g33).sqrt() / (2.0 * PI) + 1.0;
    let s2 = cmax2 * (lam * r / (2.0 * PI) + 2.0 * (cmax2 + 1.0));
    // Sigma3: k_max(c) <= (w/2v + sqrt(slack/v))^2 * margins, summed
    let cmax3 = ((lam + 0.25 * g) * m.g33).sqrt() / (2.0 * PI) + 1.0;
    let mut s3 = 0.0;
    let mut c = 1.0;
    while c <= cmax3 {
        let v = 4.0 * PI * c / r;
        let w = 2.0 * (PI * c * m.g33 / (r * r * r)).sqrt();
        let slack = (lam + 0.25 * g).max(0.0);
        let s_root = (w + (w * w + 4.0 * v * slack).sqrt()) / (2.0 * v);
        s3 += 4.0 * c * (s_root * s_root + 2.0);
        c += 1.0;
    }
    s1 + s2 + s3
}

/// `tr e^{−tΔ}` over the certified spectrum of `source`, truncated at
/// an adaptively grown cutoff Λ* whose omitted tail is provably below
/// `eps`.
///
/// The tail is controlled by fitting the source's certified counting
/// bound under a polynomial envelope `C(1+λ)²`, then
/// `tail ≤ t·C·∫_{Λ*}^∞ (1+λ)² e^{−tλ} dλ`, evaluated in closed form.
/// The envelope constant carries a conservative factor of 4.
pub fn heat_trace(source: &SpectrumSource, t: f64, eps: f64) -> Result<HeatTraceResult> {
    if !(t > 0.0) || !(eps > 0.0) {
        return Err(Error::precondition("heat trace requires t > 0 and eps > 0"));
    }
    let mut cutoff = (1.0f64).max(2.0 / t);
    let mut bound = tail_bound(source, cutoff, t);
    let mut iterations = 0;
    while bound > eps {
        cutoff *= 2.0;
        bound = tail_bound(source, cutoff, t);
        iterations += 1;
        if iterations > 100 {
            return Err(Error::precondition(
                "heat-trace tail bound did not reach eps within cutoff budget",
            ));
        }
    }
    let slice = (source.generate)(cutoff)?;
    if !slice.is_complete() {
        return Err(Error::precondition("heat trace requires a complete slice"));
    }
    // fixed descending-value order: accumulate smallest terms first
    let mut value = 0.0f64;
    for e in slice.entries().iter().rev() {
        value += e.multiplicity as f64 * (-t * e.value).exp();
    }
    Ok(HeatTraceResult {
        t,
        h: source.h,
        value,
        truncation_bound: bound,
    })
}

/// Certified bound on `Σ_{λ > Λ} mult·e^{−tλ}`.
///
/// Writing the tail as a Stieltjes integral against N and integrating
/// by parts: `tail ≤ t ∫_Λ^∞ N(λ) e^{−tλ} dλ ≤ t C ∫_Λ^∞ (1+λ)² e^{−tλ} dλ
/// = C e^{−tΛ} [(1+Λ)² + 2(1+Λ)/t + 2/t²]`.
fn tail_bound(source: &SpectrumSource, cutoff: f64, t: f64) -> f64 {
    let c = envelope_constant(source, cutoff, t);
    let u = 1.0 + cutoff;
    c * (-t * cutoff).exp() * (u * u + 2.0 * u / t + 2.0 / (t * t))
}

/// Envelope constant C with `N(λ) ≤ C(1+λ)²` for all λ ≥ cutoff:
/// the certified count bound is O(λ^{3/2}) for both models, so the
/// ratio to (1+λ)² is eventually decreasing; it is maximized over a
/// dense log grid covering the region where e^{−tλ} is not yet
/// negligible, with a factor-4 safety margin.
fn envelope_constant(source: &SpectrumSource, cutoff: f64, t: f64) -> f64 {
    let hi = cutoff + 400.0 / t + 100.0;
    let n = 400;
    let mut worst = 0.0f64;
    for i in 0..=n {
        let lam = cutoff * (hi / cutoff).powf(i as f64 / n as f64);
        let ratio = (source.count_bound)(lam) / ((1.0 + lam) * (1.0 + lam));
        worst = worst.max(ratio);
    }
    4.0 * worst
}

/// The limit integral `I(t) = ∫_{−∞}^{∞} η/sinh(tη) · e^{−tη²} dη`.
///
/// The integrand is even and positive with a removable singularity at
/// η = 0 (limit 1/t); it is integrated on [0, η*] and doubled, with
/// the truncation point chosen so the analytic tail bound
/// `4 e^{−tη*} e^{−tη*²} (η*/t + 1/t²)` is below tol/10. Two runs at
/// tol and tol/10 must agree within tol (self-check).
pub fn limit_integral(t: f64, tol: f64) -> Result<f64> {
    limit_integral_with_panels(t, tol, 8)
}

/// Same as [`limit_integral`] with an explicit initial panel count
/// (exposed so tests can check invariance under panel halving).
pub fn limit_integral_with_panels(t: f64, tol: f64, panels: usize) -> Result<f64> {
    if !(t > 0.0) || !(tol > 0.0) {
        return Err(Error::precondition(
            "limit integral requires t > 0 and tol > 0",
        ));
    }
    let coarse = limit_integral_once(t, tol, panels);
    let fine = limit_integral_once(t, tol / 10.0, panels);
    if (coarse - fine).abs() > tol * fine.abs().max(1.0) {
        return Err(Error::QuadratureDisagreement { coarse, fine, tol });
    }
    Ok(fine)
}

fn limit_integrand(t: f64, eta: f64) -> f64 {
    let x = t * eta;
    let gauss = -t * eta * eta;
    if x.abs() < 1e-4 {
        // eta/sinh(t eta) = 1/(t sinhc(t eta)); series for small x
        let x2 = x * x;
        let sinhc = 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
        gauss.exp() / (t * sinhc)
    } else if x > 700.0 {
        // log-space bound form: eta/sinh(x) <= 2 eta e^{-x}
        ((2.0 * eta).ln() - x + gauss).exp()
    } else {
        eta / x.sinh() * gauss.exp()
    }
}

fn limit_integral_once(t: f64, tol: f64, panels: usize) -> f64 {
    // truncation: for eta >= eta*, eta/sinh(t eta) <= 2 eta e^{-t eta}
    // and the remaining Gaussian mass is below (eta/t + 1/t^2) e^{-t eta^2 - t eta}
    let mut eta_star = (5.0f64).max(2.0 / t);
    loop {
        let tail =
            4.0 * (eta_star / t + 1.0 / (t * t)) * (-t * eta_star - t * eta_star * eta_star).exp();
        if tail <= tol / 10.0 {
            break;
        }
        eta_star *= 1.5;
    }
    2.0 * adaptive_simpson(
        &|eta| limit_integrand(t, eta),
        0.0,
        eta_star,
        tol / 4.0,
        panels,
    )
}

/// The h⁻² heat-trace coefficient of a non-singular isometric
/// Riemannian flow: `1/(4√(πt³))`.
pub fn riemannian_reference(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::precondition("t must be > 0"));
    }
    Ok(1.0 / (4.0 * (PI * t * t * t).sqrt()))
}

/// Diagnostic ratio `4π·h²·tr e^{−tΔ_h} / I(t)` for the Heisenberg
/// degree-0 adiabatic spectrum; the limit theorem predicts → 1.
pub fn trace_ratio(model: HeisenbergAdiabaticModel, t: f64, eps: f64) -> Result<f64> {
    let source = SpectrumSource::heisenberg(model, 0)?;
    let tr = heat_trace(&source, t, eps)?;
    let i = limit_integral(t, eps.min(1e-10))?;
    Ok(4.0 * PI * model.h * model.h * tr.value / i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slope::SlopeParam;

    /// Pinned by an independent two-tolerance quadrature oracle
    /// (tol = 1e-12 vs 1e-13) before the implementation was written.
    const I_OF_ONE: f64 = 1.6454937565285077;

    #[test]
    fn limit_integrand_at_zero_is_one_over_t() {
        for t in [0.5, 1.0, 2.0] {
            assert_eq!(limit_integrand(t, 0.0), 1.0 / t);
        }
    }

    #[test]
    fn limit_integral_pinned_value() {
        let v = limit_integral(1.0, 1e-10).unwrap();
        assert!((v - I_OF_ONE).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn limit_integral_positive() {
        for t in [0.5, 1.0, 2.0] {
            assert!(limit_integral(t, 1e-8).unwrap() > 0.0);
        }
    }

    #[test]
    fn limit_integral_panel_invariance() {
        let a = limit_integral_with_panels(0.7, 1e-10, 8).unwrap();
        let b = limit_integral_with_panels(0.7, 1e-10, 16).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn riemannian_reference_values() {
        let v = riemannian_reference(1.0).unwrap();
        assert!((v - 1.0 / (4.0 * PI.sqrt())).abs() < 1e-15);
        let v4 = riemannian_reference(4.0).unwrap();
        assert!((v4 - 1.0 / (32.0 * PI.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn riemannian_reference_gaussian_identity() {
        // (1/4pi) * (1/t) * int e^{-t eta^2} d eta = 1/(4 sqrt(pi t^3))
        let t = 1.3;
        let gauss = adaptive_simpson(&|x: f64| (-t * x * x).exp(), -40.0, 40.0, 1e-12, 32);
        let lhs = gauss / (4.0 * PI * t);
        assert!((lhs - riemannian_reference(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn single_zero_mode_trace_is_one() {
        let src = SpectrumSource::from_parts(
            "unit",
            1.0,
            Box::new(|cutoff| {
                SpectrumSlice::from_values(cutoff, true, "single zero mode", vec![(0.0, 1)])
            }),
            Box::new(|_| 1.0),
        );
        for t in [0.1, 1.0, 10.0] {
            let r = heat_trace(&src, t, 1e-12).unwrap();
            assert!((r.value - 1.0).abs() <= r.truncation_bound + 1e-15);
        }
    }

    #[test]
    fn torus_large_t_spectral_gap() {
        let m = TorusModel::new(SlopeParam::rational(0, 1).unwrap(), 1.0).unwrap();
        let src = SpectrumSource::torus(m, 0).unwrap();
        let r = heat_trace(&src, 50.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() <= r.truncation_bound + 1e-12);
    }

    #[test]
    fn heisenberg_trace_matches_direct_box_sum() {
        let model = HeisenbergAdiabaticModel::new(0.1, 0.0).unwrap();
        let src = SpectrumSource::heisenberg(model, 0).unwrap();
        let eps = 1e-9;
        let r = heat_trace(&src, 1.0, eps).unwrap();
        // independent summation over a fixed large box
        let m = model.metric();
        let mut direct = 0.0f64;
        let n = 60i64;
        for a in -n..=n {
            for b in -n..=n {
                direct += (-m.sigma1_function(a, b)).exp();
            }
        }
        for c in 1..=40i64 {
            for k in 0..=400i64 {
                direct += 2.0 * c as f64 * (-m.sigma2(c, k)).exp();
            }
        }
        assert!(
            (r.value - direct).abs() <= 2.0 * eps,
            "{} vs {direct}",
            r.value
        );
    }

    #[test]
    fn trace_monotone_in_t() {
        let m = TorusModel::new(
            SlopeParam::irrational(std::f64::consts::SQRT_2).unwrap(),
            0.5,
        )
        .unwrap();
        let src = SpectrumSource::torus(m, 0).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.2, 0.4, 0.8, 1.6, 3.2] {
            let v = heat_trace(&src, t, 1e-10).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn tail_bound_honest_under_cutoff_doubling() {
        let m = TorusModel::new(SlopeParam::rational(1, 2).unwrap(), 0.4).unwrap();
        let src = SpectrumSource::torus(m, 0).unwrap();
        let t = 0.5;
        let r = heat_trace(&src, t, 1e-6).unwrap();
        // recompute with a much stricter eps; difference must be
        // inside the originally reported bound
        let r2 = heat_trace(&src, t, 1e-13).unwrap();
        assert!((r.value - r2.value).abs() < r.truncation_bound);
    }

    #[test]
    fn synthetic_riemannian_surrogate_closes_loop() {
        // surrogate trace h^{-2}/(4 sqrt(pi t^3)); its h^2-scaled value
        // against riemannian_reference is exactly 1
        let h: f64 = 0.05;
        let t = 0.8;
        let surrogate = 1.0 / (h * h) * riemannian_reference(t).unwrap();
        let ratio = h * h * surrogate / riemannian_reference(t).unwrap();
        assert_eq!(ratio, 1.0);
    }
}
