//! Property-based invariants for the multiset algebra, counting
//! functions, Stieltjes moments, and the branch classifier.

use adiabatic_spectra::asymptotics::{
    classify_branch, fit_leading_coefficient, log_grid, BranchSamples, ClassifierConfig,
};
use adiabatic_spectra::torus::TorusModel;
use adiabatic_spectra::{CountMode, SlopeParam, SpectrumSlice, StepFunction};
use proptest::prelude::*;

const CUTOFF: f64 = 100.0;

fn arb_slice() -> impl Strategy<Value = SpectrumSlice> {
    prop::collection::vec((0.0f64..CUTOFF, 1u64..4), 0..12)
        .prop_map(|vals| SpectrumSlice::from_values(CUTOFF, true, "prop", vals).unwrap())
}

fn entries(s: &SpectrumSlice) -> Vec<(f64, u64)> {
    s.entries()
        .iter()
        .map(|e| (e.value, e.multiplicity))
        .collect()
}

proptest! {
    #[test]
    fn merge_commutative(a in arb_slice(), b in arb_slice()) {
        let ab = a.merge(&b).unwrap();
        let ba = b.merge(&a).unwrap();
        prop_assert_eq!(entries(&ab), entries(&ba));
    }

    #[test]
    fn merge_associative(a in arb_slice(), b in arb_slice(), c in arb_slice()) {
        let left = a.merge(&b).unwrap().merge(&c).unwrap();
        let right = a.merge(&b.merge(&c).unwrap()).unwrap();
        prop_assert_eq!(entries(&left), entries(&right));
    }

    #[test]
    fn merge_preserves_total_multiplicity(a in arb_slice(), b in arb_slice()) {
        let m = a.merge(&b).unwrap();
        prop_assert_eq!(m.total_multiplicity(), a.total_multiplicity() + b.total_multiplicity());
    }

    #[test]
    fn count_below_monotone_and_brute(s in arb_slice(), lambdas in prop::collection::vec(-1.0f64..CUTOFF, 1..20)) {
        let mut sorted = lambdas.clone();
        sorted.sort_by(f64::total_cmp);
        let mut prev = 0u64;
        for lam in sorted {
            let c = s.count_below(lam, CountMode::Closed).unwrap();
            let brute: u64 = s
                .entries()
                .iter()
                .filter(|e| e.value <= lam)
                .map(|e| e.multiplicity)
                .sum();
            prop_assert_eq!(c, brute);
            prop_assert!(c >= prev);
            prev = c;
            let open = s.count_below(lam, CountMode::Open).unwrap();
            prop_assert!(open <= c);
        }
    }

    #[test]
    fn stieltjes_zero_exponent_is_value(
        jumps in prop::collection::vec((0.0f64..50.0, 0.1f64..3.0), 0..8),
        lam in -5.0f64..60.0,
    ) {
        let mut js = jumps.clone();
        js.sort_by(|a, b| a.0.total_cmp(&b.0));
        js.dedup_by(|a, b| a.0 == b.0);
        let f = StepFunction::new(js).unwrap();
        let m = f.stieltjes_moment(lam, 0.0).unwrap();
        prop_assert!((m - f.value(lam)).abs() <= 1e-12 * m.abs().max(1.0));
    }

    // equivariance holds only while every sample stays above the
    // classifier's absolute zero floor (1e-14), hence the ranges
    #[test]
    fn classifier_scale_equivariant(c in 0.1f64..10.0, k in 1u32..3, scale in 0.001f64..1000.0) {
        let grid = log_grid(1e-1, 1e-2, 9).unwrap();
        let values: Vec<f64> = grid.iter().map(|&h| c * h.powi(2 * k as i32)).collect();
        let b = BranchSamples::new(grid.clone(), values.clone()).unwrap();
        let scaled =
            BranchSamples::new(grid, values.iter().map(|v| v * scale).collect()).unwrap();
        let cfg = ClassifierConfig::default();
        let r1 = classify_branch(&b, &cfg).unwrap();
        let r2 = classify_branch(&scaled, &cfg).unwrap();
        prop_assert_eq!(r1.kind, r2.kind);
        prop_assert!((r1.fitted_slope - r2.fitted_slope).abs() < 1e-9);
        prop_assert!((r2.fitted_constant / r1.fitted_constant / scale - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_power_law_fit_recovers_coefficient(c in 1.0f64..1000.0) {
        // counts generated exactly as C/h with integer h^-1
        let samples: Vec<(f64, u64)> = [10u64, 20, 50, 100]
            .iter()
            .map(|&inv| (1.0 / inv as f64, (c.round() as u64) * inv))
            .collect();
        let fit = fit_leading_coefficient(&samples, 1).unwrap();
        prop_assert!((fit.coefficient / c.round() - 1.0).abs() < 1e-12);
        prop_assert!(fit.max_rel_residual < 1e-12);
    }

    #[test]
    fn torus_streaming_equals_slice(
        h in 0.25f64..1.5,
        num in 0i64..4,
        den in 1i64..4,
        lam in 0.5f64..60.0,
    ) {
        let slope = SlopeParam::rational(num, den).unwrap();
        let m = TorusModel::new(slope, h).unwrap();
        let s = m.spectrum(0, 60.0).unwrap();
        for mode in [CountMode::Open, CountMode::Closed] {
            prop_assert_eq!(
                m.count_exact(lam, 0, mode).unwrap(),
                s.count_below(lam, mode).unwrap()
            );
        }
    }

    #[test]
    fn torus_degree_duality(h in 0.25f64..1.5, alpha in 0.0f64..2.0) {
        let slope = SlopeParam::irrational(alpha).unwrap();
        let m = TorusModel::new(slope, h).unwrap();
        let s0 = m.spectrum(0, 40.0).unwrap();
        let s2 = m.spectrum(2, 40.0).unwrap();
        prop_assert_eq!(entries(&s0), entries(&s2));
    }
}
