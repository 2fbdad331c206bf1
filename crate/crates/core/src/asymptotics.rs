//! Semiclassical Weyl coefficients, leading-coefficient fitting,
//! small-eigenvalue branch classification, and the expected
//! branch-count tables for both model families.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use crate::spectrum::SpectrumSlice;
use crate::step::StepFunction;
use std::f64::consts::PI;
use std::fmt;

/// Leafwise spectrum distribution function: either pure-point or a
/// continuous closed form given by its value and density.
pub enum Sdf {
    Step(StepFunction),
    Continuous {
        value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

/// Input to the Weyl transform: foliation codimension q and the
/// leafwise SDF driving the h⁻q coefficient.
pub struct WeylInput {
    pub codim_q: u32,
    pub leafwise_sdf: Sdf,
}

/// `Γ(n/2)` for positive half-integer arguments, exact recursion from
/// `Γ(1/2) = √π` and `Γ(1) = 1`.
fn gamma_half(n_halves: u32) -> f64 {
    debug_assert!(n_halves >= 1);
    let mut x = n_halves as f64 / 2.0;
    let mut acc = 1.0;
    while x > 1.0 {
        x -= 1.0;
        acc *= x;
    }
    if (x - 0.5).abs() < 1e-12 {
        acc * PI.sqrt()
    } else {
        acc
    }
}

/// The h⁻q coefficient of the counting asymptotics:
/// `(4π)^{−q/2}/Γ(q/2+1) · ∫_{−∞}^{λ} (λ−τ)^{q/2} dN_F(τ)`.
///
/// Step case: exact Stieltjes sum. Continuous case: the endpoint
/// `τ^{−1/2}` singularity of the density is removed by substituting
/// `τ = σ²`, and the remaining `(λ−σ²)^{q/2}` endpoint is handled by
/// tanh-sinh quadrature.
pub fn weyl_transform(w: &WeylInput, lambda: f64) -> Result<f64> {
    if w.codim_q == 0 {
        return Err(Error::precondition("codimension q must be >= 1"));
    }
    let q = w.codim_q as f64;
    let prefactor = (4.0 * PI).powf(-q / 2.0) / gamma_half(w.codim_q + 2);
    let moment = match &w.leafwise_sdf {
        Sdf::Step(f) => f.stieltjes_moment(lambda, q / 2.0)?,
        Sdf::Continuous { density, .. } => {
            if lambda <= 0.0 {
                0.0
            } else {
                let s = lambda.sqrt();
                tanh_sinh(
                    &|sigma: f64| {
                        (lambda - sigma * sigma).powf(q / 2.0)
                            * density(sigma * sigma)
                            * 2.0
                            * sigma
                    },
                    0.0,
                    s,
                    1e-13,
                )
            }
        }
    };
    Ok(prefactor * moment)
}

/// Result of fitting `count ≈ C·h^{−q}` on log-log axes.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub coefficient: f64,
    pub max_rel_residual: f64,
    /// Unconstrained slope of log(count) vs log(h), diagnostic only;
    /// a good fit has free_slope ≈ −q.
    pub free_slope: f64,
}

/// Least-squares fit of `log(count) = −q·log(h) + log(C)` with the
/// slope fixed at −q; also reports the free-slope fit.
pub fn fit_leading_coefficient(samples: &[(f64, u64)], codim_q: u32) -> Result<FitResult> {
    if samples.len() < 3 {
        return Err(Error::precondition("need at least 3 (h, count) samples"));
    }
    let mut pts = Vec::with_capacity(samples.len());
    for &(h, count) in samples {
        if !(h > 0.0) {
            return Err(Error::precondition("sample h values must be positive"));
        }
        if count == 0 {
            return Err(Error::precondition("sample counts must be positive"));
        }
        pts.push((h.ln(), (count as f64).ln()));
    }
    for w in samples.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::precondition("sample h values must be distinct"));
        }
    }
    let q = codim_q as f64;
    let n = pts.len() as f64;
    let intercept = pts.iter().map(|&(x, y)| y + q * x).sum::<f64>() / n;
    let coefficient = intercept.exp();
    let max_rel_residual = pts
        .iter()
        .map(|&(x, y)| ((y - (intercept - q * x)).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    let (free_slope, _) = least_squares(&pts);
    Ok(FitResult {
        coefficient,
        max_rel_residual,
        free_slope,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// One eigenvalue branch sampled over a decreasing h-grid.
#[derive(Debug, Clone)]
pub struct BranchSamples {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl BranchSamples {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::precondition("grid/value length mismatch"));
        }
        for w in grid.windows(2) {
            if !(w[0] > w[1]) {
                return Err(Error::precondition("h grid must be strictly decreasing"));
            }
        }
        if grid.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::precondition("h grid must be positive"));
        }
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::precondition("branch values must be >= 0"));
        }
        Ok(BranchSamples { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Branch classification: identically zero, decaying like `Θ(h^{2k})`,
/// or bounded away from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    Zero,
    Order(u32),
    NotSmall,
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchKind::Zero => write!(f, "zero"),
            BranchKind::Order(k) => write!(f, "order({k})"),
            BranchKind::NotSmall => write!(f, "not-small"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BranchReport {
    pub kind: BranchKind,
    pub fitted_slope: f64,
    /// Leading coefficient of `h^{2k}` (Order), the geometric-mean
    /// level (NotSmall), or 0 (Zero).
    pub fitted_constant: f64,
    /// Max |log residual| of the free-slope fit over the fit window.
    pub residual: f64,
    /// Set when the fit residual exceeds 0.1 in log-log, indicating a
    /// probable eigenvalue crossing inside the window.
    pub crossing_flag: bool,
}

/// Tunable thresholds for [`classify_branch`].
#[derive(Debug, Clone, Copy)]
pub struct ClassifierConfig {
    /// |slope − 2k| ≤ tol classifies as Order(k); |slope| ≤ tol as
    /// NotSmall.
    pub slope_tolerance: f64,
    /// Relative zero threshold: branch is Zero when all samples are
    /// ≤ threshold × max(1, largest sample).
    pub zero_threshold: f64,
    /// Log-log residual above which a crossing flag is raised.
    pub crossing_residual: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            slope_tolerance: 0.2,
            zero_threshold: 1e-14,
            crossing_residual: 0.1,
        }
    }
}

/// Classifies one sampled branch.
///
/// Zero if every sample is below the relative zero threshold;
/// otherwise the slope of log λ vs log h is fitted over the smallest
/// decade of h and matched against 0 (NotSmall) or an even integer
/// 2k (Order(k)). A slope near neither is an [`Error::AmbiguousSlope`].
pub fn classify_branch(b: &BranchSamples, cfg: &ClassifierConfig) -> Result<BranchReport> {
    if b.grid.len() < 4 {
        return Err(Error::precondition("need at least 4 grid points"));
    }
    let h_max = b.grid[0];
    let h_min = *b.grid.last().unwrap();
    if h_max / h_min < 10.0 * (1.0 - 1e-9) {
        return Err(Error::precondition(
            "grid must span at least one decade of h",
        ));
    }
    let largest = b.values.iter().cloned().fold(0.0, f64::max);
    let thr = cfg.zero_threshold * largest.max(1.0);
    if b.values.iter().all(|&v| v <= thr) {
        return Ok(BranchReport {
            kind: BranchKind::Zero,
            fitted_slope: 0.0,
            fitted_constant: 0.0,
            residual: 0.0,
            crossing_flag: false,
        });
    }
    // fit over the smallest decade of h
    let window: Vec<(f64, f64)> = b
        .grid
        .iter()
        .zip(&b.values)
        .filter(|&(&h, _)| h <= h_min * 10.0 * (1.0 + 1e-9))
        .map(|(&h, &v)| (h, v))
        .collect();
    if window.len() < 2 || window.iter().any(|&(_, v)| v <= thr) {
        return Err(Error::precondition(
            "fit window mixes zero and nonzero samples",
        ));
    }
    let pts: Vec<(f64, f64)> = window.iter().map(|&(h, v)| (h.ln(), v.ln())).collect();
    let (slope, intercept) = least_squares(&pts);
    let residual = pts
        .iter()
        .map(|&(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    let crossing_flag = residual > cfg.crossing_residual;
    if slope.abs() <= cfg.slope_tolerance {
        let mean_level = pts.iter().map(|&(_, y)| y).sum::<f64>() / pts.len() as f64;
        return Ok(BranchReport {
            kind: BranchKind::NotSmall,
            fitted_slope: slope,
            fitted_constant: mean_level.exp(),
            residual,
            crossing_flag,
        });
    }
    let k = (slope / 2.0).round();
    if k >= 1.0 && (slope - 2.0 * k).abs() <= cfg.slope_tolerance {
        let k_int = k as u32;
        // constant fitted with the slope pinned at the classified order
        let log_c = pts.iter().map(|&(x, y)| y - 2.0 * k * x).sum::<f64>() / pts.len() as f64;
        return Ok(BranchReport {
            kind: BranchKind::Order(k_int),
            fitted_slope: slope,
            fitted_constant: log_c.exp(),
            residual,
            crossing_flag,
        });
    }
    Err(Error::AmbiguousSlope { slope })
}

/// Model identifiers for the expected small-eigenvalue tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    TorusIrrational,
    TorusRational,
    HeisenbergDiag,
}

/// An expected branch count: finite, or unbounded (infinitely many
/// branches of that order; verified by sampling only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedCount {
    Finite(u64),
    Unbounded,
}

/// Expected number of eigenvalue branches of order ≥ k (including the
/// identically-zero branches) per model and form degree.
#[derive(Debug, Clone, Copy)]
pub struct ExpectedCounts {
    model: ModelId,
    degree: u8,
}

impl ExpectedCounts {
    pub fn at(&self, k: u32) -> ExpectedCount {
        assert!(k >= 1);
        match (self.model, self.degree) {
            // torus, irrational slope: the only small branches are the
            // identically-zero ones (1 in degrees 0 and 2, 2 in degree 1)
            (ModelId::TorusIrrational, 0 | 2) => ExpectedCount::Finite(1),
            (ModelId::TorusIrrational, 1) => ExpectedCount::Finite(2),
            // torus, rational slope: infinitely many O(h^2) branches,
            // but only the zero branches reach order >= 2
            (ModelId::TorusRational, 0 | 2) => {
                if k == 1 {
                    ExpectedCount::Unbounded
                } else {
                    ExpectedCount::Finite(1)
                }
            }
            (ModelId::TorusRational, 1) => {
                if k == 1 {
                    ExpectedCount::Unbounded
                } else {
                    ExpectedCount::Finite(2)
                }
            }
            // Heisenberg, diagonal adiabatic metric
            (ModelId::HeisenbergDiag, 0 | 3) => {
                if k == 1 {
                    ExpectedCount::Unbounded
                } else {
                    ExpectedCount::Finite(1)
                }
            }
            (ModelId::HeisenbergDiag, 1 | 2) => {
                if k <= 2 {
                    ExpectedCount::Unbounded
                } else {
                    ExpectedCount::Finite(2)
                }
            }
            _ => unreachable!("validated in expected_small_counts"),
        }
    }
}

/// The expected-count tables for small-eigenvalue branches.
pub fn expected_small_counts(model: ModelId, degree: u8) -> Result<ExpectedCounts> {
    let valid = match model {
        ModelId::TorusIrrational | ModelId::TorusRational => degree <= 2,
        ModelId::HeisenbergDiag => degree <= 3,
    };
    if !valid {
        return Err(Error::precondition(format!(
            "no expected-count table for {model:?} degree {degree}"
        )));
    }
    Ok(ExpectedCounts { model, degree })
}

/// Outcome for one audited branch: a classification, or a recorded
/// ambiguity (not fatal for the audit as a whole).
#[derive(Debug, Clone, Copy)]
pub enum BranchOutcome {
    Classified(BranchReport),
    Ambiguous { slope: f64 },
}

impl BranchOutcome {
    /// Whether this branch decays at least as fast as h^{2k}.
    pub fn order_at_least(&self, k: u32) -> bool {
        match self {
            BranchOutcome::Classified(r) => match r.kind {
                BranchKind::Zero => true,
                BranchKind::Order(j) => j >= k,
                BranchKind::NotSmall => false,
            },
            BranchOutcome::Ambiguous { .. } => false,
        }
    }

    pub fn kind_str(&self) -> String {
        match self {
            BranchOutcome::Classified(r) => r.kind.to_string(),
            BranchOutcome::Ambiguous { slope } => format!("ambiguous({slope:.3})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub branches: Vec<BranchOutcome>,
}

impl AuditReport {
    pub fn count_order_at_least(&self, k: u32) -> usize {
        self.branches.iter().filter(|b| b.order_at_least(k)).count()
    }

    pub fn count_kind(&self, kind: BranchKind) -> usize {
        self.branches
            .iter()
            .filter(|b| matches!(b, BranchOutcome::Classified(r) if r.kind == kind))
            .count()
    }

    /// Compares against an expected table for orders `1..=k_max`,
    /// returning human-readable mismatches (empty means agreement).
    /// Unbounded rows are verified as "at least min(i_max, 10) found".
    pub fn mismatches(&self, expected: &ExpectedCounts, k_max: u32) -> Vec<String> {
        let i_max = self.branches.len();
        let mut out = Vec::new();
        for k in 1..=k_max {
            let found = self.count_order_at_least(k);
            match expected.at(k) {
                ExpectedCount::Finite(n) => {
                    if found as u64 != n {
                        out.push(format!("order >= {k}: expected exactly {n}, found {found}"));
                    }
                }
                ExpectedCount::Unbounded => {
                    let need = i_max.min(10);
                    if found < need {
                        out.push(format!(
                            "order >= {k}: expected at least {need}, found {found}"
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Classifies each of the given branch curves; ambiguous slopes are
/// recorded per branch instead of failing the audit.
pub fn audit_curves(curves: &[BranchSamples], cfg: &ClassifierConfig) -> Result<AuditReport> {
    let mut branches = Vec::with_capacity(curves.len());
    for c in curves {
        match classify_branch(c, cfg) {
            Ok(r) => branches.push(BranchOutcome::Classified(r)),
            Err(Error::AmbiguousSlope { slope }) => {
                branches.push(BranchOutcome::Ambiguous { slope })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(AuditReport { branches })
}

/// Index-sorted branch audit: generates a complete slice per grid
/// point, pairs the i-th smallest eigenvalue (with multiplicity)
/// across the grid, and classifies the first `i_max` branches.
///
/// Crossings show up as large fit residuals and raise per-branch
/// flags. The generator receives `(h, cutoff)` and the cutoff is
/// grown until every slice holds at least `i_max` eigenvalues.
pub fn branch_audit(
    generator: &dyn Fn(f64, f64) -> Result<SpectrumSlice>,
    h_grid: &[f64],
    i_max: usize,
    cfg: &ClassifierConfig,
) -> Result<AuditReport> {
    if i_max == 0 {
        return Err(Error::precondition("i_max must be >= 1"));
    }
    let mut per_h: Vec<Vec<f64>> = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let mut cutoff = 1e-6;
        let vals = loop {
            let slice = generator(h, cutoff)?;
            if slice.total_multiplicity() >= i_max as u64 {
                break slice.smallest(i_max);
            }
            cutoff *= 4.0;
            if cutoff > 1e12 {
                return Err(Error::precondition(format!(
                    "could not collect {i_max} eigenvalues below cutoff 1e12 at h={h}"
                )));
            }
        };
        per_h.push(vals);
    }
    let mut curves = Vec::with_capacity(i_max);
    for i in 0..i_max {
        let values: Vec<f64> = per_h.iter().map(|v| v[i]).collect();
        curves.push(BranchSamples::new(h_grid.to_vec(), values)?);
    }
    audit_curves(&curves, cfg)
}

/// Log-spaced decreasing h-grid from `hi` down to `lo`.
pub fn log_grid(hi: f64, lo: f64, points: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || !(lo > 0.0) || points < 2 {
        return Err(Error::precondition("need hi > lo > 0 and >= 2 points"));
    }
    let n = points - 1;
    Ok((0..=n)
        .map(|i| hi * (lo / hi).powf(i as f64 / n as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slope::SlopeParam;
    use crate::torus;

    fn default_cfg() -> ClassifierConfig {
        ClassifierConfig::default()
    }

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert!((gamma_half(3) - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(4), 1.0);
        assert_eq!(gamma_half(6), 2.0);
    }

    #[test]
    fn weyl_continuous_case_matches_main_term() {
        // q=1, N_F = sqrt(tau)/pi: coefficient is lambda/(4 pi)
        for lambda in [1.0, 5.0, 10.0, 25.0] {
            let w = WeylInput {
                codim_q: 1,
                leafwise_sdf: torus::leafwise_sdf(
                    SlopeParam::irrational(std::f64::consts::SQRT_2).unwrap(),
                    0.0,
                )
                .unwrap(),
            };
            let v = weyl_transform(&w, lambda).unwrap();
            let expect = lambda / (4.0 * PI);
            assert!(
                ((v - expect) / expect).abs() < 1e-10,
                "lambda {lambda}: {v} vs {expect}"
            );
        }
    }

    #[test]
    fn weyl_step_case_matches_rational_sum() {
        for (p, q) in [(0i64, 1i64), (1, 1), (3, 5)] {
            let slope = SlopeParam::rational(p, q).unwrap();
            for lambda in [1.0, 5.0, 10.0, 25.0] {
                let w = WeylInput {
                    codim_q: 1,
                    leafwise_sdf: torus::leafwise_sdf(slope, lambda + 1.0).unwrap(),
                };
                let v = weyl_transform(&w, lambda).unwrap();
                let expect = torus::predicted_coefficient(slope, lambda).unwrap();
                assert!(
                    ((v - expect) / expect).abs() < 1e-12,
                    "{p}/{q} lambda {lambda}: {v} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn weyl_empty_sdf_is_zero() {
        let w = WeylInput {
            codim_q: 1,
            leafwise_sdf: Sdf::Step(StepFunction::new(vec![]).unwrap()),
        };
        assert_eq!(weyl_transform(&w, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn fit_exact_power_law() {
        let samples: Vec<(f64, u64)> = [0.1f64, 0.05, 0.02, 0.01]
            .iter()
            .map(|&h| (h, (7.0 / h).round() as u64))
            .collect();
        let f = fit_leading_coefficient(&samples, 1).unwrap();
        assert!((f.coefficient - 7.0).abs() < 0.1);
        assert!((f.free_slope + 1.0).abs() < 0.05);
    }

    #[test]
    fn fit_flags_model_mismatch() {
        let samples = vec![(0.1, 5u64), (0.05, 5), (0.02, 5), (0.01, 5)];
        let f = fit_leading_coefficient(&samples, 1).unwrap();
        assert!(f.max_rel_residual > 0.5);
        assert!(f.free_slope.abs() < 0.1);
    }

    #[test]
    fn fit_rejects_bad_samples() {
        assert!(fit_leading_coefficient(&[(0.1, 1), (0.05, 2)], 1).is_err());
        assert!(fit_leading_coefficient(&[(0.1, 0), (0.05, 2), (0.02, 3)], 1).is_err());
    }

    fn power_branch(c: f64, p: f64) -> BranchSamples {
        let grid = log_grid(1e-1, 1e-3, 9).unwrap();
        let values = grid.iter().map(|&h| c * h.powf(p)).collect();
        BranchSamples::new(grid, values).unwrap()
    }

    #[test]
    fn classify_order_two_with_constant() {
        let c = 16.0 * PI.powi(4);
        let r = classify_branch(&power_branch(c, 4.0), &default_cfg()).unwrap();
        assert_eq!(r.kind, BranchKind::Order(2));
        assert!((r.fitted_constant - c).abs() / c < 0.01);
    }

    #[test]
    fn classify_zero_and_not_small() {
        let grid = log_grid(1e-1, 1e-3, 9).unwrap();
        let zero = BranchSamples::new(grid.clone(), vec![0.0; grid.len()]).unwrap();
        assert_eq!(
            classify_branch(&zero, &default_cfg()).unwrap().kind,
            BranchKind::Zero
        );
        let flat = BranchSamples::new(grid.clone(), vec![4.0 * PI * PI; grid.len()]).unwrap();
        let r = classify_branch(&flat, &default_cfg()).unwrap();
        assert_eq!(r.kind, BranchKind::NotSmall);
        assert!((r.fitted_constant - 4.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn classify_ambiguous_slope_errors() {
        let r = classify_branch(&power_branch(3.0, 1.0), &default_cfg());
        match r {
            Err(Error::AmbiguousSlope { slope }) => assert!((slope - 1.0).abs() < 0.05),
            other => panic!("expected ambiguous, got {other:?}"),
        }
    }

    #[test]
    fn classify_scale_equivariance() {
        let cfg = default_cfg();
        let b = power_branch(2.5, 4.0);
        let r1 = classify_branch(&b, &cfg).unwrap();
        let scaled = BranchSamples::new(
            b.grid().to_vec(),
            b.values().iter().map(|v| v * 100.0).collect(),
        )
        .unwrap();
        let r2 = classify_branch(&scaled, &cfg).unwrap();
        assert_eq!(r1.kind, r2.kind);
        assert!((r1.fitted_slope - r2.fitted_slope).abs() < 1e-12);
        assert!((r2.fitted_constant / r1.fitted_constant - 100.0).abs() < 1e-9);
    }

    #[test]
    fn classify_requires_decade() {
        let grid = vec![0.5, 0.4, 0.3, 0.2];
        let b = BranchSamples::new(grid, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(classify_branch(&b, &default_cfg()).is_err());
    }

    #[test]
    fn expected_tables_match_paper() {
        let t = expected_small_counts(ModelId::HeisenbergDiag, 0).unwrap();
        assert_eq!(t.at(1), ExpectedCount::Unbounded);
        assert_eq!(t.at(2), ExpectedCount::Finite(1));
        assert_eq!(t.at(7), ExpectedCount::Finite(1));
        let t = expected_small_counts(ModelId::HeisenbergDiag, 1).unwrap();
        assert_eq!(t.at(1), ExpectedCount::Unbounded);
        assert_eq!(t.at(2), ExpectedCount::Unbounded);
        assert_eq!(t.at(3), ExpectedCount::Finite(2));
        let t = expected_small_counts(ModelId::TorusIrrational, 1).unwrap();
        for k in 1..=5 {
            assert_eq!(t.at(k), ExpectedCount::Finite(2));
        }
        assert!(expected_small_counts(ModelId::TorusIrrational, 3).is_err());
    }

    #[test]
    fn taylor_oracle_for_one_form_branches() {
        // lambda_{h,-}(0,b) = 4 pi^2 b^2 h^2 + (1 - sqrt(1+16 pi^2 b^2 h^2))/2
        // has Taylor order h^4 with coefficient 16 pi^4 b^4; the grid
        // scales as 1/b so the next Taylor term stays equally small
        for b in [1i64, 2, 3] {
            let bf = b as f64;
            let grid = log_grid(1e-2 / bf, 1e-3 / bf, 9).unwrap();
            let values: Vec<f64> = grid
                .iter()
                .map(|&h| {
                    let s = 4.0 * PI * PI * bf * bf * h * h;
                    s + 0.5 * (1.0 - (1.0 + 4.0 * s).sqrt())
                })
                .collect();
            let samples = BranchSamples::new(grid.clone(), values).unwrap();
            let r = classify_branch(&samples, &default_cfg()).unwrap();
            assert_eq!(r.kind, BranchKind::Order(2), "b={b}");
            let expect = 16.0 * PI.powi(4) * bf.powi(4);
            assert!(
                (r.fitted_constant - expect).abs() / expect < 0.01,
                "b={b}: {} vs {expect}",
                r.fitted_constant
            );
        }
    }

    #[test]
    fn audit_counts_and_mismatches() {
        let grid = log_grid(1e-1, 1e-3, 9).unwrap();
        let mk = |p: f64| {
            let values: Vec<f64> = grid.iter().map(|&h| 3.0 * h.powf(p)).collect();
            BranchSamples::new(grid.clone(), values).unwrap()
        };
        let zero = BranchSamples::new(grid.clone(), vec![0.0; grid.len()]).unwrap();
        let curves = vec![zero, mk(2.0), mk(2.0), mk(4.0)];
        let report = audit_curves(&curves, &default_cfg()).unwrap();
        assert_eq!(report.count_kind(BranchKind::Zero), 1);
        assert_eq!(report.count_order_at_least(1), 4);
        assert_eq!(report.count_order_at_least(2), 2);
        assert_eq!(report.count_order_at_least(3), 1);
    }
}
