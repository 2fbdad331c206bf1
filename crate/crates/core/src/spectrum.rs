//! Eigenvalue multisets below a cutoff, with completeness certificates.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Relative tolerance used when merging entries that come from
/// distinct closed-form families (e.g. Σ₁ vs Σ₂). Values produced by
/// the same formula are compared exactly instead.
pub const CROSS_FAMILY_REL_TOL: f64 = 1e-12;

/// Gap below which two distinct entries are flagged as a near
/// collision (kept separate, diagnostic only).
pub const NEAR_COLLISION_REL_TOL: f64 = 1e-9;

/// One eigenvalue with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub value: f64,
    pub multiplicity: u64,
}

/// Comparison mode for counting functions.
///
/// The spectrum distribution function is defined with `≤` while the
/// torus lattice-point problem counts with strict `<`; both are
/// exposed and tests pin the mode per statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Closed,
    Open,
}

/// All eigenvalues of a modeled operator below `cutoff`, sorted
/// ascending with equal values merged.
///
/// `complete == true` certifies that no eigenvalue below the cutoff is
/// missing; the enumeration bound backing the certificate is recorded
/// in the free-text provenance string.
#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    cutoff: f64,
    complete: bool,
    entries: Vec<EigenvalueEntry>,
    provenance: String,
    near_collision: bool,
}

impl SpectrumSlice {
    /// Builds a slice from raw `(value, multiplicity)` pairs produced
    /// by a single closed-form family. Values are compared exactly:
    /// within one formula, analytically coincident eigenvalues yield
    /// bit-identical floats.
    pub fn from_values(
        cutoff: f64,
        complete: bool,
        provenance: impl Into<String>,
        mut values: Vec<(f64, u64)>,
    ) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::precondition("cutoff must be positive"));
        }
        for &(v, m) in &values {
            if !(v >= 0.0) || v > cutoff {
                return Err(Error::precondition(format!(
                    "eigenvalue {v} outside [0, {cutoff}]"
                )));
            }
            if m == 0 {
                return Err(Error::precondition("multiplicity must be >= 1"));
            }
        }
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<EigenvalueEntry> = Vec::with_capacity(values.len());
        for (v, m) in values {
            match entries.last_mut() {
                Some(last) if last.value == v => last.multiplicity += m,
                _ => entries.push(EigenvalueEntry {
                    value: v,
                    multiplicity: m,
                }),
            }
        }
        Ok(SpectrumSlice {
            cutoff,
            complete,
            entries,
            provenance: provenance.into(),
            near_collision: false,
        })
    }

    pub fn empty(cutoff: f64) -> Result<Self> {
        Self::from_values(cutoff, true, "empty", Vec::new())
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn entries(&self) -> &[EigenvalueEntry] {
        &self.entries
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// True if some merge kept two entries closer than
    /// [`NEAR_COLLISION_REL_TOL`] apart (possible conflation risk).
    pub fn has_near_collision(&self) -> bool {
        self.near_collision
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Multiset union of two slices over the same cutoff.
    ///
    /// Entries from different families are merged when they agree to
    /// [`CROSS_FAMILY_REL_TOL`] relative; near misses below
    /// [`NEAR_COLLISION_REL_TOL`] stay distinct and set the diagnostic
    /// flag, so multiplicities are never silently conflated.
    pub fn merge(&self, other: &SpectrumSlice) -> Result<SpectrumSlice> {
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffMismatch {
                left: self.cutoff,
                right: other.cutoff,
            });
        }
        let mut all: Vec<EigenvalueEntry> = self
            .entries
            .iter()
            .chain(other.entries.iter())
            .copied()
            .collect();
        all.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut entries: Vec<EigenvalueEntry> = Vec::with_capacity(all.len());
        let mut near_collision = self.near_collision || other.near_collision;
        for e in all {
            match entries.last_mut() {
                Some(last) if values_close(last.value, e.value, CROSS_FAMILY_REL_TOL) => {
                    last.multiplicity += e.multiplicity;
                }
                Some(last) if values_close(last.value, e.value, NEAR_COLLISION_REL_TOL) => {
                    near_collision = true;
                    entries.push(e);
                }
                _ => entries.push(e),
            }
        }
        let provenance = if self.provenance.is_empty() {
            other.provenance.clone()
        } else if other.provenance.is_empty() {
            self.provenance.clone()
        } else {
            format!("{}; {}", self.provenance, other.provenance)
        };
        Ok(SpectrumSlice {
            cutoff: self.cutoff,
            complete: self.complete && other.complete,
            entries,
            provenance,
            near_collision,
        })
    }

    /// Number of eigenvalues `≤ λ` (Closed) or `< λ` (Open), with
    /// multiplicity. Only certified slices may be counted, and only up
    /// to their cutoff.
    pub fn count_below(&self, lambda: f64, mode: CountMode) -> Result<u64> {
        if !self.complete {
            return Err(Error::precondition("count_below requires a complete slice"));
        }
        if lambda > self.cutoff {
            return Err(Error::BeyondCutoff {
                lambda,
                cutoff: self.cutoff,
            });
        }
        let keep = |v: f64| match mode {
            CountMode::Closed => v <= lambda,
            CountMode::Open => v < lambda,
        };
        Ok(self
            .entries
            .iter()
            .take_while(|e| keep(e.value))
            .map(|e| e.multiplicity)
            .sum())
    }

    /// The `n` smallest eigenvalues repeated by multiplicity.
    pub fn smallest(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        'outer: for e in &self.entries {
            for _ in 0..e.multiplicity {
                if out.len() == n {
                    break 'outer;
                }
                out.push(e.value);
            }
        }
        out
    }

    /// Returns a copy with every multiplicity scaled by `factor`.
    pub fn scale_multiplicities(&self, factor: u64) -> Result<SpectrumSlice> {
        if factor == 0 {
            return Err(Error::precondition("multiplicity factor must be >= 1"));
        }
        let mut s = self.clone();
        for e in &mut s.entries {
            e.multiplicity *= factor;
        }
        Ok(s)
    }

    /// CSV with header `value,multiplicity`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,multiplicity\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{}", crate::fmt_g17(e.value), e.multiplicity);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "cutoff": self.cutoff,
            "complete": self.complete,
            "entries": self.entries.iter()
                .map(|e| serde_json::json!([e.value, e.multiplicity]))
                .collect::<Vec<_>>(),
        })
    }
}

fn values_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}
