//! Foliation slope: exact rational or caller-declared irrational.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The slope α of the linear flow `X = ∂/∂x + α ∂/∂y` on the torus.
///
/// Rationality is declared by the caller, never detected from a
/// float: deciding rationality of a floating value is ill-posed, and
/// the two asymptotic branches of the theory are structurally
/// different. `Rational(p, q)` is stored with `gcd(|p|, q) = 1` and
/// `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeParam {
    Rational(i64, i64),
    Irrational(f64),
}

impl SlopeParam {
    /// Builds a normalized rational slope `p/q`.
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::precondition("rational slope requires q != 0"));
        }
        let (mut p, mut q) = if q < 0 { (-p, -q) } else { (p, q) };
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        if g > 1 {
            p /= g;
            q /= g;
        }
        Ok(SlopeParam::Rational(p, q))
    }

    pub fn irrational(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::precondition("slope must be finite"));
        }
        Ok(SlopeParam::Irrational(alpha))
    }

    /// Re-checks invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        match *self {
            SlopeParam::Rational(p, q) => {
                if q <= 0 {
                    return Err(Error::precondition("rational slope requires q > 0"));
                }
                if gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
                    return Err(Error::precondition(format!(
                        "rational slope {p}/{q} is not in lowest terms"
                    )));
                }
                Ok(())
            }
            SlopeParam::Irrational(a) => {
                if !a.is_finite() {
                    return Err(Error::precondition("slope must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            SlopeParam::Rational(p, q) => p as f64 / q as f64,
            SlopeParam::Irrational(a) => a,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, SlopeParam::Rational(..))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(
            SlopeParam::rational(2, 4).unwrap(),
            SlopeParam::Rational(1, 2)
        );
        assert_eq!(
            SlopeParam::rational(1, -2).unwrap(),
            SlopeParam::Rational(-1, 2)
        );
        assert_eq!(
            SlopeParam::rational(0, 7).unwrap(),
            SlopeParam::Rational(0, 1)
        );
        assert!(SlopeParam::rational(1, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s: SlopeParam = serde_json::from_str(r#"{"rational":[1,2]}"#).unwrap();
        assert_eq!(s, SlopeParam::Rational(1, 2));
        let s: SlopeParam = serde_json::from_str(r#"{"irrational":1.5}"#).unwrap();
        assert_eq!(s, SlopeParam::Irrational(1.5));
    }

    #[test]
    fn validate_rejects_unnormalized() {
        assert!(SlopeParam::Rational(2, 4).validate().is_err());
        assert!(SlopeParam::Rational(1, -2).validate().is_err());
        assert!(SlopeParam::Rational(1, 2).validate().is_ok());
    }
}
