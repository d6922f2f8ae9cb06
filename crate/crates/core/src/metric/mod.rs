//! Multiplicative metrics.
//!
//! A multiplicative metric `d` satisfies `d(x, y) >= 1` with equality iff
//! `x = y`, symmetry, and `d(x, z) <= d(x, y) * d(y, z)`. Taking logarithms
//! turns it into an ordinary metric, so every distance here is carried as
//! `rho = ln d`. Convergence tests all happen near `d = 1`, where the plain
//! value would lose every significant digit to cancellation.

mod ball;
mod spaces;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ball::{reverse_triangle_gap, MulBall};
pub use spaces::{
    dist_exp, dist_exp_complex, dist_function_sup, dist_pos_vec, dist_product, dist_segment,
    uniform_grid, ComplexExpMetric, ComplexVec, DStar, ExpMetric, LineMetric, MulAbs, PosVec,
    ProductMetric, RealVec, SampledPosFunction, SegmentMetric, SegmentPoint, SupMetric,
    DEFAULT_GRID_POINTS,
};

/// Two points are treated as equal when their log distance is at most this.
pub const POINT_TOLERANCE_LOG: f64 = 1e-12;

/// A multiplicative distance stored as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MulDistance {
    log_value: f64,
}

impl MulDistance {
    /// The identity distance `d = 1`.
    pub const ONE: MulDistance = MulDistance { log_value: 0.0 };

    pub fn from_log(log_value: f64) -> Result<Self> {
        if log_value.is_nan() || log_value < 0.0 {
            return Err(Error::Domain(format!(
                "log distance must be nonnegative, got {log_value}"
            )));
        }
        Ok(MulDistance { log_value })
    }

    /// Builds a distance from its plain value `d >= 1`.
    pub fn from_value(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::Domain(format!(
                "multiplicative distance must be >= 1, got {value}"
            )));
        }
        Ok(MulDistance {
            log_value: value.ln(),
        })
    }

    /// Callers guarantee `log_value` is a sum of absolute values.
    pub(crate) fn from_log_unchecked(log_value: f64) -> Self {
        debug_assert!(log_value >= 0.0, "negative log distance {log_value}");
        MulDistance { log_value }
    }

    #[inline]
    pub fn log(self) -> f64 {
        self.log_value
    }

    /// Plain value `d = e^rho`.
    #[inline]
    pub fn value(self) -> f64 {
        self.log_value.exp()
    }

    /// `d1 * d2`.
    pub fn product(self, other: MulDistance) -> MulDistance {
        MulDistance {
            log_value: self.log_value + other.log_value,
        }
    }

    /// `d^t` for `t >= 0`.
    pub fn powf(self, t: f64) -> Result<MulDistance> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Domain(format!("exponent must be >= 0, got {t}")));
        }
        Ok(MulDistance {
            log_value: self.log_value * t,
        })
    }

    /// Whether the two compared points count as equal.
    pub fn is_identity(self) -> bool {
        self.log_value <= POINT_TOLERANCE_LOG
    }
}

impl fmt::Display for MulDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.log_value)
    }
}

/// The multiplicative absolute value `|a|*`: `a` if `a >= 1`, else `1/a`.
pub fn mabs(a: f64) -> Result<MulDistance> {
    check_positive(a)?;
    Ok(MulDistance::from_log_unchecked(a.ln().abs()))
}

/// `|a/b|*` in log domain.
pub fn mabs_ratio(a: f64, b: f64) -> Result<MulDistance> {
    check_positive(a)?;
    check_positive(b)?;
    Ok(MulDistance::from_log_unchecked(log_ratio(a, b)))
}

/// `|ln a - ln b|` for positive `a`, `b`, evaluated as `ln(max / min)` so that
/// exact ratios such as `8 / 4` give exact logs. Symmetric in its arguments.
pub(crate) fn log_ratio(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let q = hi / lo;
    if q.is_finite() {
        q.ln()
    } else {
        hi.ln() - lo.ln()
    }
}

pub(crate) fn check_positive(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "expected a finite positive real, got {a}"
        )))
    }
}

/// A multiplicative metric over some point type.
pub trait MultiplicativeMetric {
    type Point: Clone + fmt::Debug;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<MulDistance>;

    /// Rejects points that do not belong to the space.
    fn validate(&self, _p: &Self::Point) -> Result<()> {
        Ok(())
    }
}

impl<M: MultiplicativeMetric + ?Sized> MultiplicativeMetric for &M {
    type Point = M::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<MulDistance> {
        (**self).distance(x, y)
    }

    fn validate(&self, p: &Self::Point) -> Result<()> {
        (**self).validate(p)
    }
}

/// Flattens a point to real coordinates for export.
pub trait Coordinates {
    fn coords(&self) -> Vec<f64>;
}

impl Coordinates for f64 {
    fn coords(&self) -> Vec<f64> {
        vec![*self]
    }
}

impl<A: Coordinates, B: Coordinates> Coordinates for (A, B) {
    fn coords(&self) -> Vec<f64> {
        let mut out = self.0.coords();
        out.extend(self.1.coords());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mabs_branches() {
        assert_eq!(mabs(1.0).unwrap().value(), 1.0);
        assert!((mabs(0.5).unwrap().value() - 2.0).abs() < 1e-15);
        assert!((mabs(3.0).unwrap().value() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn mabs_rejects_nonpositive() {
        assert!(matches!(mabs(0.0), Err(Error::Domain(_))));
        assert!(matches!(mabs(-2.0), Err(Error::Domain(_))));
        assert!(matches!(mabs(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn distance_constructors() {
        assert!(MulDistance::from_log(-1e-3).is_err());
        assert!(MulDistance::from_value(0.9).is_err());
        let d = MulDistance::from_value(4.0).unwrap();
        assert!((d.log() - 4f64.ln()).abs() < 1e-15);
        assert!(MulDistance::ONE.is_identity());
        assert!(!MulDistance::from_log(1e-9).unwrap().is_identity());
    }

    #[test]
    fn product_and_power() {
        let two = MulDistance::from_value(2.0).unwrap();
        let three = MulDistance::from_value(3.0).unwrap();
        assert!((two.product(three).value() - 6.0).abs() < 1e-14);
        assert!((two.powf(0.5).unwrap().value() - 2f64.sqrt()).abs() < 1e-15);
        assert!(two.powf(-1.0).is_err());
    }
}
