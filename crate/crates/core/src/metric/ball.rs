use super::{MulDistance, MultiplicativeMetric};
use crate::error::{Error, Result};

/// A multiplicative ball `{ y : d(center, y) < eps }` with `eps > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MulBall<P> {
    center: P,
    log_radius: f64,
}

impl<P> MulBall<P> {
    /// `radius` is the plain value `eps`; anything `<= 1` is rejected.
    pub fn new(center: P, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 1.0 {
            return Err(Error::Domain(format!(
                "ball radius must exceed 1, got {radius}"
            )));
        }
        Ok(MulBall {
            center,
            log_radius: radius.ln(),
        })
    }

    pub fn from_log_radius(center: P, log_radius: f64) -> Result<Self> {
        if log_radius.is_nan() || log_radius <= 0.0 {
            return Err(Error::Domain(format!(
                "ball log radius must be positive, got {log_radius}"
            )));
        }
        Ok(MulBall { center, log_radius })
    }

    pub fn center(&self) -> &P {
        &self.center
    }

    pub fn log_radius(&self) -> f64 {
        self.log_radius
    }

    /// Open-ball membership.
    pub fn contains<M>(&self, metric: &M, p: &P) -> Result<bool>
    where
        M: MultiplicativeMetric<Point = P>,
    {
        Ok(metric.distance(&self.center, p)?.log() < self.log_radius)
    }

    /// Closed-ball membership, `d(center, p) <= eps`.
    pub fn contains_closed<M>(&self, metric: &M, p: &P) -> Result<bool>
    where
        M: MultiplicativeMetric<Point = P>,
    {
        Ok(metric.distance(&self.center, p)?.log() <= self.log_radius)
    }
}

/// Both sides of `|d(x,z) / d(y,z)|* <= d(x,y)`, returned as `(lhs, rhs)`.
pub fn reverse_triangle_gap<M: MultiplicativeMetric>(
    metric: &M,
    x: &M::Point,
    y: &M::Point,
    z: &M::Point,
) -> Result<(MulDistance, MulDistance)> {
    let xz = metric.distance(x, z)?.log();
    let yz = metric.distance(y, z)?.log();
    let lhs = MulDistance::from_log_unchecked((xz - yz).abs());
    Ok((lhs, metric.distance(x, y)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MulAbs;

    #[test]
    fn ball_in_r_plus() {
        let m = MulAbs::new();
        let ball = MulBall::new(4.0, 2.0).unwrap();
        assert!(ball.contains(&m, &3.0).unwrap());
        assert!(!ball.contains(&m, &8.0).unwrap());
        assert!(ball.contains_closed(&m, &8.0).unwrap());
        assert!(ball.contains_closed(&m, &2.0).unwrap());
        assert!(ball.contains(&m, &4.0).unwrap());
    }

    #[test]
    fn radius_must_exceed_one() {
        assert!(MulBall::new(1.0, 1.0).is_err());
        assert!(MulBall::new(1.0, 0.5).is_err());
        assert!(MulBall::from_log_radius(1.0, 0.0).is_err());
    }

    #[test]
    fn reverse_triangle_examples() {
        let m = MulAbs::new();
        let (lhs, rhs) = reverse_triangle_gap(&m, &3.0, &3.0, &5.0).unwrap();
        assert_eq!((lhs.log(), rhs.log()), (0.0, 0.0));
        let (lhs, rhs) = reverse_triangle_gap(&m, &1.0, &2.0, &4.0).unwrap();
        assert!((lhs.value() - 2.0).abs() < 1e-15);
        assert!((rhs.value() - 2.0).abs() < 1e-15);
        let (lhs, rhs) = reverse_triangle_gap(&m, &1.5, &7.0, &1.5).unwrap();
        assert!((lhs.log() - rhs.log()).abs() < 1e-15);
    }
}
