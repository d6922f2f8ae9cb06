//! Fixed points of multiplicative contractions.
//!
//! Three contraction classes are supported, all solved by Picard iteration
//! `x_{n+1} = f(x_n)`:
//!
//! * **Banach**: `d(fx, fy) <= d(x, y)^λ`, `λ ∈ [0, 1)`.
//! * **Kannan**: `d(fx, fy) <= (d(fx, x) · d(fy, y))^λ`, `λ ∈ [0, 1/2)`.
//! * **Chatterjea**: `d(fx, fy) <= (d(fx, y) · d(fy, x))^λ`, `λ ∈ [0, 1/2)`.
//!
//! In each case consecutive steps shrink geometrically,
//! `ln d(x_{n+1}, x_n) <= r · ln d(x_n, x_{n-1})`, with `r = λ` for Banach
//! and `r = h = λ / (1 - λ)` for the other two. Summing the tail gives the
//! a-priori bound `ln d(x_n, z) <= r^n / (1 - r) · ln d(x_1, x_0)` and the
//! a-posteriori bound `ln d(x_{n+1}, z) <= r / (1 - r) · ln d(x_{n+1}, x_n)`.
//! The solvers stop as soon as either bound drops below the tolerance and
//! the measured residual `ln d(f z, z)` agrees.
//!
//! The contraction constant is trusted but watched: a step that grows faster
//! than `r` allows is reported as [`Error::InvariantBreach`] instead of
//! silently producing a wrong certificate.

mod estimate;
mod solve;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use estimate::{estimate_lambda, estimate_lambda_on_pairs, LambdaEstimate};
pub use solve::{
    ball_solve, banach_solve, chatterjea_solve, kannan_solve, power_solve, solve, uniqueness_probe,
    StartOutcome, UniquenessReport,
};

/// Default stopping tolerance on the log error bound.
pub const DEFAULT_TOL_LOG: f64 = 1e-12;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Relative slack on the observed per-step contraction ratio.
pub const RATIO_SLACK: f64 = 1e-9;
/// Absolute slack, in log units, on step and residual comparisons.
pub const STEP_SLACK_LOG: f64 = 1e-12;

/// A map of a space into itself.
pub trait SelfMap<P> {
    fn apply(&self, x: &P) -> Result<P>;
}

impl<P, F> SelfMap<P> for F
where
    F: Fn(&P) -> Result<P>,
{
    fn apply(&self, x: &P) -> Result<P> {
        self(x)
    }
}

/// Which contraction inequality the map is assumed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContractionKind {
    Banach,
    Kannan,
    Chatterjea,
}

impl ContractionKind {
    /// Exclusive upper limit on λ.
    pub fn lambda_limit(self) -> f64 {
        match self {
            ContractionKind::Banach => 1.0,
            ContractionKind::Kannan | ContractionKind::Chatterjea => 0.5,
        }
    }
}

impl fmt::Display for ContractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractionKind::Banach => "banach",
            ContractionKind::Kannan => "kannan",
            ContractionKind::Chatterjea => "chatterjea",
        })
    }
}

impl FromStr for ContractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "banach" => Ok(ContractionKind::Banach),
            "kannan" => Ok(ContractionKind::Kannan),
            "chatterjea" => Ok(ContractionKind::Chatterjea),
            other => Err(Error::Parse(format!("unknown contraction kind `{other}`"))),
        }
    }
}

/// A contraction class together with its constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionSpec {
    kind: ContractionKind,
    lambda: f64,
}

impl ContractionSpec {
    pub fn new(kind: ContractionKind, lambda: f64) -> Result<Self> {
        let limit = kind.lambda_limit();
        if !(0.0..limit).contains(&lambda) {
            return Err(Error::Input(format!(
                "{kind} constant must lie in [0, {limit}), got {lambda}"
            )));
        }
        Ok(ContractionSpec { kind, lambda })
    }

    pub fn banach(lambda: f64) -> Result<Self> {
        Self::new(ContractionKind::Banach, lambda)
    }

    pub fn kannan(lambda: f64) -> Result<Self> {
        Self::new(ContractionKind::Kannan, lambda)
    }

    pub fn chatterjea(lambda: f64) -> Result<Self> {
        Self::new(ContractionKind::Chatterjea, lambda)
    }

    pub fn kind(&self) -> ContractionKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Geometric rate of consecutive steps: `λ` for Banach, `λ/(1-λ)` otherwise.
    pub fn rate(&self) -> f64 {
        match self.kind {
            ContractionKind::Banach => self.lambda,
            _ => self.lambda / (1.0 - self.lambda),
        }
    }

    /// Bound on `ln d(f z, z)` for an estimate `z` whose distance to the true
    /// fixed point is at most `error_log`.
    ///
    /// Obtained by routing through the fixed point `z*` and applying the
    /// kind's hypothesis to the pair `(z, z*)`:
    /// Banach `(1 + λ) e`, Kannan `e / (1 - λ)`,
    /// Chatterjea `(1 + 2λ) e / (1 - λ)`.
    pub fn residual_certificate(&self, error_log: f64) -> f64 {
        let l = self.lambda;
        match self.kind {
            ContractionKind::Banach => (1.0 + l) * error_log,
            ContractionKind::Kannan => error_log / (1.0 - l),
            ContractionKind::Chatterjea => (1.0 + 2.0 * l) * error_log / (1.0 - l),
        }
    }
}

/// Stopping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol_log: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_log: DEFAULT_TOL_LOG,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl SolverConfig {
    pub fn new(tol_log: f64, max_iter: usize) -> Result<Self> {
        let cfg = SolverConfig { tol_log, max_iter };
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol_log > 0.0 && self.tol_log.is_finite()) {
            return Err(Error::Input(format!(
                "tolerance must be positive, got {}",
                self.tol_log
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Input("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One Picard step: the iterate `x_n` and the bounds known at that point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep<P> {
    pub n: usize,
    pub point: P,
    /// `ln d(x_{n+1}, x_n)`.
    pub step_log: f64,
    /// `r^n / (1 - r) · ln d(x_1, x_0)`, bounding `ln d(x_n, z)`.
    pub apriori_log: f64,
    /// `r / (1 - r) · ln d(x_{n+1}, x_n)`, bounding `ln d(x_{n+1}, z)`.
    pub aposteriori_log: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IterationTrace<P> {
    pub steps: Vec<TraceStep<P>>,
}

impl<P> IterationTrace<P> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `ln d(x_1, x_0)`, or zero for an empty trace.
    pub fn first_step_log(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.step_log)
    }
}

/// Result of a solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport<P> {
    pub fixed_point: P,
    /// Measured `ln d(f z, z)`.
    pub residual_log: f64,
    /// Certified upper bound on `ln d(z, z*)` for the true fixed point `z*`.
    pub error_bound_log: f64,
    /// [`ContractionSpec::residual_certificate`] applied to `error_bound_log`.
    pub residual_bound_log: f64,
    pub iterations: usize,
    pub converged: bool,
    pub spec: ContractionSpec,
    pub trace: IterationTrace<P>,
    pub uniqueness: Option<UniquenessReport<P>>,
}

impl<P> SolverReport<P> {
    pub fn with_uniqueness(mut self, probe: UniquenessReport<P>) -> Self {
        self.uniqueness = Some(probe);
        self
    }
}

/// `rate^n / (1 - rate) · d10_log`.
pub fn apriori_bound(d10_log: f64, rate: f64, n: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Input(format!("rate must lie in [0, 1), got {rate}")));
    }
    if d10_log.is_nan() || d10_log < 0.0 {
        return Err(Error::Input(format!(
            "initial step must be a nonnegative log distance, got {d10_log}"
        )));
    }
    if d10_log == 0.0 {
        return Ok(0.0);
    }
    let exponent = i32::try_from(n).unwrap_or(i32::MAX);
    Ok(rate.powi(exponent) / (1.0 - rate) * d10_log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_ranges() {
        assert!(ContractionSpec::banach(0.0).is_ok());
        assert!(ContractionSpec::banach(0.999).is_ok());
        assert!(ContractionSpec::banach(1.0).is_err());
        assert!(ContractionSpec::banach(-0.1).is_err());
        assert!(ContractionSpec::kannan(0.5).is_err());
        assert!(ContractionSpec::chatterjea(0.49).is_ok());
        assert!(ContractionSpec::chatterjea(f64::NAN).is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(ContractionSpec::banach(0.25).unwrap().rate(), 0.25);
        assert!((ContractionSpec::kannan(1.0 / 3.0).unwrap().rate() - 0.5).abs() < 1e-15);
        assert!((ContractionSpec::chatterjea(0.2).unwrap().rate() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn apriori_examples() {
        for n in [0, 1, 10, 1000] {
            assert_eq!(apriori_bound(0.0, 0.5, n).unwrap(), 0.0);
        }
        let ln2 = std::f64::consts::LN_2;
        assert!((apriori_bound(ln2, 0.5, 0).unwrap() - 2.0 * ln2).abs() < 1e-15);
        assert!((apriori_bound(ln2, 0.5, 10).unwrap() - 2.0 / 1024.0 * ln2).abs() < 1e-18);
        assert!(apriori_bound(ln2, 1.0, 3).is_err());
        assert_eq!(apriori_bound(ln2, 0.0, 0).unwrap(), ln2);
        assert_eq!(apriori_bound(ln2, 0.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "Kannan".parse::<ContractionKind>().unwrap(),
            ContractionKind::Kannan
        );
        assert!("picard".parse::<ContractionKind>().is_err());
        assert_eq!(ContractionKind::Chatterjea.to_string(), "chatterjea");
    }
}
