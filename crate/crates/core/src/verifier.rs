//! Sampled certification or refutation of the multiplicative-metric axioms
//! and of contraction hypotheses.
//!
//! All checks run in log domain with an absolute slack (default `1e-10`)
//! separating rounding noise from genuine violations. A report with every
//! flag set is only a statistical statement about the points that were
//! drawn; each report carries [`SAMPLED_NOT_PROVED`] to say so. Refutations,
//! on the other hand, come with witnesses that replay deterministically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_point::{ContractionKind, ContractionSpec, SelfMap};
use crate::metric::MultiplicativeMetric;
use crate::sampler::{seeded_rng, PointSampler};

pub const DEFAULT_SLACK_LOG: f64 = 1e-10;
pub const SAMPLED_NOT_PROVED: &str = "sampled, not proved";
/// Witnesses kept per axiom; further violations are only counted.
pub const MAX_WITNESSES: usize = 8;

/// A distance under test, given by its logarithm.
///
/// Unlike [`MultiplicativeMetric`], a candidate may return anything,
/// including negative values or NaN; those are what the verifier looks for.
pub trait CandidateDistance<P> {
    fn log_distance(&self, x: &P, y: &P) -> f64;
}

impl<M: MultiplicativeMetric> CandidateDistance<M::Point> for M {
    fn log_distance(&self, x: &M::Point, y: &M::Point) -> f64 {
        self.distance(x, y).map_or(f64::NAN, |d| d.log())
    }
}

/// Wraps a closure returning the plain value `d(x, y)`.
pub struct PlainDistance<F>(pub F);

impl<P, F: Fn(&P, &P) -> f64> CandidateDistance<P> for PlainDistance<F> {
    fn log_distance(&self, x: &P, y: &P) -> f64 {
        let d = (self.0)(x, y);
        if d > 0.0 {
            d.ln()
        } else if d == 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        }
    }
}

/// Wraps a closure returning `ln d(x, y)` directly.
pub struct LogDistance<F>(pub F);

impl<P, F: Fn(&P, &P) -> f64> CandidateDistance<P> for LogDistance<F> {
    fn log_distance(&self, x: &P, y: &P) -> f64 {
        (self.0)(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    /// `d >= 1`, with `d = 1` iff the points coincide.
    M1,
    /// Symmetry.
    M2,
    /// Multiplicative triangle inequality.
    M3,
    /// `|d(x,z)/d(y,z)|* <= d(x,y)`.
    Reverse,
}

/// The exact inputs and log distances behind a violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness<P> {
    pub axiom: Axiom,
    pub points: Vec<P>,
    pub measured_log: Vec<f64>,
}

impl<P> Witness<P> {
    /// Re-evaluates the witness; true iff it still violates its axiom by
    /// more than `slack_log`.
    pub fn replay<D: CandidateDistance<P> + ?Sized>(&self, distance: &D, slack_log: f64) -> bool
    where
        P: PartialEq,
    {
        let p = &self.points;
        match (self.axiom, p.len()) {
            (Axiom::M1, 1) => m1_self_violation(distance.log_distance(&p[0], &p[0]), slack_log),
            (Axiom::M1, 2) => {
                m1_pair_violation(distance.log_distance(&p[0], &p[1]), p[0] != p[1], slack_log)
            }
            (Axiom::M2, 2) => m2_violation(
                distance.log_distance(&p[0], &p[1]),
                distance.log_distance(&p[1], &p[0]),
                slack_log,
            ),
            (Axiom::M3, 3) => m3_violation(
                distance.log_distance(&p[0], &p[2]),
                distance.log_distance(&p[0], &p[1]),
                distance.log_distance(&p[1], &p[2]),
                slack_log,
            ),
            (Axiom::Reverse, 3) => reverse_violation(
                distance.log_distance(&p[0], &p[2]),
                distance.log_distance(&p[1], &p[2]),
                distance.log_distance(&p[0], &p[1]),
                slack_log,
            ),
            _ => false,
        }
    }
}

/// `a <= b`, false when either side is NaN.
fn within(a: f64, b: f64) -> bool {
    a <= b
}

fn m1_self_violation(xx: f64, slack: f64) -> bool {
    !within(xx.abs(), slack)
}

fn m1_pair_violation(xy: f64, distinct: bool, slack: f64) -> bool {
    if xy.is_nan() || xy < -slack {
        return true;
    }
    distinct && xy <= 0.0
}

fn m2_violation(xy: f64, yx: f64, slack: f64) -> bool {
    !within((xy - yx).abs(), slack)
}

fn m3_violation(xz: f64, xy: f64, yz: f64, slack: f64) -> bool {
    !within(xz, xy + yz + slack)
}

fn reverse_violation(xz: f64, yz: f64, xy: f64, slack: f64) -> bool {
    !within((xz - yz).abs(), xy + slack)
}

/// Outcome of [`verify_axioms`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport<P> {
    pub m1_ok: bool,
    pub m2_ok: bool,
    pub m3_ok: bool,
    pub reverse_ok: bool,
    pub witnesses: Vec<Witness<P>>,
    pub violations: usize,
    pub samples_used: usize,
    pub seed: u64,
    /// The sampler ran dry before `n_samples` draws.
    pub exhausted: bool,
    pub certificate: &'static str,
}

impl<P> AxiomReport<P> {
    pub fn all_ok(&self) -> bool {
        self.m1_ok && self.m2_ok && self.m3_ok && self.reverse_ok
    }
}

struct Recorder<P> {
    witnesses: Vec<Witness<P>>,
    counts: [usize; 4],
}

impl<P: Clone> Recorder<P> {
    fn new() -> Self {
        Recorder {
            witnesses: Vec::new(),
            counts: [0; 4],
        }
    }

    fn slot(axiom: Axiom) -> usize {
        match axiom {
            Axiom::M1 => 0,
            Axiom::M2 => 1,
            Axiom::M3 => 2,
            Axiom::Reverse => 3,
        }
    }

    fn record(&mut self, axiom: Axiom, points: &[&P], measured_log: Vec<f64>) {
        let slot = Self::slot(axiom);
        if self.counts[slot] < MAX_WITNESSES {
            self.witnesses.push(Witness {
                axiom,
                points: points.iter().map(|p| (*p).clone()).collect(),
                measured_log,
            });
        }
        self.counts[slot] += 1;
    }

    fn ok(&self, axiom: Axiom) -> bool {
        self.counts[Self::slot(axiom)] == 0
    }
}

fn check_pair<P, D>(d: &D, x: &P, y: &P, slack: f64, rec: &mut Recorder<P>)
where
    P: Clone + PartialEq,
    D: CandidateDistance<P> + ?Sized,
{
    let xy = d.log_distance(x, y);
    let yx = d.log_distance(y, x);
    if m1_pair_violation(xy, x != y, slack) {
        rec.record(Axiom::M1, &[x, y], vec![xy]);
    }
    if m2_violation(xy, yx, slack) {
        rec.record(Axiom::M2, &[x, y], vec![xy, yx]);
    }
}

fn check_triple<P, D>(d: &D, x: &P, y: &P, z: &P, slack: f64, rec: &mut Recorder<P>)
where
    P: Clone + PartialEq,
    D: CandidateDistance<P> + ?Sized,
{
    let xz = d.log_distance(x, z);
    let xy = d.log_distance(x, y);
    let yz = d.log_distance(y, z);
    if m3_violation(xz, xy, yz, slack) {
        rec.record(Axiom::M3, &[x, y, z], vec![xz, xy, yz]);
    }
    if reverse_violation(xz, yz, xy, slack) {
        rec.record(Axiom::Reverse, &[x, y, z], vec![xz, yz, xy]);
    }
}

/// Checks m1–m3 and the reverse triangle inequality on sampled points.
///
/// The sampler's simple points are checked exhaustively first (every pair
/// and ordered triple), then `n_samples` random rounds each draw a triple
/// `(x, y, z)`, test `d(x, x)`, the pairs `(x, y)` and `(x, near(x))`, and the
/// triple itself.
pub fn verify_axioms<P, D, S>(
    distance: &D,
    sampler: &mut S,
    n_samples: usize,
    seed: u64,
    slack_log: f64,
) -> Result<AxiomReport<P>>
where
    P: Clone + PartialEq,
    D: CandidateDistance<P> + ?Sized,
    S: PointSampler<Point = P>,
{
    if n_samples == 0 {
        return Err(Error::Input("need at least one sample".into()));
    }
    if slack_log.is_nan() || slack_log < 0.0 {
        return Err(Error::Input(format!(
            "slack must be nonnegative, got {slack_log}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut rec = Recorder::new();

    let simple = sampler.simple_points();
    for x in &simple {
        let xx = distance.log_distance(x, x);
        if m1_self_violation(xx, slack_log) {
            rec.record(Axiom::M1, &[x], vec![xx]);
        }
        for y in &simple {
            check_pair(distance, x, y, slack_log, &mut rec);
            for z in &simple {
                check_triple(distance, x, y, z, slack_log, &mut rec);
            }
        }
    }

    let mut used = 0;
    let mut exhausted = false;
    for _ in 0..n_samples {
        let (Some(x), Some(y), Some(z)) = (
            sampler.sample(&mut rng),
            sampler.sample(&mut rng),
            sampler.sample(&mut rng),
        ) else {
            exhausted = true;
            break;
        };
        used += 1;
        let xx = distance.log_distance(&x, &x);
        if m1_self_violation(xx, slack_log) {
            rec.record(Axiom::M1, &[&x], vec![xx]);
        }
        check_pair(distance, &x, &y, slack_log, &mut rec);
        if let Some(near) = sampler.nearby(&x, &mut rng) {
            check_pair(distance, &x, &near, slack_log, &mut rec);
        }
        check_triple(distance, &x, &y, &z, slack_log, &mut rec);
    }

    let violations = rec.counts.iter().sum();
    Ok(AxiomReport {
        m1_ok: rec.ok(Axiom::M1),
        m2_ok: rec.ok(Axiom::M2),
        m3_ok: rec.ok(Axiom::M3),
        reverse_ok: rec.ok(Axiom::Reverse),
        witnesses: rec.witnesses,
        violations,
        samples_used: used,
        seed,
        exhausted,
        certificate: SAMPLED_NOT_PROVED,
    })
}

/// A pair violating a contraction inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionWitness<P> {
    pub x: P,
    pub y: P,
    /// `ln d(fx, fy)`.
    pub lhs_log: f64,
    /// `λ · ln D(x, y)`.
    pub rhs_log: f64,
}

/// Outcome of [`verify_contraction`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport<P> {
    pub holds: bool,
    pub spec: ContractionSpec,
    pub violations: Vec<ContractionWitness<P>>,
    pub violation_count: usize,
    pub pairs_checked: usize,
    /// Smallest `λ·ln D − ln d(fx, fy)` seen; negative means violated.
    pub min_margin_log: f64,
    pub seed: Option<u64>,
    pub exhausted: bool,
    pub certificate: &'static str,
}

/// Checks the contraction inequality of `spec` on the given pairs.
pub fn verify_contraction_on_pairs<M, F, I>(
    metric: &M,
    map: &F,
    spec: ContractionSpec,
    pairs: I,
    slack_log: f64,
) -> Result<ContractionReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
    I: IntoIterator<Item = (M::Point, M::Point)>,
{
    let lambda = spec.lambda();
    let mut violations = Vec::new();
    let mut count = 0;
    let mut checked = 0;
    let mut min_margin = f64::INFINITY;
    for (x, y) in pairs {
        let fx = map.apply(&x)?;
        let fy = map.apply(&y)?;
        let lhs = metric.distance(&fx, &fy)?.log();
        let base = match spec.kind() {
            ContractionKind::Banach => metric.distance(&x, &y)?.log(),
            ContractionKind::Kannan => {
                metric.distance(&fx, &x)?.log() + metric.distance(&fy, &y)?.log()
            }
            ContractionKind::Chatterjea => {
                metric.distance(&fx, &y)?.log() + metric.distance(&fy, &x)?.log()
            }
        };
        let rhs = lambda * base;
        checked += 1;
        min_margin = min_margin.min(rhs - lhs);
        if lhs > rhs + slack_log {
            if violations.len() < MAX_WITNESSES {
                violations.push(ContractionWitness {
                    x,
                    y,
                    lhs_log: lhs,
                    rhs_log: rhs,
                });
            }
            count += 1;
        }
    }
    Ok(ContractionReport {
        holds: count == 0,
        spec,
        violations,
        violation_count: count,
        pairs_checked: checked,
        min_margin_log: min_margin,
        seed: None,
        exhausted: false,
        certificate: SAMPLED_NOT_PROVED,
    })
}

/// [`verify_contraction_on_pairs`] over `n_samples` seeded random pairs.
pub fn verify_contraction<M, F, S>(
    metric: &M,
    map: &F,
    spec: ContractionSpec,
    sampler: &mut S,
    n_samples: usize,
    seed: u64,
    slack_log: f64,
) -> Result<ContractionReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
    S: PointSampler<Point = M::Point>,
{
    let mut rng = seeded_rng(seed);
    let mut pairs = Vec::with_capacity(n_samples);
    let mut exhausted = false;
    for _ in 0..n_samples {
        match (sampler.sample(&mut rng), sampler.sample(&mut rng)) {
            (Some(x), Some(y)) => pairs.push((x, y)),
            _ => {
                exhausted = true;
                break;
            }
        }
    }
    let mut report = verify_contraction_on_pairs(metric, map, spec, pairs, slack_log)?;
    report.seed = Some(seed);
    report.exhausted = exhausted;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{DStar, MulAbs};
    use crate::sampler::{ListSampler, LogUniform, PosVecSampler, UniformReal};

    #[test]
    fn d_star_passes() {
        let mut s = PosVecSampler {
            dim: 3,
            lo: 1e-3,
            hi: 1e3,
        };
        let r = verify_axioms(&DStar::new(3).unwrap(), &mut s, 2000, 1, DEFAULT_SLACK_LOG).unwrap();
        assert!(r.all_ok(), "{:?}", r.witnesses);
        assert_eq!(r.samples_used, 2000);
        assert_eq!(r.certificate, SAMPLED_NOT_PROVED);
    }

    #[test]
    fn squared_gap_fails_triangle() {
        let d = LogDistance(|x: &f64, y: &f64| (x - y).powi(2));
        let mut s = UniformReal::new(-10.0, 10.0);
        let r = verify_axioms(&d, &mut s, 500, 1, DEFAULT_SLACK_LOG).unwrap();
        assert!(r.m1_ok && r.m2_ok);
        assert!(!r.m3_ok);
        let first = r.witnesses.iter().find(|w| w.axiom == Axiom::M3).unwrap();
        assert_eq!(first.points, vec![0.0, 1.0, 2.0]);
        assert_eq!(first.measured_log, vec![4.0, 1.0, 1.0]);
        assert!(r.witnesses.iter().all(|w| w.replay(&d, DEFAULT_SLACK_LOG)));
    }

    #[test]
    fn asymmetric_and_non_identity_caught() {
        let skew =
            PlainDistance(|x: &f64, y: &f64| if x < y { (y / x).max(1.0) * 2.0 } else { 1.0 });
        let r = verify_axioms(
            &skew,
            &mut LogUniform::new(0.5, 4.0),
            50,
            2,
            DEFAULT_SLACK_LOG,
        )
        .unwrap();
        assert!(!r.m1_ok);
        assert!(!r.m2_ok);
        assert!(r
            .witnesses
            .iter()
            .all(|w| w.replay(&skew, DEFAULT_SLACK_LOG)));
    }

    #[test]
    fn exhaustion_flagged() {
        let mut s = ListSampler::new(vec![1.0, 2.0, 3.0, 4.0]);
        let r = verify_axioms(&MulAbs::new(), &mut s, 10, 0, DEFAULT_SLACK_LOG).unwrap();
        assert!(r.exhausted);
        assert_eq!(r.samples_used, 1);
        assert!(r.all_ok());
    }

    #[test]
    fn contraction_examples() {
        let m = MulAbs::new();
        let mut s = LogUniform::new(1e-3, 1e3);
        let sqrt = |x: &f64| Ok(x.sqrt());
        let spec = ContractionSpec::banach(0.5).unwrap();
        let r = verify_contraction(&m, &sqrt, spec, &mut s, 1000, 4, DEFAULT_SLACK_LOG).unwrap();
        assert!(r.holds);

        let square = |x: &f64| Ok(x * x);
        let spec = ContractionSpec::banach(0.99).unwrap();
        let r = verify_contraction(&m, &square, spec, &mut s, 100, 4, DEFAULT_SLACK_LOG).unwrap();
        assert!(!r.holds);
        let w = &r.violations[0];
        let ratio = w.lhs_log / (w.rhs_log / 0.99);
        assert!((ratio - 2.0).abs() < 1e-9);
    }
}
