//! Finite-prefix diagnostics for sequences in a multiplicative metric space.
//!
//! Asymptotic statements ("for all n >= N") are checked on a tail window:
//! the final quarter of the indices, but never fewer than [`MIN_TAIL_WINDOW`]
//! (or the whole sequence when it is shorter). Tolerances are log distances,
//! so `d < eps` is tested as `ln d < ln eps`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{mabs_ratio, MulAbs, MulDistance, MultiplicativeMetric};

pub const MIN_TAIL_WINDOW: usize = 8;

/// Outcome of a sequence check. Witness fields are set only on failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeqDiagnostic {
    pub verdict: bool,
    pub witness_index: Option<usize>,
    /// Second index for pairwise checks.
    pub witness_partner: Option<usize>,
    pub witness_value: Option<MulDistance>,
    pub detail: String,
}

impl SeqDiagnostic {
    fn pass(detail: impl Into<String>) -> Self {
        SeqDiagnostic {
            verdict: true,
            witness_index: None,
            witness_partner: None,
            witness_value: None,
            detail: detail.into(),
        }
    }

    fn fail(index: usize, partner: Option<usize>, value: MulDistance, detail: String) -> Self {
        SeqDiagnostic {
            verdict: false,
            witness_index: Some(index),
            witness_partner: partner,
            witness_value: Some(value),
            detail,
        }
    }
}

/// Length of the tail window for a sequence of `len` terms.
pub fn tail_window_len(len: usize) -> usize {
    len.div_ceil(4).max(MIN_TAIL_WINDOW).min(len)
}

fn check_tol(tol_log: f64) -> Result<()> {
    if tol_log > 0.0 && tol_log.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!(
            "tolerance must be positive, got {tol_log}"
        )))
    }
}

/// Does `d(x_n, limit)` stay within `tol_log` over the tail window?
pub fn convergence_diagnostic<M: MultiplicativeMetric>(
    metric: &M,
    seq: &[M::Point],
    limit: &M::Point,
    tol_log: f64,
) -> Result<SeqDiagnostic> {
    check_tol(tol_log)?;
    if seq.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    let start = seq.len() - tail_window_len(seq.len());
    let mut worst = (start, MulDistance::ONE);
    for (n, x) in seq.iter().enumerate().skip(start) {
        let d = metric.distance(x, limit)?;
        if d.log() > worst.1.log() {
            worst = (n, d);
        }
    }
    if worst.1.log() <= tol_log {
        Ok(SeqDiagnostic::pass(format!(
            "tail max ln d(x_n, x) = {} over indices {start}..{}",
            worst.1.log(),
            seq.len()
        )))
    } else {
        Ok(SeqDiagnostic::fail(
            worst.0,
            None,
            worst.1,
            format!(
                "ln d(x_{}, x) = {} exceeds {tol_log}",
                worst.0,
                worst.1.log()
            ),
        ))
    }
}

/// Are all pairwise distances among the last `window` terms within `tol_log`?
pub fn cauchy_diagnostic<M: MultiplicativeMetric>(
    metric: &M,
    seq: &[M::Point],
    tol_log: f64,
    window: usize,
) -> Result<SeqDiagnostic> {
    check_tol(tol_log)?;
    if window == 0 {
        return Err(Error::Input("window must be at least 1".into()));
    }
    if window > seq.len() {
        return Err(Error::Input(format!(
            "window {window} exceeds sequence length {}",
            seq.len()
        )));
    }
    let start = seq.len() - window;
    let mut worst = (start, start, MulDistance::ONE);
    for n in start..seq.len() {
        for m in n + 1..seq.len() {
            let d = metric.distance(&seq[n], &seq[m])?;
            if d.log() > worst.2.log() {
                worst = (n, m, d);
            }
        }
    }
    let (n, m, d) = worst;
    if d.log() <= tol_log {
        Ok(SeqDiagnostic::pass(format!(
            "max pairwise ln d over the last {window} terms = {}",
            d.log()
        )))
    } else {
        Ok(SeqDiagnostic::fail(
            n,
            Some(m),
            d,
            format!("ln d(x_{n}, x_{m}) = {} exceeds {tol_log}", d.log()),
        ))
    }
}

/// [`cauchy_diagnostic`] over the default tail window.
pub fn cauchy_diagnostic_tail<M: MultiplicativeMetric>(
    metric: &M,
    seq: &[M::Point],
    tol_log: f64,
) -> Result<SeqDiagnostic> {
    if seq.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    cauchy_diagnostic(metric, seq, tol_log, tail_window_len(seq.len()))
}

/// A center `x_{n0}` and radius `M` containing the whole sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub center_index: usize,
    pub bound: MulDistance,
}

/// Boundedness via the Cauchy construction with `eps = 2`: `n0` is the
/// first index after which all pairwise distances are below 2, and
/// `M = max{2, d(x_0, x_n0), ..., d(x_{n0-1}, x_n0)}`.
///
/// Every term satisfies `d(x_n, x_n0) <= M`; the inequality is strict for
/// `n >= n0` and can be attained by the term that defines `M`.
pub fn bounded_diagnostic<M: MultiplicativeMetric>(
    metric: &M,
    seq: &[M::Point],
) -> Result<BoundReport> {
    if seq.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    let ln2 = std::f64::consts::LN_2;
    let mut n0 = seq.len() - 1;
    'scan: for i in (0..seq.len() - 1).rev() {
        for j in i + 1..seq.len() {
            if metric.distance(&seq[i], &seq[j])?.log() >= ln2 {
                break 'scan;
            }
        }
        n0 = i;
    }
    let mut bound = ln2;
    for x in &seq[..n0] {
        bound = bound.max(metric.distance(x, &seq[n0])?.log());
    }
    for (n, x) in seq.iter().enumerate() {
        let d = metric.distance(x, &seq[n0])?.log();
        if d > bound {
            return Err(Error::InvariantBreach(format!(
                "term {n} at ln d = {d} escapes the bound {bound}"
            )));
        }
    }
    Ok(BoundReport {
        center_index: n0,
        bound: MulDistance::from_log(bound)?,
    })
}

fn check_schedule(eps_schedule: &[f64]) -> Result<()> {
    match eps_schedule.iter().find(|e| e.is_nan() || **e <= 1.0) {
        Some(e) => Err(Error::Input(format!(
            "schedule radius must exceed 1, got {e}"
        ))),
        None => Ok(()),
    }
}

fn check_set(set: &[f64]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Input("empty set".into()));
    }
    for &a in set {
        crate::metric::check_positive(a)?;
    }
    Ok(())
}

/// Bound side and approximation side of a sup/inf characterization.
fn characterize(
    set: &[f64],
    candidate: f64,
    eps_schedule: &[f64],
    is_bound: impl Fn(f64) -> bool,
    label: &str,
) -> Result<SeqDiagnostic> {
    check_set(set)?;
    crate::metric::check_positive(candidate)?;
    check_schedule(eps_schedule)?;
    if let Some((i, &a)) = set.iter().enumerate().find(|(_, &a)| !is_bound(a)) {
        return Ok(SeqDiagnostic::fail(
            i,
            None,
            mabs_ratio(a, candidate)?,
            format!("element {a} is on the wrong side of the candidate {label} {candidate}"),
        ));
    }
    let mut nearest = (0, f64::INFINITY);
    for (i, &a) in set.iter().enumerate() {
        let rho = mabs_ratio(candidate, a)?.log();
        if rho < nearest.1 {
            nearest = (i, rho);
        }
    }
    for &eps in eps_schedule {
        if nearest.1 >= eps.ln() {
            return Ok(SeqDiagnostic::fail(
                nearest.0,
                None,
                MulDistance::from_log(nearest.1)?,
                format!(
                    "no element within multiplicative distance {eps} of the candidate {label} {candidate}"
                ),
            ));
        }
    }
    Ok(SeqDiagnostic::pass(format!(
        "{candidate} satisfies the {label} characterization; nearest element at ln d = {}",
        nearest.1
    )))
}

/// `s = sup A` iff every `a <= s` and, for every `eps > 1`, some `|s/a|* < eps`.
pub fn check_supremum(set: &[f64], s: f64, eps_schedule: &[f64]) -> Result<SeqDiagnostic> {
    characterize(set, s, eps_schedule, |a| a <= s, "supremum")
}

/// `m = inf A` iff every `m <= a` and, for every `eps > 1`, some `|a/m|* < eps`.
pub fn check_infimum(set: &[f64], m: f64, eps_schedule: &[f64]) -> Result<SeqDiagnostic> {
    characterize(set, m, eps_schedule, |a| m <= a, "infimum")
}

/// Monotone subsequence by the peak-index construction.
///
/// A peak is an index whose value is `>=` every later value; peaks form a
/// non-increasing subsequence. Starting from the first non-peak, repeatedly
/// stepping to the next strictly larger value gives an increasing chain.
/// The longer of the two is returned (peaks on ties).
pub fn monotone_subsequence(seq: &[f64]) -> Vec<usize> {
    if seq.is_empty() {
        return Vec::new();
    }
    let mut is_peak = vec![false; seq.len()];
    let mut max_after = f64::NEG_INFINITY;
    for i in (0..seq.len()).rev() {
        if seq[i] >= max_after {
            is_peak[i] = true;
            max_after = seq[i];
        }
    }
    let peaks: Vec<usize> = (0..seq.len()).filter(|&i| is_peak[i]).collect();

    let mut chain = Vec::new();
    if let Some(start) = is_peak.iter().position(|p| !p) {
        chain.push(start);
        let mut i = start;
        while !is_peak[i] {
            // a non-peak always has a strictly larger successor
            let Some(j) = (i + 1..seq.len()).find(|&j| seq[j] > seq[i]) else {
                break;
            };
            chain.push(j);
            i = j;
        }
    }
    if chain.len() > peaks.len() {
        chain
    } else {
        peaks
    }
}

/// A monotone subsequence and its sup (increasing) or inf (decreasing).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BwExtraction {
    pub indices: Vec<usize>,
    pub limit: f64,
    pub increasing: bool,
}

/// Extracts a convergent subsequence of a sequence bounded in `[1/M, M]`.
pub fn bw_extract(seq: &[f64], bound: f64) -> Result<BwExtraction> {
    if seq.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    if bound.is_nan() || bound <= 1.0 {
        return Err(Error::Input(format!("bound must exceed 1, got {bound}")));
    }
    let log_bound = bound.ln();
    for (n, &x) in seq.iter().enumerate() {
        crate::metric::check_positive(x)?;
        if x.ln().abs() > log_bound {
            return Err(Error::Input(format!(
                "term {n} = {x} lies outside [1/{bound}, {bound}]"
            )));
        }
    }
    let indices = monotone_subsequence(seq);
    let first = seq[indices[0]];
    let last = seq[*indices.last().expect("nonempty")];
    let increasing = last > first;
    let values = indices.iter().map(|&i| seq[i]);
    let limit = if increasing {
        values.fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.fold(f64::INFINITY, f64::min)
    };
    Ok(BwExtraction {
        indices,
        limit,
        increasing,
    })
}

/// Values of `seq` at `indices`.
pub fn subsequence<P: Clone>(seq: &[P], indices: &[usize]) -> Vec<P> {
    indices.iter().map(|&i| seq[i].clone()).collect()
}

/// Tolerances for [`continuity_probe`]: trial sequences must converge within
/// `input_log`; images are tested against `output_log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeTolerance {
    pub input_log: f64,
    pub output_log: f64,
}

/// Sequential continuity check of `f` at `x`: every trial sequence that
/// converges to `x` must map to a sequence converging to `f(x)`.
///
/// The codomain may be an ordinary metric space carried through
/// [`crate::metric::LineMetric`]. Only this forward direction is checkable on
/// finite data.
pub fn continuity_probe<X, Y, F>(
    domain: &X,
    codomain: &Y,
    f: F,
    x: &X::Point,
    trials: &[Vec<X::Point>],
    tol: ProbeTolerance,
) -> Result<SeqDiagnostic>
where
    X: MultiplicativeMetric,
    Y: MultiplicativeMetric,
    F: Fn(&X::Point) -> Result<Y::Point>,
{
    if trials.is_empty() {
        return Err(Error::Input("no trial sequences".into()));
    }
    let fx = f(x)?;
    for (t, trial) in trials.iter().enumerate() {
        let input = convergence_diagnostic(domain, trial, x, tol.input_log)?;
        if !input.verdict {
            return Err(Error::Input(format!(
                "trial sequence {t} does not converge to the probe point: {}",
                input.detail
            )));
        }
        let images = trial.iter().map(&f).collect::<Result<Vec<_>>>()?;
        let output = convergence_diagnostic(codomain, &images, &fx, tol.output_log)?;
        if !output.verdict {
            return Ok(SeqDiagnostic {
                detail: format!("trial {t}: {}", output.detail),
                ..output
            });
        }
    }
    Ok(SeqDiagnostic::pass(format!(
        "{} trial sequences map to sequences converging to f(x)",
        trials.len()
    )))
}

/// `(R+, |·|*)` as a metric value, for diagnostics on scalar sequences.
pub const R_PLUS: MulAbs = MulAbs::UNBOUNDED;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::LineMetric;

    fn two_pow_inv(n_max: usize) -> Vec<f64> {
        (1..=n_max).map(|n| 2f64.powf(1.0 / n as f64)).collect()
    }

    #[test]
    fn window_policy() {
        assert_eq!(tail_window_len(3), 3);
        assert_eq!(tail_window_len(20), 8);
        assert_eq!(tail_window_len(100), 25);
        assert_eq!(tail_window_len(101), 26);
    }

    #[test]
    fn convergence_examples() {
        let constant = vec![3.0; 50];
        assert!(
            convergence_diagnostic(&R_PLUS, &constant, &3.0, 1e-12)
                .unwrap()
                .verdict
        );

        let seq = two_pow_inv(10_000);
        assert!(
            convergence_diagnostic(&R_PLUS, &seq, &1.0, 1e-3)
                .unwrap()
                .verdict
        );

        let diag = convergence_diagnostic(&R_PLUS, &seq, &2.0, 1e-3).unwrap();
        assert!(!diag.verdict);
        assert!(diag.witness_index.is_some() && diag.witness_value.is_some());
        assert!(diag.witness_value.unwrap().log() > 0.6);
    }

    #[test]
    fn convergence_rejects_empty() {
        assert!(convergence_diagnostic(&R_PLUS, &[], &1.0, 1e-3).is_err());
        assert!(convergence_diagnostic(&R_PLUS, &[1.0], &1.0, 0.0).is_err());
    }

    #[test]
    fn cauchy_examples() {
        let constant = vec![5.0; 40];
        assert!(
            cauchy_diagnostic(&R_PLUS, &constant, 1e-12, 10)
                .unwrap()
                .verdict
        );

        let seq = two_pow_inv(10_000);
        assert!(cauchy_diagnostic_tail(&R_PLUS, &seq, 1e-3).unwrap().verdict);

        let alternating: Vec<f64> = (0..40)
            .map(|n| if n % 2 == 0 { 1.0 } else { 2.0 })
            .collect();
        let diag = cauchy_diagnostic(&R_PLUS, &alternating, 1e-3, 10).unwrap();
        assert!(!diag.verdict);
        let (n, m) = (diag.witness_index.unwrap(), diag.witness_partner.unwrap());
        assert_ne!(alternating[n], alternating[m]);
        assert!((diag.witness_value.unwrap().log() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn cauchy_window_errors() {
        assert!(cauchy_diagnostic(&R_PLUS, &[1.0, 2.0], 1e-3, 3).is_err());
        assert!(cauchy_diagnostic(&R_PLUS, &[1.0, 2.0], 1e-3, 0).is_err());
    }

    #[test]
    fn bounded_examples() {
        let constant = vec![7.0; 10];
        let r = bounded_diagnostic(&R_PLUS, &constant).unwrap();
        assert!((r.bound.value() - 2.0).abs() < 1e-15);

        let r = bounded_diagnostic(&R_PLUS, &[1.0, 4.0]).unwrap();
        assert_eq!(r.center_index, 1);
        assert!((r.bound.value() - 4.0).abs() < 1e-14);

        let r = bounded_diagnostic(&R_PLUS, &[0.3]).unwrap();
        assert_eq!(r.center_index, 0);
        assert!((r.bound.value() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bounded_center_is_first_settled_index() {
        let seq = [100.0, 0.01, 1.0, 1.5, 1.2, 1.1];
        let r = bounded_diagnostic(&R_PLUS, &seq).unwrap();
        assert_eq!(r.center_index, 2);
        assert!((r.bound.value() - 100.0).abs() < 1e-11);
    }

    #[test]
    fn supremum_examples() {
        assert!(
            check_supremum(&[1.0, 2.0, 3.0], 3.0, &[1.1, 1.001])
                .unwrap()
                .verdict
        );
        let diag = check_supremum(&[1.0, 2.0, 3.0], 4.0, &[1.1]).unwrap();
        assert!(!diag.verdict);
        assert_eq!(diag.witness_index, Some(2));

        let n_max = 64;
        let set: Vec<f64> = (1..=n_max)
            .map(|n| 2f64.powf(1.0 - 1.0 / n as f64))
            .collect();
        let just_above = 2f64.powf(1.0 / n_max as f64) * 1.0001;
        assert!(
            check_supremum(&set, 2.0, &[1.5, 1.1, just_above])
                .unwrap()
                .verdict
        );
        let below = 2f64.powf(1.0 / n_max as f64) * 0.9999;
        assert!(!check_supremum(&set, 2.0, &[below]).unwrap().verdict);
    }

    #[test]
    fn supremum_detects_element_above() {
        let diag = check_supremum(&[1.0, 5.0], 3.0, &[2.0]).unwrap();
        assert!(!diag.verdict);
        assert_eq!(diag.witness_index, Some(1));
    }

    #[test]
    fn infimum_examples() {
        assert!(
            check_infimum(&[1.0, 2.0, 3.0], 1.0, &[1.01])
                .unwrap()
                .verdict
        );
        assert!(!check_infimum(&[2.0, 3.0], 1.0, &[1.5]).unwrap().verdict);
        assert!(check_infimum(&[1.0], 1.0, &[1.0 + 1e-9]).unwrap().verdict);
    }

    #[test]
    fn schedule_errors() {
        assert!(check_supremum(&[1.0], 1.0, &[1.0]).is_err());
        assert!(check_infimum(&[1.0], 1.0, &[0.5]).is_err());
        assert!(check_supremum(&[], 1.0, &[2.0]).is_err());
    }

    fn is_monotone(seq: &[f64], idx: &[usize]) -> bool {
        let v: Vec<f64> = idx.iter().map(|&i| seq[i]).collect();
        idx.windows(2).all(|w| w[0] < w[1])
            && (v.windows(2).all(|w| w[0] <= w[1]) || v.windows(2).all(|w| w[0] >= w[1]))
    }

    #[test]
    fn monotone_examples() {
        assert_eq!(monotone_subsequence(&[1.0, 2.0, 3.0]), vec![0, 1, 2]);
        assert_eq!(monotone_subsequence(&[3.0, 2.0, 1.0]), vec![0, 1, 2]);
        let seq = [2.0, 1.0, 3.0];
        let idx = monotone_subsequence(&seq);
        assert_eq!(idx.len(), 2);
        assert!(is_monotone(&seq, &idx));
        assert_eq!(monotone_subsequence(&[4.0]), vec![0]);
    }

    #[test]
    fn bw_examples() {
        let r = bw_extract(&[3.0; 12], 4.0).unwrap();
        assert_eq!(r.indices, (0..12).collect::<Vec<_>>());
        assert_eq!(r.limit, 3.0);

        let seq: Vec<f64> = (1..=400)
            .map(|n| 2f64.powf(if n % 2 == 0 { 1.0 } else { -1.0 } / n as f64))
            .collect();
        let r = bw_extract(&seq, 2.0).unwrap();
        let sub = subsequence(&seq, &r.indices);
        assert!(r.indices.len() >= 100);
        assert!(mabs_ratio(r.limit, 1.0).unwrap().log() < 0.01);
        assert!(cauchy_diagnostic_tail(&R_PLUS, &sub, 0.01).unwrap().verdict);

        let alternating: Vec<f64> = (0..30)
            .map(|n| if n % 2 == 0 { 1.0 } else { 2.0 })
            .collect();
        let r = bw_extract(&alternating, 2.0).unwrap();
        let sub = subsequence(&alternating, &r.indices);
        assert!(sub.iter().all(|&v| v == sub[0]));
        assert!(r.limit == 1.0 || r.limit == 2.0);
    }

    #[test]
    fn bw_rejects_unbounded() {
        assert!(bw_extract(&[1.0, 10.0], 4.0).is_err());
        assert!(bw_extract(&[1.0], 1.0).is_err());
    }

    #[test]
    fn continuity_identity_and_ln() {
        let tol = ProbeTolerance {
            input_log: 1e-3,
            output_log: 1e-3,
        };
        let trial = two_pow_inv(5000);
        let id = continuity_probe(
            &R_PLUS,
            &R_PLUS,
            |x: &f64| Ok(*x),
            &1.0,
            std::slice::from_ref(&trial),
            tol,
        )
        .unwrap();
        assert!(id.verdict);

        let ln = continuity_probe(
            &R_PLUS,
            &LineMetric,
            |x: &f64| Ok(x.ln()),
            &1.0,
            &[trial],
            tol,
        )
        .unwrap();
        assert!(ln.verdict);
    }

    #[test]
    fn continuity_detects_jump() {
        let tol = ProbeTolerance {
            input_log: 1e-3,
            output_log: 1e-3,
        };
        let step = |x: &f64| Ok(if *x < 2.0 { 1.0 } else { 2.0 });
        let from_below: Vec<f64> = (1..=5000)
            .map(|n| 2.0 * 2f64.powf(-1.0 / n as f64))
            .collect();
        let diag = continuity_probe(&R_PLUS, &R_PLUS, step, &2.0, &[from_below], tol).unwrap();
        assert!(!diag.verdict);
        assert!(diag.witness_index.is_some());
    }

    #[test]
    fn continuity_rejects_nonconvergent_trial() {
        let tol = ProbeTolerance {
            input_log: 1e-3,
            output_log: 1e-3,
        };
        let bad = vec![5.0; 20];
        assert!(continuity_probe(&R_PLUS, &R_PLUS, |x: &f64| Ok(*x), &1.0, &[bad], tol).is_err());
    }
}
