use serde::Serialize;

use super::{
    apriori_bound, ContractionKind, ContractionSpec, IterationTrace, SelfMap, SolverConfig,
    SolverReport, TraceStep, RATIO_SLACK, STEP_SLACK_LOG,
};
use crate::error::{Error, Result};
use crate::metric::{MultiplicativeMetric, POINT_TOLERANCE_LOG};

type IterateCheck<'a, P> = &'a dyn Fn(usize, &P) -> Result<()>;
type ResidualCheck<'a, P> = &'a dyn Fn(&P) -> Result<f64>;

/// Extra per-run checks layered on the plain Picard loop.
struct Hooks<'a, P> {
    /// Called on every new iterate with its index.
    iterate: Option<IterateCheck<'a, P>>,
    /// Additional residual that must fall below the tolerance before the
    /// run may stop (used for `d(f z, z)` when iterating a power of `f`).
    residual: Option<ResidualCheck<'a, P>>,
}

impl<P> Default for Hooks<'_, P> {
    fn default() -> Self {
        Hooks {
            iterate: None,
            residual: None,
        }
    }
}

fn admit<M: MultiplicativeMetric>(
    metric: &M,
    hooks: &Hooks<'_, M::Point>,
    index: usize,
    p: &M::Point,
) -> Result<()> {
    metric.validate(p).map_err(|e| Error::LeftDomain {
        index,
        reason: e.to_string(),
    })?;
    if let Some(check) = hooks.iterate {
        check(index, p)?;
    }
    Ok(())
}

fn picard<M, F>(
    metric: &M,
    map: &F,
    x0: &M::Point,
    spec: ContractionSpec,
    cfg: &SolverConfig,
    hooks: Hooks<'_, M::Point>,
) -> Result<SolverReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    cfg.validate()?;
    let rate = spec.rate();
    let post_factor = rate / (1.0 - rate);
    let tol = cfg.tol_log;

    admit(metric, &hooks, 0, x0)?;
    let mut x = x0.clone();
    let mut next = map.apply(&x)?;
    admit(metric, &hooks, 1, &next)?;

    let mut trace = IterationTrace { steps: Vec::new() };
    let mut d10 = 0.0;
    let mut prev_step: Option<f64> = None;
    let mut bound_met = false;

    for n in 0..cfg.max_iter {
        let step = metric.distance(&next, &x)?.log();
        if n == 0 {
            d10 = step;
        }
        if let Some(prev) = prev_step {
            if step > (rate + RATIO_SLACK) * prev + STEP_SLACK_LOG {
                return Err(Error::InvariantBreach(format!(
                    "step {n} grew from ln d = {prev} to {step}, faster than rate {rate}; \
                     the map does not satisfy the {} condition with lambda = {}",
                    spec.kind(),
                    spec.lambda()
                )));
            }
        }
        let apriori = apriori_bound(d10, rate, n)?;
        let aposteriori = post_factor * step;
        trace.steps.push(TraceStep {
            n,
            point: x.clone(),
            step_log: step,
            apriori_log: apriori,
            aposteriori_log: aposteriori,
        });

        // f(x_n) = x_n to machine precision: x_n is the answer.
        if step == 0.0 {
            let extra = hooks.residual.map(|r| r(&x)).transpose()?;
            if let Some(extra) = extra.filter(|&e| e > tol) {
                return Err(Error::InvariantBreach(format!(
                    "iteration stalled at a point with residual ln d = {extra} above {tol}"
                )));
            }
            return Ok(SolverReport {
                fixed_point: x,
                residual_log: 0.0,
                error_bound_log: 0.0,
                residual_bound_log: 0.0,
                iterations: n,
                converged: true,
                spec,
                trace,
                uniqueness: None,
            });
        }

        let after = map.apply(&next)?;
        admit(metric, &hooks, n + 2, &after)?;

        if apriori.min(aposteriori) <= tol {
            bound_met = true;
            // candidate z = x_{n+1}
            let error_bound = apriori_bound(d10, rate, n + 1)?.min(aposteriori);
            let residual = metric.distance(&after, &next)?.log();
            let certificate = spec.residual_certificate(error_bound);
            if residual > certificate + STEP_SLACK_LOG {
                return Err(Error::InvariantBreach(format!(
                    "residual ln d(fz, z) = {residual} exceeds its certificate {certificate}"
                )));
            }
            let extra_ok = match hooks.residual {
                Some(r) => r(&next)? <= tol,
                None => true,
            };
            if residual <= tol && extra_ok {
                return Ok(SolverReport {
                    fixed_point: next,
                    residual_log: residual,
                    error_bound_log: error_bound,
                    residual_bound_log: certificate,
                    iterations: n + 1,
                    converged: true,
                    spec,
                    trace,
                    uniqueness: None,
                });
            }
        }

        prev_step = Some(step);
        x = next;
        next = after;
    }

    if bound_met && hooks.residual.is_some() {
        return Err(Error::InvariantBreach(format!(
            "error bound reached {tol} but the auxiliary residual never did"
        )));
    }
    let residual = metric.distance(&next, &x)?.log();
    let last_post = trace
        .steps
        .last()
        .map_or(f64::INFINITY, |s| s.aposteriori_log);
    let error_bound = apriori_bound(d10, rate, cfg.max_iter)?.min(last_post);
    Ok(SolverReport {
        fixed_point: x,
        residual_log: residual,
        error_bound_log: error_bound,
        residual_bound_log: spec.residual_certificate(error_bound),
        iterations: cfg.max_iter,
        converged: false,
        spec,
        trace,
        uniqueness: None,
    })
}

fn require_kind(spec: ContractionSpec, kind: ContractionKind) -> Result<()> {
    if spec.kind() == kind {
        Ok(())
    } else {
        Err(Error::Input(format!(
            "expected a {kind} contraction, got {}",
            spec.kind()
        )))
    }
}

/// Picard iteration under the Banach condition `d(fx, fy) <= d(x, y)^λ`.
pub fn banach_solve<M, F>(
    metric: &M,
    map: &F,
    x0: &M::Point,
    spec: ContractionSpec,
    cfg: &SolverConfig,
) -> Result<SolverReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    require_kind(spec, ContractionKind::Banach)?;
    picard(metric, map, x0, spec, cfg, Hooks::default())
}

/// Picard iteration under the Kannan condition; steps shrink at `h = λ/(1-λ)`.
pub fn kannan_solve<M, F>(
    metric: &M,
    map: &F,
    x0: &M::Point,
    spec: ContractionSpec,
    cfg: &SolverConfig,
) -> Result<SolverReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    require_kind(spec, ContractionKind::Kannan)?;
    picard(metric, map, x0, spec, cfg, Hooks::default())
}

/// Picard iteration under the Chatterjea condition; steps shrink at `h = λ/(1-λ)`.
pub fn chatterjea_solve<M, F>(
    metric: &M,
    map: &F,
    x0: &M::Point,
    spec: ContractionSpec,
    cfg: &SolverConfig,
) -> Result<SolverReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    require_kind(spec, ContractionKind::Chatterjea)?;
    picard(metric, map, x0, spec, cfg, Hooks::default())
}

/// Dispatches on the contraction kind.
pub fn solve<M, F>(
    metric: &M,
    map: &F,
    x0: &M::Point,
    spec: ContractionSpec,
    cfg: &SolverConfig,
) -> Result<SolverReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    match spec.kind() {
        ContractionKind::Banach => banach_solve(metric, map, x0, spec, cfg),
        ContractionKind::Kannan => kannan_solve(metric, map, x0, spec, cfg),
        ContractionKind::Chatterjea => chatterjea_solve(metric, map, x0, spec, cfg),
    }
}

/// Banach iteration confined to the closed ball `B̄_ε(x0)`.
///
/// Requires `d(f x0, x0) <= ε^{1-λ}` before iterating; every iterate is then
/// checked to stay inside the ball.
pub fn ball_solve<M, F>(
    metric: &M,
    map: &F,
    x0: &M::Point,
    epsilon: f64,
    spec: ContractionSpec,
    cfg: &SolverConfig,
) -> Result<SolverReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    require_kind(spec, ContractionKind::Banach)?;
    if epsilon.is_nan() || epsilon <= 1.0 {
        return Err(Error::Domain(format!(
            "ball radius must exceed 1, got {epsilon}"
        )));
    }
    let log_radius = epsilon.ln();
    metric.validate(x0)?;
    let measured = metric.distance(&map.apply(x0)?, x0)?.log();
    let allowed = (1.0 - spec.lambda()) * log_radius;
    if measured > allowed + POINT_TOLERANCE_LOG {
        return Err(Error::Precondition {
            measured_log: measured,
            allowed_log: allowed,
        });
    }
    let inside = |index: usize, p: &M::Point| -> Result<()> {
        let d = metric.distance(p, x0)?.log();
        if d > log_radius + POINT_TOLERANCE_LOG {
            Err(Error::InvariantBreach(format!(
                "iterate {index} left the closed ball: ln d(x_n, x0) = {d} > ln eps = {log_radius}"
            )))
        } else {
            Ok(())
        }
    };
    let hooks = Hooks {
        iterate: Some(&inside),
        residual: None,
    };
    let report = picard(metric, map, x0, spec, cfg, hooks)?;
    inside(report.iterations, &report.fixed_point)?;
    Ok(report)
}

/// Solves with the `n_power`-fold composition `f^n`, which is assumed to be a
/// Banach contraction, then requires `z` to fix `f` itself.
pub fn power_solve<M, F>(
    metric: &M,
    map: &F,
    n_power: usize,
    x0: &M::Point,
    spec: ContractionSpec,
    cfg: &SolverConfig,
) -> Result<SolverReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    require_kind(spec, ContractionKind::Banach)?;
    if n_power == 0 {
        return Err(Error::Input("power must be at least 1".into()));
    }
    let composed = |x: &M::Point| -> Result<M::Point> {
        let mut y = map.apply(x)?;
        for _ in 1..n_power {
            y = map.apply(&y)?;
        }
        Ok(y)
    };
    let f_residual =
        |z: &M::Point| -> Result<f64> { Ok(metric.distance(&map.apply(z)?, z)?.log()) };
    let hooks = Hooks {
        iterate: None,
        residual: Some(&f_residual),
    };
    let mut report = picard(metric, &composed, x0, spec, cfg, hooks)?;
    if report.converged {
        let r = f_residual(&report.fixed_point)?;
        if r > cfg.tol_log {
            return Err(Error::InvariantBreach(format!(
                "fixed point of f^{n_power} is not fixed by f: ln d(fz, z) = {r}"
            )));
        }
        report.residual_log = r;
    }
    Ok(report)
}

/// Outcome of one start in a [`uniqueness_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StartOutcome<P> {
    Converged {
        start: P,
        fixed_point: P,
        iterations: usize,
    },
    Failed {
        start: P,
        reason: String,
    },
}

/// Fixed points reached from several starts and their spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport<P> {
    pub outcomes: Vec<StartOutcome<P>>,
    /// Largest `ln d(z_i, z_j)` over converged starts.
    pub max_pairwise_log: f64,
    /// All starts converged and agree within `2 · tol_log`.
    pub unique: bool,
}

/// Solves from every start and checks that the fixed points coincide.
pub fn uniqueness_probe<M, F>(
    metric: &M,
    map: &F,
    spec: ContractionSpec,
    starts: &[M::Point],
    cfg: &SolverConfig,
) -> Result<UniquenessReport<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
{
    if starts.len() < 2 {
        return Err(Error::Input(
            "uniqueness probe needs at least two starts".into(),
        ));
    }
    let outcomes: Vec<StartOutcome<M::Point>> = starts
        .iter()
        .map(|start| match solve(metric, map, start, spec, cfg) {
            Ok(r) if r.converged => StartOutcome::Converged {
                start: start.clone(),
                fixed_point: r.fixed_point,
                iterations: r.iterations,
            },
            Ok(r) => StartOutcome::Failed {
                start: start.clone(),
                reason: format!("no convergence after {} iterations", r.iterations),
            },
            Err(e) => StartOutcome::Failed {
                start: start.clone(),
                reason: e.to_string(),
            },
        })
        .collect();

    let fixed: Vec<&M::Point> = outcomes
        .iter()
        .filter_map(|o| match o {
            StartOutcome::Converged { fixed_point, .. } => Some(fixed_point),
            StartOutcome::Failed { .. } => None,
        })
        .collect();
    let mut max_pairwise_log: f64 = 0.0;
    for (i, a) in fixed.iter().enumerate() {
        for b in &fixed[i + 1..] {
            max_pairwise_log = max_pairwise_log.max(metric.distance(a, b)?.log());
        }
    }
    let unique = fixed.len() == outcomes.len() && max_pairwise_log <= 2.0 * cfg.tol_log;
    Ok(UniquenessReport {
        outcomes,
        max_pairwise_log,
        unique,
    })
}
