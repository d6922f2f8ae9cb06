//! Problem definitions, the built-in registry, trace export, and the
//! run-time entry points shared by the command line and the C interface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fixed_point::{
    estimate_lambda, solve, ContractionKind, ContractionSpec, LambdaEstimate, SolverConfig,
    SolverReport, TraceStep, DEFAULT_TOL_LOG,
};
use crate::maps::{CoordMap, MapSpec};
use crate::metric::MultiplicativeMetric;
use crate::space::{Space, SpaceSpec};
use crate::verifier::{
    verify_axioms, verify_contraction, AxiomReport, ContractionReport, LogDistance,
    DEFAULT_SLACK_LOG,
};

/// Iteration cap used when a problem file does not give one.
pub const PROBLEM_MAX_ITER: usize = 100_000;

fn default_tol_log() -> f64 {
    DEFAULT_TOL_LOG
}

fn default_max_iter() -> usize {
    PROBLEM_MAX_ITER
}

/// Everything needed to reproduce one solve, stored as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDefinition {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub kind: ContractionKind,
    pub lambda: f64,
    pub x0: Vec<f64>,
    #[serde(default = "default_tol_log")]
    pub tol_log: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
    pub space: SpaceSpec,
    pub map: MapSpec,
}

/// A validated [`ProblemDefinition`].
#[derive(Debug, Clone)]
pub struct Problem {
    pub definition: ProblemDefinition,
    pub space: Space,
    pub map: CoordMap,
    pub spec: ContractionSpec,
    pub config: SolverConfig,
}

impl ProblemDefinition {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Builds every component and checks the start point lies in the space.
    pub fn validate(&self) -> Result<Problem> {
        let space = self.space.build()?;
        let map = self.map.build()?;
        let spec = ContractionSpec::new(self.kind, self.lambda)?;
        let config = SolverConfig::new(self.tol_log, self.max_iter)?;
        space.validate(&self.x0)?;
        Ok(Problem {
            definition: self.clone(),
            space,
            map,
            spec,
            config,
        })
    }
}

impl Problem {
    pub fn solve(&self) -> Result<SolverReport<Vec<f64>>> {
        solve(
            &self.space,
            &self.map,
            &self.definition.x0,
            self.spec,
            &self.config,
        )
    }

    /// Samples `n` pairs with the problem's seed and checks the contraction.
    pub fn verify_contraction(&self, n: usize) -> Result<ContractionReport<Vec<f64>>> {
        let mut sampler = self.space.sampler();
        verify_contraction(
            &self.space,
            &self.map,
            self.spec,
            &mut sampler,
            n,
            self.definition.seed,
            DEFAULT_SLACK_LOG,
        )
    }

    pub fn estimate(&self, pairs: usize) -> Result<LambdaEstimate<Vec<f64>>> {
        let mut sampler = self.space.sampler();
        estimate_lambda(
            &self.space,
            &self.map,
            self.spec.kind(),
            &mut sampler,
            pairs,
            self.definition.seed,
        )
    }
}

/// Checks the axioms of a space's own metric on seeded samples.
pub fn verify_space(spec: &SpaceSpec, samples: usize, seed: u64) -> Result<AxiomReport<Vec<f64>>> {
    let space = spec.build()?;
    let mut sampler = space.sampler();
    verify_axioms(&space, &mut sampler, samples, seed, DEFAULT_SLACK_LOG)
}

/// Checks the axioms for a candidate distance `d(x, y)` written as an
/// expression, with points drawn from a one-dimensional space.
pub fn verify_distance_expr(
    expr: &Expr,
    spec: &SpaceSpec,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport<Vec<f64>>> {
    let space = spec.build()?;
    if space.dim() != 1 {
        return Err(Error::Input(format!(
            "candidate distances need a one-dimensional space, got {}",
            spec.label()
        )));
    }
    let d = LogDistance(|x: &Vec<f64>, y: &Vec<f64>| expr.ln_eval2(x[0], y[0]));
    let mut sampler = space.sampler();
    verify_axioms(&d, &mut sampler, samples, seed, DEFAULT_SLACK_LOG)
}

/// One entry of the built-in problem registry.
#[derive(Debug, Clone, PartialEq)]
pub struct RegistryEntry {
    pub id: &'static str,
    pub expected: Vec<f64>,
    /// Where the expected value comes from.
    pub source: &'static str,
    pub definition: ProblemDefinition,
}

fn entry(
    id: &'static str,
    source: &'static str,
    expected: Vec<f64>,
    space: SpaceSpec,
    map: MapSpec,
    spec: (ContractionKind, f64),
    x0: Vec<f64>,
) -> RegistryEntry {
    RegistryEntry {
        id,
        expected,
        source,
        definition: ProblemDefinition {
            id: Some(id.to_string()),
            kind: spec.0,
            lambda: spec.1,
            x0,
            tol_log: DEFAULT_TOL_LOG,
            max_iter: PROBLEM_MAX_ITER,
            seed: 0,
            space,
            map,
        },
    }
}

fn expr(src: &str) -> MapSpec {
    MapSpec::Expr(Expr::parse(src).expect("registry expressions parse"))
}

/// The built-in problems.
pub fn registry() -> Vec<RegistryEntry> {
    let line = SpaceSpec::Exp {
        dim: 1,
        base: std::f64::consts::E,
        complex: false,
    };
    vec![
        entry(
            "paper-scalar",
            "published worked example: x = exp(x - 1 - x^3/10) on [0.1, 1], lambda = 0.997",
            vec![0.7411317711],
            SpaceSpec::MulAbs {
                interval: Some([0.1, 1.0]),
            },
            expr("exp(x - 1 - x^3/10)"),
            (ContractionKind::Banach, 0.997),
            vec![0.5],
        ),
        entry(
            "paper-segment",
            "published worked example: square-root swap on the two-segment space, lambda = 1/2",
            vec![1.0, 1.0],
            SpaceSpec::Segment,
            MapSpec::Named("segment".into()),
            (ContractionKind::Banach, 0.5),
            vec![2.0, 1.0],
        ),
        entry(
            "sqrt-toy",
            "closed form: ln sqrt(x) = ln(x)/2",
            vec![1.0],
            SpaceSpec::MulAbs { interval: None },
            expr("sqrt(x)"),
            (ContractionKind::Banach, 0.5),
            vec![16.0],
        ),
        entry(
            "quarter-kannan",
            "derived: |x-y|/4 <= (1/3)(3/4)(|x|+|y|) on the line with d = e^|x-y|",
            vec![0.0],
            line.clone(),
            expr("x/4"),
            (ContractionKind::Kannan, 1.0 / 3.0),
            vec![8.0],
        ),
        entry(
            "quarter-chatterjea",
            "derived: |x/4-y| + |y/4-x| >= (5/4)|x-y| on the line with d = e^|x-y|",
            vec![0.0],
            line,
            expr("x/4"),
            (ContractionKind::Chatterjea, 0.2),
            vec![8.0],
        ),
        entry(
            "constant",
            "closed form: a constant map is fixed after one step",
            vec![0.5],
            SpaceSpec::MulAbs { interval: None },
            MapSpec::Named("constant".into()),
            (ContractionKind::Kannan, 0.0),
            vec![3.0],
        ),
    ]
}

pub fn lookup(id: &str) -> Result<RegistryEntry> {
    registry()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownId(format!("problem `{id}`")))
}

/// Summary written after the steps of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFooter {
    pub fixed_point: Vec<f64>,
    pub residual_log: f64,
    pub error_bound_log: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The JSON trace written by `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub kind: ContractionKind,
    pub lambda: f64,
    pub steps: Vec<TraceStep<Vec<f64>>>,
    pub footer: TraceFooter,
}

impl TraceFile {
    pub fn from_report(report: &SolverReport<Vec<f64>>) -> Self {
        TraceFile {
            kind: report.spec.kind(),
            lambda: report.spec.lambda(),
            steps: report.trace.steps.clone(),
            footer: TraceFooter {
                fixed_point: report.fixed_point.clone(),
                residual_log: report.residual_log,
                error_bound_log: report.error_bound_log,
                iterations: report.iterations,
                converged: report.converged,
            },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_json(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
