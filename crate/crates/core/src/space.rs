//! Spaces chosen at run time, with points carried as flat coordinate lists.
//!
//! This is the layer the command line and the C interface work against:
//! a [`SpaceSpec`] names one of the concrete metrics, [`Space`] evaluates it
//! on `Vec<f64>` points, and [`SpaceSampler`] draws such points. Complex
//! coordinates are interleaved as `re, im`; sampled functions are their
//! values on the grid.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{
    uniform_grid, ComplexExpMetric, ComplexVec, Coordinates, DStar, ExpMetric, MulAbs, MulDistance,
    MultiplicativeMetric, PosVec, RealVec, SampledPosFunction, SegmentMetric, SegmentPoint,
    SupMetric, DEFAULT_GRID_POINTS,
};
use crate::sampler::{
    ComplexVecSampler, FunctionSampler, LogUniform, PointSampler, PosVecSampler, RealVecSampler,
    SegmentSampler,
};

/// Sampling range for unbounded positive coordinates.
pub const POSITIVE_RANGE: (f64, f64) = (1e-3, 1e3);
/// Sampling range for real coordinates.
pub const REAL_RANGE: (f64, f64) = (-10.0, 10.0);

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_base() -> f64 {
    std::f64::consts::E
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Which space a problem lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// `(R+, |·|*)`, optionally restricted to `[lo, hi]`.
    MulAbs {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
    },
    /// `(R+^n, d*)`.
    DStar { dim: usize },
    /// `(R^n, d_a)` or, with `complex`, `(C^n, d_a)`.
    Exp {
        dim: usize,
        #[serde(default = "default_base")]
        base: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        complex: bool,
    },
    /// The two unit-anchored segments with the cube-root metric.
    Segment,
    /// Positive functions on `[a, b]` sampled on a uniform grid, sup metric.
    Function {
        a: f64,
        b: f64,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    /// Product of two spaces, `rho = d_1 · d_2`.
    Product {
        first: Box<SpaceSpec>,
        second: Box<SpaceSpec>,
    },
}

impl SpaceSpec {
    /// Looks up a space by its command-line name.
    pub fn from_name(name: &str, dim: usize, base: f64, complex: bool) -> Result<SpaceSpec> {
        Ok(match name {
            "mul-abs" | "r-plus" => SpaceSpec::MulAbs { interval: None },
            "d-star" => SpaceSpec::DStar { dim },
            "exp" => SpaceSpec::Exp { dim, base, complex },
            "line" => SpaceSpec::Exp {
                dim: 1,
                base: default_base(),
                complex: false,
            },
            "segment" => SpaceSpec::Segment,
            "function" => SpaceSpec::Function {
                a: 0.0,
                b: 1.0,
                grid_points: DEFAULT_GRID_POINTS,
            },
            "product" => SpaceSpec::Product {
                first: Box::new(SpaceSpec::MulAbs { interval: None }),
                second: Box::new(SpaceSpec::DStar { dim }),
            },
            other => return Err(Error::UnknownId(format!("space `{other}`"))),
        })
    }

    /// Names accepted by [`SpaceSpec::from_name`].
    pub const NAMES: [&'static str; 7] = [
        "mul-abs", "d-star", "exp", "line", "segment", "function", "product",
    ];

    pub fn build(&self) -> Result<Space> {
        let kind = match self {
            SpaceSpec::MulAbs { interval: None } => Kind::MulAbs(MulAbs::new()),
            SpaceSpec::MulAbs {
                interval: Some([lo, hi]),
            } => Kind::MulAbs(MulAbs::interval(*lo, *hi)?),
            SpaceSpec::DStar { dim } => Kind::DStar(DStar::new(*dim)?),
            SpaceSpec::Exp {
                dim,
                base,
                complex: false,
            } => Kind::Exp(check_dim(*dim)?, ExpMetric::new(*base)?),
            SpaceSpec::Exp {
                dim,
                base,
                complex: true,
            } => Kind::ComplexExp(check_dim(*dim)?, ComplexExpMetric::new(*base)?),
            SpaceSpec::Segment => Kind::Segment,
            SpaceSpec::Function { a, b, grid_points } => {
                Kind::Function(uniform_grid(*a, *b, *grid_points)?)
            }
            SpaceSpec::Product { first, second } => {
                Kind::Product(Box::new(first.build()?), Box::new(second.build()?))
            }
        };
        Ok(Space {
            spec: self.clone(),
            kind,
        })
    }

    /// A short human-readable label.
    pub fn label(&self) -> String {
        match self {
            SpaceSpec::MulAbs { interval: None } => "(R+, |.|*)".into(),
            SpaceSpec::MulAbs {
                interval: Some([lo, hi]),
            } => format!("([{lo}, {hi}], |.|*)"),
            SpaceSpec::DStar { dim } => format!("(R+^{dim}, d*)"),
            SpaceSpec::Exp {
                dim,
                base,
                complex: false,
            } => format!("(R^{dim}, d_{})", base_label(*base)),
            SpaceSpec::Exp { dim, base, .. } => format!("(C^{dim}, d_{})", base_label(*base)),
            SpaceSpec::Segment => "segment space".into(),
            SpaceSpec::Function { a, b, grid_points } => {
                format!("C*[{a}, {b}] on {grid_points} points")
            }
            SpaceSpec::Product { first, second } => {
                format!("{} x {}", first.label(), second.label())
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<usize> {
    if dim == 0 {
        Err(Error::Input("dimension must be at least 1".into()))
    } else {
        Ok(dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    MulAbs(MulAbs),
    DStar(DStar),
    Exp(usize, ExpMetric),
    ComplexExp(usize, ComplexExpMetric),
    Segment,
    Function(Vec<f64>),
    Product(Box<Space>, Box<Space>),
}

/// A built [`SpaceSpec`], usable as a metric on coordinate lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    spec: SpaceSpec,
    kind: Kind,
}

impl Space {
    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    /// Number of coordinates per point.
    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::MulAbs(_) => 1,
            Kind::DStar(m) => m.dim(),
            Kind::Exp(n, _) => *n,
            Kind::ComplexExp(n, _) => 2 * n,
            Kind::Segment => 2,
            Kind::Function(grid) => grid.len(),
            Kind::Product(a, b) => a.dim() + b.dim(),
        }
    }

    /// True when every coordinate must be positive.
    pub fn requires_positive(&self) -> bool {
        match &self.kind {
            Kind::MulAbs(_) | Kind::DStar(_) | Kind::Segment | Kind::Function(_) => true,
            Kind::Exp(..) | Kind::ComplexExp(..) => false,
            Kind::Product(a, b) => a.requires_positive() && b.requires_positive(),
        }
    }

    fn check_shape(&self, p: &[f64]) -> Result<()> {
        if p.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.dim(),
                found: p.len(),
            })
        }
    }

    /// The sampler matching this space.
    pub fn sampler(&self) -> SpaceSampler {
        SpaceSampler {
            kind: match &self.kind {
                Kind::MulAbs(m) => {
                    let (lo, hi) = m.bounds().unwrap_or(POSITIVE_RANGE);
                    SamplerKind::Positive(LogUniform::new(lo, hi))
                }
                Kind::DStar(m) => SamplerKind::PosVec(PosVecSampler {
                    dim: m.dim(),
                    lo: POSITIVE_RANGE.0,
                    hi: POSITIVE_RANGE.1,
                }),
                Kind::Exp(n, _) => SamplerKind::RealVec(RealVecSampler {
                    dim: *n,
                    lo: REAL_RANGE.0,
                    hi: REAL_RANGE.1,
                }),
                Kind::ComplexExp(n, _) => SamplerKind::ComplexVec(ComplexVecSampler {
                    dim: *n,
                    lo: REAL_RANGE.0,
                    hi: REAL_RANGE.1,
                }),
                Kind::Segment => SamplerKind::Segment(SegmentSampler),
                Kind::Function(grid) => SamplerKind::Function(FunctionSampler::new(grid.clone())),
                Kind::Product(a, b) => {
                    SamplerKind::Product(Box::new(a.sampler()), Box::new(b.sampler()), a.dim())
                }
            },
        }
    }
}

fn complex_from(p: &[f64]) -> ComplexVec {
    ComplexVec(p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

impl MultiplicativeMetric for Space {
    type Point = Vec<f64>;

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<MulDistance> {
        self.check_shape(x)?;
        self.check_shape(y)?;
        match &self.kind {
            Kind::MulAbs(m) => m.distance(&x[0], &y[0]),
            Kind::DStar(m) => m.distance(&PosVec::new(x.clone())?, &PosVec::new(y.clone())?),
            Kind::Exp(_, m) => m.distance(&RealVec(x.clone()), &RealVec(y.clone())),
            Kind::ComplexExp(_, m) => m.distance(&complex_from(x), &complex_from(y)),
            Kind::Segment => SegmentMetric.distance(
                &SegmentPoint::new(x[0], x[1])?,
                &SegmentPoint::new(y[0], y[1])?,
            ),
            Kind::Function(grid) => SupMetric.distance(
                &SampledPosFunction::new(grid.clone(), x.clone())?,
                &SampledPosFunction::new(grid.clone(), y.clone())?,
            ),
            Kind::Product(a, b) => {
                let k = a.dim();
                let first = a.distance(&x[..k].to_vec(), &y[..k].to_vec())?;
                let second = b.distance(&x[k..].to_vec(), &y[k..].to_vec())?;
                Ok(first.product(second))
            }
        }
    }

    fn validate(&self, p: &Vec<f64>) -> Result<()> {
        self.check_shape(p)?;
        match &self.kind {
            Kind::MulAbs(m) => m.validate(&p[0]),
            Kind::DStar(m) => m.validate(&PosVec::new(p.clone())?),
            Kind::Exp(..) | Kind::ComplexExp(..) => {
                if p.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::Domain("non-finite coordinate".into()))
                }
            }
            Kind::Segment => SegmentPoint::new(p[0], p[1]).map(|_| ()),
            Kind::Function(grid) => SampledPosFunction::new(grid.clone(), p.clone()).map(|_| ()),
            Kind::Product(a, b) => {
                let k = a.dim();
                a.validate(&p[..k].to_vec())?;
                b.validate(&p[k..].to_vec())
            }
        }
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Positive(LogUniform),
    PosVec(PosVecSampler),
    RealVec(RealVecSampler),
    ComplexVec(ComplexVecSampler),
    Segment(SegmentSampler),
    Function(FunctionSampler),
    Product(Box<SpaceSampler>, Box<SpaceSampler>, usize),
}

/// Draws coordinate-list points of a [`Space`].
#[derive(Debug, Clone)]
pub struct SpaceSampler {
    kind: SamplerKind,
}

impl PointSampler for SpaceSampler {
    type Point = Vec<f64>;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Vec<f64>> {
        match &mut self.kind {
            SamplerKind::Positive(s) => s.sample(rng).map(|p| vec![p]),
            SamplerKind::PosVec(s) => s.sample(rng).map(|p| p.coords()),
            SamplerKind::RealVec(s) => s.sample(rng).map(|p| p.coords()),
            SamplerKind::ComplexVec(s) => s.sample(rng).map(|p| p.coords()),
            SamplerKind::Segment(s) => s.sample(rng).map(|p| p.coords()),
            SamplerKind::Function(s) => s.sample(rng).map(|p| p.coords()),
            SamplerKind::Product(a, b, _) => {
                let mut p = a.sample(rng)?;
                p.extend(b.sample(rng)?);
                Some(p)
            }
        }
    }

    fn simple_points(&self) -> Vec<Vec<f64>> {
        match &self.kind {
            SamplerKind::Positive(s) => s.simple_points().into_iter().map(|p| vec![p]).collect(),
            SamplerKind::PosVec(s) => s.simple_points().iter().map(|p| p.coords()).collect(),
            SamplerKind::RealVec(s) => s.simple_points().iter().map(|p| p.coords()).collect(),
            SamplerKind::ComplexVec(s) => s.simple_points().iter().map(|p| p.coords()).collect(),
            SamplerKind::Segment(s) => s.simple_points().iter().map(|p| p.coords()).collect(),
            SamplerKind::Function(s) => s.simple_points().iter().map(|p| p.coords()).collect(),
            SamplerKind::Product(a, b, _) => {
                let second = b.simple_points();
                a.simple_points()
                    .into_iter()
                    .flat_map(|p| {
                        second.iter().map(move |q| {
                            let mut r = p.clone();
                            r.extend_from_slice(q);
                            r
                        })
                    })
                    .collect()
            }
        }
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &Vec<f64>, rng: &mut R) -> Option<Vec<f64>> {
        match &mut self.kind {
            SamplerKind::Positive(s) => s.nearby(p.first()?, rng).map(|q| vec![q]),
            SamplerKind::PosVec(s) => s
                .nearby(&PosVec::new(p.clone()).ok()?, rng)
                .map(|q| q.coords()),
            SamplerKind::RealVec(s) => s.nearby(&RealVec(p.clone()), rng).map(|q| q.coords()),
            SamplerKind::ComplexVec(s) => s.nearby(&complex_from(p), rng).map(|q| q.coords()),
            SamplerKind::Segment(s) => s
                .nearby(&SegmentPoint::new(*p.first()?, *p.get(1)?).ok()?, rng)
                .map(|q| q.coords()),
            SamplerKind::Function(s) => {
                let grid = s.grid().to_vec();
                s.nearby(&SampledPosFunction::new(grid, p.clone()).ok()?, rng)
                    .map(|q| q.coords())
            }
            SamplerKind::Product(a, _, k) => {
                let k = *k;
                let mut q = a.nearby(&p[..k].to_vec(), rng)?;
                q.extend_from_slice(&p[k..]);
                Some(q)
            }
        }
    }
}

fn base_label(base: f64) -> String {
    if base == std::f64::consts::E {
        "e".into()
    } else {
        base.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::seeded_rng;

    #[test]
    fn dims_and_shapes() {
        let cases = [
            ("mul-abs", 1),
            ("d-star", 3),
            ("line", 1),
            ("segment", 2),
            ("function", DEFAULT_GRID_POINTS),
            ("product", 4),
        ];
        for (name, dim) in cases {
            let space = SpaceSpec::from_name(name, 3, 2.0, false)
                .unwrap()
                .build()
                .unwrap();
            assert_eq!(space.dim(), dim, "{name}");
            let mut s = space.sampler();
            let mut rng = seeded_rng(5);
            for _ in 0..20 {
                let p = s.sample(&mut rng).unwrap();
                space.validate(&p).unwrap();
                assert_eq!(space.distance(&p, &p).unwrap().log(), 0.0);
            }
        }
        let c = SpaceSpec::from_name("exp", 2, 2.0, true)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(c.dim(), 4);
        assert!(matches!(
            c.distance(&vec![0.0; 3], &vec![0.0; 4]),
            Err(Error::Shape {
                expected: 4,
                found: 3
            })
        ));
        assert!(SpaceSpec::from_name("hilbert", 1, 2.0, false).is_err());
    }

    #[test]
    fn matches_typed_metrics() {
        let c = SpaceSpec::from_name("exp", 1, 2.0, true)
            .unwrap()
            .build()
            .unwrap();
        assert!(
            (c.distance(&vec![0.0, 1.0], &vec![0.0, 0.0])
                .unwrap()
                .value()
                - 2.0)
                .abs()
                < 1e-15
        );
        let p = SpaceSpec::from_name("product", 1, 2.0, false)
            .unwrap()
            .build()
            .unwrap();
        let d = p.distance(&vec![2.0, 1.0], &vec![1.0, 3.0]).unwrap();
        assert!((d.value() - 6.0).abs() < 1e-14);
        let seg = SpaceSpec::Segment.build().unwrap();
        assert!(seg.validate(&vec![2.0, 2.0]).is_err());
    }

    #[test]
    fn toml_shape() {
        let spec = SpaceSpec::MulAbs {
            interval: Some([0.1, 1.0]),
        };
        #[derive(Serialize, Deserialize)]
        struct Wrap {
            space: SpaceSpec,
        }
        let text = toml::to_string(&Wrap {
            space: spec.clone(),
        })
        .unwrap();
        assert!(text.contains("type = \"mul-abs\""), "{text}");
        let back: Wrap = toml::from_str(&text).unwrap();
        assert_eq!(back.space, spec);
    }
}
