use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_positive, log_ratio, Coordinates, MulDistance, MultiplicativeMetric};
use crate::error::{Error, Result};

/// Default resolution for sampled functions on `[a, b]`.
pub const DEFAULT_GRID_POINTS: usize = 1024;

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape { expected, found })
    }
}

/// A point of `R+^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PosVec(Vec<f64>);

impl PosVec {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Input("a point needs at least one coordinate".into()));
        }
        for &c in &coords {
            check_positive(c)?;
        }
        Ok(PosVec(coords))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for PosVec {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        PosVec::new(v)
    }
}

impl From<PosVec> for Vec<f64> {
    fn from(p: PosVec) -> Self {
        p.0
    }
}

impl Coordinates for PosVec {
    fn coords(&self) -> Vec<f64> {
        self.0.clone()
    }
}

/// A point of `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealVec(pub Vec<f64>);

impl Coordinates for RealVec {
    fn coords(&self) -> Vec<f64> {
        self.0.clone()
    }
}

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVec(pub Vec<Complex64>);

impl Coordinates for ComplexVec {
    /// Interleaved `re, im` pairs.
    fn coords(&self) -> Vec<f64> {
        self.0.iter().flat_map(|z| [z.re, z.im]).collect()
    }
}

/// A strictly positive function on `[a, b]`, sampled on a fixed grid.
///
/// Stands in for an element of `C*[a, b]`; the caller is responsible for
/// choosing a grid fine enough to resolve the function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPosFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
}

/// `n` equally spaced abscissae from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Input(format!("need a < b, got [{a}, {b}]")));
    }
    if n < 2 {
        return Err(Error::Input("a grid needs at least two points".into()));
    }
    let step = (b - a) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|j| a + step * j as f64).collect();
    grid[n - 1] = b;
    Ok(grid)
}

impl SampledPosFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_len(grid.len(), values.len())?;
        if grid.len() < 2 {
            return Err(Error::Input("a grid needs at least two points".into()));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Input("grid must be strictly increasing".into()));
        }
        for &v in &values {
            check_positive(v)?;
        }
        Ok(SampledPosFunction { grid, values })
    }

    /// Samples `f` on `n` uniform points of `[a, b]`.
    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = uniform_grid(a, b, n)?;
        let values = grid.iter().map(|&x| f(x)).collect();
        SampledPosFunction::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Coordinates for SampledPosFunction {
    fn coords(&self) -> Vec<f64> {
        self.values.clone()
    }
}

/// A point of `{(x, 1) : 1 <= x <= 2} ∪ {(1, x) : 1 <= x <= 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct SegmentPoint {
    u: f64,
    v: f64,
}

impl SegmentPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        let in_range = |t: f64| (1.0..=2.0).contains(&t);
        if !(in_range(u) && in_range(v)) || (u != 1.0 && v != 1.0) {
            return Err(Error::Domain(format!(
                "({u}, {v}) is not on either unit-anchored segment"
            )));
        }
        Ok(SegmentPoint { u, v })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }
}

impl TryFrom<[f64; 2]> for SegmentPoint {
    type Error = Error;

    fn try_from(p: [f64; 2]) -> Result<Self> {
        SegmentPoint::new(p[0], p[1])
    }
}

impl From<SegmentPoint> for [f64; 2] {
    fn from(p: SegmentPoint) -> Self {
        [p.u, p.v]
    }
}

impl Coordinates for SegmentPoint {
    fn coords(&self) -> Vec<f64> {
        vec![self.u, self.v]
    }
}

/// `d*(x, y) = prod |x_i / y_i|*`, i.e. `ln d* = sum |ln x_i - ln y_i|`.
pub fn dist_pos_vec(x: &PosVec, y: &PosVec) -> Result<MulDistance> {
    check_len(x.len(), y.len())?;
    let rho = x.0.iter().zip(&y.0).map(|(a, b)| log_ratio(*a, *b)).sum();
    Ok(MulDistance::from_log_unchecked(rho))
}

fn check_base(base: f64) -> Result<()> {
    if base > 1.0 && base.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("base must exceed 1, got {base}")))
    }
}

/// `d_a(x, y) = a^{sum |x_i - y_i|}`.
pub fn dist_exp(x: &RealVec, y: &RealVec, base: f64) -> Result<MulDistance> {
    check_base(base)?;
    check_len(x.0.len(), y.0.len())?;
    let l1: f64 = x.0.iter().zip(&y.0).map(|(a, b)| (a - b).abs()).sum();
    Ok(MulDistance::from_log_unchecked(base.ln() * l1))
}

/// Complex extension of `d_a`, using the modulus of each coordinate difference.
pub fn dist_exp_complex(x: &ComplexVec, y: &ComplexVec, base: f64) -> Result<MulDistance> {
    check_base(base)?;
    check_len(x.0.len(), y.0.len())?;
    let l1: f64 = x.0.iter().zip(&y.0).map(|(a, b)| (a - b).norm()).sum();
    Ok(MulDistance::from_log_unchecked(base.ln() * l1))
}

/// Product metric `rho((x1, x2), (y1, y2)) = d(x1, y1) * d(x2, y2)`.
pub fn dist_product(d1: MulDistance, d2: MulDistance) -> MulDistance {
    d1.product(d2)
}

/// `max_j |f(t_j) / g(t_j)|*` over the shared grid.
pub fn dist_function_sup(f: &SampledPosFunction, g: &SampledPosFunction) -> Result<MulDistance> {
    check_len(f.grid.len(), g.grid.len())?;
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let rho = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| log_ratio(*a, *b))
        .fold(0.0, f64::max);
    Ok(MulDistance::from_log_unchecked(rho))
}

/// `(|a/c|* · |b/d|*)^{1/3}` on the two-segment space.
pub fn dist_segment(p: &SegmentPoint, q: &SegmentPoint) -> Result<MulDistance> {
    SegmentPoint::new(p.u, p.v)?;
    SegmentPoint::new(q.u, q.v)?;
    let rho = (log_ratio(p.u, q.u) + log_ratio(p.v, q.v)) / 3.0;
    Ok(MulDistance::from_log_unchecked(rho))
}

/// `(R+, |·|*)`, optionally restricted to a closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MulAbs {
    bounds: Option<(f64, f64)>,
}

impl MulAbs {
    /// All of `R+`.
    pub const UNBOUNDED: MulAbs = MulAbs { bounds: None };

    pub fn new() -> Self {
        MulAbs { bounds: None }
    }

    /// `[lo, hi] ⊂ R+` with the restricted metric.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        check_positive(lo)?;
        check_positive(hi)?;
        if lo > hi {
            return Err(Error::Input(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(MulAbs {
            bounds: Some((lo, hi)),
        })
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }
}

impl MultiplicativeMetric for MulAbs {
    type Point = f64;

    fn distance(&self, x: &f64, y: &f64) -> Result<MulDistance> {
        super::mabs_ratio(*x, *y)
    }

    fn validate(&self, p: &f64) -> Result<()> {
        check_positive(*p)?;
        match self.bounds {
            Some((lo, hi)) if !(lo..=hi).contains(p) => {
                Err(Error::Domain(format!("{p} lies outside [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }
}

/// `(R+^n, d*)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DStar {
    dim: usize,
}

impl DStar {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        Ok(DStar { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl MultiplicativeMetric for DStar {
    type Point = PosVec;

    fn distance(&self, x: &PosVec, y: &PosVec) -> Result<MulDistance> {
        check_len(self.dim, x.len())?;
        dist_pos_vec(x, y)
    }

    fn validate(&self, p: &PosVec) -> Result<()> {
        check_len(self.dim, p.len())
    }
}

/// `(R^n, d_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpMetric {
    base: f64,
}

impl ExpMetric {
    pub fn new(base: f64) -> Result<Self> {
        check_base(base)?;
        Ok(ExpMetric { base })
    }

    pub fn base(&self) -> f64 {
        self.base
    }
}

impl MultiplicativeMetric for ExpMetric {
    type Point = RealVec;

    fn distance(&self, x: &RealVec, y: &RealVec) -> Result<MulDistance> {
        dist_exp(x, y, self.base)
    }

    fn validate(&self, p: &RealVec) -> Result<()> {
        if p.0.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain("non-finite coordinate".into()))
        }
    }
}

/// `(C^n, d_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexExpMetric {
    base: f64,
}

impl ComplexExpMetric {
    pub fn new(base: f64) -> Result<Self> {
        check_base(base)?;
        Ok(ComplexExpMetric { base })
    }
}

impl MultiplicativeMetric for ComplexExpMetric {
    type Point = ComplexVec;

    fn distance(&self, x: &ComplexVec, y: &ComplexVec) -> Result<MulDistance> {
        dist_exp_complex(x, y, self.base)
    }
}

/// The ordinary line `(R, |·|)` carried as `d = e^{|x - y|}`, so that
/// ordinary convergence reads as multiplicative convergence of `d`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LineMetric;

impl MultiplicativeMetric for LineMetric {
    type Point = f64;

    fn distance(&self, x: &f64, y: &f64) -> Result<MulDistance> {
        let rho = (x - y).abs();
        if rho.is_nan() {
            return Err(Error::Domain("NaN coordinate".into()));
        }
        Ok(MulDistance::from_log_unchecked(rho))
    }
}

/// `X × Y` with `rho = d_X · d_Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductMetric<A, B> {
    pub first: A,
    pub second: B,
}

impl<A, B> ProductMetric<A, B> {
    pub fn new(first: A, second: B) -> Self {
        ProductMetric { first, second }
    }
}

impl<A: MultiplicativeMetric, B: MultiplicativeMetric> MultiplicativeMetric
    for ProductMetric<A, B>
{
    type Point = (A::Point, B::Point);

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<MulDistance> {
        Ok(dist_product(
            self.first.distance(&x.0, &y.0)?,
            self.second.distance(&x.1, &y.1)?,
        ))
    }

    fn validate(&self, p: &Self::Point) -> Result<()> {
        self.first.validate(&p.0)?;
        self.second.validate(&p.1)
    }
}

/// Sup metric on sampled positive functions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupMetric;

impl MultiplicativeMetric for SupMetric {
    type Point = SampledPosFunction;

    fn distance(&self, f: &SampledPosFunction, g: &SampledPosFunction) -> Result<MulDistance> {
        dist_function_sup(f, g)
    }
}

/// The two-segment space with the cube-root product metric.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SegmentMetric;

impl MultiplicativeMetric for SegmentMetric {
    type Point = SegmentPoint;

    fn distance(&self, p: &SegmentPoint, q: &SegmentPoint) -> Result<MulDistance> {
        dist_segment(p, q)
    }

    fn validate(&self, p: &SegmentPoint) -> Result<()> {
        SegmentPoint::new(p.u, p.v).map(|_| ())
    }
}
