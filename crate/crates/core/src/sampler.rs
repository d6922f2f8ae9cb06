//! Seeded point sources for the verifier and the contraction estimator.
//!
//! Positive coordinates are drawn log-uniformly so both branches of `|·|*`
//! get exercised evenly; bounded real coordinates are drawn uniformly.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::metric::{ComplexVec, PosVec, RealVec, SampledPosFunction, SegmentPoint};

/// The generator behind every seeded operation.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A source of points of one space.
pub trait PointSampler {
    type Point;

    /// Draws one point; `None` once a finite source is exhausted.
    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Self::Point>;

    /// Hand-picked points that are tried exhaustively before random draws.
    fn simple_points(&self) -> Vec<Self::Point> {
        Vec::new()
    }

    /// A distinct point very close to `p`, used to probe the identity axiom.
    fn nearby<R: Rng + ?Sized>(&mut self, _p: &Self::Point, _rng: &mut R) -> Option<Self::Point> {
        None
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let t: f64 = rng.gen();
    (lo.ln() + t * (hi.ln() - lo.ln())).exp().clamp(lo, hi)
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    rng.gen_range(lo..=hi)
}

const NEARBY_SCALE: f64 = 1e-6;

fn nudge_positive<R: Rng + ?Sized>(rng: &mut R, p: f64, lo: f64, hi: f64) -> f64 {
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let q = p * (sign * NEARBY_SCALE).exp();
    if (lo..=hi).contains(&q) {
        q
    } else {
        p * (-sign * NEARBY_SCALE).exp()
    }
}

/// Log-uniform scalars in `[lo, hi] ⊂ R+`.
#[derive(Debug, Clone, Copy)]
pub struct LogUniform {
    pub lo: f64,
    pub hi: f64,
}

impl LogUniform {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(
            lo > 0.0 && lo <= hi,
            "invalid log-uniform range [{lo}, {hi}]"
        );
        LogUniform { lo, hi }
    }
}

impl PointSampler for LogUniform {
    type Point = f64;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<f64> {
        Some(log_uniform(rng, self.lo, self.hi))
    }

    fn simple_points(&self) -> Vec<f64> {
        [1.0, 2.0, 0.5, 4.0]
            .into_iter()
            .filter(|p| (self.lo..=self.hi).contains(p))
            .collect()
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &f64, rng: &mut R) -> Option<f64> {
        Some(nudge_positive(rng, *p, self.lo, self.hi))
    }
}

/// Uniform scalars in `[lo, hi] ⊂ R`.
#[derive(Debug, Clone, Copy)]
pub struct UniformReal {
    pub lo: f64,
    pub hi: f64,
}

impl UniformReal {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid range [{lo}, {hi}]");
        UniformReal { lo, hi }
    }
}

impl PointSampler for UniformReal {
    type Point = f64;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<f64> {
        Some(uniform(rng, self.lo, self.hi))
    }

    fn simple_points(&self) -> Vec<f64> {
        [0.0, 1.0, 2.0, -1.0]
            .into_iter()
            .filter(|p| (self.lo..=self.hi).contains(p))
            .collect()
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &f64, rng: &mut R) -> Option<f64> {
        let delta = NEARBY_SCALE * (1.0 + p.abs());
        let up = p + delta;
        Some(if up <= self.hi && rng.gen::<bool>() {
            up
        } else {
            p - delta
        })
    }
}

/// Points of `R+^n` with log-uniform coordinates.
#[derive(Debug, Clone, Copy)]
pub struct PosVecSampler {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl PointSampler for PosVecSampler {
    type Point = PosVec;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<PosVec> {
        let coords = (0..self.dim)
            .map(|_| log_uniform(rng, self.lo, self.hi))
            .collect();
        PosVec::new(coords).ok()
    }

    fn simple_points(&self) -> Vec<PosVec> {
        [1.0, 2.0]
            .into_iter()
            .filter(|c| (self.lo..=self.hi).contains(c))
            .filter_map(|c| PosVec::new(vec![c; self.dim]).ok())
            .collect()
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &PosVec, rng: &mut R) -> Option<PosVec> {
        let mut coords = p.as_slice().to_vec();
        let i = rng.gen_range(0..coords.len());
        coords[i] = nudge_positive(rng, coords[i], self.lo, self.hi);
        PosVec::new(coords).ok()
    }
}

/// Points of `R^n` with uniform coordinates.
#[derive(Debug, Clone, Copy)]
pub struct RealVecSampler {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl PointSampler for RealVecSampler {
    type Point = RealVec;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<RealVec> {
        Some(RealVec(
            (0..self.dim)
                .map(|_| uniform(rng, self.lo, self.hi))
                .collect(),
        ))
    }

    fn simple_points(&self) -> Vec<RealVec> {
        UniformReal::new(self.lo, self.hi)
            .simple_points()
            .into_iter()
            .map(|c| RealVec(vec![c; self.dim]))
            .collect()
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &RealVec, rng: &mut R) -> Option<RealVec> {
        let mut coords = p.0.clone();
        let i = rng.gen_range(0..coords.len());
        coords[i] = UniformReal::new(self.lo, self.hi).nearby(&coords[i], rng)?;
        Some(RealVec(coords))
    }
}

/// Points of `C^n` with real and imaginary parts uniform in `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexVecSampler {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl PointSampler for ComplexVecSampler {
    type Point = ComplexVec;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<ComplexVec> {
        let coords = (0..self.dim)
            .map(|_| {
                Complex64::new(
                    uniform(rng, self.lo, self.hi),
                    uniform(rng, self.lo, self.hi),
                )
            })
            .collect();
        Some(ComplexVec(coords))
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &ComplexVec, rng: &mut R) -> Option<ComplexVec> {
        let mut coords = p.0.clone();
        let i = rng.gen_range(0..coords.len());
        coords[i] += Complex64::new(0.0, NEARBY_SCALE);
        Some(ComplexVec(coords))
    }
}

/// Uniform points on the two unit-anchored segments.
#[derive(Debug, Clone, Copy, Default)]
pub struct SegmentSampler;

impl PointSampler for SegmentSampler {
    type Point = SegmentPoint;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<SegmentPoint> {
        let t = rng.gen_range(1.0..=2.0);
        if rng.gen::<bool>() {
            SegmentPoint::new(t, 1.0).ok()
        } else {
            SegmentPoint::new(1.0, t).ok()
        }
    }

    fn simple_points(&self) -> Vec<SegmentPoint> {
        [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)]
            .into_iter()
            .filter_map(|(u, v)| SegmentPoint::new(u, v).ok())
            .collect()
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &SegmentPoint, _rng: &mut R) -> Option<SegmentPoint> {
        let step = |t: f64| {
            if t + NEARBY_SCALE <= 2.0 {
                t + NEARBY_SCALE
            } else {
                t - NEARBY_SCALE
            }
        };
        if p.u() != 1.0 || p.v() == 1.0 {
            SegmentPoint::new(step(p.u()), 1.0).ok()
        } else {
            SegmentPoint::new(1.0, step(p.v())).ok()
        }
    }
}

/// Random smooth positive functions `exp(c0 + c1 sin(k t + phi) + c2 t)` on a grid.
#[derive(Debug, Clone)]
pub struct FunctionSampler {
    grid: Vec<f64>,
}

impl FunctionSampler {
    pub fn new(grid: Vec<f64>) -> Self {
        FunctionSampler { grid }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

impl PointSampler for FunctionSampler {
    type Point = SampledPosFunction;

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<SampledPosFunction> {
        let c0 = rng.gen_range(-2.0..2.0);
        let c1 = rng.gen_range(-1.0..1.0);
        let c2 = rng.gen_range(-1.0..1.0);
        let k = rng.gen_range(0.5..6.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let values = self
            .grid
            .iter()
            .map(|&t| (c0 + c1 * (k * t + phi).sin() + c2 * t).exp())
            .collect();
        SampledPosFunction::new(self.grid.clone(), values).ok()
    }

    fn nearby<R: Rng + ?Sized>(
        &mut self,
        p: &SampledPosFunction,
        rng: &mut R,
    ) -> Option<SampledPosFunction> {
        let mut values = p.values().to_vec();
        let j = rng.gen_range(0..values.len());
        values[j] *= NEARBY_SCALE.exp();
        SampledPosFunction::new(self.grid.clone(), values).ok()
    }
}

/// Independent draws from two samplers.
#[derive(Debug, Clone)]
pub struct ProductSampler<A, B> {
    pub first: A,
    pub second: B,
}

impl<A: PointSampler, B: PointSampler> PointSampler for ProductSampler<A, B>
where
    A::Point: Clone,
    B::Point: Clone,
{
    type Point = (A::Point, B::Point);

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Self::Point> {
        Some((self.first.sample(rng)?, self.second.sample(rng)?))
    }

    fn nearby<R: Rng + ?Sized>(&mut self, p: &Self::Point, rng: &mut R) -> Option<Self::Point> {
        Some((self.first.nearby(&p.0, rng)?, p.1.clone()))
    }
}

/// A finite, ordered source; exhausts after its last point.
#[derive(Debug, Clone)]
pub struct ListSampler<P> {
    points: Vec<P>,
    next: usize,
}

impl<P> ListSampler<P> {
    pub fn new(points: Vec<P>) -> Self {
        ListSampler { points, next: 0 }
    }
}

impl<P: Clone> PointSampler for ListSampler<P> {
    type Point = P;

    fn sample<R: Rng + ?Sized>(&mut self, _rng: &mut R) -> Option<P> {
        let p = self.points.get(self.next).cloned();
        self.next += 1;
        p
    }
}

/// `n * n` pairs from a uniform grid over `[lo, hi]^2`.
pub fn grid_pairs(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = (f64, f64)> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    let at = move |i: usize| if i + 1 == n { hi } else { lo + step * i as f64 };
    (0..n).flat_map(move |i| (0..n).map(move |j| (at(i), at(j))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_uniform_stays_in_range() {
        let mut rng = seeded_rng(7);
        let mut s = LogUniform::new(0.1, 1.0);
        for _ in 0..1000 {
            let x = s.sample(&mut rng).unwrap();
            assert!((0.1..=1.0).contains(&x));
            let y = s.nearby(&x, &mut rng).unwrap();
            assert!((0.1..=1.0).contains(&y) && y != x);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            let mut s = PosVecSampler {
                dim: 3,
                lo: 1e-3,
                hi: 1e3,
            };
            (0..10)
                .map(|_| s.sample(&mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
    }

    #[test]
    fn segment_samples_are_valid() {
        let mut rng = seeded_rng(1);
        let mut s = SegmentSampler;
        for _ in 0..500 {
            let p = s.sample(&mut rng).unwrap();
            assert!(p.u() == 1.0 || p.v() == 1.0);
            let q = s.nearby(&p, &mut rng).unwrap();
            assert_ne!(p, q);
        }
    }

    #[test]
    fn list_sampler_exhausts() {
        let mut rng = seeded_rng(0);
        let mut s = ListSampler::new(vec![1.0, 2.0]);
        assert_eq!(s.sample(&mut rng), Some(1.0));
        assert_eq!(s.sample(&mut rng), Some(2.0));
        assert_eq!(s.sample(&mut rng), None);
    }

    #[test]
    fn grid_pairs_cover_endpoints() {
        let pairs: Vec<_> = grid_pairs(-10.0, 10.0, 201).collect();
        assert_eq!(pairs.len(), 201 * 201);
        assert_eq!(pairs[0], (-10.0, -10.0));
        assert_eq!(*pairs.last().unwrap(), (10.0, 10.0));
        assert!(pairs.contains(&(0.0, 0.0)));
    }
}
