use serde::Serialize;

use super::{ContractionKind, SelfMap};
use crate::error::{Error, Result};
use crate::metric::{MultiplicativeMetric, POINT_TOLERANCE_LOG};
use crate::sampler::{seeded_rng, PointSampler};

type Pair<P> = (P, P);

/// Largest observed contraction ratio and the pair attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaEstimate<P> {
    pub lambda_hat: f64,
    pub witness: (P, P),
    pub pairs_used: usize,
    pub pairs_skipped: usize,
}

/// Max over `pairs` of `ln d(fx, fy) / ln D(x, y)`, where `D` is `d(x, y)`
/// (Banach), `d(fx, x) · d(fy, y)` (Kannan) or `d(fx, y) · d(fy, x)`
/// (Chatterjea). Pairs with `ln D <= 1e-12` carry no information and are
/// skipped.
pub fn estimate_lambda_on_pairs<M, F, I>(
    metric: &M,
    map: &F,
    kind: ContractionKind,
    pairs: I,
) -> Result<LambdaEstimate<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
    I: IntoIterator<Item = (M::Point, M::Point)>,
{
    let mut best: Option<(f64, Pair<M::Point>)> = None;
    let mut used = 0;
    let mut skipped = 0;
    for (x, y) in pairs {
        let fx = map.apply(&x)?;
        let fy = map.apply(&y)?;
        let numerator = metric.distance(&fx, &fy)?.log();
        let denominator = match kind {
            ContractionKind::Banach => metric.distance(&x, &y)?.log(),
            ContractionKind::Kannan => {
                metric.distance(&fx, &x)?.log() + metric.distance(&fy, &y)?.log()
            }
            ContractionKind::Chatterjea => {
                metric.distance(&fx, &y)?.log() + metric.distance(&fy, &x)?.log()
            }
        };
        if denominator <= POINT_TOLERANCE_LOG {
            skipped += 1;
            continue;
        }
        used += 1;
        let ratio = numerator / denominator;
        if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            best = Some((ratio, (x, y)));
        }
    }
    match best {
        Some((lambda_hat, witness)) => Ok(LambdaEstimate {
            lambda_hat,
            witness,
            pairs_used: used,
            pairs_skipped: skipped,
        }),
        None => Err(Error::Estimation(format!(
            "all {skipped} sampled pairs were degenerate"
        ))),
    }
}

/// [`estimate_lambda_on_pairs`] over `n_pairs` seeded random pairs.
pub fn estimate_lambda<M, F, S>(
    metric: &M,
    map: &F,
    kind: ContractionKind,
    sampler: &mut S,
    n_pairs: usize,
    seed: u64,
) -> Result<LambdaEstimate<M::Point>>
where
    M: MultiplicativeMetric,
    F: SelfMap<M::Point> + ?Sized,
    S: PointSampler<Point = M::Point>,
{
    if n_pairs == 0 {
        return Err(Error::Input("need at least one pair".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        match (sampler.sample(&mut rng), sampler.sample(&mut rng)) {
            (Some(x), Some(y)) => pairs.push((x, y)),
            _ => break,
        }
    }
    estimate_lambda_on_pairs(metric, map, kind, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MulAbs;
    use crate::sampler::LogUniform;

    #[test]
    fn sqrt_is_one_half() {
        let m = MulAbs::new();
        let sqrt = |x: &f64| Ok(x.sqrt());
        let mut s = LogUniform::new(1e-3, 1e3);
        let est = estimate_lambda(&m, &sqrt, ContractionKind::Banach, &mut s, 1000, 3).unwrap();
        assert!((est.lambda_hat - 0.5).abs() < 1e-12);
        assert_eq!(est.pairs_used, 1000);
    }

    #[test]
    fn constant_is_zero() {
        let m = MulAbs::new();
        let constant = |_: &f64| Ok(2.5);
        let mut s = LogUniform::new(1e-3, 1e3);
        for kind in [
            ContractionKind::Banach,
            ContractionKind::Kannan,
            ContractionKind::Chatterjea,
        ] {
            let est = estimate_lambda(&m, &constant, kind, &mut s, 200, 9).unwrap();
            assert_eq!(est.lambda_hat, 0.0);
        }
    }

    #[test]
    fn degenerate_pairs_error() {
        let m = MulAbs::new();
        let id = |x: &f64| Ok(*x);
        let err = estimate_lambda_on_pairs(&m, &id, ContractionKind::Banach, vec![(2.0, 2.0)]);
        assert!(matches!(err, Err(Error::Estimation(_))));
        // identity has d(fx, x) = 1 everywhere, so Kannan ratios are undefined
        let err = estimate_lambda_on_pairs(&m, &id, ContractionKind::Kannan, vec![(1.0, 3.0)]);
        assert!(matches!(err, Err(Error::Estimation(_))));
    }

    #[test]
    fn witness_attains_max() {
        let m = MulAbs::new();
        // ratio depends on the pair: steeper away from 1
        let f = |x: &f64| Ok(x.powf(0.5 + 0.1 * x.ln().abs().min(1.0)));
        let pairs = vec![(1.0, 1.1), (2.0, 8.0), (1.0, 1.01)];
        let est = estimate_lambda_on_pairs(&m, &f, ContractionKind::Banach, pairs).unwrap();
        assert_eq!(est.witness, (2.0, 8.0));
    }
}
