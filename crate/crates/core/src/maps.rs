//! Named self-maps and the run-time map selector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fixed_point::SelfMap;
use crate::metric::SegmentPoint;

/// `x ↦ exp(x - 1 - x³/10)`, a self-map of `[0.1, 1]` whose fixed point is
/// `0.7411317711…`.
pub fn damped_exp(x: &f64) -> Result<f64> {
    Ok((x - 1.0 - x * x * x / 10.0).exp())
}

/// The square-root swap on the two-segment space:
/// `(x, 1) ↦ (1, √x)` and `(1, x) ↦ (√x, 1)`. Fixed point `(1, 1)`.
pub fn segment_swap(p: &SegmentPoint) -> Result<SegmentPoint> {
    if p.v() == 1.0 {
        SegmentPoint::new(1.0, p.u().sqrt())
    } else {
        SegmentPoint::new(p.v().sqrt(), 1.0)
    }
}

/// Ids accepted by [`MapSpec::Named`], with a one-line description each.
pub const NAMED_MAPS: [(&str, &str); 6] = [
    ("paper-scalar", "x -> exp(x - 1 - x^3/10)"),
    ("segment", "(x,1) -> (1,sqrt x), (1,x) -> (sqrt x,1)"),
    ("sqrt", "x -> sqrt(x), coordinatewise"),
    ("quarter", "x -> x/4, coordinatewise"),
    ("constant", "x -> 1/2, coordinatewise"),
    ("square", "x -> x^2, coordinatewise"),
];

/// A self-map chosen by registry id or given as a one-variable expression
/// applied to every coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapSpec {
    #[serde(rename = "id")]
    Named(String),
    Expr(Expr),
}

impl MapSpec {
    pub fn build(&self) -> Result<CoordMap> {
        match self {
            MapSpec::Named(id) => {
                let named = match id.as_str() {
                    "paper-scalar" => Named::DampedExp,
                    "segment" => Named::Segment,
                    "sqrt" => Named::Sqrt,
                    "quarter" => Named::Quarter,
                    "constant" => Named::Constant,
                    "square" => Named::Square,
                    other => return Err(Error::UnknownId(format!("map `{other}`"))),
                };
                Ok(CoordMap::Named(named))
            }
            MapSpec::Expr(e) => {
                if e.is_binary() {
                    return Err(Error::Input(format!("map expression `{e}` may only use x")));
                }
                Ok(CoordMap::Expr(e.clone()))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            MapSpec::Named(id) => id.clone(),
            MapSpec::Expr(e) => format!("x -> {e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Named {
    DampedExp,
    Segment,
    Sqrt,
    Quarter,
    Constant,
    Square,
}

/// A built [`MapSpec`] acting on coordinate lists.
#[derive(Debug, Clone, PartialEq)]
pub enum CoordMap {
    Named(Named),
    Expr(Expr),
}

fn scalar(p: &[f64]) -> Result<f64> {
    match p {
        [x] => Ok(*x),
        _ => Err(Error::Shape {
            expected: 1,
            found: p.len(),
        }),
    }
}

impl SelfMap<Vec<f64>> for CoordMap {
    fn apply(&self, p: &Vec<f64>) -> Result<Vec<f64>> {
        let each = |f: &dyn Fn(f64) -> f64| p.iter().map(|&c| f(c)).collect::<Vec<_>>();
        let out = match self {
            CoordMap::Named(Named::DampedExp) => vec![damped_exp(&scalar(p)?)?],
            CoordMap::Named(Named::Segment) => {
                if p.len() != 2 {
                    return Err(Error::Shape {
                        expected: 2,
                        found: p.len(),
                    });
                }
                let q = segment_swap(&SegmentPoint::new(p[0], p[1])?)?;
                vec![q.u(), q.v()]
            }
            CoordMap::Named(Named::Sqrt) => each(&f64::sqrt),
            CoordMap::Named(Named::Quarter) => each(&|c| c / 4.0),
            CoordMap::Named(Named::Constant) => each(&|_| 0.5),
            CoordMap::Named(Named::Square) => each(&|c| c * c),
            CoordMap::Expr(e) => each(&|c| e.eval(c)),
        };
        if out.iter().any(|c| c.is_nan()) {
            return Err(Error::Domain(format!("map produced NaN at {p:?}")));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_swap_orbit() {
        let p = SegmentPoint::new(2.0, 1.0).unwrap();
        let q = segment_swap(&p).unwrap();
        assert_eq!((q.u(), q.v()), (1.0, 2f64.sqrt()));
        let r = segment_swap(&q).unwrap();
        assert_eq!((r.u(), r.v()), (2f64.sqrt().sqrt(), 1.0));
        let one = SegmentPoint::new(1.0, 1.0).unwrap();
        assert_eq!(segment_swap(&one).unwrap(), one);
    }

    #[test]
    fn damped_exp_maps_interval_into_itself() {
        for i in 0..=900 {
            let x = 0.1 + i as f64 * 1e-3;
            let y = damped_exp(&x).unwrap();
            assert!((0.1..=1.0).contains(&y), "{x} -> {y}");
        }
    }

    #[test]
    fn named_and_expr_agree() {
        let named = MapSpec::Named("paper-scalar".into()).build().unwrap();
        let expr = MapSpec::Expr(Expr::parse("exp(x - 1 - x^3/10)").unwrap())
            .build()
            .unwrap();
        for x in [0.1, 0.37, 0.74, 1.0] {
            let a = named.apply(&vec![x]).unwrap()[0];
            let b = expr.apply(&vec![x]).unwrap()[0];
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn errors() {
        assert!(MapSpec::Named("nope".into()).build().is_err());
        assert!(MapSpec::Expr(Expr::parse("x*y").unwrap()).build().is_err());
        let sqrt = MapSpec::Named("sqrt".into()).build().unwrap();
        assert!(matches!(sqrt.apply(&vec![-1.0]), Err(Error::Domain(_))));
        let seg = MapSpec::Named("segment".into()).build().unwrap();
        assert!(seg.apply(&vec![1.5, 1.5]).is_err());
    }
}
