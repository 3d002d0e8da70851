//! Critical exponents, the exponent triangle and nonisotropic dilations.

use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Dim, Point};

/// `(p_d, q_d) = (d(d+1)/(d²−d+2), (d+1)/(d−1))`.
pub fn critical_exponents(d: Dim) -> (Rational64, Rational64) {
    let d = d.get() as i64;
    (
        Rational64::new(d * (d + 1), d * d - d + 2),
        Rational64::new(d + 1, d - 1),
    )
}

pub fn critical_exponents_f64(d: Dim) -> (f64, f64) {
    let (p, q) = critical_exponents(d);
    (ratio_to_f64(p), ratio_to_f64(q))
}

pub fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `(1/p, 1/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p_inv: f64,
    pub q_inv: f64,
}

impl ExponentPair {
    pub fn new(p_inv: f64, q_inv: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_inv) || !(0.0..=1.0).contains(&q_inv) {
            return Err(Error::InvalidExponent(format!(
                "(1/p, 1/q) = ({p_inv}, {q_inv}) must lie in [0, 1]²"
            )));
        }
        Ok(Self { p_inv, q_inv })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

impl Membership {
    pub fn contains(self) -> bool {
        self != Membership::Outside
    }
}

/// Vertices `(1,1)`, `(0,0)`, `(1/p_d, 1/q_d)` of the closed triangle `Δ_d`.
pub fn region_vertices(d: Dim) -> [(Rational64, Rational64); 3] {
    let (p, q) = critical_exponents(d);
    let one = Rational64::from_integer(1);
    let zero = Rational64::from_integer(0);
    [(one, one), (zero, zero), (p.recip(), q.recip())]
}

fn big(r: Rational64) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

fn orient(a: &BigPoint, b: &BigPoint, p: &BigPoint) -> BigRational {
    (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0)
}

/// Exact membership of `pt` in `Δ_d`. Every `f64` is a dyadic rational, so
/// the three orientation tests run in exact arithmetic.
pub fn region_contains(d: Dim, pt: ExponentPair) -> Membership {
    let p = (
        BigRational::from_float(pt.p_inv).expect("finite"),
        BigRational::from_float(pt.q_inv).expect("finite"),
    );
    region_contains_exact(d, p)
}

pub fn region_contains_exact(d: Dim, p: (BigRational, BigRational)) -> Membership {
    classify(&region_vertices(d).map(|(x, y)| (big(x), big(y))), &p)
}

type BigPoint = (BigRational, BigRational);

fn classify(v: &[BigPoint; 3], p: &BigPoint) -> Membership {
    let signs: Vec<BigRational> = (0..3).map(|i| orient(&v[i], &v[(i + 1) % 3], p)).collect();
    let has_pos = signs.iter().any(|s| s.is_positive());
    let has_neg = signs.iter().any(|s| s.is_negative());
    if has_pos && has_neg {
        Membership::Outside
    } else if signs.iter().any(Zero::is_zero) {
        Membership::Boundary
    } else {
        Membership::Interior
    }
}

/// `δ∘y = (δy₁, δ²y₂, …, δ^d y_d)`.
pub fn nonisotropic_dilate(y: &[f64], delta: f64) -> Result<Point> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {delta}")));
    }
    let mut scale = 1.0;
    Ok(Point::new(
        y.iter()
            .map(|v| {
                scale *= delta;
                v * scale
            })
            .collect(),
    ))
}
