//! Lorentz and Lebesgue norms of nonnegative simple functions.
//!
//! Convention: `‖f‖_{s,r} = (∫₀^∞ (t^{1/s} f*(t))^r dt/t)^{1/r}` and
//! `‖f‖_{s,∞} = sup_t t^{1/s} f*(t)`, so that `‖f‖_{p,p} = ‖f‖_p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Dim;
use crate::xray::sets::{AxisBox, BoxUnionSet};

/// One term `a·χ_A` of a simple function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub support: BoxUnionSet,
}

/// `Σ aᵢ·χ_{Aᵢ}` with positive weights and pairwise disjoint supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleFunction {
    dim: Dim,
    terms: Vec<Term>,
}

impl SimpleFunction {
    pub fn new(dim: Dim, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if !(t.weight > 0.0) || !t.weight.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "simple-function weights must be finite and positive, got {}",
                    t.weight
                )));
            }
            if t.support.dim() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim.get(),
                    got: t.support.dim().get(),
                });
            }
        }
        // Disjointness across terms: the union of all boxes must itself be a
        // valid box union.
        let all: Vec<AxisBox> = terms.iter().flat_map(|t| t.support.boxes().iter().cloned()).collect();
        BoxUnionSet::new(dim, all)
            .map_err(|_| Error::InvalidArgument("simple-function supports overlap".into()))?;
        Ok(Self { dim, terms })
    }

    /// Skips the disjointness check; callers guarantee it by construction.
    pub(crate) fn from_disjoint_terms(dim: Dim, terms: Vec<Term>) -> Self {
        Self { dim, terms }
    }

    pub fn zero(dim: Dim) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn indicator(set: BoxUnionSet) -> Self {
        let dim = set.dim();
        Self {
            dim,
            terms: vec![Term { weight: 1.0, support: set }],
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .find(|t| t.support.contains(x))
            .map_or(0.0, |t| t.weight)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                weight: t.weight * lambda,
                support: t.support.clone(),
            })
            .collect();
        let out = Self { dim: self.dim, terms };
        if lambda > 0.0 && lambda.is_finite() {
            Ok(out)
        } else {
            Err(Error::InvalidArgument(format!("scale factor must be positive, got {lambda}")))
        }
    }

    /// Every support pushed through the nonisotropic dilation.
    pub fn dilate(&self, delta: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    weight: t.weight,
                    support: t.support.dilate(delta),
                })
                .collect(),
        }
    }

    /// `(weight, measure)` per term.
    pub fn levels(&self) -> Vec<(f64, f64)> {
        self.terms.iter().map(|t| (t.weight, t.support.measure())).collect()
    }
}

/// `|{x : f(x) > λ}|`.
pub fn distribution(f: &SimpleFunction, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("distribution level must be ≥ 0, got {lambda}")));
    }
    Ok(f
        .terms
        .iter()
        .filter(|t| t.weight > lambda)
        .map(|t| t.support.measure())
        .sum())
}

/// Decreasing rearrangement `f*` of a simple function: value `values[i]` on
/// `[breaks[i−1], breaks[i])` with `breaks[−1] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepProfile {
    /// Build from arbitrary `(weight, measure)` pairs. Null levels are
    /// dropped and equal weights merge into one step.
    pub fn from_levels(mut levels: Vec<(f64, f64)>) -> Self {
        levels.retain(|&(w, m)| w > 0.0 && m > 0.0);
        levels.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut breaks: Vec<f64> = Vec::with_capacity(levels.len());
        let mut values: Vec<f64> = Vec::with_capacity(levels.len());
        let mut total = 0.0;
        for (w, m) in levels {
            total += m;
            if values.last() == Some(&w) {
                *breaks.last_mut().unwrap() = total;
            } else {
                values.push(w);
                breaks.push(total);
            }
        }
        Self { breaks, values }
    }

    pub fn support_measure(&self) -> f64 {
        self.breaks.last().copied().unwrap_or(0.0)
    }

    fn steps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let lefts = std::iter::once(0.0).chain(self.breaks.iter().copied());
        lefts
            .zip(self.breaks.iter().copied())
            .zip(self.values.iter().copied())
            .map(|((a, b), v)| (a, b, v))
    }
}

pub fn rearrangement(f: &SimpleFunction) -> StepProfile {
    StepProfile::from_levels(f.levels())
}

/// Secondary Lorentz index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SecondIndex {
    Finite(f64),
    Infinite,
}

impl From<f64> for SecondIndex {
    fn from(r: f64) -> Self {
        if r.is_infinite() {
            SecondIndex::Infinite
        } else {
            SecondIndex::Finite(r)
        }
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || v.is_nan() {
        return Err(Error::InvalidExponent(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `‖f‖_{s,r}` from a step profile.
pub fn lorentz_norm_profile(profile: &StepProfile, s: f64, r: SecondIndex) -> Result<f64> {
    check_exponent("s", s)?;
    match r {
        SecondIndex::Infinite => Ok(profile
            .steps()
            .map(|(_, b, v)| v * b.powf(1.0 / s))
            .fold(0.0, f64::max)),
        SecondIndex::Finite(r) => {
            check_exponent("r", r)?;
            let e = r / s;
            let sum: f64 = profile
                .steps()
                .map(|(a, b, v)| v.powf(r) * (s / r) * (b.powf(e) - a.powf(e)))
                .sum();
            Ok(sum.powf(1.0 / r))
        }
    }
}

pub fn lorentz_norm(f: &SimpleFunction, s: f64, r: impl Into<SecondIndex>) -> Result<f64> {
    lorentz_norm_profile(&rearrangement(f), s, r.into())
}

/// `(Σ aᵢ^p |Aᵢ|)^{1/p}`.
pub fn lp_norm(f: &SimpleFunction, p: f64) -> Result<f64> {
    lp_norm_levels(&f.levels(), p)
}

pub fn lp_norm_levels(levels: &[(f64, f64)], p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let sum: f64 = levels.iter().map(|(w, m)| w.powf(p) * m).sum();
    Ok(sum.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim2() -> Dim {
        Dim::new(2).unwrap()
    }

    fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> BoxUnionSet {
        BoxUnionSet::single(AxisBox::new(vec![x0, y0], vec![x1, y1]).unwrap()).unwrap()
    }

    /// `2χ_A + χ_B` with `|A| = 1`, `|B| = 3`.
    fn two_level() -> SimpleFunction {
        SimpleFunction::new(
            dim2(),
            vec![
                Term {
                    weight: 2.0,
                    support: rect(0.0, 1.0, 0.0, 1.0),
                },
                Term {
                    weight: 1.0,
                    support: rect(1.0, 4.0, 0.0, 1.0),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_terms() {
        let overlap = SimpleFunction::new(
            dim2(),
            vec![
                Term {
                    weight: 1.0,
                    support: rect(0.0, 1.0, 0.0, 1.0),
                },
                Term {
                    weight: 2.0,
                    support: rect(0.5, 1.5, 0.0, 1.0),
                },
            ],
        );
        assert!(overlap.is_err());
        let negative = SimpleFunction::new(
            dim2(),
            vec![Term {
                weight: -1.0,
                support: rect(0.0, 1.0, 0.0, 1.0),
            }],
        );
        assert!(negative.is_err());
    }

    #[test]
    fn distribution_examples() {
        let f = two_level();
        assert_eq!(distribution(&f, 1.5).unwrap(), 1.0);
        assert_eq!(distribution(&f, 2.0).unwrap(), 0.0);
        assert_eq!(distribution(&f, 0.0).unwrap(), 4.0);
        assert!(distribution(&f, -1.0).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        let p = rearrangement(&two_level());
        assert_eq!(p.values, vec![2.0, 1.0]);
        assert_eq!(p.breaks, vec![1.0, 4.0]);
        let single = rearrangement(&SimpleFunction::indicator(rect(0.0, 3.0, 0.0, 1.0)));
        assert_eq!((single.values, single.breaks), (vec![1.0], vec![3.0]));
        let tied = StepProfile::from_levels(vec![(1.0, 2.0), (3.0, 1.0), (1.0, 0.5)]);
        assert_eq!((tied.values, tied.breaks), (vec![3.0, 1.0], vec![1.0, 3.5]));
    }

    #[test]
    fn indicator_closed_forms() {
        let a = SimpleFunction::indicator(rect(0.0, 2.0, 0.0, 2.0));
        assert!((lorentz_norm(&a, 2.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((lorentz_norm(&a, 2.0, f64::INFINITY).unwrap() - 2.0).abs() < 1e-12);
        assert!((lp_norm(&a, 3.0).unwrap() - 4f64.powf(1.0 / 3.0)).abs() < 1e-12);
        for (s, r) in [(1.5f64, 0.7f64), (2.0, 3.0), (3.0, 1.5)] {
            let want = (s / r).powf(1.0 / r) * 4f64.powf(1.0 / s);
            assert!((lorentz_norm(&a, s, r).unwrap() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn lp_examples() {
        assert!((lp_norm(&two_level(), 2.0).unwrap() - 7f64.sqrt()).abs() < 1e-14);
        let scaled = two_level().scaled(3.0).unwrap();
        let want = 3.0 * lp_norm(&two_level(), 1.7).unwrap();
        assert!((lp_norm(&scaled, 1.7).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn rejects_bad_exponents() {
        let f = two_level();
        assert!(lorentz_norm(&f, 0.0, 1.0).is_err());
        assert!(lorentz_norm(&f, 2.0, -1.0).is_err());
        assert!(lp_norm(&f, 0.0).is_err());
    }

    #[test]
    fn nonisotropic_scaling_of_lp() {
        let d = Dim::new(3).unwrap();
        let f = SimpleFunction::indicator(BoxUnionSet::single(AxisBox::unit(d)).unwrap());
        let (delta, p) = (1.7f64, 1.5);
        let want = delta.powf(6.0 / p) * lp_norm(&f, p).unwrap();
        let got = lp_norm(&f.dilate(delta), p).unwrap();
        assert!((got - want).abs() < 1e-12 * want);
    }

    fn levels_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.01f64..10.0, 0.001f64..5.0), 1..12)
    }

    proptest! {
        #[test]
        fn lorentz_pp_equals_lp(levels in levels_strategy(), p in 0.3f64..6.0) {
            let profile = StepProfile::from_levels(levels.clone());
            let a = lorentz_norm_profile(&profile, p, SecondIndex::Finite(p)).unwrap();
            let b = lp_norm_levels(&levels, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }

        #[test]
        fn lorentz_homogeneous_and_monotone(levels in levels_strategy(), s in 0.5f64..4.0, r in 0.5f64..4.0, lambda in 0.1f64..10.0) {
            let base = lorentz_norm_profile(&StepProfile::from_levels(levels.clone()), s, SecondIndex::Finite(r)).unwrap();
            let scaled: Vec<_> = levels.iter().map(|&(w, m)| (w * lambda, m)).collect();
            let sc = lorentz_norm_profile(&StepProfile::from_levels(scaled), s, SecondIndex::Finite(r)).unwrap();
            prop_assert!((sc - lambda * base).abs() <= 1e-11 * lambda * base);
            let grown: Vec<_> = levels.iter().map(|&(w, m)| (w * 1.1, m * 1.2)).collect();
            let gr = lorentz_norm_profile(&StepProfile::from_levels(grown), s, SecondIndex::Finite(r)).unwrap();
            prop_assert!(gr >= base);
        }
    }
}
