//! One pass of the refinement: keep the tuples whose fiber is at least a
//! fixed fraction of the weighted average fiber.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xray::sets::FiberSet;

pub const DEFAULT_KEEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Weighted<T> {
    pub item: T,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineStats {
    /// `Σ wᵢ|fᵢ| / Σ wᵢ`.
    pub average: f64,
    /// `keep · average`; every kept fiber reaches it.
    pub threshold: f64,
    /// Smallest kept fiber measure.
    pub achieved: f64,
    /// `Σ wᵢ|fᵢ|`.
    pub total_mass: f64,
    /// Mass of the discarded tuples, always below `keep · total_mass`.
    pub discarded_mass: f64,
    pub kept_count: usize,
    pub discarded_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    /// Index into the input and the fiber of each kept tuple, in input order.
    pub kept: Vec<(usize, FiberSet)>,
    pub stats: RefineStats,
}

pub fn refine_step<T, F>(current: &[Weighted<T>], fiber_fn: F, keep: f64) -> Result<Refined>
where
    T: Sync,
    F: Fn(&T) -> FiberSet + Sync,
{
    if !(keep > 0.0 && keep <= 1.0) {
        return Err(Error::InvalidArgument(format!("keep fraction must lie in (0, 1], got {keep}")));
    }
    let fibers: Vec<FiberSet> = current.par_iter().map(|t| fiber_fn(&t.item)).collect();
    let total_weight: f64 = current.iter().map(|t| t.weight).sum();
    let total_mass: f64 = current.iter().zip(&fibers).map(|(t, f)| t.weight * f.measure()).sum();
    if !(total_weight > 0.0) || !(total_mass > 0.0) {
        return Err(Error::EmptyRefinement);
    }
    let average = total_mass / total_weight;
    let threshold = keep * average;
    let mut kept = Vec::new();
    let mut discarded_mass = 0.0;
    let mut achieved = f64::INFINITY;
    for (i, (t, f)) in current.iter().zip(fibers).enumerate() {
        let m = f.measure();
        if m >= threshold {
            achieved = achieved.min(m);
            kept.push((i, f));
        } else {
            discarded_mass += t.weight * m;
        }
    }
    let discarded_count = current.len() - kept.len();
    Ok(Refined {
        stats: RefineStats {
            average,
            threshold,
            achieved,
            total_mass,
            discarded_mass,
            kept_count: kept.len(),
            discarded_count,
        },
        kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xray::sets::Interval;
    use proptest::prelude::*;

    fn fiber(len: f64) -> FiberSet {
        FiberSet::from_interval(Interval::new(0.0, len).unwrap())
    }

    fn tuples(lens: &[f64], weights: &[f64]) -> Vec<Weighted<f64>> {
        lens.iter()
            .zip(weights)
            .map(|(&item, &weight)| Weighted { item, weight })
            .collect()
    }

    #[test]
    fn uniform_fibers_keep_everything() {
        let cur = tuples(&[0.3; 8], &[0.125; 8]);
        let r = refine_step(&cur, |&l| fiber(l), 0.5).unwrap();
        assert_eq!(r.kept.len(), 8);
        assert_eq!(r.stats.discarded_mass, 0.0);
        assert!((r.stats.achieved - r.stats.average).abs() < 1e-15);
        assert!((r.stats.average - 0.3).abs() < 1e-15);
    }

    #[test]
    fn empty_fibers_are_exactly_the_discarded_ones() {
        let lens: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 0.0 } else { 0.4 }).collect();
        let cur = tuples(&lens, &[1.0; 10]);
        for keep in [0.1, 0.5, 1.0] {
            let r = refine_step(&cur, |&l| fiber(l), keep).unwrap();
            let kept: Vec<usize> = r.kept.iter().map(|(i, _)| *i).collect();
            assert_eq!(kept, vec![1, 3, 5, 7, 9]);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let cur = tuples(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(refine_step(&cur, |&l| fiber(l), 0.5), Err(Error::EmptyRefinement)));
        let cur = tuples(&[1.0], &[1.0]);
        assert!(refine_step(&cur, |&l| fiber(l), 0.0).is_err());
        assert!(refine_step(&cur, |&l| fiber(l), 1.5).is_err());
    }

    proptest! {
        #[test]
        fn retained_mass_bound(
            data in prop::collection::vec((0.0f64..1.0, 0.01f64..1.0), 1..12),
            keep in 0.05f64..1.0,
        ) {
            let lens: Vec<f64> = data.iter().map(|d| d.0).collect();
            let weights: Vec<f64> = data.iter().map(|d| d.1).collect();
            let cur = tuples(&lens, &weights);
            match refine_step(&cur, |&l| fiber(l), keep) {
                Ok(r) => {
                    // Exhaustive recount of the kept set.
                    let avg = r.stats.average;
                    for (i, l) in lens.iter().enumerate() {
                        let is_kept = r.kept.iter().any(|(j, _)| *j == i);
                        prop_assert_eq!(is_kept, *l >= keep * avg);
                    }
                    prop_assert!(r.stats.discarded_mass <= keep * r.stats.total_mass);
                    prop_assert!(r.stats.total_mass - r.stats.discarded_mass >= (1.0 - keep) * r.stats.total_mass - 1e-12);
                    prop_assert!(r.stats.achieved >= r.stats.threshold);
                }
                Err(e) => prop_assert!(matches!(e, Error::EmptyRefinement)),
            }
        }
    }
}
