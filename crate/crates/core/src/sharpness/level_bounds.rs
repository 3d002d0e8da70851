//! Lower bounds on `|E'|` and `|F'|` from pointwise lower bounds on the
//! transform over a subset:
//!
//! * `Xχ_{E'} ≥ δ₁` on `G ⊆ F` gives
//!   `|E'| ≳ δ₁² (T(E,G)/|G|)^{d−2} (T(E,G)/|E|)^{d(d−1)/2}`;
//! * `X*χ_{F'} ≥ δ₂` on `H ⊆ E` gives
//!   `|F'| ≳ δ₂^d (T(H,F)/|F|)^{d−1} (T(H,F)/|H|)^{(d²−d+2)/2−d}`.
//!
//! The hypothesis is checked on a sample lattice of each box of `G` (or
//! `H`). [`FBoundVariant::OverF`] replaces `|H|` by `|F|` in the last
//! factor of the second bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xray::quadrature::QuadSpec;
use crate::xray::sets::{BoxUnionSet, Interval};
use crate::xray::superlevel::SuperlevelGrid;
use crate::xray::transform::{bilinear_form, dual_indicator, dual_window, x_indicator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// Bound on `|E'|` from `Xχ_{E'} ≥ δ₁` on `G`.
    E,
    /// Bound on `|F'|` from `X*χ_{F'} ≥ δ₂` on `H`.
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FBoundVariant {
    /// Last factor `(T(H,F)/|H|)^{(d²−d+2)/2−d}`.
    #[default]
    OverH,
    /// Last factor `(T(H,F)/|F|)^{(d²−d+2)/2−d}`.
    OverF,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelBoundReport {
    pub side: BoundSide,
    pub d: usize,
    /// `T(E, G)` or `T(H, F)`.
    pub t: f64,
    /// `|E'|` or `|F'|`.
    pub measure_target: f64,
    /// `|E|` or `|F|`.
    pub measure_base: f64,
    /// `|G|` or `|H|`.
    pub measure_level: f64,
    pub delta: f64,
    /// Minimum of the transform over the hypothesis sample lattice.
    pub sampled_min: f64,
    pub rhs: f64,
    /// `measure_target / rhs`; `+∞` when `δ = 0`.
    pub ratio: f64,
    pub variant: Option<FBoundVariant>,
}

/// Minimum of `eval` over the `3^d` lattice (corners, edge and face
/// midpoints, center) of every box of `set`; `+∞` for an empty set.
pub fn sampled_minimum<V>(set: &BoxUnionSet, eval: V) -> f64
where
    V: Fn(&[f64]) -> f64 + Sync,
{
    let d = set.dim().get();
    let points = 3usize.pow(d as u32);
    set.boxes()
        .par_iter()
        .map(|b| {
            (0..points)
                .map(|mut idx| {
                    let x: Vec<f64> = (0..d)
                        .map(|j| {
                            let k = idx % 3;
                            idx /= 3;
                            b.lo[j] + 0.5 * k as f64 * b.side(j)
                        })
                        .collect();
                    eval(&x) + 0.0
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn resolve_delta(delta: Option<f64>, sampled_min: f64) -> Result<f64> {
    match delta {
        None => Ok(sampled_min),
        Some(d) if !(d >= 0.0) => Err(Error::InvalidArgument(format!("δ must be ≥ 0, got {d}"))),
        Some(d) if d > sampled_min * (1.0 + 1e-12) => Err(Error::HypothesisFailed {
            min_value: sampled_min,
            delta: d,
        }),
        Some(d) => Ok(d),
    }
}

fn same_dims(sets: &[&BoxUnionSet]) -> Result<()> {
    let d = sets[0].dim();
    for s in &sets[1..] {
        if s.dim() != d {
            return Err(Error::LengthMismatch {
                expected: d.get(),
                got: s.dim().get(),
            });
        }
    }
    Ok(())
}

/// Checks `|E'| ≳ δ₁² (T(E,G)/|G|)^{d−2} (T(E,G)/|E|)^{d(d−1)/2}`.
/// `delta = None` uses the sampled minimum of `Xχ_{E'}` on `G`.
pub fn check_e_bound(
    e: &BoxUnionSet,
    e_prime: &BoxUnionSet,
    g: &BoxUnionSet,
    delta: Option<f64>,
    range: &Interval,
    quad: &QuadSpec,
) -> Result<LevelBoundReport> {
    same_dims(&[e, e_prime, g])?;
    let sampled_min = sampled_minimum(g, |x| x_indicator(e_prime, range, x));
    let delta = resolve_delta(delta, sampled_min)?;
    let t = bilinear_form(e, g, range, quad)?;
    if !(t > 0.0) {
        return Err(Error::ZeroBilinear);
    }
    let d = e.dim().get() as f64;
    let (me, mg) = (e.measure(), g.measure());
    let rhs = delta.powi(2) * (t / mg).powf(d - 2.0) * (t / me).powf(d * (d - 1.0) / 2.0);
    Ok(report(BoundSide::E, e, t, e_prime.measure(), me, mg, delta, sampled_min, rhs, None))
}

/// Checks `|F'| ≳ δ₂^d (T(H,F)/|F|)^{d−1} (T(H,F)/|·|)^{(d²−d+2)/2−d}` with
/// `|·|` chosen by `variant`. `delta = None` uses the sampled minimum of
/// `X*χ_{F'}` (including the `χ_I(y₁)` cutoff) on `H`.
#[allow(clippy::too_many_arguments)]
pub fn check_f_bound(
    h: &BoxUnionSet,
    f: &BoxUnionSet,
    f_prime: &BoxUnionSet,
    delta: Option<f64>,
    range: &Interval,
    quad: &QuadSpec,
    variant: FBoundVariant,
) -> Result<LevelBoundReport> {
    same_dims(&[h, f, f_prime])?;
    let sampled_min = match dual_window(f_prime, quad)? {
        Some(window) => sampled_minimum(h, |y| dual_indicator(f_prime, range, &window, y)),
        None => 0.0,
    };
    let delta = resolve_delta(delta, sampled_min)?;
    let t = bilinear_form(h, f, range, quad)?;
    if !(t > 0.0) {
        return Err(Error::ZeroBilinear);
    }
    let d = f.dim().get() as f64;
    let (mf, mh) = (f.measure(), h.measure());
    let last = match variant {
        FBoundVariant::OverH => mh,
        FBoundVariant::OverF => mf,
    };
    let rhs = delta.powf(d) * (t / mf).powf(d - 1.0) * (t / last).powf((d * d - d + 2.0) / 2.0 - d);
    Ok(report(BoundSide::F, f, t, f_prime.measure(), mf, mh, delta, sampled_min, rhs, Some(variant)))
}

#[allow(clippy::too_many_arguments)]
fn report(
    side: BoundSide,
    base: &BoxUnionSet,
    t: f64,
    measure_target: f64,
    measure_base: f64,
    measure_level: f64,
    delta: f64,
    sampled_min: f64,
    rhs: f64,
    variant: Option<FBoundVariant>,
) -> LevelBoundReport {
    LevelBoundReport {
        side,
        d: base.dim().get(),
        t,
        measure_target,
        measure_base,
        measure_level,
        delta,
        sampled_min,
        rhs,
        ratio: if rhs > 0.0 { measure_target / rhs } else { f64::INFINITY },
        variant,
    }
}

/// Fractions of the largest sampled value used as thresholds in
/// [`shrinking_sweep`].
pub const SWEEP_FRACTIONS: [f64; 5] = [0.2, 0.35, 0.5, 0.65, 0.8];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub theta: f64,
    pub report: LevelBoundReport,
}

/// Finest grid tried by [`shrinking_sweep`], cells per axis per box.
pub fn max_sweep_cells(d: usize) -> usize {
    match d {
        2 => 512,
        3 => 128,
        _ => 16,
    }
}

/// Bounds along a decreasing family of level sets. For [`BoundSide::E`]
/// the family is `G_θ = {x ∈ F : Xχ_E ≥ θ}` with `E' = E`; for
/// [`BoundSide::F`] it is `H_θ = {y ∈ E : X*χ_F ≥ θ}` with `F' = F`. Each
/// level set is the inner grid set, starting at `n` cells per axis per box
/// and doubling until every level is nonempty; `δ` is the sampled minimum
/// on it.
pub fn shrinking_sweep(
    side: BoundSide,
    e: &BoxUnionSet,
    f: &BoxUnionSet,
    range: &Interval,
    quad: &QuadSpec,
    n: usize,
    variant: FBoundVariant,
) -> Result<Vec<SweepStep>> {
    same_dims(&[e, f])?;
    let cap = max_sweep_cells(e.dim().get()).max(n);
    let mut cells = n;
    let levels = loop {
        let grid = match side {
            BoundSide::E => SuperlevelGrid::new(e, f, range, cells)?,
            BoundSide::F => {
                let window = dual_window(f, quad)?.ok_or(Error::ZeroBilinear)?;
                SuperlevelGrid::from_fn(e, cells, |y| dual_indicator(f, range, &window, y))?
            }
        };
        let top = grid.max_value();
        if !(top > 0.0) {
            return Err(Error::ZeroBilinear);
        }
        let levels: Vec<(f64, BoxUnionSet)> = SWEEP_FRACTIONS
            .iter()
            .map(|frac| {
                let theta = frac * top;
                (theta, grid.at(theta).inner)
            })
            .collect();
        if levels.iter().all(|(_, g)| !g.is_empty()) {
            break levels;
        }
        if cells >= cap {
            return Err(Error::InvalidArgument(format!(
                "a level set is empty even on a {cells}-cell grid"
            )));
        }
        cells *= 2;
    };
    levels
        .into_iter()
        .map(|(theta, level)| {
            let report = match side {
                BoundSide::E => check_e_bound(e, e, &level, None, range, quad)?,
                BoundSide::F => check_f_bound(&level, f, f, None, range, quad, variant)?,
            };
            Ok(SweepStep { theta, report })
        })
        .collect()
}
