//! Superlevel sets `{x ∈ F : Xχ_E(x) ≥ θ}` on a grid over `F`, reported as
//! inner/outer measure brackets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sets::{AxisBox, BoxUnionSet, Interval};
use super::transform::x_indicator;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Cell {
    bx: AxisBox,
    center: f64,
    /// Min and max over the center and all corners.
    min: f64,
    max: f64,
}

/// `Xχ_E` sampled on `n^d` cells per box of `F`.
#[derive(Debug, Clone)]
pub struct SuperlevelGrid {
    dim: crate::geometry::Dim,
    cells: Vec<Cell>,
    /// Cells per row along the last axis; runs never cross rows.
    row: usize,
}

/// A thresholded grid: `inner ⊆ {Xχ_E ≥ θ} ∩ F` up to sampling, and
/// `outer_measure` counts every cell touched by the set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Superlevel {
    pub theta: f64,
    pub inner: BoxUnionSet,
    pub inner_measure: f64,
    pub outer_measure: f64,
}

impl SuperlevelGrid {
    pub fn new(e: &BoxUnionSet, f: &BoxUnionSet, range: &Interval, n: usize) -> Result<Self> {
        if e.dim() != f.dim() {
            return Err(Error::LengthMismatch {
                expected: e.dim().get(),
                got: f.dim().get(),
            });
        }
        Self::from_fn(f, n, |x| x_indicator(e, range, x))
    }

    /// Any nonnegative `eval` sampled on `n^d` cells per box of `f`.
    pub fn from_fn<V>(f: &BoxUnionSet, n: usize, eval: V) -> Result<Self>
    where
        V: Fn(&[f64]) -> f64 + Sync,
    {
        if n == 0 {
            return Err(Error::InvalidArgument("superlevel grid needs at least one cell per axis".into()));
        }
        let d = f.dim().get();
        let mut cells = Vec::new();
        for b in f.boxes() {
            let w: Vec<f64> = (0..d).map(|j| b.side(j) / n as f64).collect();
            let corners = lattice(b, &w, n + 1, &eval);
            let total = n.pow(d as u32);
            let mut block: Vec<Cell> = (0..total)
                .into_par_iter()
                .map(|idx| {
                    let ijk = unravel(idx, n, d);
                    let lo: Vec<f64> = (0..d).map(|j| b.lo[j] + ijk[j] as f64 * w[j]).collect();
                    let hi: Vec<f64> = (0..d)
                        .map(|j| if ijk[j] + 1 == n { b.hi[j] } else { lo[j] + w[j] })
                        .collect();
                    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, c)| 0.5 * (a + c)).collect();
                    let center = eval(&mid);
                    let (mut min, mut max) = (center, center);
                    for corner in 0..(1usize << d) {
                        let mut k = 0;
                        for (j, &i) in ijk.iter().enumerate() {
                            k = k * (n + 1) + i + (corner >> j & 1);
                        }
                        min = min.min(corners[k]);
                        max = max.max(corners[k]);
                    }
                    Cell {
                        bx: AxisBox { lo, hi },
                        center,
                        min,
                        max,
                    }
                })
                .collect();
            cells.append(&mut block);
        }
        Ok(Self { dim: f.dim(), cells, row: n })
    }

    /// Largest sampled value.
    pub fn max_value(&self) -> f64 {
        self.cells.iter().map(|c| c.max).fold(0.0, f64::max)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Midpoint estimate of `∫_F Xχ_E` on this grid.
    pub fn total(&self) -> f64 {
        self.cells.iter().map(|c| c.center * c.bx.volume()).sum()
    }

    /// Midpoint estimate of `T(E, F ∖ G_θ)` with `G_θ` the inner set.
    pub fn outside_integral(&self, theta: f64) -> f64 {
        self.cells
            .iter()
            .filter(|c| !(c.min >= theta))
            .map(|c| c.center * c.bx.volume())
            .sum()
    }

    pub fn at(&self, theta: f64) -> Superlevel {
        let mut boxes: Vec<AxisBox> = Vec::new();
        let mut inner_measure = 0.0;
        let mut outer_measure = 0.0;
        let last = self.dim.get() - 1;
        let mut open: Option<AxisBox> = None;
        for (i, c) in self.cells.iter().enumerate() {
            if c.max >= theta {
                outer_measure += c.bx.volume();
            }
            let inside = c.min >= theta;
            if inside {
                inner_measure += c.bx.volume();
                open = match open.take() {
                    Some(mut run) if i % self.row != 0 => {
                        run.hi[last] = c.bx.hi[last];
                        Some(run)
                    }
                    Some(run) => {
                        boxes.push(run);
                        Some(c.bx.clone())
                    }
                    None => Some(c.bx.clone()),
                };
            } else if let Some(run) = open.take() {
                boxes.push(run);
            }
        }
        boxes.extend(open);
        Superlevel {
            theta,
            inner: BoxUnionSet::from_disjoint(self.dim, boxes),
            inner_measure,
            outer_measure,
        }
    }

    /// Largest `θ` (by bisection on `[0, θ_max]`) with
    /// `T(E, F ∖ G_θ) ≤ ½ T(E, F)`.
    pub fn half_mass_threshold(&self) -> f64 {
        let half = 0.5 * self.total();
        let mut lo = 0.0;
        let mut hi = self.max_value();
        if self.outside_integral(hi) <= half {
            return hi;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.outside_integral(mid) <= half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

fn unravel(mut idx: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for j in (0..d).rev() {
        out[j] = idx % n;
        idx /= n;
    }
    out
}

/// Values of `f` on the `(m)^d` lattice `b.lo + i·w`, row-major.
fn lattice<F>(b: &AxisBox, w: &[f64], m: usize, f: &F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = b.dim();
    (0..m.pow(d as u32))
        .into_par_iter()
        .map(|idx| {
            let ijk = unravel(idx, m, d);
            let x: Vec<f64> = (0..d)
                .map(|j| if ijk[j] + 1 == m { b.hi[j] } else { b.lo[j] + ijk[j] as f64 * w[j] })
                .collect();
            f(&x)
        })
        .collect()
}

/// `{x ∈ F : Xχ_E(x) ≥ θ}` on an `n`-per-axis grid over each box of `F`.
pub fn superlevel_set(e: &BoxUnionSet, f: &BoxUnionSet, range: &Interval, theta: f64, n: usize) -> Result<Superlevel> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be ≥ 0, got {theta}")));
    }
    Ok(SuperlevelGrid::new(e, f, range, n)?.at(theta))
}

/// Superlevel-set size check at the half-mass threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperlevelReport {
    pub t: f64,
    pub measure_e: f64,
    pub measure_f: f64,
    /// `T / (|E|^{1/p} |F|^{1/q'})`.
    pub epsilon: f64,
    pub theta: f64,
    /// `θ / (ε |E|^{1/p} |F|^{1/q' − 1})`.
    pub c0: f64,
    pub g_inner: f64,
    pub g_outer: f64,
    /// `|G| / (ε^{q'} |F|)` from the inner and outer measures.
    pub ratio_inner: f64,
    pub ratio_outer: f64,
    /// `T(E, F ∖ G) / T(E, F)` at the chosen threshold.
    pub outside_fraction: f64,
}

pub fn superlevel_report(e: &BoxUnionSet, f: &BoxUnionSet, range: &Interval, p: f64, q: f64, n: usize) -> Result<SuperlevelReport> {
    if !(p >= 1.0) || !(q > 1.0) {
        return Err(Error::InvalidExponent(format!("need p ≥ 1 and q > 1, got p={p}, q={q}")));
    }
    let grid = SuperlevelGrid::new(e, f, range, n)?;
    let t = grid.total();
    if !(t > 0.0) {
        return Err(Error::ZeroBilinear);
    }
    let q_dual = q / (q - 1.0);
    let (me, mf) = (e.measure(), f.measure());
    let scale = me.powf(1.0 / p) * mf.powf(1.0 / q_dual);
    let epsilon = t / scale;
    let theta = grid.half_mass_threshold();
    let level = grid.at(theta);
    let denom = epsilon.powf(q_dual) * mf;
    Ok(SuperlevelReport {
        t,
        measure_e: me,
        measure_f: mf,
        epsilon,
        theta,
        c0: theta / (epsilon * scale / mf),
        g_inner: level.inner_measure,
        g_outer: level.outer_measure,
        ratio_inner: level.inner_measure / denom,
        ratio_outer: level.outer_measure / denom,
        outside_fraction: grid.outside_integral(theta) / t,
    })
}
