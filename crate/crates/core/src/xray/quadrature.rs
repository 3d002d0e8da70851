//! Outer-integral quadrature over box unions and sampled grid functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sets::{AxisBox, BoxUnionSet, Interval};
use crate::error::{Error, Result};
use crate::geometry::Dim;

/// Evaluations per parallel work item. Fixed so that the summation order,
/// and therefore every bit of the result, is independent of the worker count.
const CHUNK: usize = 4096;

/// Lower bound on cells per box axis, so that tiny boxes are still resolved.
pub const MIN_CELLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QuadMethod {
    #[default]
    Midpoint,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSpec {
    pub method: QuadMethod,
    /// Cell width for midpoint rules, both the outer tensor rule and the
    /// one-dimensional rule used on grid functions.
    pub step: f64,
    /// Total Monte Carlo sample budget for one outer integral.
    pub samples: usize,
    pub seed: u64,
    /// Truncation window for the dual integral over ℝ.
    pub window: Option<Interval>,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            method: QuadMethod::Midpoint,
            step: 1.0 / 256.0,
            samples: 200_000,
            seed: 0,
            window: None,
        }
    }
}

impl QuadSpec {
    pub fn midpoint(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: QuadMethod::MonteCarlo,
            samples,
            seed,
            ..Self::default()
        }
    }

    /// Default rule for outer integrals in dimension `d`: the midpoint rule
    /// on the first `d − 1` axes, coarser for d = 4, Monte Carlo from d = 5.
    pub fn for_dim(d: Dim) -> Self {
        match d.get() {
            0..=3 => Self::default(),
            4 => Self::midpoint(1.0 / 48.0),
            _ => Self {
                method: QuadMethod::MonteCarlo,
                ..Self::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidArgument(format!("quadrature step must be positive, got {}", self.step)));
        }
        if self.method == QuadMethod::MonteCarlo && self.samples == 0 {
            return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
        }
        Ok(())
    }

    pub fn with_step(&self, step: f64) -> Self {
        Self { step, ..self.clone() }
    }
}

/// Cells per axis used by the midpoint rule on `b`.
pub fn cells_per_axis(b: &AxisBox, step: f64) -> Vec<usize> {
    (0..b.dim())
        .map(|j| ((b.side(j) / step).ceil() as usize).max(MIN_CELLS))
        .collect()
}

fn cell_center(b: &AxisBox, n: &[usize], mut idx: usize, out: &mut [f64]) {
    for j in (0..n.len()).rev() {
        let i = idx % n[j];
        idx /= n[j];
        let w = b.side(j) / n[j] as f64;
        out[j] = b.lo[j] + (i as f64 + 0.5) * w;
    }
}

fn ordered_sum(parts: Vec<f64>) -> f64 {
    parts.into_iter().sum()
}

/// Tensor midpoint rule for `∫_b f`.
fn midpoint_box<F>(b: &AxisBox, step: f64, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = cells_per_axis(b, step);
    let total: usize = n.iter().product();
    let cell_volume = b.volume() / total as f64;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut x = vec![0.0; n.len()];
            let end = ((c + 1) * CHUNK).min(total);
            let mut s = 0.0;
            for idx in c * CHUNK..end {
                cell_center(b, &n, idx, &mut x);
                s += f(&x);
            }
            s
        })
        .collect();
    ordered_sum(parts) * cell_volume
}

fn monte_carlo_box<F>(b: &AxisBox, samples: usize, seed: u64, stream: u64, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((stream << 32) | c as u64);
            let end = ((c + 1) * CHUNK).min(samples);
            let mut x = vec![0.0; b.dim()];
            let mut s = 0.0;
            for _ in c * CHUNK..end {
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj = rng.gen_range(b.lo[j]..b.hi[j]);
                }
                s += f(&x);
            }
            s
        })
        .collect();
    ordered_sum(parts) * b.volume() / samples as f64
}

/// `∫_set f` under `quad`. Monte Carlo budgets are split across boxes in
/// proportion to volume.
pub fn integrate<F>(set: &BoxUnionSet, quad: &QuadSpec, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    quad.validate()?;
    let total = set.measure();
    let mut sum = 0.0;
    for (i, b) in set.boxes().iter().enumerate() {
        if b.volume() == 0.0 {
            continue;
        }
        sum += match quad.method {
            QuadMethod::Midpoint => midpoint_box(b, quad.step, &f),
            QuadMethod::MonteCarlo => {
                let n = ((quad.samples as f64 * b.volume() / total).round() as usize).max(64);
                monte_carlo_box(b, n, quad.seed, i as u64, &f)
            }
        };
    }
    Ok(sum)
}

/// `∫_set f` where `g(prefix, slab)` returns the exact integral of `f` over
/// the last coordinate, so only the first `d − 1` axes are discretised.
pub fn integrate_slabs<G>(set: &BoxUnionSet, quad: &QuadSpec, g: G) -> Result<f64>
where
    G: Fn(&[f64], &Interval) -> f64 + Sync,
{
    quad.validate()?;
    let total = set.measure();
    let mut sum = 0.0;
    for (i, b) in set.boxes().iter().enumerate() {
        if b.volume() == 0.0 {
            continue;
        }
        let last = b.dim() - 1;
        let slab = b.axis(last);
        let head = AxisBox {
            lo: b.lo[..last].to_vec(),
            hi: b.hi[..last].to_vec(),
        };
        let f = |p: &[f64]| g(p, &slab);
        sum += match quad.method {
            QuadMethod::Midpoint => midpoint_box(&head, quad.step, &f),
            QuadMethod::MonteCarlo => {
                let n = ((quad.samples as f64 * b.volume() / total).round() as usize).max(64);
                monte_carlo_box(&head, n, quad.seed, i as u64, &f)
            }
        };
    }
    Ok(sum)
}

/// Composite midpoint rule on an interval, at least `MIN_CELLS` cells.
pub fn midpoint_line<F: Fn(f64) -> f64>(range: &Interval, step: f64, f: F) -> f64 {
    let n = ((range.len() / step).ceil() as usize).max(MIN_CELLS);
    let h = range.len() / n as f64;
    (0..n).map(|i| f(range.lo + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Samples on a uniform grid with multilinear interpolation; zero outside
/// the grid box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    /// Row-major, last axis fastest.
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let d = origin.len();
        Dim::new(d)?;
        if spacing.len() != d || shape.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: spacing.len().min(shape.len()),
            });
        }
        if spacing.iter().any(|h| !(*h > 0.0)) || shape.iter().any(|&n| n < 2) {
            return Err(Error::InvalidArgument("grid needs positive spacing and ≥ 2 nodes per axis".into()));
        }
        let count: usize = shape.iter().product();
        if values.len() != count {
            return Err(Error::LengthMismatch {
                expected: count,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid values must be finite".into()));
        }
        Ok(Self {
            origin,
            spacing,
            shape,
            values,
        })
    }

    /// Sample `f` at the nodes of the grid spanning `region` with `nodes`
    /// points per axis.
    pub fn sample<F: Fn(&[f64]) -> f64>(region: &AxisBox, nodes: usize, f: F) -> Result<Self> {
        let d = region.dim();
        if nodes < 2 {
            return Err(Error::InvalidArgument("need at least 2 nodes per axis".into()));
        }
        let spacing: Vec<f64> = (0..d).map(|j| region.side(j) / (nodes - 1) as f64).collect();
        let count = nodes.pow(d as u32);
        let mut values = Vec::with_capacity(count);
        let mut x = vec![0.0; d];
        for mut idx in 0..count {
            for j in (0..d).rev() {
                x[j] = region.lo[j] + (idx % nodes) as f64 * spacing[j];
                idx /= nodes;
            }
            values.push(f(&x));
        }
        Self::new(region.lo.clone(), spacing, vec![nodes; d], values)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn extent(&self) -> AxisBox {
        let hi = (0..self.dim())
            .map(|j| self.origin[j] + self.spacing[j] * (self.shape[j] - 1) as f64)
            .collect();
        AxisBox::new(self.origin.clone(), hi).expect("grid extent is a valid box")
    }

    /// First-coordinate range where the function can be nonzero.
    pub fn first_axis_support(&self) -> Option<Interval> {
        let stride: usize = self.shape[1..].iter().product();
        let n0 = self.shape[0];
        let nonzero = |i: usize| self.values[i * stride..(i + 1) * stride].iter().any(|&v| v != 0.0);
        let first = (0..n0).find(|&i| nonzero(i))?;
        let last = (0..n0).rev().find(|&i| nonzero(i))?;
        let h = self.spacing[0];
        let lo = self.origin[0] + first.saturating_sub(1) as f64 * h;
        let hi = self.origin[0] + (last + 1).min(n0 - 1) as f64 * h;
        Some(Interval { lo, hi })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut base = 0usize;
        let mut frac = vec![0.0f64; d];
        let mut stride = vec![1usize; d];
        for j in (0..d.saturating_sub(1)).rev() {
            stride[j] = stride[j + 1] * self.shape[j + 1];
        }
        for j in 0..d {
            let u = (x[j] - self.origin[j]) / self.spacing[j];
            let last = (self.shape[j] - 1) as f64;
            if !(0.0..=last).contains(&u) {
                return 0.0;
            }
            let i = (u.floor() as usize).min(self.shape[j] - 2);
            frac[j] = u - i as f64;
            base += i * stride[j];
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut off = 0;
            for j in 0..d {
                if corner >> j & 1 == 1 {
                    w *= frac[j];
                    off += stride[j];
                } else {
                    w *= 1.0 - frac[j];
                }
            }
            if w != 0.0 {
                acc += w * self.values[base + off];
            }
        }
        acc
    }
}
