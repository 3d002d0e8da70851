//! Intervals, axis-aligned boxes, finite box unions and 1-D fiber sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Dim;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] is not ordered and finite")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Intersection, `None` when empty or degenerate.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> [f64; 2] {
        [i.lo, i.hi]
    }
}

/// Axis-aligned box `[a₁,b₁] × … × [a_d,b_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::LengthMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidArgument("box corners must be ordered and finite".into()));
        }
        Ok(Self { lo, hi })
    }

    /// `[−r, r]^d`.
    pub fn cube(d: Dim, r: f64) -> Self {
        Self {
            lo: vec![-r; d.get()],
            hi: vec![r; d.get()],
        }
    }

    /// `[0, 1]^d`.
    pub fn unit(d: Dim) -> Self {
        Self {
            lo: vec![0.0; d.get()],
            hi: vec![1.0; d.get()],
        }
    }

    /// Box with the given center and half-widths.
    pub fn centered(center: &[f64], half: &[f64]) -> Self {
        Self {
            lo: center.iter().zip(half).map(|(c, h)| c - h).collect(),
            hi: center.iter().zip(half).map(|(c, h)| c + h).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn axis(&self, axis: usize) -> Interval {
        Interval {
            lo: self.lo[axis],
            hi: self.hi[axis],
        }
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.side(j)).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn overlap_volume(&self, other: &AxisBox) -> f64 {
        (0..self.dim())
            .map(|j| (self.hi[j].min(other.hi[j]) - self.lo[j].max(other.lo[j])).max(0.0))
            .product()
    }

    /// Intersection with the slab `{x : x_axis ∈ range}`, `None` if empty.
    pub fn clip_axis(&self, axis: usize, range: &Interval) -> Option<AxisBox> {
        let clipped = self.axis(axis).intersect(range)?;
        let mut out = self.clone();
        out.lo[axis] = clipped.lo;
        out.hi[axis] = clipped.hi;
        Some(out)
    }

    /// Image under the nonisotropic dilation `y ↦ (δy₁, δ²y₂, …, δ^d y_d)`.
    pub fn dilate(&self, delta: f64) -> AxisBox {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let mut scale = 1.0;
        for j in 0..self.dim() {
            scale *= delta;
            lo[j] *= scale;
            hi[j] *= scale;
        }
        AxisBox { lo, hi }
    }
}

/// Finite union of pairwise disjoint (up to null sets) axis-aligned boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxUnionRepr", into = "BoxUnionRepr")]
pub struct BoxUnionSet {
    dim: Dim,
    boxes: Vec<AxisBox>,
}

#[derive(Serialize, Deserialize)]
struct BoxUnionRepr {
    dim: usize,
    boxes: Vec<AxisBox>,
}

impl TryFrom<BoxUnionRepr> for BoxUnionSet {
    type Error = Error;
    fn try_from(r: BoxUnionRepr) -> Result<Self> {
        BoxUnionSet::new(Dim::new(r.dim)?, r.boxes)
    }
}

impl From<BoxUnionSet> for BoxUnionRepr {
    fn from(s: BoxUnionSet) -> Self {
        BoxUnionRepr {
            dim: s.dim.get(),
            boxes: s.boxes,
        }
    }
}

impl BoxUnionSet {
    /// Builds the set, rejecting boxes of the wrong dimension or with
    /// positive pairwise overlap.
    pub fn new(dim: Dim, boxes: Vec<AxisBox>) -> Result<Self> {
        for b in &boxes {
            if b.dim() != dim.get() {
                return Err(Error::LengthMismatch {
                    expected: dim.get(),
                    got: b.dim(),
                });
            }
        }
        let set = Self { dim, boxes };
        if let Some((i, j)) = set.first_overlap() {
            return Err(Error::InvalidArgument(format!("boxes {i} and {j} overlap")));
        }
        Ok(set)
    }

    /// Skips the overlap check; callers guarantee disjointness by
    /// construction (grid cells, dilations).
    pub(crate) fn from_disjoint(dim: Dim, boxes: Vec<AxisBox>) -> Self {
        Self { dim, boxes }
    }

    pub fn empty(dim: Dim) -> Self {
        Self { dim, boxes: Vec::new() }
    }

    pub fn single(b: AxisBox) -> Result<Self> {
        let dim = Dim::new(b.dim())?;
        Ok(Self { dim, boxes: vec![b] })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.iter().all(|b| b.volume() == 0.0)
    }

    pub fn measure(&self) -> f64 {
        self.boxes.iter().map(AxisBox::volume).sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    /// Hull of the first-coordinate projection, `None` if there are no boxes.
    pub fn first_axis_hull(&self) -> Option<Interval> {
        let lo = self.boxes.iter().map(|b| b.lo[0]).fold(f64::INFINITY, f64::min);
        let hi = self.boxes.iter().map(|b| b.hi[0]).fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn bounding_box(&self) -> Option<AxisBox> {
        let first = self.boxes.first()?;
        let mut lo = first.lo.clone();
        let mut hi = first.hi.clone();
        for b in &self.boxes[1..] {
            for j in 0..self.dim.get() {
                lo[j] = lo[j].min(b.lo[j]);
                hi[j] = hi[j].max(b.hi[j]);
            }
        }
        Some(AxisBox { lo, hi })
    }

    pub fn dilate(&self, delta: f64) -> BoxUnionSet {
        Self {
            dim: self.dim,
            boxes: self.boxes.iter().map(|b| b.dilate(delta)).collect(),
        }
    }

    /// Restriction to `{x : x_axis ∈ range}`.
    pub fn clip_axis(&self, axis: usize, range: &Interval) -> BoxUnionSet {
        Self {
            dim: self.dim,
            boxes: self.boxes.iter().filter_map(|b| b.clip_axis(axis, range)).collect(),
        }
    }

    /// Whether `self ⊆ other` up to null sets, checked by volume.
    pub fn is_subset_of(&self, other: &BoxUnionSet) -> bool {
        self.boxes.iter().all(|b| {
            let covered: f64 = other.boxes.iter().map(|o| b.overlap_volume(o)).sum();
            covered >= b.volume() * (1.0 - 1e-12) - 1e-300
        })
    }

    /// Sweep along the axis where boxes are most spread out.
    fn first_overlap(&self) -> Option<(usize, usize)> {
        if self.boxes.len() < 2 {
            return None;
        }
        let axis = (0..self.dim.get())
            .max_by(|&a, &b| {
                let spread = |j: usize| {
                    let lo = self.boxes.iter().map(|x| x.lo[j]).fold(f64::INFINITY, f64::min);
                    let hi = self.boxes.iter().map(|x| x.hi[j]).fold(f64::NEG_INFINITY, f64::max);
                    let total: f64 = self.boxes.iter().map(|x| x.side(j)).sum();
                    (hi - lo) / total.max(f64::MIN_POSITIVE)
                };
                spread(a).total_cmp(&spread(b))
            })
            .unwrap_or(0);
        let mut order: Vec<usize> = (0..self.boxes.len()).collect();
        order.sort_by(|&i, &j| self.boxes[i].lo[axis].total_cmp(&self.boxes[j].lo[axis]));
        for (pos, &i) in order.iter().enumerate() {
            for &j in &order[pos + 1..] {
                if self.boxes[j].lo[axis] >= self.boxes[i].hi[axis] {
                    break;
                }
                if self.boxes[i].overlap_volume(&self.boxes[j]) > 0.0 {
                    return Some((i.min(j), i.max(j)));
                }
            }
        }
        None
    }
}

/// Finite union of disjoint, sorted closed intervals of a line parameter.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiberSet {
    pieces: Vec<Interval>,
}

impl FiberSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_interval(i: Interval) -> Self {
        if i.len() > 0.0 {
            Self { pieces: vec![i] }
        } else {
            Self::empty()
        }
    }

    /// Normalises an arbitrary list: drops null pieces, sorts and merges.
    pub fn from_pieces(mut pieces: Vec<Interval>) -> Self {
        pieces.retain(|p| p.len() > 0.0);
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => merged.push(p),
            }
        }
        Self { pieces: merged }
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn intersect(&self, other: &FiberSet) -> FiberSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let (a, b) = (self.pieces[i], other.pieces[j]);
            if let Some(c) = a.intersect(&b) {
                out.push(c);
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        FiberSet { pieces: out }
    }

    pub fn union(&self, other: &FiberSet) -> FiberSet {
        let mut all = self.pieces.clone();
        all.extend_from_slice(&other.pieces);
        FiberSet::from_pieces(all)
    }

    /// Split every piece into sub-intervals of width at most `width`.
    pub fn cells(&self, width: f64) -> Vec<Interval> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let n = (p.len() / width).ceil().max(1.0) as usize;
            let w = p.len() / n as f64;
            for i in 0..n {
                let lo = p.lo + i as f64 * w;
                let hi = if i + 1 == n { p.hi } else { lo + w };
                out.push(Interval { lo, hi });
            }
        }
        out
    }
}
