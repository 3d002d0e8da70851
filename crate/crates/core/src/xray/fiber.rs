//! Exact intersections of the curves `s ↦ γ(x, s)` and `t ↦ γ*(y, t)` with
//! box unions.
//!
//! Along `γ(x, ·)` coordinate `m` is affine in `s`, so each box contributes a
//! single interval. Along `γ*(y, ·)` coordinate `m` is `y_m − y₁ t^{m−1}`, a
//! monomial constraint whose solution set is an interval (odd power) or a
//! symmetric pair of intervals (even power).

use super::sets::{AxisBox, BoxUnionSet, FiberSet, Interval};

/// Which family of curves is being intersected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `s ↦ γ(x, s)`, the lines integrated by the transform.
    Line,
    /// `t ↦ γ*(y, t)`, the curves integrated by the adjoint.
    Dual,
}

/// `{p ∈ range : curve(x, p) ∈ E}`.
pub fn line_fiber(set: &BoxUnionSet, x: &[f64], range: &Interval, family: Family) -> FiberSet {
    let mut pieces = Vec::new();
    for b in set.boxes() {
        match family {
            Family::Line => {
                if let Some(i) = line_box_interval(b, x, range) {
                    pieces.push(i);
                }
            }
            Family::Dual => pieces.extend(dual_box_pieces(b, x, range)),
        }
    }
    FiberSet::from_pieces(pieces)
}

/// `|line_fiber(set, x, range, family)|`, without allocating for the line
/// family. Boxes are disjoint, so per-box fiber lengths add up.
pub fn fiber_measure(set: &BoxUnionSet, x: &[f64], range: &Interval, family: Family) -> f64 {
    match family {
        Family::Line => set
            .boxes()
            .iter()
            .filter_map(|b| line_box_interval(b, x, range))
            .map(|i| i.len())
            .sum(),
        Family::Dual => set
            .boxes()
            .iter()
            .map(|b| dual_box_pieces(b, x, range).iter().map(Interval::len).sum::<f64>())
            .sum(),
    }
}

fn line_box_interval(b: &AxisBox, x: &[f64], range: &Interval) -> Option<Interval> {
    line_box_prefix(b, x, range, x.len())
}

/// Constraints from coordinates `0..upto` only.
fn line_box_prefix(b: &AxisBox, x: &[f64], range: &Interval, upto: usize) -> Option<Interval> {
    let mut lo = range.lo.max(b.lo[0]);
    let mut hi = range.hi.min(b.hi[0]);
    if lo >= hi {
        return None;
    }
    let slope = x[0];
    let mut coef = 1.0;
    for m in 1..upto {
        coef *= slope;
        let (a, c) = (b.lo[m] - x[m], b.hi[m] - x[m]);
        if coef == 0.0 {
            if !(a <= 0.0 && 0.0 <= c) {
                return None;
            }
            continue;
        }
        let (u, v) = if coef > 0.0 {
            (a / coef, c / coef)
        } else {
            (c / coef, a / coef)
        };
        lo = lo.max(u);
        hi = hi.min(v);
        if lo >= hi {
            return None;
        }
    }
    Some(Interval { lo, hi })
}

/// Signed real `n`-th root.
fn signed_root(v: f64, n: i32) -> f64 {
    match n {
        1 => v,
        3 => v.cbrt(),
        _ => v.signum() * v.abs().powf(1.0 / n as f64),
    }
}

/// `{t : t^n ∈ [lo, hi]}` as at most two intervals.
fn monomial_preimage(n: i32, lo: f64, hi: f64) -> Vec<Interval> {
    if n % 2 == 1 {
        return vec![Interval {
            lo: signed_root(lo, n),
            hi: signed_root(hi, n),
        }];
    }
    if hi < 0.0 {
        return Vec::new();
    }
    let outer = signed_root(hi, n);
    if lo <= 0.0 {
        return vec![Interval { lo: -outer, hi: outer }];
    }
    let inner = signed_root(lo, n);
    vec![Interval { lo: -outer, hi: -inner }, Interval { lo: inner, hi: outer }]
}

fn dual_box_pieces(b: &AxisBox, y: &[f64], range: &Interval) -> Vec<Interval> {
    dual_box_prefix(b, y, range, y.len())
}

fn dual_box_prefix(b: &AxisBox, y: &[f64], range: &Interval, upto: usize) -> Vec<Interval> {
    let lo = range.lo.max(b.lo[0]);
    let hi = range.hi.min(b.hi[0]);
    if lo >= hi {
        return Vec::new();
    }
    let mut current = vec![Interval { lo, hi }];
    let slope = y[0];
    for m in 1..upto {
        // y_m − slope·t^m ∈ [a_m, b_m]  ⇔  slope·t^m ∈ [y_m − b_m, y_m − a_m]
        let (a, c) = (y[m] - b.hi[m], y[m] - b.lo[m]);
        if slope == 0.0 {
            if !(a <= 0.0 && 0.0 <= c) {
                return Vec::new();
            }
            continue;
        }
        let (u, v) = if slope > 0.0 {
            (a / slope, c / slope)
        } else {
            (c / slope, a / slope)
        };
        let allowed = monomial_preimage(m as i32, u, v);
        let mut next = Vec::with_capacity(current.len() * allowed.len());
        for p in &current {
            for q in &allowed {
                if let Some(r) = p.intersect(q) {
                    next.push(r);
                }
            }
        }
        if next.is_empty() {
            return next;
        }
        current = next;
    }
    current
}

/// `|[a, c] ∩ [lo + w, hi + w]|` and its derivative in `w`.
fn overlap(a: f64, c: f64, lo: f64, hi: f64, w: f64) -> (f64, f64) {
    let top = (hi + w).min(c);
    let bottom = (lo + w).max(a);
    if top <= bottom {
        return (0.0, 0.0);
    }
    let slope = f64::from(u8::from(hi + w < c)) - f64::from(u8::from(lo + w > a));
    (top - bottom, slope)
}

/// `∫_piece |[a, c] ∩ [lo + k·pⁿ, hi + k·pⁿ]| dp`, exact: the overlap is
/// piecewise linear in `w = k·pⁿ`, so the piece is split where `w` crosses a
/// kink and each part integrates in closed form.
fn monomial_overlap_integral(piece: &Interval, n: i32, k: f64, slab: &Interval, lo: f64, hi: f64) -> f64 {
    let (a, c) = (slab.lo, slab.hi);
    let mut cuts = vec![piece.lo, piece.hi];
    if k != 0.0 {
        for kink in [a - hi, a - lo, c - hi, c - lo] {
            for r in monomial_preimage(n, kink / k, kink / k) {
                cuts.push(r.lo);
                cuts.push(r.hi);
            }
        }
        cuts.push(0.0);
    }
    cuts.retain(|t| (piece.lo..=piece.hi).contains(t));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let power = |t: f64| k * t.powi(n);
    let np1 = n + 1;
    cuts.windows(2)
        .map(|pair| {
            let (t0, t1) = (pair[0], pair[1]);
            let wm = power(0.5 * (t0 + t1));
            let (val, slope) = overlap(a, c, lo, hi, wm);
            if val == 0.0 && slope == 0.0 {
                return 0.0;
            }
            let alpha = val - slope * wm;
            alpha * (t1 - t0) + slope * k * (t1.powi(np1) - t0.powi(np1)) / np1 as f64
        })
        .sum()
}

/// `∫_slab |fiber(set, (prefix, z), range)| dz`, exact. `prefix` holds the
/// first `d − 1` coordinates and `slab` the range of the last one.
pub fn slab_fiber_integral(set: &BoxUnionSet, prefix: &[f64], slab: &Interval, range: &Interval, family: Family) -> f64 {
    let d = prefix.len() + 1;
    let n = (d - 1) as i32;
    let mut total = 0.0;
    for b in set.boxes() {
        let (lo, hi) = (b.lo[d - 1], b.hi[d - 1]);
        match family {
            Family::Line => {
                // x_d + s·x₁^{d−1} ∈ [lo, hi]  ⇔  x_d ∈ [lo + w, hi + w], w = −x₁^{d−1}·s
                if let Some(p) = line_box_prefix(b, prefix, range, d - 1) {
                    let k = -prefix[0].powi(n);
                    total += monomial_overlap_integral(&p, 1, k, slab, lo, hi);
                }
            }
            Family::Dual => {
                // y_d − y₁tⁿ ∈ [lo, hi]  ⇔  y_d ∈ [lo + w, hi + w], w = y₁·tⁿ
                for p in dual_box_prefix(b, prefix, range, d - 1) {
                    total += monomial_overlap_integral(&p, n, prefix[0], slab, lo, hi);
                }
            }
        }
    }
    total
}
