//! `Xf(x) = ∫_I f(γ(x, s)) ds`, its dual and the bilinear form
//! `T(E, F) = ⟨Xχ_E, χ_F⟩`.
//!
//! The exact adjoint of `X` on `L²(ℝ^d)` is
//! `X*g(y) = χ_I(y₁) ∫_ℝ g(γ*(y, t)) dt`. [`apply_x_star`] evaluates the
//! integral alone; [`dual_indicator`] and [`adjoint_pairing`] include the
//! cutoff so that `⟨Xf, g⟩ = ⟨f, X*g⟩` holds exactly.

use super::fiber::{fiber_measure, slab_fiber_integral, Family};
use super::quadrature::{integrate_slabs, midpoint_line, GridFunction, QuadSpec};
use super::sets::{BoxUnionSet, Interval};
use crate::error::{Error, Result};
use crate::geometry::{gamma, gamma_star};
use crate::lorentz::SimpleFunction;

#[derive(Debug, Clone, Copy)]
pub enum Integrand<'a> {
    Simple(&'a SimpleFunction),
    Grid(&'a GridFunction),
}

impl<'a> From<&'a SimpleFunction> for Integrand<'a> {
    fn from(f: &'a SimpleFunction) -> Self {
        Integrand::Simple(f)
    }
}

impl<'a> From<&'a GridFunction> for Integrand<'a> {
    fn from(f: &'a GridFunction) -> Self {
        Integrand::Grid(f)
    }
}

impl Integrand<'_> {
    fn dim(&self) -> usize {
        match self {
            Integrand::Simple(f) => f.dim().get(),
            Integrand::Grid(g) => g.dim(),
        }
    }

    fn first_axis_support(&self) -> Option<Interval> {
        match self {
            Integrand::Simple(f) => f
                .terms()
                .iter()
                .filter_map(|t| t.support.first_axis_hull())
                .reduce(|a, b| Interval {
                    lo: a.lo.min(b.lo),
                    hi: a.hi.max(b.hi),
                }),
            Integrand::Grid(g) => g.first_axis_support(),
        }
    }

    fn integrate_along(&self, x: &[f64], range: &Interval, family: Family, quad: &QuadSpec) -> f64 {
        match self {
            Integrand::Simple(f) => f
                .terms()
                .iter()
                .map(|t| t.weight * fiber_measure(&t.support, x, range, family))
                .sum(),
            Integrand::Grid(g) => midpoint_line(range, quad.step, |p| {
                let pt = match family {
                    Family::Line => gamma(x, p),
                    Family::Dual => gamma_star(x, p),
                };
                g.eval(&pt)
            }),
        }
    }
}

fn check_point(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    Ok(())
}

/// `Xf(x)`. Exact on simple functions, midpoint rule on grid functions.
pub fn apply_x<'a>(f: impl Into<Integrand<'a>>, range: &Interval, x: &[f64], quad: &QuadSpec) -> Result<f64> {
    let f = f.into();
    check_point(f.dim(), x)?;
    quad.validate()?;
    Ok(f.integrate_along(x, range, Family::Line, quad))
}

/// `∫_window g(γ*(y, t)) dt`. The window must cover the first-coordinate
/// projection of the support of `g`, otherwise the truncated integral would
/// not be the integral over ℝ.
pub fn apply_x_star<'a>(g: impl Into<Integrand<'a>>, window: &Interval, y: &[f64], quad: &QuadSpec) -> Result<f64> {
    let g = g.into();
    check_point(g.dim(), y)?;
    quad.validate()?;
    check_window(g.first_axis_support(), window)?;
    Ok(g.integrate_along(y, window, Family::Dual, quad))
}

fn check_window(support: Option<Interval>, window: &Interval) -> Result<()> {
    match support {
        Some(s) if !window.contains_interval(&s) => Err(Error::WindowTooSmall {
            lo: s.lo,
            hi: s.hi,
            win_lo: window.lo,
            win_hi: window.hi,
        }),
        _ => Ok(()),
    }
}

/// Window for the dual integral against `set`: `quad.window` after
/// validation, else the set's own first-coordinate hull.
pub fn dual_window(set: &BoxUnionSet, quad: &QuadSpec) -> Result<Option<Interval>> {
    let hull = set.first_axis_hull();
    match &quad.window {
        Some(w) => {
            check_window(hull, w)?;
            Ok(Some(*w))
        }
        None => Ok(hull),
    }
}

/// `Xχ_E(x)`, exact.
pub fn x_indicator(e: &BoxUnionSet, range: &Interval, x: &[f64]) -> f64 {
    fiber_measure(e, x, range, Family::Line)
}

/// `X*χ_F(y)` including the `χ_I(y₁)` cutoff, exact.
pub fn dual_indicator(f: &BoxUnionSet, range: &Interval, window: &Interval, y: &[f64]) -> f64 {
    if range.contains(y[0]) {
        fiber_measure(f, y, window, Family::Dual)
    } else {
        0.0
    }
}

/// `T(E, F) = ∫_F Xχ_E`. The last coordinate is integrated exactly, the
/// rest by `quad`.
pub fn bilinear_form(e: &BoxUnionSet, f: &BoxUnionSet, range: &Interval, quad: &QuadSpec) -> Result<f64> {
    same_dim(e, f)?;
    if e.is_empty() || f.is_empty() {
        return Ok(0.0);
    }
    integrate_slabs(f, quad, |p, slab| slab_fiber_integral(e, p, slab, range, Family::Line))
}

/// `⟨χ_E, X*χ_F⟩ = ∫_{E ∩ {y₁ ∈ I}} ∫ χ_F(γ*(y, t)) dt dy`.
pub fn adjoint_pairing(e: &BoxUnionSet, f: &BoxUnionSet, range: &Interval, quad: &QuadSpec) -> Result<f64> {
    same_dim(e, f)?;
    let Some(window) = dual_window(f, quad)? else {
        return Ok(0.0);
    };
    let clipped = e.clip_axis(0, range);
    if clipped.is_empty() {
        return Ok(0.0);
    }
    integrate_slabs(&clipped, quad, |p, slab| slab_fiber_integral(f, p, slab, &window, Family::Dual))
}

fn same_dim(e: &BoxUnionSet, f: &BoxUnionSet) -> Result<()> {
    if e.dim() != f.dim() {
        return Err(Error::LengthMismatch {
            expected: e.dim().get(),
            got: f.dim().get(),
        });
    }
    Ok(())
}
