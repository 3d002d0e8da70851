//! Incidence geometry of the moment-curve line complex.
//!
//! `gamma(x, ·)` parametrises the line through the point of the second space
//! `x`, and `gamma_star(y, ·)` the dual family of curves through `y`. The
//! iterated maps `Φ_j` and `Ψ_j` alternate between the two; their Jacobian
//! determinants factor into products of parameter differences, which is what
//! [`jacobian_closed_form`] evaluates (up to the constant `c_d`).

use std::ops::Deref;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient dimension, always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dim(usize);

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDim(d));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `k = ⌊d/2⌋`.
    pub fn half(self) -> usize {
        self.0 / 2
    }

    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `d(d+1)/2`: the homogeneous dimension of the nonisotropic dilations.
    pub fn homogeneous(self) -> usize {
        self.0 * (self.0 + 1) / 2
    }

    /// `d(d-1)/2`: the degree of both Jacobian determinants.
    pub fn jacobian_degree(self) -> usize {
        self.0 * (self.0 - 1) / 2
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        Dim::new(d)
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.0
    }
}

/// A point of `ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(d: Dim) -> Self {
        Self(vec![0.0; d.get()])
    }

    pub fn checked(coords: Vec<f64>, d: Dim) -> Result<Self> {
        if coords.len() != d.get() {
            return Err(Error::LengthMismatch {
                expected: d.get(),
                got: coords.len(),
            });
        }
        Ok(Self(coords))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Which iterated incidence map.
///
/// `Phi` starts with `gamma_star` at a base point of the first space and takes
/// parameters `(t1, s1, t2, s2, ...)`. `Psi` starts with `gamma` at a base
/// point of the second space and takes `(s1, t2, s2, t3, ...)`; the base
/// point's first coordinate plays the role of `t1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Phi,
    Psi,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Phi => "phi",
            MapKind::Psi => "psi",
        }
    }

    /// Whether the step at (1-based) position `step` applies `gamma`
    /// (otherwise `gamma_star`).
    pub fn step_is_gamma(self, step: usize) -> bool {
        match self {
            MapKind::Phi => step.is_multiple_of(2),
            MapKind::Psi => step % 2 == 1,
        }
    }
}

impl std::str::FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(MapKind::Phi),
            "psi" => Ok(MapKind::Psi),
            other => Err(Error::InvalidArgument(format!("unknown map kind {other:?}"))),
        }
    }
}

/// `γ(x, s) = (s, x₂ + s·x₁, x₃ + s·x₁², …, x_d + s·x₁^{d−1})`.
pub fn gamma(x: &[f64], s: f64) -> Point {
    let slope = x[0];
    let mut out = Vec::with_capacity(x.len());
    out.push(s);
    let mut pow = 1.0;
    for &xm in &x[1..] {
        pow *= slope;
        out.push(xm + s * pow);
    }
    Point(out)
}

/// `γ*(x, t) = (t, x₂ − x₁·t, x₃ − x₁·t², …, x_d − x₁·t^{d−1})`.
pub fn gamma_star(x: &[f64], t: f64) -> Point {
    let slope = x[0];
    let mut out = Vec::with_capacity(x.len());
    out.push(t);
    let mut pow = 1.0;
    for &xm in &x[1..] {
        pow *= t;
        out.push(xm - slope * pow);
    }
    Point(out)
}

fn check_len(len: usize, d: Dim) -> Result<()> {
    if len != d.get() {
        return Err(Error::LengthMismatch {
            expected: d.get(),
            got: len,
        });
    }
    Ok(())
}

/// Apply the first `params.len()` steps of the alternating composition.
pub fn partial_map(kind: MapKind, base: &[f64], params: &[f64]) -> Point {
    let mut y = Point(base.to_vec());
    for (i, &p) in params.iter().enumerate() {
        y = if kind.step_is_gamma(i + 1) {
            gamma(&y, p)
        } else {
            gamma_star(&y, p)
        };
    }
    y
}

/// `Φ_d` at base point `x0` with parameters `(t1, s1, t2, s2, …)`.
pub fn phi_map(d: Dim, x0: &[f64], params: &[f64]) -> Result<Point> {
    check_len(x0.len(), d)?;
    check_len(params.len(), d)?;
    Ok(partial_map(MapKind::Phi, x0, params))
}

/// `Ψ_d` at base point `y0` with parameters `(s1, t2, s2, t3, …)`.
pub fn psi_map(d: Dim, y0: &[f64], params: &[f64]) -> Result<Point> {
    check_len(y0.len(), d)?;
    check_len(params.len(), d)?;
    Ok(partial_map(MapKind::Psi, y0, params))
}

/// Non-recursive expansion of `Ψ_d`.
///
/// Coordinate `m ≥ 2` equals `y_m + Σ_{j≤k} (t_j^{m−1} − t_{j+1}^{m−1}) s_j`,
/// plus `s_{k+1} t_{k+1}^{m−1}` when `d = 2k+1`; the first coordinate is the
/// last parameter.
pub fn psi_closed_form(d: Dim, y0: &[f64], params: &[f64]) -> Result<Point> {
    check_len(y0.len(), d)?;
    check_len(params.len(), d)?;
    let n = d.get();
    let k = d.half();
    let (s, t) = psi_params(y0[0], params);
    let mut out = vec![0.0; n];
    out[0] = params[n - 1];
    for m in 1..n {
        let e = m as i32;
        let mut acc = y0[m];
        for j in 1..=k {
            acc += (t[j].powi(e) - t[j + 1].powi(e)) * s[j];
        }
        if !d.is_even() {
            acc += s[k + 1] * t[k + 1].powi(e);
        }
        out[m] = acc;
    }
    Ok(Point(out))
}

/// Split `Φ` parameters into 1-indexed `t` and `s` arrays (`s[0] = x₁`).
fn phi_params(x1: f64, params: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![f64::NAN];
    let mut s = vec![x1];
    for (i, &p) in params.iter().enumerate() {
        if i % 2 == 0 {
            t.push(p);
        } else {
            s.push(p);
        }
    }
    (s, t)
}

/// Split `Ψ` parameters into 1-indexed `s` and `t` arrays (`t[1] = t₁`).
fn psi_params(t1: f64, params: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut s = vec![f64::NAN];
    let mut t = vec![f64::NAN, t1];
    for (i, &p) in params.iter().enumerate() {
        if i % 2 == 0 {
            s.push(p);
        } else {
            t.push(p);
        }
    }
    (s, t)
}

/// The product formula for the Jacobian determinant, without `c_d`.
///
/// `base_first_coord` supplies `s₀` for `Φ` and the dummy `t₁` for `Ψ`.
pub fn jacobian_closed_form(
    kind: MapKind,
    d: Dim,
    base_first_coord: f64,
    params: &[f64],
) -> Result<f64> {
    check_len(params.len(), d)?;
    let k = d.half();
    let even = d.is_even();
    let mut prod = 1.0;
    match kind {
        MapKind::Phi => {
            let (s, t) = phi_params(base_first_coord, params);
            for j in 1..=k {
                prod *= s[j] - s[j - 1];
            }
            for j in 1..=k {
                for l in j + 1..=k {
                    prod *= (t[j] - t[l]).powi(4);
                }
            }
            if !even {
                for j in 1..=k {
                    prod *= (t[j] - t[k + 1]).powi(2);
                }
            }
        }
        MapKind::Psi => {
            let (s, t) = psi_params(base_first_coord, params);
            if even {
                prod *= t[k + 1] - t[1];
                for j in 1..k {
                    prod *= s[j + 1] - s[j];
                }
                for j in 2..=k {
                    for l in j + 1..=k {
                        prod *= (t[j] - t[l]).powi(4);
                    }
                }
                for j in 2..=k {
                    prod *= (t[j] - t[k + 1]).powi(2) * (t[j] - t[1]).powi(2);
                }
            } else {
                for j in 1..=k {
                    prod *= s[j + 1] - s[j];
                }
                for j in 2..=k + 1 {
                    for l in j + 1..=k + 1 {
                        prod *= (t[j] - t[l]).powi(4);
                    }
                }
                for j in 2..=k + 1 {
                    prod *= (t[j] - t[1]).powi(2);
                }
            }
        }
    }
    Ok(prod)
}

/// Relative agreement required between the `h` and `h/2` determinants.
pub const FD_AGREEMENT: f64 = 1e-5;

fn central_difference_matrix(kind: MapKind, base: &[f64], params: &[f64], scale: f64) -> DMatrix<f64> {
    let n = params.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut work = params.to_vec();
    for j in 0..n {
        let h = scale * (1.0 + params[j].abs());
        let (hi, lo) = (params[j] + h, params[j] - h);
        work[j] = hi;
        let plus = partial_map(kind, base, &work);
        work[j] = lo;
        let minus = partial_map(kind, base, &work);
        work[j] = params[j];
        // Divide by the representable step, not the nominal one.
        let width = hi - lo;
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / width;
        }
    }
    jac
}

/// `(max column norm)^n`, an upper bound for `|det|` that stays meaningful
/// when a column degenerates.
fn determinant_scale(m: &DMatrix<f64>) -> f64 {
    let widest = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    widest.powi(m.ncols() as i32)
}

/// Jacobian determinant of `Φ_d`/`Ψ_d` with respect to the parameters.
///
/// Central differences at `h = 1e-4·(1+|p|)`, `h/2` and `h/4` give two
/// Richardson-extrapolated matrices; their determinants must agree to
/// [`FD_AGREEMENT`], and the finer one is returned.
pub fn jacobian_numeric(kind: MapKind, d: Dim, base: &[f64], params: &[f64]) -> Result<f64> {
    check_len(base.len(), d)?;
    check_len(params.len(), d)?;
    let d1 = central_difference_matrix(kind, base, params, 1e-4);
    let d2 = central_difference_matrix(kind, base, params, 5e-5);
    let d4 = central_difference_matrix(kind, base, params, 2.5e-5);
    let coarse = (&d2 * 4.0 - &d1) / 3.0;
    let fine = (&d4 * 4.0 - &d2) / 3.0;
    let det_coarse = coarse.determinant();
    let det_fine = fine.determinant();
    // Near-singular matrices are judged against the matrix scale instead.
    let floor = 1e-9 * determinant_scale(&fine);
    let scale = det_coarse.abs().max(det_fine.abs()).max(floor);
    if (det_coarse - det_fine).abs() > FD_AGREEMENT * scale {
        return Err(Error::NonSmooth {
            coarse: det_coarse,
            fine: det_fine,
        });
    }
    Ok(det_fine)
}

/// Measured `c_d`: mean of `jacobian_numeric / jacobian_closed_form`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub kind: MapKind,
    pub d: usize,
    pub mean: f64,
    /// `max |ratio − mean| / |mean|` over the samples.
    pub dispersion: f64,
    pub ratios: Vec<f64>,
}

/// Minimum separation enforced between parameters that appear in a factor.
///
/// The determinant is a product of `d(d−1)/2` differences while the matrix
/// entries stay O(1); closer parameters push the ratio into cancellation.
pub const MIN_SEPARATION: f64 = 0.2;

/// Range of the uniformly drawn base coordinates and parameters.
pub const SAMPLE_RADIUS: f64 = 1.0;

/// Draw a base point and parameter vector whose closed-form factors are all
/// bounded away from zero.
pub fn draw_nondegenerate(kind: MapKind, d: Dim, rng: &mut impl Rng) -> (Point, Vec<f64>) {
    let n = d.get();
    loop {
        let base: Vec<f64> = (0..n).map(|_| rng.gen_range(-SAMPLE_RADIUS..SAMPLE_RADIUS)).collect();
        let params: Vec<f64> = (0..n).map(|_| rng.gen_range(-SAMPLE_RADIUS..SAMPLE_RADIUS)).collect();
        if well_separated(kind, base[0], &params) {
            return (Point(base), params);
        }
    }
}

fn well_separated(kind: MapKind, first: f64, params: &[f64]) -> bool {
    let (s, t) = match kind {
        MapKind::Phi => phi_params(first, params),
        MapKind::Psi => psi_params(first, params),
    };
    let ts: Vec<f64> = t.iter().copied().filter(|v| !v.is_nan()).collect();
    let ss: Vec<f64> = s.iter().copied().filter(|v| !v.is_nan()).collect();
    let pairwise_ok = |v: &[f64]| {
        v.iter()
            .enumerate()
            .all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).abs() >= MIN_SEPARATION))
    };
    let consecutive_ok = ss.windows(2).all(|w| (w[0] - w[1]).abs() >= MIN_SEPARATION);
    pairwise_ok(&ts) && consecutive_ok
}

/// Estimate `c_d` from `samples` seeded random draws.
pub fn estimate_c_d(kind: MapKind, d: Dim, samples: usize, seed: u64) -> Result<ConstantEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument("estimate_c_d needs at least 2 samples".into()));
    }
    const MAX_REDRAWS: usize = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(samples);
    let mut redraws = 0;
    while ratios.len() < samples {
        let (base, params) = draw_nondegenerate(kind, d, &mut rng);
        let closed = jacobian_closed_form(kind, d, base[0], &params)?;
        if closed == 0.0 || !closed.is_finite() {
            redraws += 1;
            if redraws >= MAX_REDRAWS {
                return Err(Error::DegenerateSample { attempts: redraws });
            }
            continue;
        }
        redraws = 0;
        let numeric = jacobian_numeric(kind, d, &base, &params)?;
        ratios.push(numeric / closed);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let dispersion = ratios
        .iter()
        .map(|r| (r - mean).abs())
        .fold(0.0, f64::max)
        / mean.abs();
    Ok(ConstantEstimate {
        kind,
        d: d.get(),
        mean,
        dispersion,
        ratios,
    })
}
