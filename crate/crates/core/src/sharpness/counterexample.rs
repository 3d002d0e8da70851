//! The sharpness family `f = Σ_{k≥N} χ(k∘(x − c_k))`, `c_k = (0, k², …, k^d)`,
//! the explicit minorant `Σ k⁻¹ χ_{B_k}` of `Xf`, and the scaling
//! experiment comparing their norms as `N → ∞`.
//!
//! Norms of the infinite sums are evaluated from power-sum series rather
//! than from materialised boxes: `‖f‖_p` and the block sum reduce to
//! Hurwitz zeta values, and the Lorentz norm of the minorant is streamed
//! term by term with a rigorous tail bound. [`build_counterexample_f`] and
//! [`build_xf_lower_bound`] materialise finite truncations for checks.

use serde::{Deserialize, Serialize};

use super::exponents::critical_exponents_f64;
use super::fit::{fit_loglog, FitResult};
use crate::error::{Error, Result};
use crate::geometry::Dim;
use crate::lorentz::{SimpleFunction, Term};
use crate::xray::sets::{AxisBox, BoxUnionSet};

/// Largest truncation materialised as boxes.
pub const MAX_TERMS: usize = 200_000;

pub const DEFAULT_TAIL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub d: Dim,
    pub n: usize,
    /// Last index kept; `None` picks the smallest index meeting `tail_tol`.
    pub k_max: Option<usize>,
    /// Bound on the relative integral-test tail `Σ_{k>K} k^{−m} / Σ_{N≤k≤K} k^{−m}`.
    pub tail_tol: f64,
}

impl CounterexampleSpec {
    pub fn new(d: Dim, n: usize) -> Self {
        Self {
            d,
            n,
            k_max: None,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn truncated(d: Dim, n: usize, k_max: usize, tail_tol: f64) -> Self {
        Self {
            d,
            n,
            k_max: Some(k_max),
            tail_tol,
        }
    }

    fn m(&self) -> f64 {
        self.d.homogeneous() as f64
    }

    /// Validates the spec and returns the last kept index.
    pub fn resolve_k_max(&self) -> Result<usize> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("N must be at least 2, got {}", self.n)));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidArgument("tail tolerance must be positive".into()));
        }
        let m = self.m();
        let k = match self.k_max {
            Some(k) if k < self.n => {
                return Err(Error::InvalidArgument(format!("K_max = {k} is below N = {}", self.n)));
            }
            Some(k) => k,
            None => {
                // K^{1−m}/(m−1) ≤ tol·Σ_{k≥N} k^{−m} is sufficient up to the
                // (1 − tol) factor between the full and the truncated sum.
                let target = self.tail_tol * (1.0 - self.tail_tol).max(0.5) * hurwitz_zeta(m, self.n as f64);
                let k = ((m - 1.0) * target).powf(-1.0 / (m - 1.0)).ceil() as usize;
                k.max(self.n)
            }
        };
        let tail = tail_bound(m, k) / partial_sum(m, self.n, k);
        if tail > self.tail_tol {
            return Err(Error::TruncationTail { tail, tol: self.tail_tol });
        }
        if k > resolution_limit(self.d) {
            return Err(Error::InvalidArgument(format!(
                "K_max = {k} exceeds the f64 resolution limit {} for d = {}",
                resolution_limit(self.d),
                self.d.get()
            )));
        }
        if k - self.n + 1 > MAX_TERMS {
            return Err(Error::InvalidArgument(format!(
                "truncation needs {} terms, above the materialisation cap {MAX_TERMS}",
                k - self.n + 1
            )));
        }
        Ok(k)
    }
}

/// Relative rounding of the last-axis side of a materialised box.
pub const SIDE_RESOLUTION: f64 = 1e-6;

/// Largest index whose boxes are resolved in `f64`: the last axis has center
/// `k^d` and side of order `k^{−d}`, so corners carry relative side error
/// about `ε·k^{2d}`.
pub fn resolution_limit(d: Dim) -> usize {
    (SIDE_RESOLUTION / f64::EPSILON).powf(1.0 / (2 * d.get()) as f64).floor() as usize
}

/// `∫_K^∞ x^{−a} dx`, an upper bound for `Σ_{k>K} k^{−a}`.
pub fn tail_bound(a: f64, k: usize) -> f64 {
    (k as f64).powf(1.0 - a) / (a - 1.0)
}

/// `Σ_{k=N}^{K} k^{−a}`.
pub fn partial_sum(a: f64, n: usize, k: usize) -> f64 {
    if k + 1 - n <= 4096 {
        (n..=k).rev().map(|j| (j as f64).powf(-a)).sum()
    } else {
        hurwitz_zeta(a, n as f64) - hurwitz_zeta(a, (k + 1) as f64)
    }
}

/// `B_{2j}/(2j)!` for j = 1..7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// `ζ(a, n) = Σ_{k≥0} (n + k)^{−a}` for `a > 1`, `n > 0`: direct terms up to
/// a shift `M`, then the Euler–Maclaurin expansion at `M`.
pub fn hurwitz_zeta(a: f64, n: f64) -> f64 {
    assert!(a > 1.0 && n > 0.0, "hurwitz_zeta needs a > 1 and n > 0");
    let shift = (16.0f64).max(2.0 * a).ceil();
    let m0 = if n >= shift { n } else { n + (shift - n).ceil() };
    let mut direct = 0.0;
    let mut k = n;
    while k < m0 {
        direct += k.powf(-a);
        k += 1.0;
    }
    let mut tail = m0.powf(1.0 - a) / (a - 1.0) + 0.5 * m0.powf(-a);
    // Rising factorial a(a+1)…(a+2j−2) times M^{−a−2j+1}.
    let mut rising = a;
    let mut power = m0.powf(-a - 1.0);
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += coef * rising * power;
        let (p, q) = ((a + 2.0 * j as f64 + 1.0), (a + 2.0 * j as f64 + 2.0));
        rising *= p * q;
        power /= m0 * m0;
    }
    direct + tail
}

fn translate(d: usize, k: usize) -> Vec<f64> {
    let kf = k as f64;
    let mut c = vec![0.0; d];
    for (j, cj) in c.iter_mut().enumerate().skip(1) {
        *cj = kf.powi(j as i32 + 1);
    }
    c
}

/// Half-widths `scale·k^{−j}` on axis `j = 1..d`.
fn halfwidths(d: usize, k: usize, scale: f64) -> Vec<f64> {
    let kf = k as f64;
    (1..=d).map(|j| scale * kf.powi(-(j as i32))).collect()
}

/// `Σ_{k=N}^{K} χ_{A_k}`, `A_k` the box with center `(0, k², …, k^d)` and
/// half-width `k^{−j}` on axis `j`, so `|A_k| = 2^d k^{−d(d+1)/2}`.
pub fn build_counterexample_f(spec: &CounterexampleSpec) -> Result<SimpleFunction> {
    build(spec, 1.0, |_| 1.0)
}

/// `Σ_{k=N}^{K} k⁻¹ χ_{B_k}`, `B_k` the box with center `(0, k², …, k^d)`
/// and side `k^{−j}` on axis `j`, so `|B_k| = k^{−d(d+1)/2}`.
pub fn build_xf_lower_bound(spec: &CounterexampleSpec) -> Result<SimpleFunction> {
    build(spec, 0.5, |k| 1.0 / k as f64)
}

fn build(spec: &CounterexampleSpec, scale: f64, weight: impl Fn(usize) -> f64) -> Result<SimpleFunction> {
    let k_max = spec.resolve_k_max()?;
    let d = spec.d.get();
    let terms = (spec.n..=k_max)
        .map(|k| {
            let b = AxisBox::centered(&translate(d, k), &halfwidths(d, k, scale));
            Term {
                weight: weight(k),
                support: BoxUnionSet::from_disjoint(spec.d, vec![b]),
            }
        })
        .collect();
    // Axis 2 separates the terms: centers k² against half-widths ≤ k⁻².
    Ok(SimpleFunction::from_disjoint_terms(spec.d, terms))
}

/// `‖f‖_{p_d} = (2^d ζ(m, N))^{1/p_d}` for the untruncated family.
pub fn norm_f_series(d: Dim, n: usize) -> f64 {
    let (p, _) = critical_exponents_f64(d);
    let m = d.homogeneous() as f64;
    (2f64.powi(d.get() as i32) * hurwitz_zeta(m, n as f64)).powf(1.0 / p)
}

/// The block quantity `[Σ_{k≥N} (k⁻¹ |B_k|^{1/q_d})^r]^{1/r}`, which the
/// sharpness argument uses as a lower bound for `‖Xf‖_{q_d, r}`.
pub fn norm_xf_blocks_series(d: Dim, n: usize, r: f64) -> f64 {
    let a = (d.jacobian_degree() + 1) as f64;
    hurwitz_zeta(a * r, n as f64).powf(1.0 / r)
}

/// Relative accuracy of [`norm_xf_lorentz_series`].
pub const LORENTZ_TAIL_TOL: f64 = 1e-10;

/// Exact `‖Σ_{k≥N} k⁻¹ χ_{B_k}‖_{s, r}` (finite `r`), streamed over `k`.
///
/// The rearrangement has value `1/k` on `[T_{k−1}, T_k)` with
/// `T_k = Σ_{N≤j≤k} j^{−m}`. After index `K` the remaining terms are at
/// most `K^{−r}(s/r)(T_∞^{r/s} − T_K^{r/s})`, with
/// `T_∞ ≤ T_K + K^{1−m}/(m−1)`; streaming stops once that falls below
/// `LORENTZ_TAIL_TOL` relative to the running sum.
pub fn norm_xf_lorentz_series(d: Dim, n: usize, s: f64, r: f64) -> Result<f64> {
    if !(s > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidExponent(format!("need s, r > 0, got s={s}, r={r}")));
    }
    let m = d.homogeneous() as f64;
    let e = r / s;
    let mut t_prev = 0.0f64;
    let mut sum = 0.0f64;
    let mut k = n;
    loop {
        let kf = k as f64;
        let dt = kf.powf(-m);
        let t = t_prev + dt;
        let increment = if t_prev == 0.0 {
            t.powf(e)
        } else {
            t_prev.powf(e) * (e * (dt / t_prev).ln_1p()).exp_m1()
        };
        sum += kf.powf(-r) * (s / r) * increment;
        t_prev = t;
        if (k - n) % 64 == 63 {
            let t_inf = t + tail_bound(m, k);
            let bound = kf.powf(-r) * (s / r) * (t_inf.powf(e) - t.powf(e));
            if bound <= LORENTZ_TAIL_TOL * sum {
                return Ok(sum.powf(1.0 / r));
            }
        }
        k += 1;
    }
}

pub fn default_n_list() -> Vec<usize> {
    (4..=12).map(|i| 1usize << i).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub norm_f: f64,
    /// Block quantity `[Σ (k⁻¹|B_k|^{1/q})^r]^{1/r}`.
    pub norm_xf: f64,
    /// Exact `L^{q_d, r}` norm of the minorant.
    pub norm_xf_lorentz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub d: usize,
    pub r: f64,
    pub p: f64,
    pub q: f64,
    pub rows: Vec<ScalingRow>,
    pub fit_f: FitResult,
    pub fit_xf: FitResult,
    pub fit_xf_lorentz: FitResult,
    /// `(−1/2 + 1/(d(d+1)))(d² − d + 2)`.
    pub predicted_f: f64,
    /// `−(d² − d + 2)/2 + 1/r`.
    pub predicted_xf: f64,
}

pub fn scaling_experiment(d: Dim, r: f64, n_list: &[usize]) -> Result<ScalingReport> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidExponent(format!("r must be positive and finite, got {r}")));
    }
    if n_list.len() < 3 || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] < 2 {
        return Err(Error::InvalidArgument("N list must be strictly increasing, ≥ 2, with at least 3 entries".into()));
    }
    let (p, q) = critical_exponents_f64(d);
    let rows = n_list
        .iter()
        .map(|&n| {
            Ok(ScalingRow {
                n,
                norm_f: norm_f_series(d, n),
                norm_xf: norm_xf_blocks_series(d, n, r),
                norm_xf_lorentz: norm_xf_lorentz_series(d, n, q, r)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<f64> = rows.iter().map(|row| row.n as f64).collect();
    let col = |f: fn(&ScalingRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let dd = d.get() as f64;
    let a = (dd * dd - dd + 2.0) / 2.0;
    Ok(ScalingReport {
        d: d.get(),
        r,
        p,
        q,
        fit_f: fit_loglog(&ns, &col(|row| row.norm_f))?,
        fit_xf: fit_loglog(&ns, &col(|row| row.norm_xf))?,
        fit_xf_lorentz: fit_loglog(&ns, &col(|row| row.norm_xf_lorentz))?,
        predicted_f: (-0.5 + 1.0 / (dd * (dd + 1.0))) * (dd * dd - dd + 2.0),
        predicted_xf: -a + 1.0 / r,
        rows,
    })
}

/// Slope difference below which the two rates count as equal.
pub const CRITICAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NecessityVerdict {
    /// `‖Xf‖/‖f‖ → ∞`: the bound into `L^{q_d, r}` fails.
    Unbounded,
    Critical,
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub d: usize,
    pub r: f64,
    pub p: f64,
    pub slope_f: f64,
    pub slope_xf: f64,
    pub difference: f64,
    pub verdict: NecessityVerdict,
}

pub fn necessity_check(d: Dim, r: f64, n_list: &[usize]) -> Result<NecessityReport> {
    let rep = scaling_experiment(d, r, n_list)?;
    let difference = rep.fit_xf.slope - rep.fit_f.slope;
    let verdict = if difference > CRITICAL_TOL {
        NecessityVerdict::Unbounded
    } else if difference < -CRITICAL_TOL {
        NecessityVerdict::Bounded
    } else {
        NecessityVerdict::Critical
    };
    Ok(NecessityReport {
        d: d.get(),
        r,
        p: rep.p,
        slope_f: rep.fit_f.slope,
        slope_xf: rep.fit_xf.slope,
        difference,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{lorentz_norm, lp_norm};
    use crate::xray::sets::Interval;
    use crate::xray::transform::x_indicator;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn hurwitz_matches_direct_sums() {
        for (a, n) in [(3.0, 2.0), (6.0, 16.0), (2.5, 1.0), (10.0, 3.0), (15.0, 100.0), (1.5, 5.0)] {
            let k_end = 2_000_000usize;
            let direct: f64 = (n as usize..k_end).rev().map(|k| (k as f64).powf(-a)).sum::<f64>();
            // Midpoint-corrected integral tail of the direct sum.
            let tail = (k_end as f64 - 0.5).powf(1.0 - a) / (a - 1.0);
            let want = direct + tail;
            let got = hurwitz_zeta(a, n);
            assert!((got - want).abs() <= 1e-12 * want, "a={a} n={n}: {got} vs {want}");
        }
        // ζ(2, 1) = π²/6.
        assert!((hurwitz_zeta(2.0, 1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn term_measures() {
        let spec = CounterexampleSpec::truncated(dim(3), 5, 7, f64::INFINITY);
        let f = build_counterexample_f(&spec).unwrap();
        let g = build_xf_lower_bound(&spec).unwrap();
        for (i, k) in (5..=7).enumerate() {
            let kf = k as f64;
            let mf = f.terms()[i].support.measure();
            let mg = g.terms()[i].support.measure();
            assert!((mf - 8.0 * kf.powi(-6)).abs() < 1e-9 * mf);
            assert!((mg - kf.powi(-6)).abs() < 1e-9 * mg);
            assert_eq!(g.terms()[i].weight, 1.0 / kf);
        }
    }

    #[test]
    fn single_term_case() {
        let spec = CounterexampleSpec::truncated(dim(2), 9, 9, f64::INFINITY);
        let f = build_counterexample_f(&spec).unwrap();
        assert_eq!(f.terms().len(), 1);
        let g = build_xf_lower_bound(&spec).unwrap();
        assert_eq!(g.terms().len(), 1);
        assert_eq!(g.terms()[0].weight, 1.0 / 9.0);
    }

    #[test]
    fn truncation_tolerance() {
        let spec = CounterexampleSpec::truncated(dim(2), 4, 10, 1e-9);
        assert!(matches!(build_counterexample_f(&spec), Err(Error::TruncationTail { .. })));
        let auto = CounterexampleSpec {
            tail_tol: 1e-3,
            ..CounterexampleSpec::new(dim(2), 4)
        };
        let k = auto.resolve_k_max().unwrap();
        assert!(tail_bound(3.0, k) / partial_sum(3.0, 4, k) <= 1e-3);
        assert!(tail_bound(3.0, k - 1) / partial_sum(3.0, 4, k - 1) > 0.5e-3);
        assert!(CounterexampleSpec::truncated(dim(3), 4, 3, 1.0).resolve_k_max().is_err());
        // d = 3 at the default tolerance needs boxes finer than f64 resolves.
        assert!(CounterexampleSpec::new(dim(3), 4).resolve_k_max().is_err());
        assert_eq!(resolution_limit(dim(2)), 259);
        assert_eq!(resolution_limit(dim(3)), 40);
    }

    #[test]
    fn materialised_norms_match_partial_series() {
        for d in [2, 3, 4] {
            let k_max = resolution_limit(dim(d));
            let spec = CounterexampleSpec::truncated(dim(d), 3, k_max, f64::INFINITY);
            let (p, q) = critical_exponents_f64(dim(d));
            let m = dim(d).homogeneous() as f64;
            let f = build_counterexample_f(&spec).unwrap();
            let sum = partial_sum(m, 3, k_max);
            let want = (2f64.powi(d as i32) * sum).powf(1.0 / p);
            let got = lp_norm(&f, p).unwrap();
            assert!((got - want).abs() <= 1e-5 * want, "d={d}: {got} vs {want}");
            // The series norm differs only by the tail beyond K.
            let series = norm_f_series(dim(d), 3);
            let tail = tail_bound(m, k_max) / sum;
            assert!(series >= got && series <= got * (1.0 + tail).powf(1.0 / p) * (1.0 + 1e-12));

            // Rearrangement of the minorant: value 1/k on [T_{k−1}, T_k).
            let g = build_xf_lower_bound(&spec).unwrap();
            for r in [1.2, q, 3.0] {
                let mut t = 0.0f64;
                let mut acc = 0.0;
                for k in 3..=k_max {
                    let t_new = t + (k as f64).powf(-m);
                    acc += (k as f64).powf(-r) * (q / r) * (t_new.powf(r / q) - t.powf(r / q));
                    t = t_new;
                }
                let want = acc.powf(1.0 / r);
                let got = lorentz_norm(&g, q, r).unwrap();
                assert!((got - want).abs() <= 1e-5 * want, "d={d} r={r}: {got} vs {want}");
                let series = norm_xf_lorentz_series(dim(d), 3, q, r).unwrap();
                assert!(series >= got * (1.0 - 1e-9), "d={d} r={r}");
            }
        }
    }

    #[test]
    fn streamed_lorentz_matches_long_direct_sum() {
        let (d, n) = (dim(3), 16usize);
        let (_, q) = critical_exponents_f64(d);
        for r in [1.0, 2.0, 5.0] {
            let mut t = 0.0f64;
            let mut acc = 0.0;
            for k in n..200_000 {
                let t_new = t + (k as f64).powf(-6.0);
                acc += (k as f64).powf(-r) * (q / r) * (t_new.powf(r / q) - t.powf(r / q));
                t = t_new;
            }
            let want = acc.powf(1.0 / r);
            let got = norm_xf_lorentz_series(d, n, q, r).unwrap();
            assert!((got - want).abs() <= 1e-8 * want, "r={r}: {got} vs {want}");
        }
    }

    #[test]
    fn minorant_lies_below_the_transform() {
        // On B_k, γ(x, s) stays in A_k for s ∈ [0, 1/(2k)], so Xf ≥ 1/(2k)
        // whenever I ⊇ [0, 1/(2k)].
        let spec = CounterexampleSpec::truncated(dim(3), 3, 12, f64::INFINITY);
        let f = build_counterexample_f(&spec).unwrap();
        let g = build_xf_lower_bound(&spec).unwrap();
        let support: Vec<AxisBox> = f.terms().iter().flat_map(|t| t.support.boxes().to_vec()).collect();
        let a = BoxUnionSet::new(dim(3), support).unwrap();
        let range = Interval::new(0.0, 1.0).unwrap();
        for t in g.terms() {
            let b = &t.support.boxes()[0];
            for corner in 0..8usize {
                let x: Vec<f64> = (0..3).map(|j| if corner >> j & 1 == 1 { b.hi[j] } else { b.lo[j] }).collect();
                assert!(x_indicator(&a, &range, &x) >= 0.5 * t.weight - 1e-15);
            }
        }
    }

    #[test]
    fn scaling_covariance() {
        let spec = CounterexampleSpec::truncated(dim(3), 4, 40, f64::INFINITY);
        let f = build_counterexample_f(&spec).unwrap();
        for (delta, p) in [(0.5, 1.5), (2.0, 2.5)] {
            let want = f64::powf(delta, 6.0 / p) * lp_norm(&f, p).unwrap();
            let got = lp_norm(&f.dilate(delta), p).unwrap();
            assert!((got - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn d3_slopes() {
        let rep = scaling_experiment(dim(3), 1.5, &default_n_list()).unwrap();
        assert!((rep.predicted_f + 10.0 / 3.0).abs() < 1e-12);
        assert!((rep.fit_f.slope + 10.0 / 3.0).abs() < 0.03 * 10.0 / 3.0, "{}", rep.fit_f.slope);
        assert!((rep.fit_xf.slope - rep.fit_f.slope).abs() < 1e-10);
    }

    #[test]
    fn slopes_survive_reindexing() {
        let base = default_n_list();
        let shifted: Vec<usize> = base.iter().map(|n| 3 * n).collect();
        let a = scaling_experiment(dim(2), 2.0, &base).unwrap();
        let b = scaling_experiment(dim(2), 2.0, &shifted).unwrap();
        assert!((a.fit_f.slope - b.fit_f.slope).abs() < 0.02);
        assert!((a.fit_xf.slope - b.fit_xf.slope).abs() < 0.02);
    }

    #[test]
    fn necessity_flips_at_critical_r() {
        for d in [2, 3, 4] {
            let (p, _) = critical_exponents_f64(dim(d));
            let ns = default_n_list();
            assert_eq!(necessity_check(dim(d), 0.9 * p, &ns).unwrap().verdict, NecessityVerdict::Unbounded);
            assert_eq!(necessity_check(dim(d), p, &ns).unwrap().verdict, NecessityVerdict::Critical);
            assert_eq!(necessity_check(dim(d), 1.1 * p, &ns).unwrap().verdict, NecessityVerdict::Bounded);
        }
    }

    #[test]
    fn rejects_bad_experiments() {
        assert!(scaling_experiment(dim(2), 1.0, &[16, 32]).is_err());
        assert!(scaling_experiment(dim(2), 1.0, &[16, 16, 32]).is_err());
        assert!(scaling_experiment(dim(2), 0.0, &[16, 32, 64]).is_err());
    }
}
