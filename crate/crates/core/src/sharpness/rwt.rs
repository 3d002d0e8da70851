//! Restricted weak-type quantities for a set pair: the averages
//! `α = T/|F|`, `β = T/|E|` and the two competing lower bounds on `|E|`
//! and `|F|` that the estimate reduces to.

use serde::{Deserialize, Serialize};

use super::exponents::critical_exponents_f64;
use crate::error::{Error, Result};
use crate::xray::quadrature::QuadSpec;
use crate::xray::sets::{BoxUnionSet, Interval};
use crate::xray::transform::bilinear_form;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RwtReport {
    pub d: usize,
    pub t: f64,
    pub measure_e: f64,
    pub measure_f: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `|E| / (α^d β^{d(d−1)/2})`.
    pub ratio_e: f64,
    /// `|F| / (α^{d−1} β^{(d²−d+2)/2})`.
    pub ratio_f: f64,
    /// `max(ratio_e, ratio_f)`.
    pub verdict: f64,
    /// `T / (|E|^{1/p_d} |F|^{1/q_d′})`.
    pub constant: f64,
}

pub fn check_rwt(e: &BoxUnionSet, f: &BoxUnionSet, range: &Interval, quad: &QuadSpec) -> Result<RwtReport> {
    if e.dim() != f.dim() {
        return Err(Error::LengthMismatch {
            expected: e.dim().get(),
            got: f.dim().get(),
        });
    }
    let t = bilinear_form(e, f, range, quad)?;
    rwt_from_parts(e, f, t)
}

/// The report for a precomputed `T(E, F)`.
pub fn rwt_from_parts(e: &BoxUnionSet, f: &BoxUnionSet, t: f64) -> Result<RwtReport> {
    if !(t > 0.0) {
        return Err(Error::ZeroBilinear);
    }
    let dim = e.dim();
    let d = dim.get() as f64;
    let (me, mf) = (e.measure(), f.measure());
    let (alpha, beta) = (t / mf, t / me);
    let ratio_e = me / (alpha.powf(d) * beta.powf(d * (d - 1.0) / 2.0));
    let ratio_f = mf / (alpha.powf(d - 1.0) * beta.powf((d * d - d + 2.0) / 2.0));
    let (p, q) = critical_exponents_f64(dim);
    let q_dual = q / (q - 1.0);
    Ok(RwtReport {
        d: dim.get(),
        t,
        measure_e: me,
        measure_f: mf,
        alpha,
        beta,
        ratio_e,
        ratio_f,
        verdict: ratio_e.max(ratio_f),
        constant: t / (me.powf(1.0 / p) * mf.powf(1.0 / q_dual)),
    })
}

/// Reports for `(δ∘E, δ∘F, δI)` across `deltas`. `T` picks up `δ^{d(d+1)/2+1}`
/// and every ratio in the report is unchanged.
pub fn rwt_scaling_orbit(
    e: &BoxUnionSet,
    f: &BoxUnionSet,
    range: &Interval,
    quad: &QuadSpec,
    deltas: &[f64],
) -> Result<Vec<RwtReport>> {
    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0) || !delta.is_finite() {
                return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {delta}")));
            }
            let scaled = Interval::new(delta * range.lo, delta * range.hi)?;
            check_rwt(&e.dilate(delta), &f.dilate(delta), &scaled, quad)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Dim;
    use crate::xray::sets::AxisBox;

    fn unit(d: usize) -> BoxUnionSet {
        BoxUnionSet::single(AxisBox::unit(Dim::new(d).unwrap())).unwrap()
    }

    #[test]
    fn unit_square() {
        let rep = check_rwt(&unit(2), &unit(2), &Interval::new(0.0, 1.0).unwrap(), &QuadSpec::default()).unwrap();
        assert!((rep.t - 0.75).abs() < 1e-12);
        assert!((rep.alpha - 0.75).abs() < 1e-12 && (rep.beta - 0.75).abs() < 1e-12);
        assert!((rep.ratio_e - 64.0 / 27.0).abs() < 1e-10);
        // |F| / (α β²) with the same α = β.
        assert!((rep.ratio_f - 64.0 / 27.0).abs() < 1e-10);
        assert_eq!(rep.verdict, rep.ratio_e.max(rep.ratio_f));
        // p = 3/2, q′ = 3/2, |E| = |F| = 1.
        assert!((rep.constant - 0.75).abs() < 1e-12);
    }

    #[test]
    fn zero_bilinear_is_reported() {
        let far = BoxUnionSet::single(AxisBox::new(vec![10.0, 10.0], vec![11.0, 11.0]).unwrap()).unwrap();
        let err = check_rwt(&unit(2), &far, &Interval::new(0.0, 1.0).unwrap(), &QuadSpec::default());
        assert!(matches!(err, Err(Error::ZeroBilinear)));
    }

    #[test]
    fn ratios_are_scale_invariant() {
        let e = BoxUnionSet::single(AxisBox::new(vec![0.1, 0.0, -0.2], vec![0.6, 0.5, 0.4]).unwrap()).unwrap();
        let f = BoxUnionSet::single(AxisBox::new(vec![0.0, 0.1, 0.0], vec![0.5, 0.6, 0.3]).unwrap()).unwrap();
        let range = Interval::new(0.0, 1.0).unwrap();
        let reps = rwt_scaling_orbit(&e, &f, &range, &QuadSpec::default(), &[1.0, 0.5, 2.0]).unwrap();
        for rep in &reps[1..] {
            for (a, b) in [
                (rep.verdict, reps[0].verdict),
                (rep.constant, reps[0].constant),
                (rep.ratio_e, reps[0].ratio_e),
            ] {
                // The ratios carry T to the power −d(d+1)/2, amplifying quadrature error.
                assert!((a - b).abs() <= 5e-3 * b, "{a} vs {b}");
            }
        }
        let t_ratio = reps[2].t / reps[0].t;
        assert!((t_ratio - 2f64.powi(7)).abs() <= 1e-3 * t_ratio);
    }

    #[test]
    fn thin_sets_keep_a_finite_verdict() {
        let range = Interval::new(0.0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for w in [0.1, 0.05, 0.025, 0.0125] {
            let e = BoxUnionSet::single(AxisBox::new(vec![0.0, 0.0], vec![1.0, w]).unwrap()).unwrap();
            let rep = check_rwt(&e, &unit(2), &range, &QuadSpec::default()).unwrap();
            assert!(rep.verdict.is_finite() && rep.verdict > 0.01, "w={w}: {}", rep.verdict);
            last = last.min(rep.verdict);
        }
        assert!(last > 0.01);
    }
}
