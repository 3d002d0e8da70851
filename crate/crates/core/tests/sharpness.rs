use momentray_core::geometry::Dim;
use momentray_core::sharpness::{
    builtin_corpus, check_rwt, critical_exponents_f64, region_contains, ExponentPair, Membership,
};
use momentray_core::xray::{bilinear_form, AxisBox, BoxUnionSet, Interval, QuadSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Signed barycentric classification against the triangle with vertices
/// `(0, 0)`, `(1, 1)` and `(1/p, 1/q)`, with a margin for "unsure".
fn classify_f64(d: Dim, u: f64, v: f64) -> Option<bool> {
    let (p, q) = critical_exponents_f64(d);
    let pts = [(0.0, 0.0), (1.0, 1.0), (1.0 / p, 1.0 / q)];
    let cross = |a: (f64, f64), b: (f64, f64)| (b.0 - a.0) * (v - a.1) - (b.1 - a.1) * (u - a.0);
    let signs = [cross(pts[0], pts[1]), cross(pts[1], pts[2]), cross(pts[2], pts[0])];
    if signs.iter().any(|s| s.abs() < 1e-9) {
        return None;
    }
    Some(signs.iter().all(|s| *s > 0.0) || signs.iter().all(|s| *s < 0.0))
}

#[test]
fn region_agrees_with_barycentric_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for d in 2..=7 {
        let dim = Dim::new(d).unwrap();
        for _ in 0..2000 {
            let (u, v) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let got = region_contains(dim, ExponentPair::new(u, v).unwrap());
            if let Some(inside) = classify_f64(dim, u, v) {
                assert_eq!(got == Membership::Interior, inside, "d={d} ({u}, {v})");
                assert_ne!(got, Membership::Boundary);
            }
        }
    }
}

fn unit(d: usize) -> BoxUnionSet {
    BoxUnionSet::single(AxisBox::unit(Dim::new(d).unwrap())).unwrap()
}

#[test]
fn dilation_exponent_of_t_matches_the_critical_exponents() {
    for d in [2usize, 3] {
        let dim = Dim::new(d).unwrap();
        let range = Interval::new(0.0, 1.0).unwrap();
        let q = QuadSpec::default();
        let t1 = bilinear_form(&unit(d), &unit(d), &range, &q).unwrap();
        let delta: f64 = 0.5;
        let scaled = Interval::new(0.0, delta).unwrap();
        let td = bilinear_form(&unit(d).dilate(delta), &unit(d).dilate(delta), &scaled, &q).unwrap();
        let measured = (td / t1).ln() / delta.ln();
        let (p, qq) = critical_exponents_f64(dim);
        let homogeneous = (d * (d + 1)) as f64 / 2.0;
        let predicted = homogeneous * (1.0 / p + 1.0 - 1.0 / qq);
        // The midpoint rule sees the dilated boxes on a different grid.
        assert!((measured - predicted).abs() < 1e-3, "d={d}: {measured} vs {predicted}");
    }
}

#[test]
fn rwt_verdict_is_invariant_under_dilation_of_corpus_pairs() {
    let corpus = builtin_corpus();
    let q = QuadSpec::default();
    for id in ["box-2-02", "slab-2-01", "random-2-01", "box-3-01"] {
        let entry = corpus.entries.iter().find(|e| e.id == id).unwrap();
        let base = check_rwt(&entry.e, &entry.f, &entry.range, &q).unwrap();
        for delta in [0.5, 2.0] {
            let range = Interval::new(delta * entry.range.lo, delta * entry.range.hi).unwrap();
            let rep = check_rwt(&entry.e.dilate(delta), &entry.f.dilate(delta), &range, &q).unwrap();
            let (a, b) = (rep.verdict, base.verdict);
            assert!((a - b).abs() <= 5e-3 * b, "{id} δ={delta}: {a} vs {b}");
        }
    }
}

#[test]
fn rwt_floor_over_the_corpus_is_the_unit_square_value() {
    let corpus = builtin_corpus();
    let floor = corpus
        .entries
        .iter()
        .map(|e| check_rwt(&e.e, &e.f, &e.range, &QuadSpec::for_dim(e.dim())).unwrap().verdict)
        .fold(f64::INFINITY, f64::min);
    // For E = F = [0, 1]² the ratios are 1 / (3/4)³ exactly.
    assert!((floor - 64.0 / 27.0).abs() < 1e-6, "{floor}");
}
