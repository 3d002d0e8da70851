use momentray_core::geometry::{gamma, Dim};
use momentray_core::xray::{adjoint_pairing, bilinear_form, x_indicator, AxisBox, BoxUnionSet, Interval, QuadSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_box(rng: &mut ChaCha8Rng, d: usize) -> AxisBox {
    let lo: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..0.5)).collect();
    let hi = lo.iter().map(|l| l + rng.gen_range(0.2..0.8)).collect();
    AxisBox::new(lo, hi).unwrap()
}

/// Length of `{s ∈ I : γ(x, s) ∈ E}` by counting midpoints.
fn sampled_x(e: &BoxUnionSet, range: &Interval, x: &[f64], n: usize) -> f64 {
    let h = range.len() / n as f64;
    let hits = (0..n)
        .filter(|&i| e.contains(&gamma(x, range.lo + (i as f64 + 0.5) * h)))
        .count();
    hits as f64 * h
}

#[test]
fn x_indicator_agrees_with_sampled_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let range = Interval::new(-1.0, 1.0).unwrap();
    let n = 200_000;
    for d in [2, 3, 4] {
        for _ in 0..30 {
            let e = BoxUnionSet::single(random_box(&mut rng, d)).unwrap();
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let exact = x_indicator(&e, &range, &x);
            let sampled = sampled_x(&e, &range, &x, n);
            // Each fiber endpoint moves the count by at most one cell.
            assert!((exact - sampled).abs() <= 2.0 * d as f64 * range.len() / n as f64, "d={d}: {exact} vs {sampled}");
        }
    }
}

#[test]
fn bilinear_form_matches_a_brute_force_triple_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let range = Interval::new(0.0, 1.0).unwrap();
    let (nx, ns) = (160, 320);
    for _ in 0..4 {
        let e = BoxUnionSet::single(random_box(&mut rng, 2)).unwrap();
        let fb = random_box(&mut rng, 2);
        let f = BoxUnionSet::single(fb.clone()).unwrap();
        let (w0, w1) = (fb.side(0) / nx as f64, fb.side(1) / nx as f64);
        let mut sum = 0.0;
        for i in 0..nx {
            for j in 0..nx {
                let x = [fb.lo[0] + (i as f64 + 0.5) * w0, fb.lo[1] + (j as f64 + 0.5) * w1];
                sum += sampled_x(&e, &range, &x, ns);
            }
        }
        let brute = sum * w0 * w1;
        let t = bilinear_form(&e, &f, &range, &QuadSpec::default()).unwrap();
        assert!((t - brute).abs() <= 1e-2 * t.max(1e-3), "{t} vs {brute}");
        let dual = adjoint_pairing(&e, &f, &range, &QuadSpec::default()).unwrap();
        assert!((dual - t).abs() <= 1e-3 * t.max(1e-3), "{dual} vs {t}");
    }
}

#[test]
fn bilinear_form_is_additive_over_disjoint_pieces() {
    let range = Interval::new(0.0, 1.0).unwrap();
    let unit = |d| BoxUnionSet::single(AxisBox::unit(Dim::new(d).unwrap())).unwrap();
    for d in [2, 3] {
        let f = unit(d);
        let mut lo_half = vec![0.0; d];
        let mut hi_half = vec![1.0; d];
        hi_half[d - 1] = 0.5;
        let low = AxisBox::new(lo_half.clone(), hi_half.clone()).unwrap();
        lo_half[d - 1] = 0.5;
        hi_half[d - 1] = 1.0;
        let high = AxisBox::new(lo_half, hi_half).unwrap();
        let q = QuadSpec::default();
        let whole = bilinear_form(&unit(d), &f, &range, &q).unwrap();
        let a = bilinear_form(&BoxUnionSet::single(low.clone()).unwrap(), &f, &range, &q).unwrap();
        let b = bilinear_form(&BoxUnionSet::single(high.clone()).unwrap(), &f, &range, &q).unwrap();
        let both = BoxUnionSet::new(Dim::new(d).unwrap(), vec![low, high]).unwrap();
        let joined = bilinear_form(&both, &f, &range, &q).unwrap();
        assert!((a + b - whole).abs() <= 1e-9, "d={d}");
        assert!((joined - whole).abs() <= 1e-9, "d={d}");
    }
}
