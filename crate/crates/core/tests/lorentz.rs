use momentray_core::geometry::Dim;
use momentray_core::lorentz::{distribution, lorentz_norm, lp_norm, SimpleFunction, Term};
use momentray_core::xray::{AxisBox, BoxUnionSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Terms on distinct cells of a 4×4 grid of the unit square.
fn random_simple(rng: &mut ChaCha8Rng) -> SimpleFunction {
    let mut cells: Vec<usize> = (0..16).collect();
    let count = rng.gen_range(1..=6);
    let terms = (0..count)
        .map(|_| {
            let c = cells.swap_remove(rng.gen_range(0..cells.len()));
            let (i, j) = ((c % 4) as f64 * 0.25, (c / 4) as f64 * 0.25);
            let b = AxisBox::new(vec![i, j], vec![i + rng.gen_range(0.05..0.25), j + 0.25]).unwrap();
            Term {
                weight: rng.gen_range(0.1..5.0),
                support: BoxUnionSet::single(b).unwrap(),
            }
        })
        .collect();
    SimpleFunction::new(Dim::new(2).unwrap(), terms).unwrap()
}

/// Values of `f` on an `n × n` midpoint grid, sorted decreasingly.
fn sorted_samples(f: &SimpleFunction, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let mut v: Vec<f64> = (0..n * n)
        .map(|k| f.eval(&[((k % n) as f64 + 0.5) * h, ((k / n) as f64 + 0.5) * h]))
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[test]
fn distribution_matches_grid_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 400;
    for _ in 0..20 {
        let f = random_simple(&mut rng);
        let samples = sorted_samples(&f, n);
        for lambda in [0.0, 0.5, 1.0, 2.5, 4.0] {
            let counted = samples.iter().filter(|v| **v > lambda).count() as f64 / (n * n) as f64;
            let exact = distribution(&f, lambda).unwrap();
            assert!((counted - exact).abs() <= 0.01, "λ={lambda}: {counted} vs {exact}");
        }
    }
}

/// `(∫₀^∞ (t^{1/s} f*(t))^r dt/t)^{1/r}` with `f*` from sorted grid values
/// and `t^{r/s}` integrated exactly over each grid cell of measure.
fn lorentz_from_samples(sorted: &[f64], s: f64, r: f64) -> f64 {
    let cell = 1.0 / sorted.len() as f64;
    let e = r / s;
    let sum: f64 = sorted
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| v.powf(r) * (s / r) * (((i + 1) as f64 * cell).powf(e) - (i as f64 * cell).powf(e)))
        .sum();
    sum.powf(1.0 / r)
}

#[test]
fn lorentz_norms_match_a_sampled_rearrangement() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10 {
        let f = random_simple(&mut rng);
        let sorted = sorted_samples(&f, 400);
        for (s, r) in [(1.5, 1.5), (1.5, 3.0), (2.0, 1.0), (3.0, 2.0)] {
            let exact = lorentz_norm(&f, s, r).unwrap();
            let sampled = lorentz_from_samples(&sorted, s, r);
            assert!((exact - sampled).abs() <= 0.02 * exact, "(s, r) = ({s}, {r}): {exact} vs {sampled}");
        }
        let weak = lorentz_norm(&f, 2.0, f64::INFINITY).unwrap();
        let cell = 1.0 / sorted.len() as f64;
        let sampled_weak = sorted
            .iter()
            .enumerate()
            .map(|(i, v)| v * ((i + 1) as f64 * cell).sqrt())
            .fold(0.0, f64::max);
        assert!((weak - sampled_weak).abs() <= 0.02 * weak, "{weak} vs {sampled_weak}");
    }
}

#[test]
fn diagonal_lorentz_norm_is_the_lebesgue_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let f = random_simple(&mut rng);
        for p in [1.0, 1.5, 2.0, 4.0] {
            let a = lorentz_norm(&f, p, p).unwrap();
            let b = lp_norm(&f, p).unwrap();
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}

#[test]
fn weak_norm_is_dominated_by_strong_norms() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let f = random_simple(&mut rng);
        let norms: Vec<f64> = [1.0, 1.5, 2.0, 4.0, 8.0, f64::INFINITY]
            .iter()
            .map(|&r| lorentz_norm(&f, 2.0, r).unwrap())
            .collect();
        // t^{1/s} f*(t) ≤ (r/s)^{1/r} ‖f‖_{s,r} and (r/s)^{1/r} ≤ e^{1/(e s)}.
        let weak = *norms.last().unwrap();
        for n in &norms[..norms.len() - 1] {
            assert!(weak <= n * (1.0 / (std::f64::consts::E * 2.0)).exp() + 1e-12);
        }
    }
}
