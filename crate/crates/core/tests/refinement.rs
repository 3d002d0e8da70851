use momentray_core::geometry::{Dim, MapKind};
use momentray_core::refinement::*;
use momentray_core::sharpness::{builtin_corpus, BoundSide, CorpusKind};
use momentray_core::xray::{AxisBox, BoxUnionSet, Interval, QuadSpec};
use momentray_core::Error;

fn unit(d: usize) -> BoxUnionSet {
    BoxUnionSet::single(AxisBox::unit(Dim::new(d).unwrap())).unwrap()
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn same(set: &BoxUnionSet) -> TowerSets {
    TowerSets {
        first: set.clone(),
        second: set.clone(),
        target: set.clone(),
    }
}

#[test]
fn unit_square_tower_against_enumeration() {
    let tower = build_tower(MapKind::Phi, &same(&unit(2)), &iv(0.0, 1.0), &TowerOptions::default()).unwrap();
    assert_eq!(tower.levels.len(), 2);
    let (raw1, raw2) = enumerate_levels_2d(&tower, 64).unwrap();
    for (level, raw) in tower.levels.iter().zip([raw1, raw2]) {
        let m = level.measure();
        assert!(m <= 2.0 * raw && raw <= 2.0 * m, "level {}: tower {m} vs grid {raw}", level.index);
    }
    let check = verify_structure(&tower, 500, 3);
    assert!(check.ok(), "{check:?}");
}

#[test]
fn image_volume_matches_rasterisation() {
    let tower = build_tower(MapKind::Phi, &same(&unit(2)), &iv(0.0, 1.0), &TowerOptions::default()).unwrap();
    let closed = image_volume_lower_bound(&tower, JacobianSource::ClosedForm).unwrap();
    let numeric = image_volume_lower_bound(&tower, JacobianSource::Numeric).unwrap();
    let raster = rasterized_image_area_2d(&tower, 512).unwrap();
    assert!((closed - numeric).abs() <= 1e-6 * closed, "{closed} vs {numeric}");
    assert!((closed - raster).abs() <= 0.03 * closed, "{closed} vs {raster}");
}

#[test]
fn degenerate_tower_has_small_integral() {
    // A thin first coordinate pins s₁ next to x₁, where J = s₁ − x₁ vanishes.
    let mut last = f64::INFINITY;
    for eps in [0.1, 0.01, 0.001] {
        let e = BoxUnionSet::single(AxisBox::new(vec![0.5, 0.0], vec![0.5 + eps, 1.0]).unwrap()).unwrap();
        let sets = TowerSets {
            first: e.clone(),
            second: unit(2),
            target: e,
        };
        let tower = build_tower(MapKind::Phi, &sets, &iv(0.0, 1.0), &TowerOptions::default()).unwrap();
        let v = image_volume_lower_bound(&tower, JacobianSource::ClosedForm).unwrap();
        assert!(v <= eps * eps, "eps={eps}: {v}");
        assert!(v < last);
        last = v;
    }
}

#[test]
fn disjoint_sets_collapse_at_the_first_level() {
    let far = BoxUnionSet::single(AxisBox::new(vec![10.0, 10.0], vec![11.0, 11.0]).unwrap()).unwrap();
    let sets = TowerSets {
        first: unit(2),
        second: far.clone(),
        target: unit(2),
    };
    let err = build_tower(MapKind::Phi, &sets, &iv(0.0, 1.0), &TowerOptions::default());
    assert!(matches!(err, Err(Error::TowerCollapse(1))), "{err:?}");
}

#[test]
fn parity_table() {
    let d2 = Dim::new(2).unwrap();
    let d3 = Dim::new(3).unwrap();
    assert_eq!(tower_kind(BoundSide::E, d2), MapKind::Phi);
    assert_eq!(tower_kind(BoundSide::F, d2), MapKind::Psi);
    assert_eq!(tower_kind(BoundSide::E, d3), MapKind::Psi);
    assert_eq!(tower_kind(BoundSide::F, d3), MapKind::Phi);
    for d in 2..=7 {
        let dim = Dim::new(d).unwrap();
        for side in [BoundSide::E, BoundSide::F] {
            assert_eq!(tower_side(tower_kind(side, dim), dim), side);
        }
    }
}

#[test]
fn towers_in_both_parities() {
    let range = iv(0.0, 1.0);
    let quad = QuadSpec::default();
    for d in [2usize, 3] {
        let dim = Dim::new(d).unwrap();
        for side in [BoundSide::E, BoundSide::F] {
            let kind = tower_kind(side, dim);
            let tower = build_tower(kind, &same(&unit(d)), &range, &TowerOptions::default()).unwrap();
            assert_eq!(tower.levels.len(), d);
            let first = if kind == MapKind::Phi { 1 } else { 2 };
            let idx: Vec<usize> = tower.levels.iter().map(|l| l.index).collect();
            assert_eq!(idx, (first..first + d).collect::<Vec<_>>());
            let rep = tower_report(&tower, &quad, JacobianSource::ClosedForm, 200, 9).unwrap();
            assert!(rep.structure.ok(), "d={d} {side:?}: {:?}", rep.structure);
            assert!(rep.integral > 0.0 && rep.ratio > 0.0, "d={d} {side:?}: {rep:?}");
            for l in &rep.levels {
                assert!(l.min_fiber >= l.threshold * (1.0 - 1e-12));
                assert!(l.discarded_mass <= 0.5 * l.total_mass);
            }
        }
    }
}

#[test]
fn counterexample_pieces_track_predicted_fibers() {
    let corpus = builtin_corpus();
    let quad = QuadSpec::default();
    for entry in corpus.entries.iter().filter(|e| e.kind == CorpusKind::Counterexample) {
        let d = entry.dim();
        let kind = tower_kind(BoundSide::E, d);
        let sets = TowerSets {
            first: entry.e.clone(),
            second: entry.f.clone(),
            target: entry.e.clone(),
        };
        let tower = build_tower(kind, &sets, &entry.range, &TowerOptions::default()).unwrap();
        let rep = tower_report(&tower, &quad, JacobianSource::ClosedForm, 100, 1).unwrap();
        assert!(rep.structure.ok(), "{}", entry.id);
        for l in &rep.levels[..rep.levels.len() - 1] {
            assert!(l.ratio > 0.05 && l.ratio.is_finite(), "{} level {}: {}", entry.id, l.index, l.ratio);
        }
    }
}
