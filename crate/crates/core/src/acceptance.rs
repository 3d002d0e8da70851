//! The acceptance suite: nine pass/fail checks with pinned tolerances.
//!
//! [`run_acceptance`] evaluates checks 1–8, then evaluates them again on a
//! single worker thread and compares the serialized reports byte for byte
//! (check 9).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{estimate_c_d, Dim, MapKind};
use crate::lorentz::{lorentz_norm, lp_norm, SimpleFunction, Term};
use crate::refinement::{build_tower, enumerate_levels_2d, tower_kind, verify_structure, TowerOptions, TowerSets};
use crate::sharpness::{
    builtin_corpus, check_rwt, critical_exponents_f64, default_n_list, necessity_check, scaling_experiment,
    shrinking_sweep, BoundSide, Corpus, FBoundVariant, NecessityVerdict,
};
use crate::xray::{adjoint_pairing, bilinear_form, AxisBox, BoxUnionSet, Interval, QuadSpec};

pub const DEFAULT_SEED: u64 = 7;

pub const JACOBIAN_SAMPLES: usize = 100;
pub const JACOBIAN_DISPERSION_TOL: f64 = 1e-6;
pub const JACOBIAN_D2_TOL: f64 = 1e-6;
pub const ADJOINT_PAIRS: usize = 50;
pub const ADJOINT_TOL: f64 = 1e-3;
pub const BILINEAR_TOL: f64 = 1e-6;
pub const SLOPE_REL_TOL: f64 = 0.03;
pub const CRITICAL_SLOPE_TOL: f64 = 1e-2;
pub const LORENTZ_SAMPLES: usize = 100;
pub const LORENTZ_TOL: f64 = 1e-12;
pub const RWT_FLOOR: f64 = 0.01;
pub const RWT_MIN_ENTRIES: usize = 30;
pub const STABILITY_FACTOR: f64 = 2.0;
pub const SWEEP_DECAY_FACTOR: f64 = 0.5;
pub const ORACLE_GRID: usize = 64;
pub const ORACLE_FACTOR: f64 = 2.0;
pub const STRUCTURE_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    /// Named measurements behind the verdict; non-finite values serialize as null.
    pub metrics: BTreeMap<String, f64>,
}

impl CriterionOutcome {
    fn new(id: u8, name: &str, passed: bool, summary: String, metrics: BTreeMap<String, f64>) -> Self {
        CriterionOutcome {
            id,
            name: name.to_string(),
            passed,
            summary,
            metrics,
        }
    }

    /// `[PASS] 3 bilinear-value: ...`
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {} {}: {}", self.id, self.name, self.summary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub criteria: Vec<CriterionOutcome>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

fn sub_seed(seed: u64, id: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id)
}

fn dim(d: usize) -> Dim {
    Dim::new(d).expect("d ≥ 2")
}

fn unit_interval() -> Interval {
    Interval::new(0.0, 1.0).expect("valid interval")
}

fn unit(d: usize) -> BoxUnionSet {
    BoxUnionSet::single(AxisBox::unit(dim(d))).expect("unit box")
}

/// Jacobian constancy for `d = 2..=7`, both maps.
pub fn check_jacobian(seed: u64) -> Result<CriterionOutcome> {
    let mut metrics = BTreeMap::new();
    let mut passed = true;
    let mut worst = 0.0f64;
    for d in 2..=7usize {
        for kind in [MapKind::Phi, MapKind::Psi] {
            let est = estimate_c_d(kind, dim(d), JACOBIAN_SAMPLES, sub_seed(seed, (d * 2) as u64 + kind as u64))?;
            metrics.insert(format!("{}_d{d}_mean", kind.name()), est.mean);
            metrics.insert(format!("{}_d{d}_dispersion", kind.name()), est.dispersion);
            worst = worst.max(est.dispersion);
            passed &= est.dispersion < JACOBIAN_DISPERSION_TOL && est.mean.abs() > 0.5;
            if d == 2 {
                let want = if kind == MapKind::Phi { -1.0 } else { 1.0 };
                passed &= (est.mean - want).abs() <= JACOBIAN_D2_TOL;
            }
        }
    }
    let summary = format!(
        "worst dispersion {worst:.2e} (< {JACOBIAN_DISPERSION_TOL:e}), d=2 means {:.9} / {:.9}",
        metrics["phi_d2_mean"], metrics["psi_d2_mean"]
    );
    Ok(CriterionOutcome::new(1, "jacobian-constancy", passed, summary, metrics))
}

fn random_box(rng: &mut ChaCha8Rng, d: usize) -> AxisBox {
    let lo: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..0.5)).collect();
    let hi = lo.iter().map(|a| a + rng.gen_range(0.2..0.8)).collect();
    AxisBox::new(lo, hi).expect("positive sides")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointSample {
    pub e: AxisBox,
    pub f: AxisBox,
    /// `⟨Xχ_E, χ_F⟩`.
    pub t: f64,
    /// `⟨χ_E, X*χ_F⟩`.
    pub pairing: f64,
    pub relative_error: f64,
}

/// `pairs` random box pairs with both sides of the duality identity.
///
/// Pairs with `T < 0.05·|I|·|F|` are redrawn: a relative error against a
/// near-zero `T` carries no information.
pub fn adjointness_sample(d: Dim, pairs: usize, range: &Interval, quad: &QuadSpec, seed: u64) -> Result<Vec<AdjointSample>> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let n = d.get();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = Vec::with_capacity(pairs);
    while kept.len() < pairs {
        let batch: Vec<(AxisBox, AxisBox)> = (0..pairs).map(|_| (random_box(&mut rng, n), random_box(&mut rng, n))).collect();
        let samples = batch
            .into_par_iter()
            .map(|(a, b)| {
                let (e, f) = (BoxUnionSet::single(a.clone())?, BoxUnionSet::single(b.clone())?);
                let t = bilinear_form(&e, &f, range, quad)?;
                if t < 0.05 * range.len() * f.measure() {
                    return Ok(None);
                }
                let pairing = adjoint_pairing(&e, &f, range, quad)?;
                Ok(Some(AdjointSample {
                    e: a,
                    f: b,
                    t,
                    pairing,
                    relative_error: (t - pairing).abs() / t,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        kept.extend(samples.into_iter().flatten());
    }
    kept.truncate(pairs);
    Ok(kept)
}

pub fn worst_relative_error(samples: &[AdjointSample]) -> f64 {
    samples.iter().map(|s| s.relative_error).fold(0.0, f64::max)
}

/// Duality on random box pairs, `d = 2, 3`.
pub fn check_adjointness(seed: u64) -> Result<CriterionOutcome> {
    let range = Interval::new(-1.0, 1.0)?;
    let mut metrics = BTreeMap::new();
    let mut worst_all = 0.0f64;
    for d in [2usize, 3] {
        let samples = adjointness_sample(dim(d), ADJOINT_PAIRS, &range, &QuadSpec::for_dim(dim(d)), sub_seed(seed, d as u64))?;
        let worst = worst_relative_error(&samples);
        metrics.insert(format!("d{d}_worst_relative_error"), worst);
        worst_all = worst_all.max(worst);
    }
    let passed = worst_all <= ADJOINT_TOL;
    let summary = format!(
        "worst |<Xχ_E,χ_F> − <χ_E,X*χ_F>|/T = {:.2e} (d=2), {:.2e} (d=3); tol {ADJOINT_TOL:e}",
        metrics["d2_worst_relative_error"], metrics["d3_worst_relative_error"]
    );
    Ok(CriterionOutcome::new(2, "adjointness", passed, summary, metrics))
}

/// `T([0,1]², [0,1]²)` over `I = [0,1]` against the hand value 3/4.
pub fn check_bilinear_value() -> Result<CriterionOutcome> {
    let t = bilinear_form(&unit(2), &unit(2), &unit_interval(), &QuadSpec::for_dim(dim(2)))?;
    let err = (t - 0.75).abs();
    let metrics = BTreeMap::from([("t".to_string(), t), ("abs_error".to_string(), err)]);
    let passed = err <= BILINEAR_TOL;
    let summary = format!("T = {t:.12} vs 0.75, error {err:.1e} (tol {BILINEAR_TOL:e})");
    Ok(CriterionOutcome::new(3, "bilinear-value", passed, summary, metrics))
}

/// Counterexample slopes for `d = 2, 3, 4` and the flip of the verdict at `r = p_d`.
pub fn check_counterexample_scaling() -> Result<CriterionOutcome> {
    let n_list = default_n_list();
    let mut metrics = BTreeMap::new();
    let mut passed = true;
    let mut notes = Vec::new();
    for d in [2usize, 3, 4] {
        let dm = dim(d);
        let (p, _) = critical_exponents_f64(dm);
        let rep = scaling_experiment(dm, p, &n_list)?;
        let err_f = (rep.fit_f.slope - rep.predicted_f).abs() / rep.predicted_f.abs();
        let err_xf = (rep.fit_xf.slope - rep.predicted_xf).abs() / rep.predicted_xf.abs();
        let gap = (rep.fit_f.slope - rep.fit_xf.slope).abs();
        let below = necessity_check(dm, 0.9 * p, &n_list)?;
        let above = necessity_check(dm, 1.1 * p, &n_list)?;
        let flips = below.verdict == NecessityVerdict::Unbounded && above.verdict == NecessityVerdict::Bounded;
        passed &= err_f <= SLOPE_REL_TOL && err_xf <= SLOPE_REL_TOL && gap <= CRITICAL_SLOPE_TOL && flips;
        metrics.insert(format!("d{d}_slope_f"), rep.fit_f.slope);
        metrics.insert(format!("d{d}_predicted_f"), rep.predicted_f);
        metrics.insert(format!("d{d}_slope_xf"), rep.fit_xf.slope);
        metrics.insert(format!("d{d}_predicted_xf"), rep.predicted_xf);
        metrics.insert(format!("d{d}_slope_gap_at_p"), gap);
        metrics.insert(format!("d{d}_difference_below_p"), below.difference);
        metrics.insert(format!("d{d}_difference_above_p"), above.difference);
        notes.push(format!(
            "d={d} f {:.4}/{:.4} Xf {:.4}/{:.4} gap {gap:.1e} flip {}",
            rep.fit_f.slope,
            rep.predicted_f,
            rep.fit_xf.slope,
            rep.predicted_xf,
            if flips { "yes" } else { "no" }
        ));
    }
    Ok(CriterionOutcome::new(4, "counterexample-scaling", passed, notes.join("; "), metrics))
}

/// Up to 6 disjoint boxes, one per cell of a `4 × 4` partition of `[0, 4]²`.
fn random_simple_function(rng: &mut ChaCha8Rng) -> Result<SimpleFunction> {
    let count = rng.gen_range(1..=6usize);
    let mut cells: Vec<usize> = Vec::new();
    while cells.len() < count {
        let c = rng.gen_range(0..16usize);
        if !cells.contains(&c) {
            cells.push(c);
        }
    }
    let terms = cells
        .iter()
        .map(|&c| {
            let (cx, cy) = ((c % 4) as f64, (c / 4) as f64);
            let lo = vec![cx + rng.gen_range(0.0..0.4), cy + rng.gen_range(0.0..0.4)];
            let hi = vec![cx + rng.gen_range(0.5..1.0), cy + rng.gen_range(0.5..1.0)];
            Ok(Term {
                weight: rng.gen_range(0.01..10.0),
                support: BoxUnionSet::single(AxisBox::new(lo, hi)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SimpleFunction::new(dim(2), terms)
}

/// `‖f‖_{p,p} = ‖f‖_p` on random simple functions and the indicator closed form.
pub fn check_lorentz_identity(seed: u64) -> Result<CriterionOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 5));
    let mut worst_pp = 0.0f64;
    for _ in 0..LORENTZ_SAMPLES {
        let f = random_simple_function(&mut rng)?;
        let p = rng.gen_range(0.3..6.0);
        let lp = lp_norm(&f, p)?;
        worst_pp = worst_pp.max((lorentz_norm(&f, p, p)? - lp).abs() / lp);
    }
    let mut worst_chi = 0.0f64;
    for _ in 0..LORENTZ_SAMPLES {
        let a = random_box(&mut rng, 2);
        let (s, r): (f64, f64) = (rng.gen_range(0.3..6.0), rng.gen_range(0.3..6.0));
        let want = (s / r).powf(1.0 / r) * a.volume().powf(1.0 / s);
        let got = lorentz_norm(&SimpleFunction::indicator(BoxUnionSet::single(a)?), s, r)?;
        worst_chi = worst_chi.max((got - want).abs() / want);
    }
    let metrics = BTreeMap::from([
        ("worst_pp_relative_error".to_string(), worst_pp),
        ("worst_indicator_relative_error".to_string(), worst_chi),
    ]);
    let passed = worst_pp <= LORENTZ_TOL && worst_chi <= LORENTZ_TOL;
    let summary = format!("‖f‖_(p,p) vs ‖f‖_p worst {worst_pp:.1e}, χ_A closed form worst {worst_chi:.1e} (tol {LORENTZ_TOL:e})");
    Ok(CriterionOutcome::new(5, "lorentz-identity", passed, summary, metrics))
}

fn corpus_has_both_dims(corpus: &Corpus) -> bool {
    [2, 3].iter().all(|&d| corpus.entries.iter().any(|e| e.dim().get() == d))
}

/// Restricted weak-type verdict floor over the corpus and its stability
/// under one halving of the quadrature step.
pub fn check_rwt_floor(corpus: &Corpus) -> Result<CriterionOutcome> {
    let verdicts = corpus
        .entries
        .par_iter()
        .map(|entry| {
            let quad = QuadSpec::for_dim(entry.dim());
            let coarse = check_rwt(&entry.e, &entry.f, &entry.range, &quad)?;
            let fine = check_rwt(&entry.e, &entry.f, &entry.range, &quad.with_step(quad.step / 2.0))?;
            Ok((coarse.verdict, fine.verdict))
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = verdicts.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let floor_fine = verdicts.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let stability = floor.max(floor_fine) / floor.min(floor_fine);
    let mut metrics = BTreeMap::from([
        ("entries".to_string(), corpus.entries.len() as f64),
        ("floor".to_string(), floor),
        ("floor_half_step".to_string(), floor_fine),
        ("stability_ratio".to_string(), stability),
    ]);
    for (entry, v) in corpus.entries.iter().zip(&verdicts) {
        metrics.insert(format!("verdict_{}", entry.id), v.0);
    }
    let passed = corpus.entries.len() >= RWT_MIN_ENTRIES
        && corpus_has_both_dims(corpus)
        && verdicts.iter().all(|v| v.0 >= RWT_FLOOR && v.0.is_finite())
        && stability <= STABILITY_FACTOR;
    let summary = format!(
        "{} entries, floor max(ratio_E, ratio_F) = {floor:.4} (≥ {RWT_FLOOR}), half step {floor_fine:.4}, ratio {stability:.4} (≤ {STABILITY_FACTOR})",
        corpus.entries.len()
    );
    Ok(CriterionOutcome::new(6, "rwt-floor", passed, summary, metrics))
}

/// Starting grid of the level-bound sweeps.
pub fn sweep_start_cells(d: Dim) -> usize {
    if d.get() == 2 {
        16
    } else {
        8
    }
}

/// Per-step floors of the level-bound ratios over the corpus.
pub fn sweep_floors(corpus: &Corpus, side: BoundSide) -> Result<Vec<f64>> {
    let per_entry = corpus
        .entries
        .par_iter()
        .map(|entry| {
            let quad = QuadSpec::for_dim(entry.dim());
            let n = sweep_start_cells(entry.dim());
            let steps = shrinking_sweep(side, &entry.e, &entry.f, &entry.range, &quad, n, FBoundVariant::OverH)?;
            Ok(steps.iter().map(|s| s.report.ratio).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let steps = per_entry.first().map_or(0, Vec::len);
    Ok((0..steps)
        .map(|i| per_entry.iter().map(|r| r[i]).fold(f64::INFINITY, f64::min))
        .collect())
}

/// A positive floor at every step and a last step at least
/// `SWEEP_DECAY_FACTOR` times the smallest earlier floor.
pub fn floors_do_not_decay(floors: &[f64]) -> bool {
    let Some((last, earlier)) = floors.split_last() else {
        return false;
    };
    let earlier_min = earlier.iter().copied().fold(f64::INFINITY, f64::min);
    floors.iter().all(|f| *f > 0.0 && f.is_finite()) && *last >= SWEEP_DECAY_FACTOR * earlier_min
}

/// Level-bound ratios along the shrinking-level-set sweep on the corpus.
pub fn check_level_bounds(corpus: &Corpus) -> Result<CriterionOutcome> {
    let mut metrics = BTreeMap::new();
    let mut passed = true;
    let mut notes = Vec::new();
    for side in [BoundSide::E, BoundSide::F] {
        let floors = sweep_floors(corpus, side)?;
        let name = format!("{side:?}");
        for (i, f) in floors.iter().enumerate() {
            metrics.insert(format!("{name}_floor_step{}", i + 1), *f);
        }
        let ok = floors_do_not_decay(&floors);
        passed &= ok;
        let list: Vec<String> = floors.iter().map(|f| format!("{f:.3}")).collect();
        notes.push(format!("{name} floors [{}]", list.join(", ")));
    }
    Ok(CriterionOutcome::new(7, "level-bound-sweeps", passed, notes.join("; "), metrics))
}

/// `d = 2` towers against exhaustive enumeration and their sampled structure.
pub fn check_refinement_oracle(corpus: &Corpus, seed: u64) -> Result<CriterionOutcome> {
    let mut cases: Vec<(String, BoxUnionSet, BoxUnionSet, Interval)> =
        vec![("unit".to_string(), unit(2), unit(2), unit_interval())];
    for entry in corpus.entries.iter().filter(|e| e.dim().get() == 2) {
        cases.push((entry.id.clone(), entry.e.clone(), entry.f.clone(), entry.range));
    }
    let mut metrics = BTreeMap::new();
    let mut worst_factor = 1.0f64;
    let mut sampled = 0usize;
    let mut failures = 0usize;
    let mut towers = 0usize;
    let mut collapsed = 0usize;
    let opts = TowerOptions::default();
    for (i, (id, e, f, range)) in cases.iter().enumerate() {
        for side in [BoundSide::E, BoundSide::F] {
            let kind = tower_kind(side, dim(2));
            let sets = match side {
                BoundSide::E => TowerSets {
                    first: e.clone(),
                    second: f.clone(),
                    target: e.clone(),
                },
                BoundSide::F => TowerSets {
                    first: e.clone(),
                    second: f.clone(),
                    target: f.clone(),
                },
            };
            let tower = match build_tower(kind, &sets, range, &opts) {
                Ok(t) => t,
                Err(Error::TowerCollapse(_)) | Err(Error::EmptyRefinement) => {
                    collapsed += 1;
                    continue;
                }
                Err(err) => return Err(err),
            };
            towers += 1;
            let (raw1, raw2) = enumerate_levels_2d(&tower, ORACLE_GRID)?;
            for (level, raw) in tower.levels.iter().zip([raw1, raw2]) {
                let m = level.measure();
                let factor = if m > 0.0 && raw > 0.0 { (m / raw).max(raw / m) } else { f64::INFINITY };
                worst_factor = worst_factor.max(factor);
                metrics.insert(format!("{id}_{side:?}_level{}_factor", level.index), factor);
            }
            let check = verify_structure(&tower, STRUCTURE_SAMPLES, sub_seed(seed, 800 + 2 * i as u64 + side as u64));
            sampled += check.sampled;
            failures += check.sampled - check.passed;
        }
    }
    metrics.insert("towers".to_string(), towers as f64);
    metrics.insert("collapsed".to_string(), collapsed as f64);
    metrics.insert("worst_factor".to_string(), worst_factor);
    metrics.insert("structure_sampled".to_string(), sampled as f64);
    metrics.insert("structure_failures".to_string(), failures as f64);
    let passed = towers > 0 && worst_factor <= ORACLE_FACTOR && failures == 0 && sampled > 0;
    let summary = format!(
        "{towers} towers ({collapsed} collapsed), worst level/enumeration factor {worst_factor:.3} (≤ {ORACLE_FACTOR}), structure {}/{sampled} sampled tuples",
        sampled - failures
    );
    Ok(CriterionOutcome::new(8, "refinement-oracle", passed, summary, metrics))
}

/// Checks 1–8 in order.
pub fn run_checks(seed: u64, corpus: &Corpus) -> Result<Vec<CriterionOutcome>> {
    Ok(vec![
        check_jacobian(seed)?,
        check_adjointness(seed)?,
        check_bilinear_value()?,
        check_counterexample_scaling()?,
        check_lorentz_identity(seed)?,
        check_rwt_floor(corpus)?,
        check_level_bounds(corpus)?,
        check_refinement_oracle(corpus, seed)?,
    ])
}

fn serialize(outcomes: &[CriterionOutcome]) -> Result<String> {
    Ok(serde_json::to_string(outcomes)?)
}

/// The full suite on the committed corpus.
pub fn run_acceptance(seed: u64) -> Result<AcceptanceReport> {
    run_acceptance_on(seed, &builtin_corpus())
}

pub fn run_acceptance_on(seed: u64, corpus: &Corpus) -> Result<AcceptanceReport> {
    let mut criteria = run_checks(seed, corpus)?;
    let first = serialize(&criteria)?;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let second = serialize(&single.install(|| run_checks(seed, corpus))?)?;
    let identical = first == second;
    let metrics = BTreeMap::from([
        ("bytes".to_string(), first.len() as f64),
        ("identical".to_string(), if identical { 1.0 } else { 0.0 }),
    ]);
    let summary = format!(
        "second run on one worker thread: {} ({} bytes)",
        if identical { "byte-identical" } else { "outputs differ" },
        first.len()
    );
    criteria.push(CriterionOutcome::new(9, "determinism", identical, summary, metrics));
    Ok(AcceptanceReport { seed, criteria })
}
