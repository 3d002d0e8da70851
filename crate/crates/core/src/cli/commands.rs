use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Format, KindChoice, SideChoice};
use super::output::{num, CommandOutput, Table};
use crate::acceptance::{
    adjointness_sample, floors_do_not_decay, run_acceptance_on, sweep_start_cells, worst_relative_error, ADJOINT_TOL,
    DEFAULT_SEED, JACOBIAN_DISPERSION_TOL, RWT_FLOOR, SLOPE_REL_TOL,
};
use crate::error::{Error, Result};
use crate::geometry::{estimate_c_d, Dim, MapKind};
use crate::refinement::{build_tower, tower_kind, tower_report, JacobianSource, TowerOptions, TowerSets};
use crate::sharpness::{
    builtin_corpus, check_rwt, critical_exponents, critical_exponents_f64, default_n_list, necessity_check,
    region_contains_exact, region_vertices, scaling_experiment, shrinking_sweep, BoundSide, Corpus, NecessityVerdict,
    CRITICAL_TOL,
};
use crate::xray::{superlevel_report, AxisBox, BoxUnionSet, Interval, QuadSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Exponents,
    Region,
    Jacobian,
    Duality,
    Rwt,
    Superlevel,
    Scaling,
    Necessity,
    Lemma2,
    Refine,
    Acceptance,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Exponents => "exponents",
            Operation::Region => "region",
            Operation::Jacobian => "jacobian",
            Operation::Duality => "duality",
            Operation::Rwt => "rwt",
            Operation::Superlevel => "superlevel",
            Operation::Scaling => "scaling",
            Operation::Necessity => "necessity",
            Operation::Lemma2 => "lemma2",
            Operation::Refine => "refine",
            Operation::Acceptance => "acceptance",
        }
    }

    pub fn default_format(self) -> Format {
        match self {
            Operation::Refine => Format::Json,
            _ => Format::Csv,
        }
    }
}

pub fn dispatch(op: Operation, cfg: &ExperimentConfig) -> Result<CommandOutput> {
    match op {
        Operation::Exponents => exponents(cfg),
        Operation::Region => region(cfg),
        Operation::Jacobian => jacobian(cfg),
        Operation::Duality => duality(cfg),
        Operation::Rwt => rwt(cfg),
        Operation::Superlevel => superlevel(cfg),
        Operation::Scaling => scaling(cfg),
        Operation::Necessity => necessity(cfg),
        Operation::Lemma2 => lemma2(cfg),
        Operation::Refine => refine(cfg),
        Operation::Acceptance => acceptance(cfg),
    }
}

fn output(op: Operation, params: BTreeMap<String, String>, table: Table, result: Value) -> CommandOutput {
    CommandOutput {
        operation: op.name(),
        params,
        table,
        result,
        passed: None,
        notes: Vec::new(),
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn seed(cfg: &ExperimentConfig) -> u64 {
    cfg.seed.unwrap_or(DEFAULT_SEED)
}

fn interval_str(i: &Interval) -> String {
    format!("[{}, {}]", num(i.lo), num(i.hi))
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn exponents(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.require("exponents", &["dim"])?;
    let d = cfg.dim()?;
    let (p, q) = critical_exponents(d);
    let verts = region_vertices(d);
    let mut table = Table::new(&["item", "value"]);
    table.push(vec!["p".into(), p.to_string()]);
    table.push(vec!["q".into(), q.to_string()]);
    let vstr: Vec<String> = verts.iter().map(|(x, y)| format!("({x}, {y})")).collect();
    for (i, v) in vstr.iter().enumerate() {
        table.push(vec![format!("vertex_{}", i + 1), v.clone()]);
    }
    let result = json!({
        "d": d.get(),
        "p": p.to_string(),
        "q": q.to_string(),
        "vertices": verts.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect::<Vec<_>>(),
    });
    let mut out = output(Operation::Exponents, params(&[("dim", d.get().to_string())]), table, result);
    out.notes.push(format!("p = {p}, q = {q}"));
    out.notes.push(format!("vertices: {}", vstr.join(", ")));
    Ok(out)
}

/// `"2/3"`, `"1"` or a plain decimal like `"0.45"`, all exact.
pub fn parse_rational(name: &str, s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Ok(r) = BigRational::from_str(t) {
        return Ok(r);
    }
    let bad = || Error::Config(format!("{name}: expected a rational like 2/3 or a decimal, got {s:?}"));
    let (neg, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = digits.split_once('.').ok_or_else(bad)?;
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer = BigInt::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

fn region(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.require("region", &["dim", "p_inv", "q_inv"])?;
    let d = cfg.dim()?;
    let (ps, qs) = (cfg.p_inv.clone().unwrap_or_default(), cfg.q_inv.clone().unwrap_or_default());
    let pt = (parse_rational("p_inv", &ps)?, parse_rational("q_inv", &qs)?);
    let membership = region_contains_exact(d, pt.clone());
    let word = serde_json::to_value(membership)?.as_str().unwrap_or_default().to_string();
    let mut table = Table::new(&["d", "p_inv", "q_inv", "membership"]);
    table.push(vec![d.get().to_string(), pt.0.to_string(), pt.1.to_string(), word.clone()]);
    let result = json!({"d": d.get(), "p_inv": pt.0.to_string(), "q_inv": pt.1.to_string(), "membership": membership});
    let mut out = output(
        Operation::Region,
        params(&[("dim", d.get().to_string()), ("p_inv", ps), ("q_inv", qs)]),
        table,
        result,
    );
    out.notes.push(format!("({}, {}) is {word} for d = {}", pt.0, pt.1, d.get()));
    Ok(out)
}

fn kinds(choice: KindChoice) -> Vec<MapKind> {
    match choice {
        KindChoice::Phi => vec![MapKind::Phi],
        KindChoice::Psi => vec![MapKind::Psi],
        KindChoice::Both => vec![MapKind::Phi, MapKind::Psi],
    }
}

fn jacobian(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.require("jacobian", &["dim"])?;
    let d = cfg.dim()?;
    let samples = cfg.samples.unwrap_or(100);
    let seed = seed(cfg);
    let choice = cfg.kind.unwrap_or(KindChoice::Both);
    let mut table = Table::new(&["kind", "sample", "ratio"]);
    let mut estimates = Vec::new();
    let mut notes = Vec::new();
    let mut passed = true;
    for kind in kinds(choice) {
        let est = estimate_c_d(kind, d, samples, seed)?;
        for (i, r) in est.ratios.iter().enumerate() {
            table.push(vec![kind.name().into(), i.to_string(), num(*r)]);
        }
        let ok = est.dispersion < JACOBIAN_DISPERSION_TOL && est.mean.abs() > 0.5;
        passed &= ok;
        notes.push(format!(
            "{}: mean {:.9}, dispersion {:.2e} (< {JACOBIAN_DISPERSION_TOL:e}) {}",
            kind.name(),
            est.mean,
            est.dispersion,
            pass_word(ok)
        ));
        estimates.push(est);
    }
    let p = params(&[
        ("dim", d.get().to_string()),
        ("samples", samples.to_string()),
        ("kind", format!("{choice:?}").to_lowercase()),
    ]);
    let mut out = output(Operation::Jacobian, p, table, serde_json::to_value(&estimates)?);
    out.passed = Some(passed);
    out.notes = notes;
    Ok(out)
}

fn box_str(b: &AxisBox) -> String {
    let pts = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
    format!("[{}]x[{}]", pts(&b.lo), pts(&b.hi))
}

fn duality(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.require("duality", &["dim"])?;
    let d = cfg.dim()?;
    let pairs = cfg.pairs.unwrap_or(50);
    let range = match cfg.range {
        Some(r) => r,
        None => Interval::new(-1.0, 1.0)?,
    };
    let quad = cfg.quad_or(QuadSpec::for_dim(d))?;
    let samples = adjointness_sample(d, pairs, &range, &quad, seed(cfg))?;
    let mut table = Table::new(&["pair", "e", "f", "t", "pairing", "relative_error"]);
    for (i, s) in samples.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            box_str(&s.e),
            box_str(&s.f),
            num(s.t),
            num(s.pairing),
            num(s.relative_error),
        ]);
    }
    let worst = worst_relative_error(&samples);
    let p = params(&[
        ("dim", d.get().to_string()),
        ("pairs", pairs.to_string()),
        ("range", interval_str(&range)),
        ("quad", serde_json::to_string(&quad)?),
    ]);
    let mut out = output(Operation::Duality, p, table, serde_json::to_value(&samples)?);
    out.passed = Some(worst <= ADJOINT_TOL);
    out.notes.push(format!(
        "worst relative error {worst:.2e} over {pairs} pairs (tol {ADJOINT_TOL:e}) {}",
        pass_word(worst <= ADJOINT_TOL)
    ));
    Ok(out)
}

struct Case {
    id: String,
    e: BoxUnionSet,
    f: BoxUnionSet,
    range: Interval,
}

impl Case {
    fn dim(&self) -> Dim {
        self.e.dim()
    }
}

/// Set pairs from `e`/`f` in the config, or from the corpus filtered by `entries`.
fn cases(cfg: &ExperimentConfig) -> Result<Vec<Case>> {
    if cfg.e.is_some() || cfg.f.is_some() {
        cfg.require("set pair", &["e", "f"])?;
        let (e, f) = (cfg.e.clone().unwrap_or_else(|| unreachable!()), cfg.f.clone().unwrap_or_else(|| unreachable!()));
        if e.dim() != f.dim() {
            return Err(Error::Config("e and f have different dimensions".into()));
        }
        let range = match cfg.range {
            Some(r) => r,
            None => Interval::new(0.0, 1.0)?,
        };
        return Ok(vec![Case {
            id: "config".into(),
            e,
            f,
            range,
        }]);
    }
    let corpus = match &cfg.corpus {
        Some(path) => Corpus::load(path).map_err(|e| Error::Config(format!("corpus {}: {e}", path.display())))?,
        None => builtin_corpus(),
    };
    let selected: Vec<_> = match &cfg.entries {
        Some(ids) => ids
            .iter()
            .map(|id| {
                corpus
                    .entries
                    .iter()
                    .find(|e| &e.id == id)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("no corpus entry {id:?}")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => corpus.entries.clone(),
    };
    if selected.is_empty() {
        return Err(Error::Config("no set pairs selected".into()));
    }
    Ok(selected
        .into_iter()
        .map(|e| Case {
            id: e.id,
            range: cfg.range.unwrap_or(e.range),
            e: e.e,
            f: e.f,
        })
        .collect())
}

fn source_params(cfg: &ExperimentConfig, cases: &[Case]) -> Vec<(&'static str, String)> {
    let mut p = vec![("pairs", cases.len().to_string())];
    if let Some(c) = &cfg.corpus {
        p.push(("corpus", c.display().to_string()));
    } else if cfg.e.is_none() {
        p.push(("corpus", "builtin".into()));
    }
    if let Some(r) = &cfg.range {
        p.push(("range", interval_str(r)));
    }
    if let Some(q) = &cfg.quad {
        p.push(("quad", serde_json::to_string(q).unwrap_or_default()));
    }
    p
}

fn rwt(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let cases = cases(cfg)?;
    let reports = cases
        .par_iter()
        .map(|c| check_rwt(&c.e, &c.f, &c.range, &cfg.quad_or(QuadSpec::for_dim(c.dim()))?))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "id", "d", "t", "measure_e", "measure_f", "alpha", "beta", "ratio_e", "ratio_f", "verdict", "constant",
    ]);
    for (c, r) in cases.iter().zip(&reports) {
        table.push(vec![
            c.id.clone(),
            r.d.to_string(),
            num(r.t),
            num(r.measure_e),
            num(r.measure_f),
            num(r.alpha),
            num(r.beta),
            num(r.ratio_e),
            num(r.ratio_f),
            num(r.verdict),
            num(r.constant),
        ]);
    }
    let (floor_id, floor) = cases
        .iter()
        .zip(&reports)
        .map(|(c, r)| (c.id.as_str(), r.verdict))
        .fold(("", f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let ok = reports.iter().all(|r| r.verdict >= RWT_FLOOR && r.verdict.is_finite());
    let result = json!(cases.iter().zip(&reports).map(|(c, r)| json!({"id": c.id, "report": r})).collect::<Vec<_>>());
    let mut out = output(Operation::Rwt, params(&source_params(cfg, &cases)), table, result);
    out.passed = Some(ok);
    out.notes.push(format!(
        "floor max(ratio_E, ratio_F) = {floor:.6} at {floor_id} over {} pairs (≥ {RWT_FLOOR}) {}",
        cases.len(),
        pass_word(ok)
    ));
    Ok(out)
}

fn default_superlevel_grid(d: Dim) -> usize {
    match d.get() {
        2 => 64,
        3 => 16,
        _ => 8,
    }
}

fn superlevel(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let cases = cases(cfg)?;
    let reports = cases
        .par_iter()
        .map(|c| {
            let (p, q) = critical_exponents_f64(c.dim());
            let n = cfg.grid.unwrap_or_else(|| default_superlevel_grid(c.dim()));
            superlevel_report(&c.e, &c.f, &c.range, p, q, n)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "id",
        "d",
        "t",
        "epsilon",
        "theta",
        "c0",
        "g_inner",
        "g_outer",
        "ratio_inner",
        "ratio_outer",
        "outside_fraction",
    ]);
    for (c, r) in cases.iter().zip(&reports) {
        table.push(vec![
            c.id.clone(),
            c.dim().get().to_string(),
            num(r.t),
            num(r.epsilon),
            num(r.theta),
            num(r.c0),
            num(r.g_inner),
            num(r.g_outer),
            num(r.ratio_inner),
            num(r.ratio_outer),
            num(r.outside_fraction),
        ]);
    }
    let ok = reports.iter().all(|r| r.ratio_inner > 0.0 && r.outside_fraction <= 0.5);
    let floor = reports.iter().map(|r| r.ratio_inner).fold(f64::INFINITY, f64::min);
    let mut p = source_params(cfg, &cases);
    if let Some(g) = cfg.grid {
        p.push(("grid", g.to_string()));
    }
    let result = json!(cases.iter().zip(&reports).map(|(c, r)| json!({"id": c.id, "report": r})).collect::<Vec<_>>());
    let mut out = output(Operation::Superlevel, params(&p), table, result);
    out.passed = Some(ok);
    out.notes.push(format!(
        "smallest |G|/(ε^q' |F|) = {floor:.4}; T(E, F∖G) ≤ T/2 on every pair {}",
        pass_word(ok)
    ));
    Ok(out)
}

fn n_list(cfg: &ExperimentConfig) -> Vec<usize> {
    cfg.n_list.clone().unwrap_or_else(default_n_list)
}

fn n_list_str(ns: &[usize]) -> String {
    ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
}

fn scaling(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.require("scaling", &["dim"])?;
    let d = cfg.dim()?;
    let r = cfg.r.unwrap_or_else(|| critical_exponents_f64(d).0);
    let ns = n_list(cfg);
    let rep = scaling_experiment(d, r, &ns)?;
    let mut table = Table::new(&["n", "norm_f", "norm_xf", "norm_xf_lorentz"]);
    for row in &rep.rows {
        table.push(vec![row.n.to_string(), num(row.norm_f), num(row.norm_xf), num(row.norm_xf_lorentz)]);
    }
    let err_f = (rep.fit_f.slope - rep.predicted_f).abs() / rep.predicted_f.abs();
    let err_xf = (rep.fit_xf.slope - rep.predicted_xf).abs() / rep.predicted_xf.abs();
    let ok = err_f <= SLOPE_REL_TOL && err_xf <= SLOPE_REL_TOL;
    let p = params(&[("dim", d.get().to_string()), ("r", num(r)), ("n_list", n_list_str(&ns))]);
    let mut out = output(Operation::Scaling, p, table, serde_json::to_value(&rep)?);
    out.passed = Some(ok);
    out.notes.push(format!(
        "slope ‖f‖: {:.4} vs {:.4} ({:.2}%)",
        rep.fit_f.slope,
        rep.predicted_f,
        100.0 * err_f
    ));
    out.notes.push(format!(
        "slope ‖Xf‖: {:.4} vs {:.4} ({:.2}%)",
        rep.fit_xf.slope,
        rep.predicted_xf,
        100.0 * err_xf
    ));
    out.notes.push(format!(
        "slope of the exact Lorentz norm of the minorant: {:.4}",
        rep.fit_xf_lorentz.slope
    ));
    out.notes.push(format!("within {}% {}", 100.0 * SLOPE_REL_TOL, pass_word(ok)));
    Ok(out)
}

/// The verdict the slopes should give, when `r` is not within the fit's
/// resolution of `p`.
fn expected_verdict(r: f64, p: f64) -> Option<NecessityVerdict> {
    let gap = 1.0 / r - 1.0 / p;
    if gap > 10.0 * CRITICAL_TOL {
        Some(NecessityVerdict::Unbounded)
    } else if gap < -10.0 * CRITICAL_TOL {
        Some(NecessityVerdict::Bounded)
    } else if gap.abs() < 0.1 * CRITICAL_TOL {
        Some(NecessityVerdict::Critical)
    } else {
        None
    }
}

fn necessity(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.require("necessity", &["dim", "r"])?;
    let d = cfg.dim()?;
    let r = cfg.r.unwrap_or_default();
    let ns = n_list(cfg);
    let rep = necessity_check(d, r, &ns)?;
    let word = serde_json::to_value(rep.verdict)?.as_str().unwrap_or_default().to_string();
    let mut table = Table::new(&["d", "r", "p", "slope_f", "slope_xf", "difference", "verdict"]);
    table.push(vec![
        rep.d.to_string(),
        num(rep.r),
        num(rep.p),
        num(rep.slope_f),
        num(rep.slope_xf),
        num(rep.difference),
        word.clone(),
    ]);
    let p = params(&[("dim", d.get().to_string()), ("r", num(r)), ("n_list", n_list_str(&ns))]);
    let expected = expected_verdict(r, rep.p);
    let mut out = output(Operation::Necessity, p, table, serde_json::to_value(&rep)?);
    out.passed = expected.map(|v| v == rep.verdict);
    out.notes.push(format!(
        "r = {r} vs p = {:.6}: slope difference {:.3e}, verdict {word}",
        rep.p, rep.difference
    ));
    Ok(out)
}

fn lemma2(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let cases = cases(cfg)?;
    let sides = cfg.side.unwrap_or(SideChoice::Both).sides();
    let variant = cfg.variant.unwrap_or_default();
    let mut table = Table::new(&[
        "id",
        "side",
        "step",
        "theta",
        "t",
        "measure_target",
        "measure_base",
        "measure_level",
        "delta",
        "rhs",
        "ratio",
    ]);
    let mut result = Vec::new();
    let mut ok = true;
    let mut notes = Vec::new();
    for side in sides {
        let sweeps = cases
            .par_iter()
            .map(|c| {
                let quad = cfg.quad_or(QuadSpec::for_dim(c.dim()))?;
                let n = cfg.grid.unwrap_or_else(|| sweep_start_cells(c.dim()));
                shrinking_sweep(side, &c.e, &c.f, &c.range, &quad, n, variant)
            })
            .collect::<Result<Vec<_>>>()?;
        let sname = serde_json::to_value(side)?.as_str().unwrap_or_default().to_string();
        for (c, steps) in cases.iter().zip(&sweeps) {
            for (i, s) in steps.iter().enumerate() {
                let r = &s.report;
                table.push(vec![
                    c.id.clone(),
                    sname.clone(),
                    (i + 1).to_string(),
                    num(s.theta),
                    num(r.t),
                    num(r.measure_target),
                    num(r.measure_base),
                    num(r.measure_level),
                    num(r.delta),
                    num(r.rhs),
                    num(r.ratio),
                ]);
            }
            result.push(json!({"id": c.id, "side": side, "steps": steps}));
        }
        let steps = sweeps.first().map_or(0, Vec::len);
        let floors: Vec<f64> = (0..steps)
            .map(|i| sweeps.iter().map(|s| s[i].report.ratio).fold(f64::INFINITY, f64::min))
            .collect();
        let side_ok = floors_do_not_decay(&floors);
        ok &= side_ok;
        let list: Vec<String> = floors.iter().map(|f| format!("{f:.4}")).collect();
        notes.push(format!("{sname} floors per step [{}] {}", list.join(", "), pass_word(side_ok)));
    }
    let mut p = source_params(cfg, &cases);
    p.push(("variant", serde_json::to_value(variant)?.as_str().unwrap_or_default().to_string()));
    let mut out = output(Operation::Lemma2, params(&p), table, Value::Array(result));
    out.passed = Some(ok);
    out.notes = notes;
    Ok(out)
}

fn refine(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let cases = if cfg.e.is_some() || cfg.f.is_some() || cfg.entries.is_some() {
        cases(cfg)?
    } else {
        cfg.require("refine", &["dim"])?;
        let d = cfg.dim()?;
        let unit = BoxUnionSet::single(AxisBox::unit(d))?;
        vec![Case {
            id: format!("unit-{}", d.get()),
            e: unit.clone(),
            f: unit,
            range: cfg.range.unwrap_or(Interval::new(0.0, 1.0)?),
        }]
    };
    let sides = cfg.side.unwrap_or(SideChoice::E).sides();
    let defaults = TowerOptions::default();
    let opts = TowerOptions {
        keep: cfg.keep.unwrap_or(defaults.keep),
        cells_per_fiber: cfg.cells_per_fiber.or(defaults.cells_per_fiber),
        base_candidates: cfg.base_candidates.unwrap_or(defaults.base_candidates),
    };
    let samples = cfg.samples.unwrap_or(200);
    let seed = seed(cfg);
    let mut table = Table::new(&[
        "id",
        "side",
        "level",
        "family",
        "measure",
        "nodes",
        "threshold",
        "min_fiber",
        "predicted",
        "ratio",
        "discarded_mass",
        "total_mass",
    ]);
    let mut result = Vec::new();
    let mut ok = true;
    let mut notes = Vec::new();
    for c in &cases {
        for &side in &sides {
            let kind = tower_kind(side, c.dim());
            let sets = TowerSets {
                first: c.e.clone(),
                second: c.f.clone(),
                target: match side {
                    BoundSide::E => c.e.clone(),
                    BoundSide::F => c.f.clone(),
                },
            };
            let tower = build_tower(kind, &sets, &c.range, &opts)?;
            let quad = cfg.quad_or(QuadSpec::for_dim(c.dim()))?;
            let rep = tower_report(&tower, &quad, JacobianSource::ClosedForm, samples, seed)?;
            let sname = serde_json::to_value(side)?.as_str().unwrap_or_default().to_string();
            for l in &rep.levels {
                table.push(vec![
                    c.id.clone(),
                    sname.clone(),
                    l.index.to_string(),
                    serde_json::to_value(l.family)?.as_str().unwrap_or_default().to_string(),
                    num(l.measure),
                    l.nodes.to_string(),
                    num(l.threshold),
                    num(l.min_fiber),
                    num(l.predicted),
                    num(l.ratio),
                    num(l.discarded_mass),
                    num(l.total_mass),
                ]);
            }
            ok &= rep.structure.ok();
            let bound = if rep.predicted_rhs > 0.0 {
                format!("bound ratio {:.4}", rep.ratio)
            } else {
                "bound vacuous (δ = 0)".to_string()
            };
            notes.push(format!(
                "{} {sname} ({}): ∫|J| = {:.4e}, {bound}, structure {}/{} {}",
                c.id,
                kind.name(),
                rep.integral,
                rep.structure.passed,
                rep.structure.sampled,
                pass_word(rep.structure.ok())
            ));
            result.push(json!({"id": c.id, "report": rep}));
        }
    }
    let mut p = source_params(cfg, &cases);
    p.push(("keep", num(opts.keep)));
    p.push(("base_candidates", opts.base_candidates.to_string()));
    if let Some(c) = opts.cells_per_fiber {
        p.push(("cells_per_fiber", c.to_string()));
    }
    p.push(("samples", samples.to_string()));
    let mut out = output(Operation::Refine, params(&p), table, Value::Array(result));
    out.passed = Some(ok);
    out.notes = notes;
    Ok(out)
}

fn acceptance(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let corpus = match &cfg.corpus {
        Some(path) => Corpus::load(path).map_err(|e| Error::Config(format!("corpus {}: {e}", path.display())))?,
        None => builtin_corpus(),
    };
    let report = run_acceptance_on(seed(cfg), &corpus)?;
    let mut table = Table::new(&["id", "name", "passed", "summary"]);
    for c in &report.criteria {
        table.push(vec![c.id.to_string(), c.name.clone(), c.passed.to_string(), c.summary.clone()]);
    }
    let corpus_name = cfg.corpus.as_ref().map_or("builtin".to_string(), |c| c.display().to_string());
    let mut out = output(
        Operation::Acceptance,
        params(&[("corpus", corpus_name)]),
        table,
        serde_json::to_value(&report)?,
    );
    out.passed = Some(report.all_passed());
    out.notes = report.criteria.iter().map(|c| c.line()).collect();
    Ok(out)
}
