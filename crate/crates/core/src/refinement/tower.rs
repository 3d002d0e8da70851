//! Parameter towers `Ω₁ ⊇ … ⊇ Ω_d` for the iterated incidence maps, built by
//! repeated refinement, and the Jacobian integral over the top level.
//!
//! A node at level `j` is a cell of the exact fiber computed at its
//! parent's representative tuple (the midpoints of the ancestor cells), so
//! `Ω_{j+1} ⊆ Ω_j × ℝ` holds by construction and every representative
//! tuple maps into the prescribed set exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::step::{refine_step, RefineStats, Weighted, DEFAULT_KEEP};
use crate::error::{Error, Result};
use crate::geometry::{estimate_c_d, jacobian_closed_form, jacobian_numeric, partial_map, Dim, MapKind, Point};
use crate::sharpness::level_bounds::{sampled_minimum, BoundSide};
use crate::xray::fiber::{fiber_measure, line_fiber, Family};
use crate::xray::quadrature::QuadSpec;
use crate::xray::sets::{AxisBox, BoxUnionSet, FiberSet, Interval};
use crate::xray::transform::{bilinear_form, dual_indicator, dual_window, x_indicator};

/// The three sets a tower alternates between.
///
/// For the `|E'|` bound these are `(E, G, E')`; for the `|F'|` bound they
/// are `(H, F, F')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerSets {
    /// Set in the space of `γ` images (`E` or `H`).
    pub first: BoxUnionSet,
    /// Set in the space of `γ*` images (`G` or `F`).
    pub second: BoxUnionSet,
    /// Target of the last step (`E'` or `F'`).
    pub target: BoxUnionSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TowerOptions {
    pub keep: f64,
    /// Cells each fiber is split into; `None` picks by dimension.
    pub cells_per_fiber: Option<usize>,
    /// Candidate base points per axis within each box of the base set.
    pub base_candidates: usize,
}

impl Default for TowerOptions {
    fn default() -> Self {
        Self {
            keep: DEFAULT_KEEP,
            cells_per_fiber: None,
            base_candidates: 5,
        }
    }
}

pub fn default_cells_per_fiber(d: Dim) -> usize {
    match d.get() {
        2 => 64,
        3 => 16,
        4 => 8,
        _ => 4,
    }
}

/// Which map builds the tower for each bound and dimension parity.
pub fn tower_kind(side: BoundSide, d: Dim) -> MapKind {
    match (side, d.is_even()) {
        (BoundSide::E, true) | (BoundSide::F, false) => MapKind::Phi,
        (BoundSide::E, false) | (BoundSide::F, true) => MapKind::Psi,
    }
}

/// Bound checked by a tower of `kind` in dimension `d`: the last step is
/// `γ` (landing next to `E`) or `γ*` (landing next to `F`).
pub fn tower_side(kind: MapKind, d: Dim) -> BoundSide {
    if kind.step_is_gamma(d.get()) {
        BoundSide::E
    } else {
        BoundSide::F
    }
}

fn first_level_index(kind: MapKind) -> usize {
    match kind {
        MapKind::Phi => 1,
        MapKind::Psi => 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    parent: usize,
    cell: Interval,
    /// Representative tuple: midpoints of the ancestor cells and this one.
    params: Vec<f64>,
    /// Product of cell lengths along the path.
    weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepFamily {
    Gamma,
    GammaStar,
}

/// One level of a tower.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// Index in the usual numbering: `j` params give `Ω_j` for `Φ` and
    /// `Ω_{j+1}` for `Ψ`.
    pub index: usize,
    pub family: StepFamily,
    pub stats: RefineStats,
    nodes: Vec<Node>,
    /// Index range of each node's children in the next level.
    children: Vec<std::ops::Range<usize>>,
}

impl Level {
    /// `|Ω_j|` as the sum of cell-product weights.
    pub fn measure(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tower {
    pub d: Dim,
    pub kind: MapKind,
    pub base: Point,
    pub range: Interval,
    pub sets: TowerSets,
    pub levels: Vec<Level>,
}

impl Tower {
    pub fn side(&self) -> BoundSide {
        tower_side(self.kind, self.d)
    }

    /// Set that step `i` (1-based) lands in, and its parameter range.
    fn step_target(&self, i: usize) -> (&BoxUnionSet, Interval, Family) {
        step_target(&self.sets, self.kind, self.d, &self.range, i)
    }

    /// Whether `params` lies in the cell-product set `Ω` at level
    /// `params.len()`.
    pub fn contains(&self, params: &[f64]) -> bool {
        if params.is_empty() || params.len() > self.levels.len() {
            return false;
        }
        // Cells share endpoints, so a coordinate can sit in two of them.
        let mut current: Vec<usize> = (0..self.levels[0].nodes.len())
            .filter(|&i| self.levels[0].nodes[i].cell.contains(params[0]))
            .collect();
        for (j, &p) in params.iter().enumerate().skip(1) {
            let level = &self.levels[j];
            current = current
                .iter()
                .flat_map(|&i| self.levels[j - 1].children[i].clone())
                .filter(|&c| level.nodes[c].cell.contains(p))
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        !current.is_empty()
    }

    /// Leaves of the top level as `(representative tuple, weight)`.
    pub fn top_cells(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.levels
            .last()
            .into_iter()
            .flat_map(|l| l.nodes.iter().map(|n| (n.params.as_slice(), n.weight)))
    }
}

fn step_target<'a>(
    sets: &'a TowerSets,
    kind: MapKind,
    d: Dim,
    range: &Interval,
    i: usize,
) -> (&'a BoxUnionSet, Interval, Family) {
    let last = i == d.get();
    if kind.step_is_gamma(i) {
        let set = if last { &sets.target } else { &sets.first };
        (set, *range, Family::Line)
    } else {
        let set = if last { &sets.target } else { &sets.second };
        // γ*(y, t) has first coordinate t, so the set's hull is exact.
        let window = set.first_axis_hull().unwrap_or(Interval { lo: 0.0, hi: 0.0 });
        (set, window, Family::Dual)
    }
}

/// Base set: `E`-side points must have first coordinate in `I`.
fn base_set(sets: &TowerSets, kind: MapKind, range: &Interval) -> BoxUnionSet {
    match kind {
        MapKind::Phi => sets.first.clip_axis(0, range),
        MapKind::Psi => sets.second.clone(),
    }
}

/// Base points tried before a collapse is reported.
const BASE_ATTEMPTS: usize = 8;
/// Times the candidate lattice is refined when every candidate collapses.
const LATTICE_REFINEMENTS: usize = 3;

/// Lattice points of the base set with a nonempty first fiber, best first.
fn rank_bases(sets: &TowerSets, kind: MapKind, d: Dim, range: &Interval, per_axis: usize) -> Vec<Point> {
    let base = base_set(sets, kind, range);
    let (target, prange, family) = step_target(sets, kind, d, range, 1);
    let n = d.get();
    let mut ranked: Vec<(f64, Vec<f64>)> = Vec::new();
    for b in base.boxes() {
        if b.volume() == 0.0 {
            continue;
        }
        for idx in 0..per_axis.pow(n as u32) {
            let mut rest = idx;
            let x: Vec<f64> = (0..n)
                .map(|j| {
                    let k = rest % per_axis;
                    rest /= per_axis;
                    b.lo[j] + (k as f64 + 0.5) / per_axis as f64 * b.side(j)
                })
                .collect();
            let m = fiber_measure(target, &x, &prange, family);
            if m > 0.0 {
                ranked.push((m, x));
            }
        }
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    ranked.into_iter().map(|(_, x)| Point::new(x)).collect()
}

pub fn build_tower(
    kind: MapKind,
    sets: &TowerSets,
    range: &Interval,
    opts: &TowerOptions,
) -> Result<Tower> {
    let d = sets.first.dim();
    for s in [&sets.second, &sets.target] {
        if s.dim() != d {
            return Err(Error::LengthMismatch {
                expected: d.get(),
                got: s.dim().get(),
            });
        }
    }
    let mut last = Error::TowerCollapse(first_level_index(kind));
    let mut per_axis = opts.base_candidates.max(1);
    for _ in 0..=LATTICE_REFINEMENTS {
        for base in rank_bases(sets, kind, d, range, per_axis).into_iter().take(BASE_ATTEMPTS) {
            match build_tower_at(kind, sets, range, base, opts) {
                Err(e @ Error::TowerCollapse(_)) => last = e,
                other => return other,
            }
        }
        per_axis = 2 * per_axis + 1;
    }
    Err(last)
}

/// Tower over a given base point.
pub fn build_tower_at(
    kind: MapKind,
    sets: &TowerSets,
    range: &Interval,
    base: Point,
    opts: &TowerOptions,
) -> Result<Tower> {
    let d = sets.first.dim();
    let depth = d.get();
    let cells = opts.cells_per_fiber.unwrap_or_else(|| default_cells_per_fiber(d)).max(1);
    let first_index = first_level_index(kind);
    let mut levels: Vec<Level> = Vec::with_capacity(depth);
    // Level 0 is the base point alone.
    let mut frontier: Vec<Node> = vec![Node {
        parent: usize::MAX,
        cell: Interval { lo: 0.0, hi: 0.0 },
        params: Vec::new(),
        weight: 1.0,
    }];
    // alive[j] marks which nodes of level j survived the next step's refinement.
    let mut alive: Vec<Vec<bool>> = Vec::new();
    for i in 1..=depth {
        let (target, prange, family) = step_target(sets, kind, d, range, i);
        let weighted: Vec<Weighted<&Node>> = frontier
            .iter()
            .map(|n| Weighted {
                item: n,
                weight: n.weight,
            })
            .collect();
        let refined = refine_step(
            &weighted,
            |n| line_fiber(target, &partial_map(kind, &base, &n.params), &prange, family),
            opts.keep,
        )
        .map_err(|e| match e {
            Error::EmptyRefinement => Error::TowerCollapse(first_index + i - 1),
            other => other,
        })?;
        let mut keep_mask = vec![false; frontier.len()];
        let mut next = Vec::new();
        for (idx, fiber) in &refined.kept {
            keep_mask[*idx] = true;
            let parent = &frontier[*idx];
            let width = fiber.measure() / cells as f64;
            for cell in fiber.cells(width) {
                let mut params = parent.params.clone();
                params.push(0.5 * (cell.lo + cell.hi));
                next.push(Node {
                    parent: *idx,
                    cell,
                    params,
                    weight: parent.weight * cell.len(),
                });
            }
        }
        alive.push(keep_mask);
        if let Some(prev) = levels.last_mut() {
            prev.nodes = std::mem::take(&mut frontier);
        }
        levels.push(Level {
            index: first_index + i - 1,
            family: if kind.step_is_gamma(i) {
                StepFamily::Gamma
            } else {
                StepFamily::GammaStar
            },
            stats: refined.stats,
            nodes: Vec::new(),
            children: Vec::new(),
        });
        frontier = next;
    }
    if let Some(top) = levels.last_mut() {
        top.nodes = frontier;
    }
    cleanup(&mut levels, &alive)?;
    link_children(&mut levels);
    Ok(Tower {
        d,
        kind,
        base,
        range: *range,
        sets: sets.clone(),
        levels,
    })
}

/// Removes nodes that lost their children in later refinements, then
/// drops any node whose retained fiber falls below its level's threshold,
/// from the top level down, and compacts the indices.
fn cleanup(levels: &mut [Level], alive: &[Vec<bool>]) -> Result<()> {
    let depth = levels.len();
    // live[j][i]: node i of level j (0-based, level j has j+1 params) survives.
    let mut live: Vec<Vec<bool>> = (0..depth)
        .map(|j| {
            if j + 1 < depth {
                alive[j + 1].clone()
            } else {
                vec![true; levels[j].nodes.len()]
            }
        })
        .collect();
    for j in (1..depth).rev() {
        let threshold = levels[j].stats.threshold;
        let mut retained = vec![0.0f64; levels[j - 1].nodes.len()];
        for (n, ok) in levels[j].nodes.iter().zip(&live[j]) {
            if *ok {
                retained[n.parent] += n.cell.len();
            }
        }
        for (i, r) in retained.iter().enumerate() {
            if live[j - 1][i] && *r < threshold * (1.0 - 1e-12) {
                live[j - 1][i] = false;
            }
        }
    }
    // The base point's own fiber is the first level.
    let root_fiber: f64 = levels[0].nodes.iter().zip(&live[0]).filter(|(_, ok)| **ok).map(|(n, _)| n.cell.len()).sum();
    if !(root_fiber >= levels[0].stats.threshold * (1.0 - 1e-12)) || root_fiber == 0.0 {
        return Err(Error::TowerCollapse(levels[0].index));
    }
    // Children of dead nodes die too.
    for j in 1..depth {
        for i in 0..levels[j].nodes.len() {
            let p = levels[j].nodes[i].parent;
            if !live[j - 1][p] {
                live[j][i] = false;
            }
        }
    }
    let mut remap: Vec<usize> = Vec::new();
    for j in 0..depth {
        let old = std::mem::take(&mut levels[j].nodes);
        let mut new_index = vec![usize::MAX; old.len()];
        let mut kept = Vec::new();
        for (i, mut n) in old.into_iter().enumerate() {
            if live[j][i] {
                if j > 0 {
                    n.parent = remap[n.parent];
                }
                new_index[i] = kept.len();
                kept.push(n);
            }
        }
        if kept.is_empty() {
            return Err(Error::TowerCollapse(levels[j].index));
        }
        levels[j].nodes = kept;
        remap = new_index;
    }
    Ok(())
}

/// Children are stored contiguously in parent order.
fn link_children(levels: &mut [Level]) {
    for j in 0..levels.len() {
        let count = levels[j].nodes.len();
        let mut ranges = vec![0..0; count];
        if j + 1 < levels.len() {
            let next = &levels[j + 1].nodes;
            let mut start = 0;
            while start < next.len() {
                let p = next[start].parent;
                let mut end = start;
                while end < next.len() && next[end].parent == p {
                    end += 1;
                }
                ranges[p] = start..end;
                start = end;
            }
        }
        levels[j].children = ranges;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureCheck {
    pub sampled: usize,
    pub passed: usize,
    /// Parent-prefix violations of `Ω_{j+1} ⊆ Ω_j × ℝ`.
    pub nesting_failures: usize,
}

impl StructureCheck {
    pub fn ok(&self) -> bool {
        self.passed == self.sampled && self.nesting_failures == 0
    }
}

/// Samples `per_level` nodes at every level, takes the ancestor midpoints
/// and a uniform point in the node's own cell, and tests the partial map
/// image against the prescribed set by exact point-in-box tests. Also
/// checks that every node extends its parent's tuple.
pub fn verify_structure(tower: &Tower, per_level: usize, seed: u64) -> StructureCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = 0;
    let mut passed = 0;
    let mut nesting_failures = 0;
    for (j, level) in tower.levels.iter().enumerate() {
        for n in &level.nodes {
            let ok = if j == 0 {
                n.params.len() == 1
            } else {
                let parent = &tower.levels[j - 1].nodes[n.parent];
                n.params.len() == j + 1 && n.params[..j] == parent.params[..]
            };
            if !ok || !n.cell.contains(n.params[j]) {
                nesting_failures += 1;
            }
        }
        let (target, _, _) = tower.step_target(j + 1);
        for _ in 0..per_level {
            let n = &level.nodes[rng.gen_range(0..level.nodes.len())];
            let mut params = n.params.clone();
            params[j] = if n.cell.len() > 0.0 {
                rng.gen_range(n.cell.lo..=n.cell.hi)
            } else {
                n.cell.lo
            };
            let image = partial_map(tower.kind, &tower.base, &params);
            sampled += 1;
            if target.contains(&image) {
                passed += 1;
            }
        }
    }
    // The base point itself.
    let base_set = base_set(&tower.sets, tower.kind, &tower.range);
    sampled += 1;
    if base_set.contains(&tower.base) {
        passed += 1;
    }
    StructureCheck {
        sampled,
        passed,
        nesting_failures,
    }
}

/// How `|J|` is evaluated in [`image_volume_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianSource {
    /// Product formula times the measured `|c_d|`.
    ClosedForm,
    /// Finite-difference determinant.
    Numeric,
}

/// Samples and seed used to measure `c_d` for the closed form.
pub const C_D_SAMPLES: usize = 16;
pub const C_D_SEED: u64 = 17;

/// `∫_{Ω_top} |J|` by the midpoint rule on the tower's cells.
pub fn image_volume_lower_bound(tower: &Tower, source: JacobianSource) -> Result<f64> {
    let d = tower.d;
    if tower.levels.len() != d.get() {
        return Err(Error::InvalidArgument(format!(
            "tower depth {} does not match d = {}",
            tower.levels.len(),
            d.get()
        )));
    }
    let c = match source {
        JacobianSource::ClosedForm => estimate_c_d(tower.kind, d, C_D_SAMPLES, C_D_SEED)?.mean.abs(),
        JacobianSource::Numeric => 1.0,
    };
    let first = tower.base[0];
    let mut total = 0.0;
    for (params, weight) in tower.top_cells() {
        let j = match source {
            JacobianSource::ClosedForm => jacobian_closed_form(tower.kind, d, first, params)?,
            JacobianSource::Numeric => match jacobian_numeric(tower.kind, d, &tower.base, params) {
                Ok(v) => v,
                // A cell straddling a zero of J: the product form is exact there.
                Err(Error::NonSmooth { .. }) => jacobian_closed_form(tower.kind, d, first, params)?,
                Err(e) => return Err(e),
            },
        };
        total += weight * j.abs();
    }
    Ok(c * total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub index: usize,
    pub family: StepFamily,
    pub measure: f64,
    pub nodes: usize,
    /// Threshold every retained fiber into this level meets.
    pub threshold: f64,
    /// Smallest retained fiber over the parents of this level.
    pub min_fiber: f64,
    /// `T/|first|`, `T/|second|` or `δ` depending on the step.
    pub predicted: f64,
    pub ratio: f64,
    pub discarded_mass: f64,
    pub total_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    pub d: usize,
    pub kind: MapKind,
    pub side: BoundSide,
    pub base: Vec<f64>,
    pub t: f64,
    pub delta: f64,
    pub levels: Vec<LevelReport>,
    pub integral: f64,
    pub predicted_rhs: f64,
    pub ratio: f64,
    pub structure: StructureCheck,
}

/// `T`, `δ` and the bound's right-hand side for the tower's sets.
fn tower_predictions(tower: &Tower, quad: &QuadSpec) -> Result<(f64, f64, f64)> {
    let sets = &tower.sets;
    let range = &tower.range;
    let t = bilinear_form(&sets.first, &sets.second, range, quad)?;
    let d = tower.d.get() as f64;
    let (m1, m2) = (sets.first.measure(), sets.second.measure());
    Ok(match tower.side() {
        BoundSide::E => {
            let delta = sampled_minimum(&sets.second, |x| x_indicator(&sets.target, range, x));
            let rhs = delta.powi(2) * (t / m2).powf(d - 2.0) * (t / m1).powf(d * (d - 1.0) / 2.0);
            (t, delta, rhs)
        }
        BoundSide::F => {
            let delta = match dual_window(&sets.target, quad)? {
                Some(w) => sampled_minimum(&sets.first, |y| dual_indicator(&sets.target, range, &w, y)),
                None => 0.0,
            };
            let rhs = delta.powf(d) * (t / m2).powf(d - 1.0) * (t / m1).powf((d * d - d + 2.0) / 2.0 - d);
            (t, delta, rhs)
        }
    })
}

/// Builds the report. The `|F'|` bound uses the `|H|` form of the last
/// factor.
pub fn tower_report(tower: &Tower, quad: &QuadSpec, source: JacobianSource, samples: usize, seed: u64) -> Result<TowerReport> {
    let (t, delta, rhs) = tower_predictions(tower, quad)?;
    let (m1, m2) = (tower.sets.first.measure(), tower.sets.second.measure());
    let depth = tower.levels.len();
    let levels = tower
        .levels
        .iter()
        .enumerate()
        .map(|(j, level)| {
            let predicted = if j + 1 == depth {
                delta
            } else {
                match level.family {
                    StepFamily::GammaStar => t / m1,
                    StepFamily::Gamma => t / m2,
                }
            };
            let min_fiber = retained_min_fiber(tower, j);
            LevelReport {
                index: level.index,
                family: level.family,
                measure: level.measure(),
                nodes: level.node_count(),
                threshold: level.stats.threshold,
                min_fiber,
                predicted,
                ratio: if predicted > 0.0 { min_fiber / predicted } else { f64::INFINITY },
                discarded_mass: level.stats.discarded_mass,
                total_mass: level.stats.total_mass,
            }
        })
        .collect();
    let integral = image_volume_lower_bound(tower, source)?;
    Ok(TowerReport {
        d: tower.d.get(),
        kind: tower.kind,
        side: tower.side(),
        base: tower.base.to_vec(),
        t,
        delta,
        levels,
        integral,
        predicted_rhs: rhs,
        ratio: if rhs > 0.0 { integral / rhs } else { f64::INFINITY },
        structure: verify_structure(tower, samples, seed),
    })
}

/// Smallest retained fiber (sum of child cell lengths) into level `j`.
fn retained_min_fiber(tower: &Tower, j: usize) -> f64 {
    if j == 0 {
        return tower.levels[0].measure();
    }
    let mut sums = vec![0.0f64; tower.levels[j - 1].nodes.len()];
    for n in &tower.levels[j].nodes {
        sums[n.parent] += n.cell.len();
    }
    sums.into_iter().fold(f64::INFINITY, f64::min)
}

/// Exhaustive level measures on an `n × n` grid for `d = 2`: the raw sets
/// `{p₁ : step 1 lands}` and `{(p₁, p₂) : both steps land}` over the
/// parameter box `window₁ × window₂`, without refinement.
pub fn enumerate_levels_2d(tower: &Tower, n: usize) -> Result<(f64, f64)> {
    if tower.d.get() != 2 {
        return Err(Error::InvalidArgument("exhaustive enumeration is for d = 2".into()));
    }
    let (t1, r1, _) = tower.step_target(1);
    let (t2, r2, _) = tower.step_target(2);
    let (h1, h2) = (r1.len() / n as f64, r2.len() / n as f64);
    let mut level1 = 0.0;
    let mut level2 = 0.0;
    for i in 0..n {
        let p1 = r1.lo + (i as f64 + 0.5) * h1;
        if !t1.contains(&partial_map(tower.kind, &tower.base, &[p1])) {
            continue;
        }
        level1 += h1;
        for k in 0..n {
            let p2 = r2.lo + (k as f64 + 0.5) * h2;
            if t2.contains(&partial_map(tower.kind, &tower.base, &[p1, p2])) {
                level2 += h1 * h2;
            }
        }
    }
    Ok((level1, level2))
}

/// Area of `Φ(Ω₂)` for a `d = 2` `Φ` tower by rasterising the image: a
/// pixel center `y` is covered when `s₁ = y₁`,
/// `t₁ = (y₂ − x₂)/(y₁ − x₁)` lies in `Ω₂`. The map is injective off
/// `s₁ = x₁`, so this equals `∫_{Ω₂} |s₁ − x₁|`.
pub fn rasterized_image_area_2d(tower: &Tower, n: usize) -> Result<f64> {
    if tower.d.get() != 2 || tower.kind != MapKind::Phi {
        return Err(Error::InvalidArgument("rasterisation is for d = 2 Φ towers".into()));
    }
    let x = &tower.base;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for level in &tower.levels[1..] {
        for node in &level.nodes {
            let t1 = node.params[0];
            let parent = &tower.levels[0].nodes[node.parent];
            for t in [parent.cell.lo, parent.cell.hi, t1] {
                for s in [node.cell.lo, node.cell.hi] {
                    let y = partial_map(MapKind::Phi, x, &[t, s]);
                    for j in 0..2 {
                        lo[j] = lo[j].min(y[j]);
                        hi[j] = hi[j].max(y[j]);
                    }
                }
            }
        }
    }
    let bbox = AxisBox::new(lo.to_vec(), hi.to_vec())?;
    let (w0, w1) = (bbox.side(0) / n as f64, bbox.side(1) / n as f64);
    let mut count = 0usize;
    for i in 0..n {
        let y1 = lo[0] + (i as f64 + 0.5) * w0;
        if y1 == x[0] {
            continue;
        }
        for k in 0..n {
            let y2 = lo[1] + (k as f64 + 0.5) * w1;
            let t1 = (y2 - x[1]) / (y1 - x[0]);
            if tower.contains(&[t1, y1]) {
                count += 1;
            }
        }
    }
    Ok(count as f64 * w0 * w1)
}

/// Fiber of the first step at `x`, exposed for oracle checks.
pub fn first_fiber(tower: &Tower) -> FiberSet {
    let (target, prange, family) = tower.step_target(1);
    line_fiber(target, &tower.base, &prange, family)
}
