//! The versioned set-pair corpus shared by the restricted weak-type and
//! level-bound sweeps.
//!
//! The committed JSON is the output of [`generate_corpus`]; a test keeps
//! the two in sync. Regenerate with `MOMENTRAY_BLESS=1 cargo test corpus`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::counterexample::{build_counterexample_f, build_xf_lower_bound, CounterexampleSpec};
use crate::error::{Error, Result};
use crate::geometry::Dim;
use crate::xray::quadrature::QuadSpec;
use crate::xray::sets::{AxisBox, BoxUnionSet, Interval};
use crate::xray::transform::bilinear_form;

pub const CORPUS_VERSION: u32 = 1;
pub const CORPUS_SEED: u64 = 0x5eed_c0de;
pub const CORPUS_JSON: &str = include_str!("../../corpus/corpus_v1.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    Box,
    Slab,
    Counterexample,
    RandomUnion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: CorpusKind,
    pub range: Interval,
    pub e: BoxUnionSet,
    pub f: BoxUnionSet,
}

impl CorpusEntry {
    pub fn dim(&self) -> Dim {
        self.e.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    pub version: u32,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn parse(json: &str) -> Result<Self> {
        let c: Corpus = serde_json::from_str(json)?;
        if c.version != CORPUS_VERSION {
            return Err(Error::Config(format!(
                "corpus version {} is not supported (expected {CORPUS_VERSION})",
                c.version
            )));
        }
        for entry in &c.entries {
            if entry.e.dim() != entry.f.dim() {
                return Err(Error::Config(format!("corpus entry {} mixes dimensions", entry.id)));
            }
        }
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("corpus serialises");
        s.push('\n');
        s
    }
}

/// The committed corpus.
pub fn builtin_corpus() -> Corpus {
    Corpus::parse(CORPUS_JSON).expect("committed corpus is valid")
}

fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> BoxUnionSet {
    BoxUnionSet::single(AxisBox::new(lo, hi).expect("valid corpus box")).expect("valid corpus box")
}

fn unit_range() -> Interval {
    Interval::new(0.0, 1.0).expect("valid interval")
}

fn entry(id: String, kind: CorpusKind, e: BoxUnionSet, f: BoxUnionSet) -> CorpusEntry {
    CorpusEntry {
        id,
        kind,
        range: unit_range(),
        e,
        f,
    }
}

fn box_entries(out: &mut Vec<CorpusEntry>) {
    let d2: [([f64; 4], [f64; 4]); 5] = [
        ([0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 1.0, 1.0]),
        ([0.0, 0.0, 0.5, 0.5], [0.0, 0.0, 0.5, 0.5]),
        ([0.0, 0.0, 1.0, 1.0], [0.25, 0.25, 0.75, 0.75]),
        ([0.0, -0.5, 1.0, 0.5], [0.0, 0.0, 0.25, 0.25]),
        ([0.0, 0.0, 2.0, 2.0], [0.0, 0.0, 1.0, 1.0]),
    ];
    for (i, (e, f)) in d2.iter().enumerate() {
        out.push(entry(
            format!("box-2-{:02}", i + 1),
            CorpusKind::Box,
            boxed(vec![e[0], e[1]], vec![e[2], e[3]]),
            boxed(vec![f[0], f[1]], vec![f[2], f[3]]),
        ));
    }
    let d3: [(f64, f64, f64); 4] = [(1.0, 1.0, 0.0), (0.5, 1.0, 0.0), (1.0, 0.5, 0.25), (1.0, 0.25, 0.5)];
    for (i, (se, sf, shift)) in d3.iter().enumerate() {
        out.push(entry(
            format!("box-3-{:02}", i + 1),
            CorpusKind::Box,
            boxed(vec![0.0; 3], vec![*se; 3]),
            boxed(vec![*shift; 3], vec![shift + sf; 3]),
        ));
    }
}

fn slab_entries(out: &mut Vec<CorpusEntry>) {
    for (i, w) in [0.25, 0.0625, 0.015625].iter().enumerate() {
        out.push(entry(
            format!("slab-2-{:02}", i + 1),
            CorpusKind::Slab,
            boxed(vec![0.0, 0.0], vec![1.0, *w]),
            boxed(vec![0.0, 0.0], vec![1.0, 1.0]),
        ));
    }
    for (i, w) in [0.25, 0.0625, 0.015625].iter().enumerate() {
        out.push(entry(
            format!("slab-3-{:02}", i + 1),
            CorpusKind::Slab,
            boxed(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]),
            boxed(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, *w]),
        ));
    }
}

/// Single-index pieces `(A_k, B_k)` of the counterexample family.
fn counterexample_entries(out: &mut Vec<CorpusEntry>) {
    for d in [2usize, 3] {
        for k in [2usize, 3, 4] {
            let dim = Dim::new(d).expect("d ≥ 2");
            let spec = CounterexampleSpec::truncated(dim, k, k, f64::INFINITY);
            let a = build_counterexample_f(&spec).expect("single term");
            let b = build_xf_lower_bound(&spec).expect("single term");
            out.push(entry(
                format!("counterexample-{d}-k{k}"),
                CorpusKind::Counterexample,
                a.terms()[0].support.clone(),
                b.terms()[0].support.clone(),
            ));
        }
    }
}

/// Up to `count` disjoint boxes, one per distinct cell of the `4^d`
/// partition of `[0, 1]^d`, with corners on the `1/64` lattice.
fn random_union(rng: &mut ChaCha8Rng, d: usize, count: usize) -> BoxUnionSet {
    let cells = 4usize.pow(d as u32);
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < count {
        let c = rng.gen_range(0..cells);
        if !chosen.contains(&c) {
            chosen.push(c);
        }
    }
    let boxes = chosen
        .iter()
        .map(|&c| {
            let mut idx = c;
            let mut lo = Vec::with_capacity(d);
            let mut hi = Vec::with_capacity(d);
            for _ in 0..d {
                let base = (idx % 4) * 16;
                idx /= 4;
                let a = rng.gen_range(0..8usize);
                let b = rng.gen_range(a + 4..=16usize);
                lo.push((base + a) as f64 / 64.0);
                hi.push((base + b) as f64 / 64.0);
            }
            AxisBox::new(lo, hi).expect("valid box")
        })
        .collect();
    BoxUnionSet::new(Dim::new(d).expect("d ≥ 2"), boxes).expect("distinct cells are disjoint")
}

fn random_entries(out: &mut Vec<CorpusEntry>) {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let coarse = QuadSpec::midpoint(1.0 / 32.0);
    for (d, n) in [(2usize, 6usize), (3, 5)] {
        let mut made = 0;
        while made < n {
            let ne = rng.gen_range(1..=3usize);
            let nf = rng.gen_range(1..=3usize);
            let e = random_union(&mut rng, d, ne);
            let f = random_union(&mut rng, d, nf);
            // Pairs with T = 0 fall outside the checks' domain.
            if bilinear_form(&e, &f, &unit_range(), &coarse).expect("same dimension") > 0.0 {
                made += 1;
                out.push(entry(format!("random-{d}-{made:02}"), CorpusKind::RandomUnion, e, f));
            }
        }
    }
}

pub fn generate_corpus() -> Corpus {
    let mut entries = Vec::new();
    box_entries(&mut entries);
    slab_entries(&mut entries);
    counterexample_entries(&mut entries);
    random_entries(&mut entries);
    Corpus {
        version: CORPUS_VERSION,
        entries,
    }
}
