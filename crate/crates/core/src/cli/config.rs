//! The JSON experiment configuration. Every field is optional in the file;
//! each subcommand states which ones it needs, and command-line flags
//! override file values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Dim;
use crate::sharpness::{BoundSide, FBoundVariant};
use crate::xray::{BoxUnionSet, Interval, QuadSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindChoice {
    Phi,
    Psi,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SideChoice {
    E,
    F,
    Both,
}

impl SideChoice {
    pub fn sides(self) -> Vec<BoundSide> {
        match self {
            SideChoice::E => vec![BoundSide::E],
            SideChoice::F => vec![BoundSide::F],
            SideChoice::Both => vec![BoundSide::E, BoundSide::F],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Parameter interval `I`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<Interval>,
    /// Truncation window for the dual integral; copied into `quad.window`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    /// Corpus entry ids to run; all entries when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<BoxUnionSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<BoxUnionSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    /// Grid cells per axis per box.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<SideChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<FBoundVariant>,
    /// Exponent pair `(1/p, 1/q)` as rationals (`"2/3"`) or decimals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_inv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_inv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keep: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells_per_fiber: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_candidates: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $(if $src.$field.is_some() { $dst.$field = $src.$field.clone(); })*
    };
}

impl ExperimentConfig {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `other`'s fields win where present.
    pub fn overlay(&mut self, other: &ExperimentConfig) {
        overlay!(self, other;
            dim, range, window, quad, n_list, r, corpus, entries, e, f, seed, output, format,
            samples, pairs, grid, kind, side, variant, p_inv, q_inv, keep, cells_per_fiber, base_candidates);
    }

    pub fn without_output(&self) -> ExperimentConfig {
        ExperimentConfig {
            output: None,
            ..self.clone()
        }
    }

    /// Fails with every absent field of `names` listed.
    pub fn require(&self, command: &str, names: &[&str]) -> Result<()> {
        let value = serde_json::to_value(self)?;
        let missing: Vec<&str> = names.iter().copied().filter(|n| value.get(n).is_none()).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("{command}: missing required fields: {}", missing.join(", "))))
        }
    }

    pub fn dim(&self) -> Result<Dim> {
        Dim::new(self.dim.ok_or_else(|| Error::Config("missing required fields: dim".into()))?)
    }

    /// `quad` with `window` folded in, or `fallback` when no rule is set.
    pub fn quad_or(&self, fallback: QuadSpec) -> Result<QuadSpec> {
        let mut q = self.quad.clone().unwrap_or(fallback);
        if let Some(w) = self.window {
            q.window = Some(w);
        }
        q.validate()?;
        Ok(q)
    }

    /// SHA-256 of the canonical JSON of the resolved configuration, output
    /// path excluded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.without_output()).expect("config serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xray::{AxisBox, QuadMethod};

    fn full() -> ExperimentConfig {
        let set = BoxUnionSet::single(AxisBox::unit(Dim::new(2).unwrap())).unwrap();
        ExperimentConfig {
            dim: Some(2),
            range: Some(Interval::new(0.0, 1.0).unwrap()),
            window: Some(Interval::new(-2.0, 2.0).unwrap()),
            quad: Some(QuadSpec::default()),
            n_list: Some(vec![16, 32, 64]),
            r: Some(1.5),
            corpus: Some("c.json".into()),
            entries: Some(vec!["box-2-01".into()]),
            e: Some(set.clone()),
            f: Some(set),
            seed: Some(1),
            output: Some("out.csv".into()),
            format: Some(Format::Csv),
            samples: Some(10),
            pairs: Some(5),
            grid: Some(8),
            kind: Some(KindChoice::Both),
            side: Some(SideChoice::E),
            variant: Some(FBoundVariant::OverH),
            p_inv: Some("2/3".into()),
            q_inv: Some("1/2".into()),
            keep: Some(0.5),
            cells_per_fiber: Some(16),
            base_candidates: Some(3),
        }
    }

    #[test]
    fn schema_lists_exactly_the_config_fields() {
        let schema: serde_json::Value =
            serde_json::from_str(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/config.schema.json"))).unwrap();
        let mut documented: Vec<String> = schema["properties"].as_object().unwrap().keys().cloned().collect();
        let mut fields: Vec<String> = serde_json::to_value(full()).unwrap().as_object().unwrap().keys().cloned().collect();
        documented.sort();
        fields.sort();
        assert_eq!(documented, fields);
        let mut quad_fields: Vec<String> = schema["$defs"]["quad"]["properties"].as_object().unwrap().keys().cloned().collect();
        let mut want: Vec<String> = serde_json::to_value(QuadSpec::default()).unwrap().as_object().unwrap().keys().cloned().collect();
        want.sort();
        quad_fields.sort();
        assert_eq!(quad_fields, want);
    }

    #[test]
    fn roundtrip_and_unknown_fields() {
        let cfg = full();
        assert_eq!(ExperimentConfig::parse(&serde_json::to_string(&cfg).unwrap()).unwrap(), cfg);
        assert!(matches!(ExperimentConfig::parse(r#"{"dimension": 3}"#), Err(Error::Config(_))));
        assert!(ExperimentConfig::parse(r#"{"range": [1, 0]}"#).is_err());
        let q = ExperimentConfig::parse(r#"{"quad": {"method": "montecarlo"}}"#).unwrap();
        assert_eq!(q.quad.unwrap().method, QuadMethod::MonteCarlo);
    }

    #[test]
    fn overlay_prefers_present_fields() {
        let mut base = ExperimentConfig {
            dim: Some(2),
            r: Some(1.0),
            ..Default::default()
        };
        base.overlay(&ExperimentConfig {
            dim: Some(3),
            ..Default::default()
        });
        assert_eq!((base.dim, base.r), (Some(3), Some(1.0)));
    }

    #[test]
    fn require_names_every_missing_field() {
        let cfg = ExperimentConfig {
            dim: Some(3),
            ..Default::default()
        };
        assert!(cfg.require("x", &["dim"]).is_ok());
        let err = cfg.require("region", &["dim", "p_inv", "q_inv"]).unwrap_err().to_string();
        assert!(err.ends_with("region: missing required fields: p_inv, q_inv"), "{err}");
    }

    #[test]
    fn hash_ignores_output_path() {
        let a = full();
        let mut b = full();
        b.output = Some("elsewhere.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = Some(2);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn window_is_folded_into_quad() {
        let cfg = ExperimentConfig {
            window: Some(Interval::new(-3.0, 3.0).unwrap()),
            ..Default::default()
        };
        let q = cfg.quad_or(QuadSpec::default()).unwrap();
        assert_eq!(q.window, cfg.window);
    }
}
