//! The `momentray` command-line runner.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::sharpness::FBoundVariant;
use crate::xray::{Interval, QuadSpec};
use commands::{dispatch, Operation};
use config::{ExperimentConfig, Format, KindChoice, SideChoice};
use output::{render, RunHeader, RunManifest, TOOL_VERSION};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "MOMENTRAY_WORKERS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "momentray", version, about = "Experiments on the restricted X-ray transform along the moment curve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result here (and a manifest next to it) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to $MOMENTRAY_WORKERS, then to all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

fn parse_interval(s: &str) -> std::result::Result<Interval, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected lo,hi, got {s:?}"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Default, Args)]
pub struct DimArg {
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuadArgs {
    /// Midpoint step; replaces the configured quadrature rule.
    #[arg(long)]
    pub step: Option<f64>,
    /// Truncation window `lo,hi` for the dual integral.
    #[arg(long, value_parser = parse_interval)]
    pub window: Option<Interval>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SetArgs {
    /// Corpus JSON file; the built-in corpus when absent.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Corpus entry id (repeatable).
    #[arg(long = "entry")]
    pub entries: Vec<String>,
    /// Parameter interval `lo,hi`.
    #[arg(long, value_parser = parse_interval)]
    pub range: Option<Interval>,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub dim: DimArg,
    /// `1/p`, as `2/3` or a decimal.
    #[arg(long)]
    pub p_inv: Option<String>,
    #[arg(long)]
    pub q_inv: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct JacobianArgs {
    #[command(flatten)]
    pub dim: DimArg,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub kind: Option<KindChoice>,
}

#[derive(Debug, Clone, Args)]
pub struct DualityArgs {
    #[command(flatten)]
    pub dim: DimArg,
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long, value_parser = parse_interval)]
    pub range: Option<Interval>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RwtArgs {
    #[command(flatten)]
    pub sets: SetArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SuperlevelArgs {
    #[command(flatten)]
    pub sets: SetArgs,
    /// Grid cells per axis per box.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub dim: DimArg,
    /// Secondary Lorentz exponent.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Args)]
pub struct LevelArgs {
    #[command(flatten)]
    pub sets: SetArgs,
    #[arg(long, value_enum)]
    pub side: Option<SideChoice>,
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<FBoundVariant>,
    /// Starting grid cells per axis per box.
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

fn parse_variant(s: &str) -> std::result::Result<FBoundVariant, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("expected over_h or over_f, got {s:?}"))
}

#[derive(Debug, Clone, Args)]
pub struct RefineArgs {
    #[command(flatten)]
    pub dim: DimArg,
    #[command(flatten)]
    pub sets: SetArgs,
    #[arg(long, value_enum)]
    pub side: Option<SideChoice>,
    #[arg(long)]
    pub keep: Option<f64>,
    #[arg(long)]
    pub cells_per_fiber: Option<usize>,
    #[arg(long)]
    pub base_candidates: Option<usize>,
    /// Sampled tuples per level for the structure check.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Critical exponents and the vertices of the boundedness triangle.
    Exponents(DimArg),
    /// Exact membership of an exponent pair in the triangle.
    Region(RegionArgs),
    /// Constancy of the numeric-to-closed-form Jacobian ratio.
    Jacobian(JacobianArgs),
    /// Duality identity on random box pairs.
    Duality(DualityArgs),
    /// Restricted weak-type ratios over set pairs.
    Rwt(RwtArgs),
    /// Superlevel sets of the transform at the half-mass threshold.
    Superlevel(SuperlevelArgs),
    /// Norm growth of the counterexample family.
    Scaling(ScalingArgs),
    /// Slope comparison deciding whether the bound can hold for `r`.
    Necessity(ScalingArgs),
    /// Level-bound ratios along a shrinking family of level sets.
    Lemma2(LevelArgs),
    /// Refinement towers and their image-volume integral.
    Refine(RefineArgs),
    /// The full acceptance suite.
    Acceptance,
}

impl DimArg {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.dim = self.dim;
    }
}

impl QuadArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.quad = self.step.map(QuadSpec::midpoint);
        c.window = self.window;
    }
}

impl SetArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.corpus = self.corpus.clone();
        c.entries = (!self.entries.is_empty()).then(|| self.entries.clone());
        c.range = self.range;
    }
}

impl Command {
    pub fn operation(&self) -> Operation {
        match self {
            Command::Exponents(_) => Operation::Exponents,
            Command::Region(_) => Operation::Region,
            Command::Jacobian(_) => Operation::Jacobian,
            Command::Duality(_) => Operation::Duality,
            Command::Rwt(_) => Operation::Rwt,
            Command::Superlevel(_) => Operation::Superlevel,
            Command::Scaling(_) => Operation::Scaling,
            Command::Necessity(_) => Operation::Necessity,
            Command::Lemma2(_) => Operation::Lemma2,
            Command::Refine(_) => Operation::Refine,
            Command::Acceptance => Operation::Acceptance,
        }
    }

    /// The flags given on the command line as a sparse configuration.
    pub fn flags(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        match self {
            Command::Exponents(a) => a.apply(&mut c),
            Command::Region(a) => {
                a.dim.apply(&mut c);
                c.p_inv = a.p_inv.clone();
                c.q_inv = a.q_inv.clone();
            }
            Command::Jacobian(a) => {
                a.dim.apply(&mut c);
                c.samples = a.samples;
                c.kind = a.kind;
            }
            Command::Duality(a) => {
                a.dim.apply(&mut c);
                a.quad.apply(&mut c);
                c.pairs = a.pairs;
                c.range = a.range;
            }
            Command::Rwt(a) => {
                a.sets.apply(&mut c);
                a.quad.apply(&mut c);
            }
            Command::Superlevel(a) => {
                a.sets.apply(&mut c);
                c.grid = a.grid;
            }
            Command::Scaling(a) | Command::Necessity(a) => {
                a.dim.apply(&mut c);
                c.r = a.r;
                c.n_list = a.n_list.clone();
            }
            Command::Lemma2(a) => {
                a.sets.apply(&mut c);
                a.quad.apply(&mut c);
                c.side = a.side;
                c.variant = a.variant;
                c.grid = a.grid;
            }
            Command::Refine(a) => {
                a.dim.apply(&mut c);
                a.sets.apply(&mut c);
                a.quad.apply(&mut c);
                c.side = a.side;
                c.keep = a.keep;
                c.cells_per_fiber = a.cells_per_fiber;
                c.base_candidates = a.base_candidates;
                c.samples = a.samples;
            }
            Command::Acceptance => {}
        }
        c
    }
}

/// Exit code for an error: bad input is a configuration error, anything a
/// module signals while running is a failed check.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidDim(_)
        | Error::InvalidExponent(_)
        | Error::LengthMismatch { .. }
        | Error::WindowTooSmall { .. }
        | Error::Io(_)
        | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_FAIL,
    }
}

fn workers(cli: &Cli) -> Result<usize> {
    if let Some(n) = cli.workers {
        return if n > 0 {
            Ok(n)
        } else {
            Err(Error::Config("--workers must be positive".into()))
        };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Resolved configuration: file, then subcommand flags, then global flags.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.overlay(&cli.command.flags());
    cfg.overlay(&ExperimentConfig {
        seed: cli.seed,
        output: cli.output.clone(),
        format: cli.format,
        ..ExperimentConfig::default()
    });
    Ok(cfg)
}

fn manifest_path(output: &std::path::Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn execute(cli: &Cli) -> Result<i32> {
    let started = Instant::now();
    let cfg = resolve_config(cli)?;
    let op = cli.command.operation();
    let n_workers = workers(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n_workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let out = pool.install(|| dispatch(op, &cfg))?;
    let header = RunHeader {
        tool_version: TOOL_VERSION.to_string(),
        operation: op.name().to_string(),
        config_sha256: cfg.hash(),
        seed: cfg.seed.unwrap_or(crate::acceptance::DEFAULT_SEED),
    };
    let text = render(&out, &header, cfg.format.unwrap_or(op.default_format()));
    for note in &out.notes {
        eprintln!("{note}");
    }
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &text)?;
            let mut manifest = RunManifest::new(&header, n_workers, out.passed, started.elapsed().as_secs_f64());
            manifest.record(&path.display().to_string(), &text);
            let mpath = manifest_path(path);
            let mut mtext = serde_json::to_string_pretty(&manifest)?;
            mtext.push('\n');
            std::fs::write(&mpath, mtext)?;
            eprintln!("wrote {} and {}", path.display(), mpath.display());
        }
        None => print!("{text}"),
    }
    Ok(match out.passed {
        Some(false) => EXIT_FAIL,
        _ => EXIT_PASS,
    })
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
