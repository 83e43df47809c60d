//! `homord`: build structures, inspect their groups, sample invariant
//! orders, run the statistical suites and solve truncated CRO systems.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use homord::builder::ClassName;
use homord::sampler::SamplerKind;
use homord::stats::ALPHA;

#[derive(Debug, Parser)]
#[command(name = "homord", version, about = "Invariant random orders on finite approximations of homogeneous structures")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print JSON instead of a text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the command's artifact (JSON, CSV or structure text) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Key-value file of default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Build a chain of finite structures.
    Build(BuildArgs),
    /// Orbits of a pointwise stabilizer on injective k-tuples.
    Orbits(OrbitsArgs),
    /// Orbit growth of an element over a stabilizer along a chain.
    Acl(AclArgs),
    /// Alternating τ-path between two elements.
    TauPath(TauArgs),
    /// Draw random orders and write them as CSV.
    Sample(SampleArgs),
    /// Frequency of one order pattern.
    Estimate(EstimateArgs),
    /// Run a statistical suite and report its verdict.
    Test(TestArgs),
    /// Solve the truncated consistent-random-ordering system.
    Cro(CroArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Chain JSON, structure JSON, or structure text.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Chain level, counted from 0; the last level by default.
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub class: ClassName,
    /// Target saturation depth for witness completion.
    #[arg(long, default_value_t = 2)]
    pub sat: usize,
    /// Size cap for witness completion.
    #[arg(long, default_value_t = 64)]
    pub cap: usize,
    /// Paley orders; builds the chain K2 ⊂ P(q1) ⊂ P(q2) ⊂ ….
    #[arg(long, value_delimiter = ',')]
    pub paley: Vec<usize>,
    /// Size parameter: points of a linear order, pairs of an involution
    /// order, degree-2 points of a bipartite structure.
    #[arg(long)]
    pub size: Option<usize>,
    /// Prefix sizes to use as chain levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Bipartite structure with every pair of `n` points as a neighborhood.
    #[arg(long)]
    pub saturated: Option<usize>,
    /// Emit the last level in the structure text format.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct OrbitsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Points fixed by the stabilizer.
    #[arg(long, value_delimiter = ',')]
    pub fix: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AclExpect {
    AlgebraicOverA,
    Growing,
    Undecided,
}

#[derive(Debug, Args)]
pub struct AclArgs {
    /// Chain JSON.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<usize>,
    #[arg(long)]
    pub b: usize,
    /// Verdict required for a zero exit status.
    #[arg(long)]
    pub expect: Option<AclExpect>,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    pub b: usize,
    /// `edge`, `non-edge`, or a hex type code.
    #[arg(long)]
    pub tau: String,
    #[arg(long, value_delimiter = ',')]
    pub avoid: Vec<usize>,
    /// Ask for this many paths with disjoint interiors.
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SamplerArgs {
    #[arg(long)]
    pub sampler: SamplerKind,
    /// Restrict the uniform, atoms, biased and decoupled samplers to a sort.
    #[arg(long)]
    pub sort: Option<u32>,
    /// Atoms as `location:mass:order,…`; orders are `id` and `rev`.
    #[arg(long)]
    pub atoms: Option<String>,
    /// Drift of the biased self-test sampler.
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    /// Points to order; the whole sampler domain by default.
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub points: Vec<usize>,
    /// Order to count, least to greatest; `--points` order by default.
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<usize>,
    /// Pass iff the estimate is within 3σ of this value.
    #[arg(long)]
    pub expect: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Exchangeability,
    Independence,
    JointIndependence,
    Monotone,
    ShiftErgodicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceKind {
    Iid,
    Mixture,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub suite: Suite,
    /// Structure input; not needed for shift-ergodicity.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub sampler: Option<SamplerKind>,
    #[arg(long)]
    pub sort: Option<u32>,
    #[arg(long)]
    pub atoms: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = ALPHA)]
    pub alpha: f64,
    /// Exchangeability: `0,1/2,3`; independence: `0,1`. Repeatable.
    #[arg(long)]
    pub pairs: Vec<String>,
    /// Joint independence tuples such as `1,2,3`. Repeatable.
    #[arg(long)]
    pub tuples: Vec<String>,
    /// Monotone coupling points; the whole domain by default.
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<usize>,
    #[arg(long, default_value = "iid")]
    pub sequence: SequenceKind,
    #[arg(long, default_value_t = 256)]
    pub len: usize,
    #[arg(long, default_value_t = 16)]
    pub block: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.75")]
    pub probs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.5")]
    pub weights: Vec<f64>,
    /// Verdict required for a zero exit status.
    #[arg(long, default_value = "pass")]
    pub expect: Expect,
}

#[derive(Debug, Args)]
pub struct CroArgs {
    #[arg(long)]
    pub class: ClassName,
    #[arg(long)]
    pub n: usize,
    /// Report JSON path; same as `--out`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also check that the size-n kernel projects into the size-m one.
    #[arg(long)]
    pub shrink_from: Option<usize>,
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
