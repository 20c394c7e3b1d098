//! Command-line front end: every subcommand reads files, writes files,
//! and drops a manifest with content hashes, so runs are reproducible
//! from the manifest alone. Exit codes: 0 success, 1 runtime error,
//! 2 usage error.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{resolve, FileConfig};

#[derive(Parser)]
#[command(name = "retraction", version, about = "Retraction-dynamics pipeline: simulation sweeps, record linkage, matched-control outcomes, attention windows, and group statistics")]
pub struct Cli {
    /// Base RNG seed for all seeded commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory, created if missing.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicates at a single retraction delay.
    Simulate(SimulateArgs),
    /// Run replicates over a grid of retraction delays.
    Sweep(SweepArgs),
    /// Link two corpora by DOI, then fuzzy title match.
    Link(LinkArgs),
    /// Match retracted papers to exact-covariate controls.
    Match(MatchArgs),
    /// Compute per-paper citation outcomes and tier summaries.
    Outcomes(OutcomesArgs),
    /// Run group tests on a previously written outcomes file.
    Stats(StatsArgs),
    /// Windowed attention scores, monthly series, and the regression.
    Attention(AttentionArgs),
    /// Generate a synthetic corpus with known injected effects.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    Complete,
    Ring,
    ErdosRenyi,
}

#[derive(Args)]
pub struct SimCommon {
    /// Number of agents.
    #[arg(long)]
    n: Option<usize>,

    #[arg(long, value_enum)]
    topology: Option<TopologyKind>,

    /// Neighbors per side (ring topology only).
    #[arg(long)]
    ring_k: Option<usize>,

    /// Edge probability (erdos-renyi topology only).
    #[arg(long)]
    er_p: Option<f64>,

    /// Rounds an agent keeps sharing a fresh message.
    #[arg(long)]
    share_window: Option<u32>,

    /// Hard cap on rounds per replicate.
    #[arg(long)]
    max_steps: Option<u32>,

    /// Replicates per delay value.
    #[arg(long)]
    reps: Option<usize>,

    /// Probability a contact transmits the sharer's message.
    #[arg(long)]
    transmission_prob: Option<f64>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    common: SimCommon,

    /// Rounds between false-claim seeding and retraction seeding.
    #[arg(long)]
    delay: Option<u32>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    common: SimCommon,

    /// Comma-separated delay grid, e.g. 0,50,100,200.
    #[arg(long, value_delimiter = ',')]
    delays: Option<Vec<u32>>,
}

#[derive(Args)]
pub struct LinkArgs {
    /// Left corpus file (CSV or JSON-lines).
    #[arg(long)]
    left: PathBuf,

    /// Right corpus file (CSV or JSON-lines).
    #[arg(long)]
    right: PathBuf,

    /// Minimum title similarity for a fuzzy match.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
pub struct MatchArgs {
    /// Corpus file (CSV or JSON-lines).
    #[arg(long)]
    corpus: PathBuf,

    /// Post-retraction horizon in years.
    #[arg(long)]
    horizon: Option<i32>,
}

#[derive(Args)]
pub struct OutcomesArgs {
    /// Corpus file (CSV or JSON-lines).
    #[arg(long)]
    corpus: PathBuf,

    /// Post-retraction horizon in years.
    #[arg(long)]
    horizon: Option<i32>,

    /// Stabilizer added to both counts in the log-ratio outcome.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Comma-separated tier cut points, e.g. 1,9,31.
    #[arg(long, value_delimiter = ',', conflicts_with = "tier_percentiles")]
    tiers: Option<Vec<u64>>,

    /// Derive tier cut points from these sample percentiles instead.
    #[arg(long, value_delimiter = ',')]
    tier_percentiles: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeSel {
    Both,
    Outcome1,
    Outcome2,
}

#[derive(Args)]
pub struct StatsArgs {
    /// Outcomes CSV produced by the outcomes subcommand.
    #[arg(long)]
    outcomes: PathBuf,

    /// Which outcome column(s) to test.
    #[arg(long, value_enum)]
    outcome: Option<OutcomeSel>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowModeKind {
    /// Offsets -6..=+5; the retraction month sits inside the window.
    Centered,
    /// Offsets -6..=+6 with the retraction month excluded.
    Symmetric,
}

#[derive(Args)]
pub struct AttentionArgs {
    /// Corpus file (CSV or JSON-lines).
    #[arg(long)]
    corpus: PathBuf,

    /// Mentions file (CSV or JSON-lines).
    #[arg(long)]
    mentions: PathBuf,

    #[arg(long, value_enum)]
    window_mode: Option<WindowModeKind>,

    /// Total window width in months (even).
    #[arg(long)]
    window_months: Option<u32>,

    /// Comma-separated tier cut points for the tier summary.
    #[arg(long, value_delimiter = ',')]
    tiers: Option<Vec<u64>>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Number of retracted papers to generate.
    #[arg(long)]
    n_retracted: Option<usize>,

    /// Matched controls generated per retracted paper.
    #[arg(long)]
    controls_per_cell: Option<usize>,

    /// Four post-retraction rate multipliers, one per tier.
    #[arg(long, value_delimiter = ',')]
    penalties: Option<Vec<f64>>,

    /// True slope of pre-retraction citations on mention count.
    #[arg(long)]
    attention_beta: Option<f64>,
}

/// Resolved global settings handed to every command.
pub struct Ctx {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub cfg: FileConfig,
}

fn run(cli: Cli) -> Result<()> {
    let cfg = FileConfig::load(cli.config.as_deref())?;

    let threads = resolve(cli.threads, cfg.global("threads")?, 0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("initializing thread pool")?;
    }

    let ctx = Ctx {
        seed: resolve(cli.seed, cfg.global("seed")?, 42),
        out_dir: resolve(
            cli.out_dir,
            cfg.global::<String>("out_dir")?.map(PathBuf::from),
            PathBuf::from("out"),
        ),
        cfg,
    };
    std::fs::create_dir_all(&ctx.out_dir)
        .with_context(|| format!("creating output directory {}", ctx.out_dir.display()))?;

    match cli.command {
        Command::Simulate(args) => commands::simulate::run_simulate(&args, &ctx),
        Command::Sweep(args) => commands::simulate::run_sweep(&args, &ctx),
        Command::Link(args) => commands::link::run(&args, &ctx),
        Command::Match(args) => commands::outcomes::run_match(&args, &ctx),
        Command::Outcomes(args) => commands::outcomes::run_outcomes(&args, &ctx),
        Command::Stats(args) => commands::stats::run(&args, &ctx),
        Command::Attention(args) => commands::attention::run(&args, &ctx),
        Command::Synth(args) => commands::synth::run(&args, &ctx),
    }
}

fn main() {
    // clap handles usage errors itself with exit code 2.
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
