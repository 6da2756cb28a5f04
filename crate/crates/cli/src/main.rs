//! `dissim` — batch experiment runner for the interactive-estimation
//! simulator. Subcommands: simulate | dims | bounds | pac | lowerbound |
//! cover. Exit codes: 0 success, 2 config error, 3 size-cap error,
//! 4 runtime error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{parse_seed_list, AlphaSpec, BoundsMode, ExperimentConfig, LearnerKind};

#[derive(Parser)]
#[command(
    name = "dissim",
    version,
    about = "Interactive-estimation experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `out` field, else "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated seed list; overrides the config.
    #[arg(long)]
    seeds: Option<String>,
    /// Steps per run; overrides the config.
    #[arg(long)]
    t: Option<usize>,
    /// Optimality level: a number, "alpha_star", or "unknown".
    #[arg(long)]
    alpha: Option<AlphaSpec>,
    /// Learner kind; overrides the config.
    #[arg(long)]
    learner: Option<LearnerKind>,
    /// Confidence radius override for optimistic learners.
    #[arg(long)]
    radius: Option<f64>,
    /// Suboptimality gap; overrides the config.
    #[arg(long)]
    eps: Option<f64>,
    /// Failure probability; overrides the config.
    #[arg(long)]
    delta: Option<f64>,
    /// Bounds mode: constant_faithful | empirical.
    #[arg(long)]
    bounds_mode: Option<BoundsMode>,
    /// Trial count for pac.
    #[arg(long)]
    trials: Option<usize>,
}

impl CommonArgs {
    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seeds) = &self.seeds {
            cfg.seeds = parse_seed_list(seeds)?;
        }
        if let Some(t) = self.t {
            cfg.t = t;
        }
        if let Some(alpha) = self.alpha {
            cfg.alpha = alpha;
        }
        if let Some(learner) = self.learner {
            cfg.learner = learner;
        }
        if self.radius.is_some() {
            cfg.radius = self.radius;
        }
        if self.eps.is_some() {
            cfg.epsilon = self.eps;
        }
        if let Some(delta) = self.delta {
            cfg.delta = delta;
        }
        if let Some(mode) = self.bounds_mode {
            cfg.bounds_mode = mode;
        }
        if self.trials.is_some() {
            cfg.trials = self.trials;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol over a seed list and write transcripts + summary.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker threads for the seed fan-out.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Compute dimension reports with witness certificates.
    Dims {
        #[command(flatten)]
        common: CommonArgs,
        /// Which dimensions: dissimilarity, eluder, strong_sq, cover
        /// (default: all applicable).
        #[arg(long, value_delimiter = ',')]
        which: Vec<String>,
    },
    /// Evaluate closed-form bounds from a request file.
    Bounds {
        /// Bound request list (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Optional output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimation runs with derived (T, n1, n2) parameters.
    Pac {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Uniform-target lower-bound experiment on the hard indicator class.
    Lowerbound {
        /// Number of special points.
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Indicator magnitude.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Steps per trial.
        #[arg(long, default_value_t = 25)]
        t: usize,
        /// Learner: ls | scan | uniform.
        #[arg(long, default_value = "ls")]
        learner: String,
        #[arg(long, default_value_t = 400)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Circle net resolution (divisible by 4).
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Covering-number report.
    Cover {
        #[command(flatten)]
        common: CommonArgs,
        /// greedy | exact.
        #[arg(long, default_value = "greedy")]
        mode: String,
    },
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { common, threads } => {
            let cfg = common.load()?;
            commands::simulate::run(&cfg, &common.out_dir(&cfg), threads.max(1))
        }
        Command::Dims { common, which } => {
            let cfg = common.load()?;
            commands::dims_cmd::run(&cfg, &which, &common.out_dir(&cfg))
        }
        Command::Bounds { config, out } => commands::bounds_cmd::run(&config, out.as_deref()),
        Command::Pac { common } => {
            let cfg = common.load()?;
            commands::pac::run(&cfg, &common.out_dir(&cfg))
        }
        Command::Lowerbound {
            n,
            eps,
            t,
            learner,
            trials,
            seed,
            resolution,
            out,
        } => commands::lowerbound::run(n, eps, t, &learner, trials, seed, resolution, &out),
        Command::Cover { common, mode } => {
            let cfg = common.load()?;
            commands::cover::run(&cfg, &mode, &common.out_dir(&cfg))
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    // Config-shaped failures exit 2, size caps 3, everything else 4.
    if let Some(core) = err.downcast_ref::<dissim::Error>() {
        return match core {
            dissim::Error::Config(_) | dissim::Error::InvalidArgument(_) => 2,
            dissim::Error::SizeCap { .. } => 3,
            _ => 4,
        };
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return 2;
    }
    let text = format!("{err:#}");
    if text.contains("parsing config") || text.contains("reading config") {
        return 2;
    }
    4
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
