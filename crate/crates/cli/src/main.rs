mod commands;
mod render;
mod schema;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpt_mechlab::revelation::EquilibriumKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}{}: {reason}", if path.is_empty() { String::new() } else { format!(" at {path}") })]
    Input {
        file: String,
        path: String,
        reason: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cpt_mechlab::Error),
    #[error("cannot write {0}: {1}")]
    Output(String, std::io::Error),
}

impl CliError {
    pub fn input(file: &Path, path: &str, reason: impl Into<String>) -> Self {
        CliError::Input {
            file: file.display().to_string(),
            path: path.to_string(),
            reason: reason.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(cpt_mechlab::Error::Resource { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "cpt-mechlab",
    version,
    about = "Mechanism design checks for agents with prospect-theory preferences"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Gain a deviation must exceed to count as a violation.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Grid resolution for candidate beliefs in belief-dominance checks.
    #[arg(long, global = true, default_value_t = 10)]
    pub grid: usize,
    /// Largest number of message profiles a transform may build.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub cap: u128,
    /// Seed for the sampled beliefs used in verification.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Output file; a directory for `reveal`, `reduce-eut` and `examples --export`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Kind {
    BayesNash,
    Dominant,
    BeliefDominant,
}

impl From<Kind> for EquilibriumKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::BayesNash => EquilibriumKind::BayesNash,
            Kind::Dominant => EquilibriumKind::Dominant,
            Kind::BeliefDominant => EquilibriumKind::BeliefDominant,
        }
    }
}

#[derive(Args, Debug)]
pub struct GameFiles {
    #[arg(long)]
    pub env: PathBuf,
    /// Required for bayes-nash checks.
    #[arg(long)]
    pub prior: Option<PathBuf>,
    #[arg(long)]
    pub mechanism: PathBuf,
    #[arg(long)]
    pub strategy: PathBuf,
    #[arg(long, value_enum, default_value = "bayes-nash")]
    pub kind: Kind,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Value a lottery for one type.
    Eval {
        #[arg(long)]
        lottery: PathBuf,
        #[arg(long = "type")]
        ty: PathBuf,
    },
    /// Check that a strategy profile is an equilibrium of a mechanism.
    Check {
        #[command(flatten)]
        files: GameFiles,
        /// Treat a plain mechanism as mediated with a single message per player.
        #[arg(long)]
        mediated: bool,
    },
    /// Build the direct (publicly) mediated mechanism and verify it.
    Reveal {
        #[command(flatten)]
        files: GameFiles,
        /// Build a publicly mediated mechanism.
        #[arg(long)]
        public: bool,
    },
    /// Rewrite an expected-utility environment so that outcomes are allocations.
    ReduceEut {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        prior: Option<PathBuf>,
        #[arg(long)]
        mechanism: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Check incentive compatibility of an allocation rule.
    Ic {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        prior: Option<PathBuf>,
        #[arg(long)]
        rule: PathBuf,
        #[arg(long, value_enum, default_value = "bayes-nash")]
        kind: Kind,
        /// Only this player (1-based); all players by default.
        #[arg(long)]
        player: Option<usize>,
    },
    /// Coupling analysis for per-player convex representations of a rule.
    Couple {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Recompute the built-in reference values.
    Examples {
        /// prelec (1), market (2), public (3), coupling or all.
        #[arg(default_value = "all")]
        which: String,
        /// Write the built-in instances as input files into the --out directory.
        #[arg(long)]
        export: bool,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CPT_MECHLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Usage(format!(
            "CPT_MECHLAB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    // a second initialisation (tests running in one process) is harmless
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(&cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
