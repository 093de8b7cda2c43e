//! `fire` — verify atomic claims and reproduce the evaluation protocol.

mod commands;
mod config;
mod providers_setup;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, OnceLock};

use clap::{Args, Parser, Subcommand, ValueEnum};

use fire::evaluation::RunnerKind;
use fire::types::PromptVariant;

#[derive(Parser)]
#[command(name = "fire", version, about = "Iterative fact-checking agent and evaluation harness")]
struct Cli {
    /// Configuration file; ./fire.toml is picked up automatically.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify one atomic claim. Exit code: 0 Factual, 1 Non-Factual, 2 error.
    Verify {
        /// The claim sentence to verify.
        claim: String,
        /// Directory for the trace and config echo.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed echoed into artifacts (claim verification itself draws no
        /// randomness).
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        flags: AgentFlags,
    },
    /// Run a framework or baseline over a dataset of claims.
    Run {
        /// Normalized claims JSONL, or a dataset manifest TOML.
        #[arg(long)]
        dataset: PathBuf,
        /// Which framework or baseline to execute.
        #[arg(long, value_enum)]
        runner: RunnerArg,
        /// Seed for the random baseline.
        #[arg(long)]
        seed: Option<u64>,
        /// Run directory; defaults to <out_dir>/<timestamp>-<runner>.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: AgentFlags,
    },
    /// Dataset utilities.
    Datasets {
        #[command(subcommand)]
        command: DatasetsCommand,
    },
    /// Re-render reports from stored run ledgers.
    Report {
        /// Run directories containing ledger.json.
        run_dirs: Vec<PathBuf>,
        /// Where to write report.md / report.csv; stdout only when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DatasetsCommand {
    /// Convert a community release into normalized JSONL and print the
    /// per-label counts.
    Normalize {
        /// Raw dataset file (JSON array or JSONL), or a manifest TOML.
        #[arg(long)]
        raw: PathBuf,
        /// Adapter name; ignored when --raw is a manifest.
        #[arg(long)]
        adapter: Option<String>,
        /// Output path; defaults next to the input.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Downsample the Factual class to this many claims.
        #[arg(long)]
        sample_true: Option<usize>,
        /// Seed for the downsampling draw.
        #[arg(long)]
        seed: Option<u64>,
        /// Validate and print counts without writing.
        #[arg(long)]
        dry_run: bool,
    },
}

/// Flags shared by `verify` and `run`.
#[derive(Debug, Default, Args)]
pub struct AgentFlags {
    /// Model identifier requested from the LLM provider.
    #[arg(long)]
    pub model: Option<String>,
    /// Retrieval step cap N.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Early-termination window W over consecutive similar queries/results.
    #[arg(long)]
    pub window: Option<usize>,
    /// Inject the diversity instruction after similar consecutive queries.
    #[arg(long)]
    pub diversity: bool,
    /// Step prompt template.
    #[arg(long, value_enum)]
    pub prompt_variant: Option<PromptVariantArg>,
    /// Disable the search tool (ablation).
    #[arg(long)]
    pub no_search: bool,
    /// Shortcut for --prompt-variant no-reason (ablation).
    #[arg(long)]
    pub no_reason: bool,
    /// Claims verified concurrently during runs.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Serve provider calls through the replay cache; cache hits are free.
    #[arg(long)]
    pub replay: bool,
    /// Resolve and print the plan without touching any provider.
    #[arg(long)]
    pub dry_run: bool,
    /// Scripted provider responses (JSON) instead of live providers.
    #[arg(long)]
    pub scripted: Option<PathBuf>,
    /// Pricing table TOML.
    #[arg(long)]
    pub pricing: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PromptVariantArg {
    Default,
    NoReason,
    AtLeastOne,
    AtLeastTwo,
    Inclusive,
}

impl From<PromptVariantArg> for PromptVariant {
    fn from(arg: PromptVariantArg) -> PromptVariant {
        match arg {
            PromptVariantArg::Default => PromptVariant::Default,
            PromptVariantArg::NoReason => PromptVariant::NoReason,
            PromptVariantArg::AtLeastOne => PromptVariant::AtLeastOne,
            PromptVariantArg::AtLeastTwo => PromptVariant::AtLeastTwo,
            PromptVariantArg::Inclusive => PromptVariant::Inclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunnerArg {
    Fire,
    FireNoReason,
    FireNoSearch,
    Random,
    AlwaysTrue,
    AlwaysFalse,
}

impl RunnerArg {
    pub fn into_kind(self, seed: u64) -> RunnerKind {
        match self {
            RunnerArg::Fire => RunnerKind::Fire,
            RunnerArg::FireNoReason => RunnerKind::FireNoReason,
            RunnerArg::FireNoSearch => RunnerKind::FireNoSearch,
            RunnerArg::Random => RunnerKind::Random { seed },
            RunnerArg::AlwaysTrue => RunnerKind::AlwaysTrue,
            RunnerArg::AlwaysFalse => RunnerKind::AlwaysFalse,
        }
    }
}

static CANCEL: OnceLock<Arc<AtomicBool>> = OnceLock::new();

extern "C" fn on_sigint(_: libc::c_int) {
    if let Some(flag) = CANCEL.get() {
        flag.store(true, Ordering::SeqCst);
    }
}

/// Completed traces are flushed after the pool drains; the handler only
/// flips a flag the workers poll.
fn install_interrupt_handler() -> Arc<AtomicBool> {
    let flag = CANCEL.get_or_init(|| Arc::new(AtomicBool::new(false))).clone();
    unsafe {
        libc::signal(libc::SIGINT, on_sigint as *const () as libc::sighandler_t);
    }
    flag
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cancel = install_interrupt_handler();

    let result = match cli.command {
        Command::Verify { claim, out, seed, flags } => {
            commands::verify(&claim, out, seed, cli.config.as_deref(), &flags)
        }
        Command::Run { dataset, runner, seed, out, flags } => commands::run_dataset(
            &dataset,
            runner,
            seed,
            out,
            cli.config.as_deref(),
            &flags,
            cancel,
        ),
        Command::Datasets { command } => match command {
            DatasetsCommand::Normalize { raw, adapter, out, sample_true, seed, dry_run } => {
                commands::normalize(&raw, adapter.as_deref(), out, sample_true, seed, dry_run)
            }
        },
        Command::Report { run_dirs, out } => commands::report(&run_dirs, out),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(2)
        }
    }
}
