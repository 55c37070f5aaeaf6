//! The `tourney` command-line tool.
//!
//! Every subcommand reads a flat config file (or a previous run manifest)
//! with `--config`, applies flag overrides, and writes its data files plus a
//! `manifest.json` into the output directory. Without an output directory
//! the single data file goes to stdout.
//!
//! Exit codes: 0 on success, 2 for malformed input or configuration, 3 when
//! the exact solver's size limit is exceeded, 1 for output failures.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::Run;
pub use config::{Format, Settings, TournamentSource};
pub use error::{CliError, Result};

/// Overrides the output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "TOURNEY_OUT_DIR";

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "tourney", version, about = "Tournament solutions and reinforcement urn experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact optimal strategy, Bipartisan set and Top-Cycle.
    Solve(SolveArgs),
    /// Iterate the tournament Markov chain and report its stationary law.
    Chain(ChainArgs),
    /// One urn trajectory.
    Simulate(SimulateArgs),
    /// Independent trajectories plus a per-snapshot summary.
    Ensemble(EnsembleArgs),
    /// Mean-field flow in log-time.
    Flow(FlowArgs),
    /// Diagnostics of a single urn state.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Flat `key = value` config file, or a run manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Tournament file, or a generator such as `gen:cyclone:5`.
    #[arg(long)]
    pub tournament: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

impl CommonArgs {
    fn apply(&self, s: &mut Settings) {
        set(s, "tournament", &self.tournament);
        set(s, "seed", &self.seed);
        set(s, "format", &self.format);
    }
}

fn set<T: ToString>(s: &mut Settings, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        s.set(key, v.to_string());
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest tournament the exact solver accepts.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sampling lottery as comma-separated fractions, or `uniform`.
    #[arg(long)]
    pub sampling: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// two, three or fast.
    #[arg(long)]
    pub rule: Option<String>,
    /// Initial ball counts, comma-separated.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// `geometric` or comma-separated step counts.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Sample the fast rule from an exact stationary law.
    #[arg(long)]
    pub exact_fast: bool,
}

impl SimulateArgs {
    fn apply(&self, s: &mut Settings) {
        self.common.apply(s);
        set(s, "rule", &self.rule);
        set(s, "initial", &self.initial);
        set(s, "horizon", &self.horizon);
        set(s, "schedule", &self.schedule);
        if self.exact_fast {
            s.set("exact_fast", "true");
        }
    }
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub sim: SimulateArgs,
    #[arg(long)]
    pub n_seeds: Option<usize>,
    /// Worker threads; 1 runs serially. Outputs are identical either way.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// two or three.
    #[arg(long)]
    pub rule: Option<String>,
    /// Starting point, comma-separated, or `uniform`.
    #[arg(long)]
    pub p0: Option<String>,
    #[arg(long)]
    pub s_end: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub sample_every: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Urn counts, comma-separated.
    #[arg(long, alias = "counts")]
    pub initial: Option<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Chain(_) => "chain",
            Command::Simulate(_) => "simulate",
            Command::Ensemble(_) => "ensemble",
            Command::Flow(_) => "flow",
            Command::Diagnose(_) => "diagnose",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Solve(a) => &a.common,
            Command::Chain(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Ensemble(a) => &a.sim.common,
            Command::Flow(a) => &a.common,
            Command::Diagnose(a) => &a.common,
        }
    }

    fn overrides(&self) -> Settings {
        let mut s = Settings::new();
        match self {
            Command::Solve(a) => {
                a.common.apply(&mut s);
                set(&mut s, "limit", &a.limit);
            }
            Command::Chain(a) => {
                a.common.apply(&mut s);
                set(&mut s, "sampling", &a.sampling);
                set(&mut s, "steps", &a.steps);
            }
            Command::Simulate(a) => a.apply(&mut s),
            Command::Ensemble(a) => {
                a.sim.apply(&mut s);
                set(&mut s, "n_seeds", &a.n_seeds);
            }
            Command::Flow(a) => {
                a.common.apply(&mut s);
                set(&mut s, "rule", &a.rule);
                set(&mut s, "p0", &a.p0);
                set(&mut s, "s_end", &a.s_end);
                set(&mut s, "step", &a.step);
                set(&mut s, "sample_every", &a.sample_every);
            }
            Command::Diagnose(a) => {
                a.common.apply(&mut s);
                set(&mut s, "initial", &a.initial);
            }
        }
        s
    }
}

/// Config file (if any) with flag overrides applied.
pub fn settings_for(command: &Command) -> Result<Settings> {
    let mut settings = match &command.common().config {
        Some(path) => Settings::load(path, command.name())?,
        None => Settings::new(),
    };
    settings.merge(command.overrides());
    Ok(settings)
}

/// `--out`, then the environment, then the config file's `out` key.
pub fn output_dir(command: &Command, settings: &Settings) -> Option<PathBuf> {
    command
        .common()
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| settings.get("out").map(PathBuf::from))
}

/// Runs a command without touching the filesystem beyond its inputs.
pub fn run_command(command: &Command, settings: &Settings) -> Result<Run> {
    match command {
        Command::Solve(_) => commands::solve(settings),
        Command::Chain(_) => commands::chain(settings),
        Command::Simulate(_) => commands::simulate(settings),
        Command::Ensemble(a) => commands::ensemble(settings, a.threads),
        Command::Flow(_) => commands::flow(settings),
        Command::Diagnose(_) => commands::diagnose(settings),
    }
}

/// Runs a parsed command line, writing outputs; returns what went to stdout.
pub fn execute(cli: &Cli) -> Result<String> {
    let settings = settings_for(&cli.command)?;
    let out = output_dir(&cli.command, &settings);
    if out.is_none() && matches!(cli.command, Command::Ensemble(_)) {
        return Err(CliError::config("ensemble writes several files; give --out"));
    }
    let run = run_command(&cli.command, &settings)?;
    for note in &run.notes {
        eprintln!("warning: {note}");
    }
    match out {
        Some(dir) => {
            let mut artifacts = run.artifacts;
            let names: Vec<&str> = artifacts.iter().map(|a| a.name.as_str()).collect();
            let manifest = output::manifest(run.command, run.seed, &run.config, &names);
            artifacts.push(output::Artifact::new(MANIFEST, manifest));
            let written = output::write_all(&dir, &artifacts)?;
            Ok(written.iter().map(|p| format!("{}\n", p.display())).collect())
        }
        None => Ok(run.artifacts.into_iter().map(|a| a.contents).collect()),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
