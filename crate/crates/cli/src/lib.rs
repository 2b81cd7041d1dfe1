//! `metasoc` command-line front end.
//!
//! Every command writes into its `--out` directory, including a
//! `manifest.json` that records the arguments, inputs, outputs and seed so
//! that `metasoc replay` can re-run it.

pub mod commands;
pub mod run;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};

use commands::correlate::CorrelateArgs;
use commands::extract::ExtractArgs;
use commands::fit::FitArgs;
use commands::report::ReportArgs;
use commands::rules::RulesArgs;
use commands::simulate::SimulateCommand;
use run::{
    read_manifest, unix_now, Failure, Outcome, Outputs, RunManifest, EXIT_EMPTY, EXIT_INPUT, EXIT_OK, MANIFEST_FILE,
};

#[derive(Debug, Parser)]
#[command(name = "metasoc", version, about = "Metaphor construction mining, curve fitting and criticality simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a lemma's dependency contexts into constructions.
    Extract(ExtractArgs),
    /// Fit power-law, Menzerath-Altmann or logistic curves.
    Fit(FitArgs),
    /// Mine class-ordering rules across metaphors.
    Rules(RulesArgs),
    /// Pairwise Pearson correlations of exponent, FOY and frequency.
    Correlate(CorrelateArgs),
    /// Run a sandpile or adoption simulation.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Summarize one metaphor's profile, fit and rule predictions.
    Report(ReportArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, clap::Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Extract(_) => "extract",
            Command::Fit(_) => "fit",
            Command::Rules(_) => "rules",
            Command::Correlate(_) => "correlate",
            Command::Simulate(SimulateCommand::Sandpile(_)) => "simulate sandpile",
            Command::Simulate(SimulateCommand::Adoption(_)) => "simulate adoption",
            Command::Report(_) => "report",
            Command::Replay(_) => "replay",
        }
    }

    fn out(&self) -> &Path {
        match self {
            Command::Extract(a) => &a.out,
            Command::Fit(a) => &a.out,
            Command::Rules(a) => &a.out,
            Command::Correlate(a) => &a.out,
            Command::Simulate(c) => c.out(),
            Command::Report(a) => &a.out,
            Command::Replay(_) => unreachable!("replay has no output directory of its own"),
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match cli.command {
        Command::Replay(r) => replay(&r),
        command => execute(&command, args),
    }
}

fn execute(command: &Command, args: Vec<String>) -> i32 {
    let started = unix_now();
    let mut out = match Outputs::new(command.out()) {
        Ok(o) => o,
        Err(f) => return report_failure(&f),
    };
    let result = match command {
        Command::Extract(a) => commands::extract::run(a, &mut out),
        Command::Fit(a) => commands::fit::run(a, &mut out),
        Command::Rules(a) => commands::rules::run(a, &mut out),
        Command::Correlate(a) => commands::correlate::run(a, &mut out),
        Command::Simulate(c) => commands::simulate::run(c, &mut out),
        Command::Report(a) => commands::report::run(a, &mut out),
        Command::Replay(_) => unreachable!(),
    };
    let (code, outcome) = match result {
        Ok(o) => {
            let code = match &o.empty {
                Some(msg) => {
                    eprintln!("{msg}");
                    EXIT_EMPTY
                }
                None => EXIT_OK,
            };
            (code, o)
        }
        Err(f) => (report_failure(&f), Outcome::default()),
    };
    let manifest = RunManifest {
        command: command.name().to_string(),
        args,
        working_dir: std::env::current_dir().map(|d| d.display().to_string()).unwrap_or_default(),
        params: outcome.params,
        seed: outcome.seed,
        inputs: out.inputs().iter().map(|p| p.display().to_string()).collect(),
        outputs: out.written().iter().map(|p| p.display().to_string()).collect(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at_unix: started,
        finished_at_unix: unix_now(),
        exit_code: code,
    };
    if let Err(f) = out.write_json(MANIFEST_FILE, &manifest) {
        return report_failure(&f);
    }
    code
}

fn report_failure(f: &Failure) -> i32 {
    eprintln!("error: {:#}", f.error());
    f.code()
}

/// Replaces the value of `--out` (both `--out DIR` and `--out=DIR`).
fn override_out(args: &[String], dir: &str) -> Vec<String> {
    let mut result = Vec::with_capacity(args.len());
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        if a == "--out" {
            result.push(a.clone());
            iter.next();
            result.push(dir.to_string());
        } else if a.starts_with("--out=") {
            result.push(format!("--out={dir}"));
        } else {
            result.push(a.clone());
        }
    }
    result
}

fn replay(r: &ReplayArgs) -> i32 {
    let prepared = (|| -> anyhow::Result<Vec<String>> {
        let manifest = read_manifest(&r.manifest)?;
        let out = match &r.out {
            Some(dir) => Some(std::path::absolute(dir).context("resolving --out")?),
            None => None,
        };
        std::env::set_current_dir(&manifest.working_dir)
            .with_context(|| format!("cannot enter recorded working directory {}", manifest.working_dir))?;
        Ok(match out {
            Some(dir) => override_out(&manifest.args, &dir.display().to_string()),
            None => manifest.args,
        })
    })();
    match prepared {
        Ok(args) => {
            if args.first().is_some_and(|a| a == "replay") {
                eprintln!("error: a manifest cannot replay another replay");
                return EXIT_INPUT;
            }
            run(std::iter::once("metasoc".to_string()).chain(args))
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}
