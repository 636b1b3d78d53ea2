use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dsc_cli::bundle::{parse_locals, serialize_locals, Bundle};
use dsc_cli::pipeline::{run_pipeline, synthesize, ChannelSelection, Checks, PipelineOptions};
use dsc_cli::report::{explain, summary, Report};
use dsc_cli::parse_bundle;
use dsc_core::abstraction::BUDGET_ENV;
use dsc_core::blocking::delay_bound_estimate;
use dsc_core::synthesis::localize;
use dsc_core::Event;

/// Delay-robustness checks for distributed supervisory control.
#[derive(Parser)]
#[command(name = "dsc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the monolithic supervisor.
    Synth {
        bundle: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compute local controllers and print them as `local` blocks.
    Localize {
        bundle: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check delay-robustness for a set of channels.
    CheckRobust(Common),
    /// Check whether uncontrollable channeled events can be blocked.
    CheckBlocked(Common),
    /// Fewest events between consecutive occurrences of each event.
    Bound {
        bundle: PathBuf,
        /// Comma-separated events; defaults to the selected channels.
        #[arg(long, value_delimiter = ',')]
        event: Vec<u32>,
        #[arg(long)]
        channels: Option<String>,
    },
    /// Run synthesis, localization, robustness and blocking checks.
    Pipeline(Common),
    /// Annotate the counterexamples and witnesses of a saved report.
    Explain { report: PathBuf },
}

#[derive(Args)]
struct Common {
    bundle: PathBuf,
    /// `all`, a preset name, or EVENT:AGENT[:SIGNAL],...
    #[arg(long)]
    channels: Option<String>,
    /// File of `local` blocks to use as controllers.
    #[arg(long)]
    locals: Option<PathBuf>,
    /// Cap on subset-construction states.
    #[arg(long, env = BUDGET_ENV)]
    budget: Option<usize>,
    /// Search depth for fault admissibility.
    #[arg(long)]
    depth: Option<usize>,
    /// Write the machine-readable report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn load(path: &Path) -> Result<Bundle> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_bundle(&text).with_context(|| format!("{}", path.display()))
}

fn selection(s: &Option<String>) -> Result<ChannelSelection> {
    Ok(match s {
        Some(s) => ChannelSelection::parse(s)?,
        None => ChannelSelection::Bundle,
    })
}

fn write_report(path: &Option<PathBuf>, r: &Report) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, r.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run_common(c: &Common, checks: Checks) -> Result<bool> {
    let bundle = load(&c.bundle)?;
    let locals = match &c.locals {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(parse_locals(&text, &bundle).with_context(|| format!("{}", p.display()))?)
        }
        None => None,
    };
    let opts = PipelineOptions {
        channels: selection(&c.channels)?,
        budget: c.budget,
        depth: c.depth,
        locals,
        checks,
    };
    let run = run_pipeline(&bundle, &opts)?;
    print!("{}", summary(&run.report));
    write_report(&c.report, &run.report)?;
    Ok(run.report.passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Synth { bundle, report } => {
            let b = load(&bundle)?;
            let (_, _, _, r) = synthesize(&b)?;
            print!("{}", summary(&r));
            write_report(&report, &r)?;
            Ok(r.passed)
        }
        Command::Localize { bundle, report } => {
            let b = load(&bundle)?;
            let opts = PipelineOptions {
                checks: Checks {
                    robustness: false,
                    blocking: false,
                },
                ..Default::default()
            };
            let run = run_pipeline(&b, &opts)?;
            let locals = if run.locals.is_empty() {
                localize(&run.model, &run.sup)?
            } else {
                run.locals
            };
            let names: Vec<(String, String)> = locals
                .iter()
                .map(|l| (b.local_name(l.owner), b.agents[l.owner].name.clone()))
                .collect();
            let gens: Vec<_> = locals.iter().map(|l| &l.controller).collect();
            print!("{}", serialize_locals(&names, &gens));
            write_report(&report, &run.report)?;
            Ok(run.report.passed)
        }
        Command::CheckRobust(c) => run_common(
            &c,
            Checks {
                robustness: true,
                blocking: false,
            },
        ),
        Command::CheckBlocked(c) => run_common(
            &c,
            Checks {
                robustness: false,
                blocking: true,
            },
        ),
        Command::Pipeline(c) => run_common(&c, Checks::default()),
        Command::Bound {
            bundle,
            event,
            channels,
        } => {
            let b = load(&bundle)?;
            let events: Vec<Event> = if event.is_empty() {
                let opts = PipelineOptions {
                    channels: selection(&channels)?,
                    checks: Checks {
                        robustness: false,
                        blocking: false,
                    },
                    ..Default::default()
                };
                let run = run_pipeline(&b, &opts)?;
                run.channels.iter().map(|c| c.event).collect()
            } else {
                event.into_iter().map(Event).collect()
            };
            let (_, _, sup, _) = synthesize(&b)?;
            for e in events {
                match delay_bound_estimate(&sup, e) {
                    Some(n) => println!("{e}: {n}"),
                    None => println!("{e}: does not recur"),
                }
            }
            Ok(true)
        }
        Command::Explain { report } => {
            let text = std::fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))?;
            let r = Report::from_json(&text).with_context(|| format!("{}", report.display()))?;
            print!("{}", explain(&r));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
