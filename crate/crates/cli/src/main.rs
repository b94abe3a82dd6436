use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use finjury_core::harness::{self, gen, Engine, RunReport, Scenario};
use finjury_core::reductions::KBoundedColoring;
use finjury_core::structures::{HashedTournament, Tournament};

/// Finite-horizon priority constructions: run scenarios, persist traces,
/// replay and verify them.
#[derive(Parser)]
#[command(name = "finjury", version)]
struct Cli {
    /// Overrides the scenario seed; seeds `gen`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the scenario horizon; sizes `gen` output.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Output directory for `run`, output file for `gen`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Count undetermined verdicts as failures.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios concurrently, writing `<name>.trace` and `<name>.report`.
    Run { scenarios: Vec<PathBuf> },
    /// Re-derive a report from a trace file and print it.
    Replay {
        trace: PathBuf,
        /// Reject traces of any other engine.
        #[arg(long)]
        engine: Option<String>,
    },
    /// Replay a trace and compare with its persisted report byte for byte.
    Verify {
        trace: PathBuf,
        /// Defaults to the trace path with a `.report` extension.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a seeded input.
    Gen {
        kind: GenKind,
        /// Engine for `scenario`.
        #[arg(long, default_value = "sts")]
        engine: String,
    },
    /// Replay traces and print the summary table.
    Report {
        traces: Vec<PathBuf>,
        /// Print the machine-readable records instead.
        #[arg(long)]
        machine: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Scenario,
    Tournament,
    StableTournament,
    Coloring,
    Bounded2,
    Bounded3,
    Approx,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run { scenarios } => run(cli, scenarios),
        Command::Replay { trace, engine } => {
            let expected = engine.as_deref().map(str::parse::<Engine>).transpose()?;
            let r = harness::replay_file(trace, expected)?;
            print!("{}", r.render_machine());
            Ok(r.passed(cli.strict))
        }
        Command::Verify { trace, report } => verify(cli, trace, report.as_deref()),
        Command::Gen { kind, engine } => {
            let text = generate(cli, *kind, engine)?;
            match &cli.out {
                Some(p) => {
                    std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Report { traces, machine } => {
            let reports = traces
                .iter()
                .map(|t| {
                    harness::replay_file(t, None)
                        .with_context(|| format!("replaying {}", t.display()))
                })
                .collect::<Result<Vec<_>>>()?;
            if *machine {
                for r in &reports {
                    print!("{}", r.render_machine());
                }
            } else {
                print!("{}", harness::render_table(&reports, cli.strict));
            }
            Ok(reports.iter().all(|r| r.passed(cli.strict)))
        }
    }
}

fn run(cli: &Cli, paths: &[PathBuf]) -> Result<bool> {
    if paths.is_empty() {
        bail!("no scenarios given");
    }
    let mut scenarios = paths
        .iter()
        .map(|p| harness::load_scenario(p).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<Vec<Scenario>>>()?;
    for s in &mut scenarios {
        if let Some(seed) = cli.seed {
            s.seed = seed;
        }
        if let Some(h) = cli.horizon {
            s.horizon = h;
            s.validate()?;
        }
    }
    let mut names: Vec<&str> = scenarios.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        bail!("two scenarios named {:?} would share output paths", w[0]);
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
    let results = finjury_core::batch::map(&scenarios, |s| harness::run_to_dir(s, &dir));
    let mut reports: Vec<RunReport> = Vec::new();
    let mut ok = true;
    for (s, r) in scenarios.iter().zip(results) {
        match r {
            Ok(p) => {
                for f in p.output.report.verification.failures(cli.strict) {
                    eprintln!("{}: {f}", s.name);
                }
                reports.push(p.output.report);
            }
            Err(e) => {
                eprintln!("{}: {e}", s.name);
                ok = false;
            }
        }
    }
    print!("{}", harness::render_table(&reports, cli.strict));
    Ok(ok && reports.iter().all(|r| r.passed(cli.strict)))
}

fn verify(cli: &Cli, trace: &Path, report: Option<&Path>) -> Result<bool> {
    let report_path = report
        .map(Path::to_path_buf)
        .unwrap_or_else(|| trace.with_extension("report"));
    let stored = std::fs::read_to_string(&report_path)
        .with_context(|| format!("reading {}", report_path.display()))?;
    let fresh = harness::replay_file(trace, None)?;
    let rendered = fresh.render_machine();
    if rendered != stored {
        let line = rendered
            .lines()
            .zip(stored.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| rendered.lines().count().min(stored.lines().count()));
        eprintln!("report differs from replay at line {}", line + 1);
        return Ok(false);
    }
    println!("report reproduced: {}", report_path.display());
    Ok(fresh.passed(cli.strict))
}

fn generate(cli: &Cli, kind: GenKind, engine: &str) -> Result<String> {
    let seed = cli.seed.unwrap_or(0);
    let mut rng = gen::rng(seed);
    Ok(match kind {
        GenKind::Scenario => {
            let engine: Engine = engine.parse()?;
            Scenario::new(engine, cli.horizon.unwrap_or(256), seed).to_text()
        }
        GenKind::Tournament => {
            Tournament::materialize(&HashedTournament::new(cli.horizon.unwrap_or(64), seed))
                .to_text()
        }
        GenKind::StableTournament => gen::stable_tournament(&mut rng, cli.horizon.unwrap_or(64))
            .0
            .to_text(),
        GenKind::Coloring => {
            gen::random_two_coloring(&mut rng, cli.horizon.unwrap_or(32)).to_text()
        }
        GenKind::Bounded2 => bounded(gen::bounded_coloring(
            &mut rng,
            2,
            cli.horizon.unwrap_or(16),
        )?),
        GenKind::Bounded3 => bounded(gen::bounded_coloring(
            &mut rng,
            3,
            cli.horizon.unwrap_or(12),
        )?),
        GenKind::Approx => gen::round_trip_approx(&mut rng, cli.horizon.unwrap_or(64), 5).to_text(),
    })
}

fn bounded(f: KBoundedColoring) -> String {
    f.to_text()
}
