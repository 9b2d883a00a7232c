use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qrs::bench::{emit_figure, init_thread_pool, simulate, verify_theorems, Command, ExperimentConfig};

/// Delegated quantum sensing: figure data, protocol simulation and
/// Monte-Carlo verification.
#[derive(Parser)]
#[command(name = "qrs", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON config; defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides one config field, `key=json`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the CSV behind one figure (stdout without --out).
    Curves {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=9))]
        fig: u8,
        #[command(flatten)]
        common: Common,
    },
    /// Run the protocol and write transcripts and a summary into a directory.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Run the theorem suites; exits with status 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

struct Resolved {
    cfg: ExperimentConfig,
    seed: u64,
    out: Option<PathBuf>,
}

fn resolve(common: &Common, command: Command) -> qrs::Result<Resolved> {
    let base = match &common.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    let cfg = base.with_overrides(&common.set)?;
    cfg.check_command(command)?;
    let seed = common.seed.unwrap_or(cfg.seed);
    let out = common.out.clone().or_else(|| cfg.output_path.as_ref().map(PathBuf::from));
    Ok(Resolved { cfg, seed, out })
}

fn sink(out: &Option<PathBuf>) -> qrs::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> qrs::Result<bool> {
    init_thread_pool()?;
    match cli.command {
        Cmd::Curves { fig, common } => {
            let r = resolve(&common, Command::Curves)?;
            let curve = emit_figure(fig, &r.cfg)?;
            for w in &curve.warnings {
                eprintln!("warning: {w}");
            }
            let mut out = sink(&r.out)?;
            curve.write_csv(&mut out)?;
            out.flush()?;
            Ok(true)
        }
        Cmd::Simulate { common } => {
            let r = resolve(&common, Command::Simulate)?;
            let dir = r
                .out
                .ok_or_else(|| qrs::Error::Configuration("simulate needs --out or output_path".into()))?;
            let runs = simulate(&r.cfg, r.seed, &dir)?;
            eprintln!("wrote {} runs to {}", runs.len(), dir.display());
            Ok(true)
        }
        Cmd::Verify { common } => {
            let r = resolve(&common, Command::Verify)?;
            let report = verify_theorems(&r.cfg, r.seed)?;
            for suite in &report.suites {
                for c in &suite.checks {
                    eprintln!("[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, suite.name, c.label);
                }
            }
            let mut out = sink(&r.out)?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            out.write_all(b"\n")?;
            out.flush()?;
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
