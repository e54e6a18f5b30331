use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hfb::report::{error_exit_code, parse_config, run, Format, Subcommand};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Job {
    Dims,
    Defo,
    Gaudin,
    Spectral,
    Audit,
}

impl From<Job> for Subcommand {
    fn from(j: Job) -> Self {
        match j {
            Job::Dims => Subcommand::Dims,
            Job::Defo => Subcommand::Defo,
            Job::Gaudin => Subcommand::Gaudin,
            Job::Spectral => Subcommand::Spectral,
            Job::Audit => Subcommand::Audit,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

/// Exact checks for framed Higgs bundles on marked curves.
///
/// Exit status: 0 when every asserted check passed, 1 when one failed,
/// 2 on invalid input.
#[derive(Debug, Parser)]
#[command(name = "hfb", version)]
struct Cli {
    /// Job to run; must agree with `subcommand` in the config.
    job: Job,
    /// JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `format` in the config.
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("hfb: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail(2, format_args!("cannot read {}: {e}", cli.config.display())),
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(2, format_args!("{}: {e}", cli.config.display())),
    };
    let job = Subcommand::from(cli.job);
    if config.subcommand != job {
        return fail(
            2,
            format_args!(
                "the config describes a `{}` job but `{}` was requested",
                config.subcommand.name(),
                job.name()
            ),
        );
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(f) = cli.format {
        config.format = match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        };
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => return fail(error_exit_code(&e) as u8, e),
    };
    let text = match report.render(config.format) {
        Ok(t) => t,
        Err(e) => return fail(1, e),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                return fail(2, format_args!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    if !report.passed {
        eprintln!("hfb: failed checks: {}", report.failed_checks.join(", "));
    }
    ExitCode::from(report.exit_code() as u8)
}
