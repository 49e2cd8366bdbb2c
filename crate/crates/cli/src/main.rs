use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dro_core::harness::{emit_report, predicted_table, render, run_suite, Format, Report, SuiteConfig, Suites};
use dro_core::EngineError;

/// Exact verification of extended diffeomorphism and gauge algebras on p-jets.
#[derive(Parser, Debug)]
#[command(name = "dro", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON suite configuration; defaults to the full desk-scale grid.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files; without it the report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, value_delimiter = ',', default_value = "text")]
    format: Vec<OutFormat>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the randomized property suite.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Bound on |m|, |n| in mode-level checks.
    #[arg(long, global = true)]
    max_mode: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteName,
    },
    /// Closed-form charge tables only.
    Table,
    /// Every suite.
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteName {
    Lemmas,
    Charges,
    Gauge,
    Spectrum,
    GaugeFixed,
    Properties,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
        }
    }
}

fn selection(name: SuiteName) -> Suites {
    let mut s = Suites::none();
    match name {
        SuiteName::Lemmas => s.lemmas = true,
        SuiteName::Charges => s.charges = true,
        SuiteName::Gauge => s.gauge = true,
        SuiteName::Spectrum => s.spectrum = true,
        SuiteName::GaugeFixed => s.gauge_fixed = true,
        SuiteName::Properties => s.properties = true,
    }
    s
}

fn config(cli: &Cli) -> Result<SuiteConfig, EngineError> {
    let mut cfg = match &cli.config {
        Some(p) => SuiteConfig::load(p)?,
        None => SuiteConfig::full(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(m) = cli.max_mode {
        cfg.max_mode = m;
    }
    match cli.command {
        Command::Verify { suite } => cfg.suites = selection(suite),
        Command::All if cli.config.is_none() => cfg.suites = Suites::default(),
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(cli: &Cli, report: &Report) -> Result<(), EngineError> {
    let formats: Vec<Format> = cli.format.iter().map(|&f| f.into()).collect();
    match &cli.out {
        Some(dir) => {
            for p in emit_report(report, &formats, dir)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            for f in formats {
                print!("{}", render(report, f)?);
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Report, EngineError> {
    let cfg = config(cli)?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| EngineError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Table => predicted_table(&cfg),
        _ => run_suite(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e @ EngineError::Config(_)) => {
            eprintln!("dro: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("dro: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write(&cli, &report) {
        eprintln!("dro: {e}");
        return ExitCode::from(2);
    }
    for f in report.failures() {
        eprintln!("mismatch: {f}");
    }
    ExitCode::from(report.exit_code() as u8)
}
