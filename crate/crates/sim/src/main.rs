use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qbc_sim::fig2::fig2;
use qbc_sim::hiding::hiding_test;
use qbc_sim::runner::run_batch;
use qbc_sim::sweep::{parse_values, sweep, write_csv, SweepRow};
use qbc_sim::transcript_io::dump_transcripts;
use qbc_sim::{Result, SimConfig};

#[derive(Parser)]
#[command(name = "qbc", version, about = "Monte Carlo simulator for practical quantum bit commitment")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file (lower_snake_case keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory to write one JSONL transcript per session into.
    #[arg(long, global = true)]
    transcripts: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte Carlo batch.
    Run,
    /// Run one batch per value of a numeric config field.
    Sweep {
        /// Dotted path of the field, e.g. `channel.visibility_v`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
    },
    /// Chi-square test of announced-count distributions between the two bits.
    HidingTest {
        #[arg(long)]
        sessions: u64,
    },
    /// Five sessions of 200 expected pulses; in-basis vs out-of-basis success.
    Fig2,
}

impl Common {
    fn load(&self, preset: impl FnOnce() -> SimConfig) -> Result<SimConfig> {
        let mut config = match &self.config {
            Some(path) => SimConfig::load(path)?,
            None => preset(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        config.validate()?;
        Ok(config)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(File::create(path)?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn emit_json<T: Serialize>(value: &T, mut out: Box<dyn Write>) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Run => {
            let config = common.load(SimConfig::default)?;
            let (outputs, stats) = run_batch(&config)?;
            if let Some(dir) = &common.transcripts {
                dump_transcripts(dir, outputs.iter().map(|o| (o.session_index, &o.transcript)))?;
            }
            match common.format {
                Format::Json => emit_json(&stats, common.sink()?),
                Format::Csv => write_csv(&[SweepRow::new(config.trials as f64, &stats)], common.sink()?),
            }
        }
        Command::Sweep { param, values } => {
            let config = common.load(SimConfig::default)?;
            let values = parse_values(values)?;
            let results = sweep(&config, param, &values)?;
            let rows: Vec<SweepRow> = results.iter().map(|(v, s)| SweepRow::new(*v, s)).collect();
            match common.format {
                Format::Json => emit_json(&rows, common.sink()?),
                Format::Csv => write_csv(&rows, common.sink()?),
            }
        }
        Command::HidingTest { sessions } => {
            let config = common.load(SimConfig::default)?;
            let result = hiding_test(&config, *sessions)?;
            if result.chi_square.widened {
                eprintln!("note: tied counts collapsed the bins to {}", result.chi_square.bin_edges.len());
            }
            match common.format {
                Format::Json => emit_json(&result, common.sink()?),
                Format::Csv => {
                    let mut out = common.sink()?;
                    writeln!(out, "statistic,dof,p_value")?;
                    writeln!(out, "{},{},{}", result.chi_square.statistic, result.chi_square.dof, result.chi_square.p_value)?;
                    Ok(())
                }
            }
        }
        Command::Fig2 => {
            let mut config = common.load(SimConfig::fig2_preset)?;
            config.trials = 5;
            let (outputs, summary) = fig2(&config)?;
            if let Some(dir) = &common.transcripts {
                dump_transcripts(dir, outputs.iter().map(|o| (o.session_index, &o.transcript)))?;
            }
            match common.format {
                Format::Json => emit_json(&summary, common.sink()?),
                Format::Csv => {
                    let mut writer = csv::Writer::from_writer(common.sink()?);
                    for row in &summary.rows {
                        writer.serialize(row)?;
                    }
                    writer.flush()?;
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

