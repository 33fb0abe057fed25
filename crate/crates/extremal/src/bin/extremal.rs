use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extremal::commands::{cmd_simulate, cmd_study, cmd_sweep, Format};
use extremal::ingest::IngestSpec;
use extremal::sweep::SweepConfig;
use extremal_core::procedure::{Correction, TauRule};
use extremal_core::processes::ProcessSpec;

/// Extremal index estimation with disjoint and sliding blocks.
#[derive(Parser)]
#[command(name = "extremal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct Shared {
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (file for simulate/sweep, directory for study).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a series and write one value per line.
    Simulate {
        /// iid_uniform, iid_frechet, mm or mar:<theta>.
        #[arg(long)]
        process: ProcessSpec,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        shared: Shared,
    },
    /// Estimate the extremal index of a data column over a block-size grid.
    ///
    /// One row per block size and estimator (disjoint, sliding, intervals):
    /// r, k, estimator, tau (tau used for the threshold), u (threshold),
    /// theta_raw, theta_clipped (min(theta_raw, 1)), theta_corrected (after
    /// subtracting the estimated bias, with --bias-correct), theta (reported
    /// value), c2_hat (cluster-size dispersion), tau_opt (optimal rule only),
    /// ci_lo, ci_hi (interval clipped to [0, 1]), ci_lo_raw, ci_hi_raw, and
    /// status ("ok" or the failure reason).
    Sweep {
        /// Input file.
        input: PathBuf,
        /// Zero-based column index.
        #[arg(long, default_value_t = 0)]
        column: usize,
        /// Field delimiter (single character).
        #[arg(long, default_value = ",")]
        delimiter: char,
        /// Treat the first row as a header.
        #[arg(long)]
        skip_header: bool,
        /// Negate the series (analyse the lower tail).
        #[arg(long)]
        negate: bool,
        /// Convert prices to log returns before estimating.
        #[arg(long)]
        log_returns: bool,
        /// Comma-separated block sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        r_grid: Vec<usize>,
        /// Threshold rule: a fixed tau such as 1.0, or "optimal".
        #[arg(long, default_value = "1.0")]
        tau: TauRule,
        /// Confidence level of the normal intervals.
        #[arg(long, default_value_t = 0.90)]
        level: f64,
        /// Subtract the estimated first-order bias.
        #[arg(long)]
        bias_correct: bool,
        #[command(flatten)]
        shared: Shared,
    },
    /// Run a Monte Carlo study described by a key-value configuration file.
    Study {
        config: PathBuf,
        #[command(flatten)]
        shared: Shared,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> extremal::Result<()> {
    match cli.command {
        Command::Simulate { process, n, shared } => {
            let seed = shared.seed.unwrap_or(0);
            let out = shared
                .out
                .ok_or_else(|| usage("simulate needs --out <path>"))?;
            cmd_simulate(&process, n, seed, &out)?;
            eprintln!(
                "wrote {n} values of {process} (seed {seed}) to {}",
                out.display()
            );
        }
        Command::Sweep {
            input,
            column,
            delimiter,
            skip_header,
            negate,
            log_returns,
            r_grid,
            tau,
            level,
            bias_correct,
            shared,
        } => {
            if !delimiter.is_ascii() {
                return Err(usage("delimiter must be a single ASCII character"));
            }
            let ingest = IngestSpec {
                path: input,
                column,
                delimiter: delimiter as u8,
                skip_header,
                negate,
                log_returns,
            };
            let cfg = SweepConfig {
                r_grid,
                tau_rule: tau,
                level,
                correction: if bias_correct {
                    Correction::SubtractMu
                } else {
                    Correction::None
                },
            };
            let out = cmd_sweep(&ingest, &cfg, shared.format.into(), shared.out.as_deref())?;
            eprintln!(
                "{} values ({} rows read, {} skipped)",
                out.ingested.series.len(),
                out.ingested.rows_read,
                out.ingested.rows_skipped
            );
            if shared.out.is_none() {
                print!("{}", out.report);
            }
        }
        Command::Study { config, shared } => {
            let out_dir = shared.out.unwrap_or_else(|| PathBuf::from("."));
            let res = cmd_study(&config, &out_dir, shared.seed, shared.format.into())?;
            eprintln!(
                "{} rows written to {} (metadata in {})",
                res.results.len(),
                res.results_path.display(),
                res.metadata_path.display()
            );
        }
    }
    Ok(())
}

fn usage(msg: &str) -> extremal::Error {
    extremal::Error::Config(vec![msg.to_string()])
}
