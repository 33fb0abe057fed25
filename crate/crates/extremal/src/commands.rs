//! Implementations of the `simulate`, `sweep` and `study` subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use extremal_core::procedure::TauRule;
use extremal_core::processes::{simulate, ProcessSpec};

use crate::experiments::{run_study, summarize_to_csv, summarize_to_json, CellResult, StudyConfig};
use crate::ingest::{read_series, IngestSpec, Ingested};
use crate::study_config::parse_study_config;
use crate::sweep::{run_sweep, sweep_to_csv, sweep_to_json, SweepConfig, SweepRow};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Text of a simulated series file: a `#` metadata line, then one value per
/// line in shortest round-trip notation.
pub fn simulated_series_text(spec: &ProcessSpec, n: usize, seed: u64) -> Result<String> {
    let series = simulate(spec, n, seed)?;
    let mut out = format!("# process={spec} n={n} seed={seed}\n");
    for v in series.values() {
        let _ = writeln!(out, "{v}");
    }
    Ok(out)
}

pub fn cmd_simulate(spec: &ProcessSpec, n: usize, seed: u64, out: &Path) -> Result<()> {
    write_file(out, &simulated_series_text(spec, n, seed)?)
}

pub struct SweepOutput {
    pub ingested: Ingested,
    pub rows: Vec<SweepRow>,
    pub report: String,
}

pub fn cmd_sweep(
    ingest: &IngestSpec,
    cfg: &SweepConfig,
    format: Format,
    out: Option<&Path>,
) -> Result<SweepOutput> {
    if cfg.r_grid.is_empty() {
        return Err(Error::Config(vec![
            "r_grid: at least one block size is required".into(),
        ]));
    }
    let ingested = read_series(ingest)?;
    let rows = run_sweep(&ingested.series, cfg)?;
    let report = match format {
        Format::Csv => sweep_to_csv(&rows),
        Format::Json => sweep_to_json(&rows)?,
    };
    if let Some(path) = out {
        write_file(path, &report)?;
    }
    if !rows.iter().any(SweepRow::is_ok) {
        return Err(Error::Data(format!(
            "every estimator failed at every block size; first failure: {}",
            rows[0].status
        )));
    }
    Ok(SweepOutput {
        ingested,
        rows,
        report,
    })
}

pub struct StudyOutput {
    pub config: StudyConfig,
    pub results: Vec<CellResult>,
    pub results_path: PathBuf,
    pub metadata_path: PathBuf,
}

/// Runs a study from a configuration file and writes `results.csv` (or
/// `results.json`) plus `run_metadata.txt` into `out_dir`.
pub fn cmd_study(
    config_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    format: Format,
) -> Result<StudyOutput> {
    let text = std::fs::read_to_string(config_path).map_err(|e| Error::io(config_path, e))?;
    let mut config = parse_study_config(&text)?;
    if let Some(seed) = seed {
        config.base_seed = seed;
    }
    let started = Instant::now();
    let results = run_study(&config)?;
    let elapsed = started.elapsed();

    let results_path = out_dir.join(format!("results.{}", format.extension()));
    let body = match format {
        Format::Csv => summarize_to_csv(&results),
        Format::Json => summarize_to_json(&results)?,
    };
    write_file(&results_path, &body)?;

    let mut meta = String::new();
    let _ = writeln!(meta, "config_file: {}", config_path.display());
    let _ = writeln!(meta, "base_seed: {}", config.base_seed);
    let _ = writeln!(meta, "rows: {}", results.len());
    let _ = writeln!(meta, "wall_time_seconds: {:.3}", elapsed.as_secs_f64());
    meta.push_str("\n[diagnostics]\n");
    for c in &results {
        if c.tau_rule == TauRule::Optimal && c.estimator.scheme().is_some() {
            let _ = writeln!(
                meta,
                "{} r={} {} {}: mean tau_opt = {:.4}",
                c.process, c.r, c.correction, c.estimator, c.mean_tau
            );
        }
        if c.low_quality {
            let _ = writeln!(
                meta,
                "{} r={} {} {} {}: {} of {} replicates degenerate",
                c.process, c.r, c.tau_rule, c.correction, c.estimator, c.n_failed, c.replicates
            );
        }
    }
    meta.push_str("\n[config]\n");
    meta.push_str(&text);
    let metadata_path = out_dir.join("run_metadata.txt");
    write_file(&metadata_path, &meta)?;

    Ok(StudyOutput {
        config,
        results,
        results_path,
        metadata_path,
    })
}
