//! Monte Carlo study harness.
//!
//! A study crosses processes, block sizes, threshold rules and bias
//! corrections. For every `(process, r)` pair and replicate one series is
//! simulated from a seed hashed out of `(base_seed, process, r, replicate)`;
//! all threshold rules and corrections are evaluated on that same series.
//! Replicates run in parallel and are reduced in replicate order, so the
//! output does not depend on the number of worker threads.

use extremal_core::blocks::EstimatorKind;
use extremal_core::procedure::{
    estimate_at_block_size, BlockSizeReport, Correction, ProcedureConfig, TauRule,
};
use extremal_core::processes::{simulate, ProcessSpec};
use extremal_core::rng::derive_seed;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::report::{opt6, sig6, to_csv};
use crate::{Error, Result};

/// Default replicate count. Full-scale studies use 10 000.
pub const DEFAULT_REPLICATES: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub processes: Vec<ProcessSpec>,
    pub n: usize,
    pub r_grid: Vec<usize>,
    pub tau_rules: Vec<TauRule>,
    pub corrections: Vec<Correction>,
    pub replicates: usize,
    pub base_seed: u64,
    pub ci_level: f64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl StudyConfig {
    /// Every violated constraint, or `Ok` when the configuration is usable.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.processes.is_empty() {
            errs.push("processes: at least one process is required".to_string());
        }
        for p in &self.processes {
            if let Err(e) = p.validate() {
                errs.push(format!("processes: {e}"));
            }
        }
        if self.r_grid.is_empty() {
            errs.push("r_grid: at least one block size is required".to_string());
        }
        for &r in &self.r_grid {
            if r == 0 {
                errs.push("r_grid: block sizes must be at least 1".to_string());
            } else if self.n < 2 * r {
                errs.push(format!(
                    "r_grid: r = {r} violates n >= 2r with n = {}",
                    self.n
                ));
            }
        }
        if self.tau_rules.is_empty() {
            errs.push("tau_rules: at least one threshold rule is required".to_string());
        }
        if self.corrections.is_empty() {
            errs.push("corrections: at least one correction setting is required".to_string());
        }
        if self.replicates == 0 {
            errs.push("replicates: must be at least 1".to_string());
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            errs.push(format!(
                "ci_level: must lie in (0, 1), got {}",
                self.ci_level
            ));
        }
        if self.workers == Some(0) {
            errs.push("workers: must be at least 1".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Number of result rows: one per process, r, rule, correction and
    /// estimator.
    pub fn cell_count(&self) -> usize {
        self.processes.len()
            * self.r_grid.len()
            * self.tau_rules.len()
            * self.corrections.len()
            * EstimatorKind::ALL.len()
    }
}

/// Simulates one series and runs the estimation procedure on it.
pub fn run_replicate(
    spec: &ProcessSpec,
    n: usize,
    cfg: &ProcedureConfig,
    seed: u64,
) -> Result<BlockSizeReport> {
    let series = simulate(spec, n, seed)?;
    Ok(estimate_at_block_size(&series, cfg)?)
}

/// Summary of one estimator in one study cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    #[serde(serialize_with = "display")]
    pub process: ProcessSpec,
    pub theta_true: f64,
    pub n: usize,
    pub r: usize,
    #[serde(serialize_with = "display")]
    pub tau_rule: TauRule,
    #[serde(serialize_with = "display")]
    pub correction: Correction,
    #[serde(serialize_with = "display")]
    pub estimator: EstimatorKind,
    pub replicates: usize,
    /// Mean of the reported (clipped, possibly corrected) estimate.
    pub mean_theta: f64,
    pub bias: f64,
    /// Standard deviation of the reported estimate across replicates.
    pub stderr: f64,
    /// `stderr / sqrt(successful replicates)`; `None` with fewer than two.
    pub mc_error: Option<f64>,
    /// Share of clipped confidence intervals covering the true θ.
    pub coverage: Option<f64>,
    pub coverage_raw: Option<f64>,
    /// Mean and bias of the estimate without clipping at 1.
    pub mean_theta_unclipped: f64,
    pub bias_unclipped: f64,
    pub stderr_unclipped: f64,
    /// Mean τ used for the threshold.
    pub mean_tau: f64,
    pub n_failed: usize,
    /// More than half of the replicates were degenerate.
    pub low_quality: bool,
}

fn display<T: std::fmt::Display, S: Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Default)]
struct Moments {
    count: usize,
    failed: usize,
    theta: Vec<f64>,
    unclipped: Vec<f64>,
    tau: Vec<f64>,
    covered: usize,
    covered_raw: usize,
    has_ci: bool,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Runs the whole grid. Rows come out in grid order: process, r, rule,
/// correction, estimator.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    match cfg.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(vec![format!("workers: {e}")]))?;
            pool.install(|| study_inner(cfg))
        }
        None => study_inner(cfg),
    }
}

fn study_inner(cfg: &StudyConfig) -> Result<Vec<CellResult>> {
    let settings: Vec<(TauRule, Correction)> = cfg
        .tau_rules
        .iter()
        .flat_map(|&t| cfg.corrections.iter().map(move |&c| (t, c)))
        .collect();
    let mut out = Vec::with_capacity(cfg.cell_count());
    for (pi, spec) in cfg.processes.iter().enumerate() {
        let theta_true = spec.theoretical_theta();
        for (ri, &r) in cfg.r_grid.iter().enumerate() {
            let outcomes: Vec<Vec<BlockSizeReport>> = (0..cfg.replicates)
                .into_par_iter()
                .map(|rep| {
                    let seed = derive_seed(cfg.base_seed, &[pi as u64, ri as u64, rep as u64]);
                    let series = simulate(spec, cfg.n, seed)?;
                    settings
                        .iter()
                        .map(|&(tau_rule, correction)| {
                            let pc = ProcedureConfig {
                                r,
                                tau_rule,
                                correction,
                                level: cfg.ci_level,
                            };
                            Ok(estimate_at_block_size(&series, &pc)?)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;

            for (si, &(tau_rule, correction)) in settings.iter().enumerate() {
                for (ei, kind) in EstimatorKind::ALL.into_iter().enumerate() {
                    let mut m = Moments::default();
                    for outcome in &outcomes {
                        m.count += 1;
                        match &outcome[si].estimators[ei] {
                            Ok(rep) => {
                                m.theta.push(rep.theta);
                                m.unclipped.push(rep.theta_unclipped());
                                m.tau.push(rep.tau);
                                if let Some(ci) = &rep.ci {
                                    m.has_ci = true;
                                    m.covered += usize::from(ci.contains(theta_true));
                                    m.covered_raw += usize::from(ci.contains_raw(theta_true));
                                }
                            }
                            Err(_) => m.failed += 1,
                        }
                    }
                    out.push(summarize_cell(
                        spec, theta_true, cfg.n, r, tau_rule, correction, kind, m,
                    ));
                }
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn summarize_cell(
    spec: &ProcessSpec,
    theta_true: f64,
    n: usize,
    r: usize,
    tau_rule: TauRule,
    correction: Correction,
    estimator: EstimatorKind,
    m: Moments,
) -> CellResult {
    let ok = m.theta.len();
    let (mean_theta, mean_unclipped) = if ok > 0 {
        (mean(&m.theta), mean(&m.unclipped))
    } else {
        (f64::NAN, f64::NAN)
    };
    let stderr = sd(&m.theta);
    let share = |c: usize| (m.has_ci && ok > 0).then(|| c as f64 / ok as f64);
    CellResult {
        process: *spec,
        theta_true,
        n,
        r,
        tau_rule,
        correction,
        estimator,
        replicates: m.count,
        mean_theta,
        bias: mean_theta - theta_true,
        stderr,
        mc_error: (ok >= 2).then(|| stderr / (ok as f64).sqrt()),
        coverage: share(m.covered),
        coverage_raw: share(m.covered_raw),
        mean_theta_unclipped: mean_unclipped,
        bias_unclipped: mean_unclipped - theta_true,
        stderr_unclipped: sd(&m.unclipped),
        mean_tau: if ok > 0 { mean(&m.tau) } else { f64::NAN },
        n_failed: m.failed,
        low_quality: 2 * m.failed > m.count,
    }
}

pub const CSV_COLUMNS: [&str; 13] = [
    "process",
    "theta_true",
    "n",
    "r",
    "tau_rule",
    "correction",
    "estimator",
    "mean_theta",
    "bias",
    "stderr",
    "mc_error",
    "coverage",
    "n_failed",
];

/// One CSV row per cell in grid order, numbers to six significant digits.
pub fn summarize_to_csv(results: &[CellResult]) -> String {
    assert!(!results.is_empty(), "study results must not be empty");
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|c| {
            vec![
                c.process.to_string(),
                sig6(c.theta_true),
                c.n.to_string(),
                c.r.to_string(),
                c.tau_rule.to_string(),
                c.correction.to_string(),
                c.estimator.to_string(),
                sig6(c.mean_theta),
                sig6(c.bias),
                sig6(c.stderr),
                opt6(c.mc_error),
                opt6(c.coverage),
                c.n_failed.to_string(),
            ]
        })
        .collect();
    to_csv(&CSV_COLUMNS, &rows)
}

/// JSON mirror of the result rows, including the unclipped and raw-coverage
/// diagnostics.
pub fn summarize_to_json(results: &[CellResult]) -> Result<String> {
    Ok(serde_json::to_string_pretty(results)?)
}
