//! Block-size sweep over one observed series.

use extremal_core::blocks::EstimatorKind;
use extremal_core::procedure::{estimate_at_block_size, Correction, ProcedureConfig, TauRule};
use extremal_core::TimeSeries;
use serde::Serialize;

use crate::report::{opt6, sig6, to_csv};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub r_grid: Vec<usize>,
    pub tau_rule: TauRule,
    pub level: f64,
    pub correction: Correction,
}

/// One estimator at one block size. Numeric fields are `None` when the
/// estimator failed or the quantity does not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: usize,
    pub k: usize,
    pub estimator: &'static str,
    pub tau: Option<f64>,
    pub u: Option<f64>,
    pub theta_raw: Option<f64>,
    pub theta_clipped: Option<f64>,
    pub theta_corrected: Option<f64>,
    pub theta: Option<f64>,
    pub c2_hat: Option<f64>,
    pub tau_opt: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub ci_lo_raw: Option<f64>,
    pub ci_hi_raw: Option<f64>,
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Runs the estimation procedure at every block size. The whole sweep
/// fails only when the series is too short for the largest block size.
pub fn run_sweep(series: &TimeSeries, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(cfg.r_grid.len() * 3);
    for &r in &cfg.r_grid {
        let pc = ProcedureConfig {
            r,
            tau_rule: cfg.tau_rule,
            correction: cfg.correction,
            level: cfg.level,
        };
        let report = estimate_at_block_size(series, &pc)?;
        for kind in EstimatorKind::ALL {
            rows.push(match report.get(kind) {
                Ok(e) => SweepRow {
                    r,
                    k: report.k,
                    estimator: kind.as_str(),
                    tau: Some(e.tau),
                    u: Some(e.estimate.u),
                    theta_raw: Some(e.estimate.theta_raw),
                    theta_clipped: Some(e.estimate.theta_clipped),
                    theta_corrected: e.corrected.as_ref().map(|c| c.theta_corrected),
                    theta: Some(e.theta),
                    c2_hat: e.c2_hat,
                    tau_opt: e.tau_opt.map(|t| t.tau),
                    ci_lo: e.ci.map(|c| c.lo),
                    ci_hi: e.ci.map(|c| c.hi),
                    ci_lo_raw: e.ci.map(|c| c.lo_raw),
                    ci_hi_raw: e.ci.map(|c| c.hi_raw),
                    status: "ok".into(),
                },
                Err(err) => SweepRow {
                    r,
                    k: report.k,
                    estimator: kind.as_str(),
                    tau: None,
                    u: None,
                    theta_raw: None,
                    theta_clipped: None,
                    theta_corrected: None,
                    theta: None,
                    c2_hat: None,
                    tau_opt: None,
                    ci_lo: None,
                    ci_hi: None,
                    ci_lo_raw: None,
                    ci_hi_raw: None,
                    status: err.to_string(),
                },
            });
        }
    }
    Ok(rows)
}

/// Report columns, in order.
pub const COLUMNS: [&str; 16] = [
    "r",
    "k",
    "estimator",
    "tau",
    "u",
    "theta_raw",
    "theta_clipped",
    "theta_corrected",
    "theta",
    "c2_hat",
    "tau_opt",
    "ci_lo",
    "ci_hi",
    "ci_lo_raw",
    "ci_hi_raw",
    "status",
];

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|s| {
            vec![
                s.r.to_string(),
                s.k.to_string(),
                s.estimator.to_string(),
                opt6(s.tau),
                opt6(s.u),
                opt6(s.theta_raw),
                opt6(s.theta_clipped),
                opt6(s.theta_corrected),
                opt6(s.theta),
                opt6(s.c2_hat),
                opt6(s.tau_opt),
                opt6(s.ci_lo),
                opt6(s.ci_hi),
                opt6(s.ci_lo_raw),
                opt6(s.ci_hi_raw),
                s.status.clone(),
            ]
        })
        .collect();
    to_csv(&COLUMNS, &body)
}

/// JSON rows with numbers rounded to six significant digits.
pub fn sweep_to_json(rows: &[SweepRow]) -> Result<String> {
    let round = |x: Option<f64>| x.map(|v| sig6(v).parse::<f64>().unwrap_or(v));
    let rounded: Vec<SweepRow> = rows
        .iter()
        .map(|s| SweepRow {
            tau: round(s.tau),
            u: round(s.u),
            theta_raw: round(s.theta_raw),
            theta_clipped: round(s.theta_clipped),
            theta_corrected: round(s.theta_corrected),
            theta: round(s.theta),
            c2_hat: round(s.c2_hat),
            tau_opt: round(s.tau_opt),
            ci_lo: round(s.ci_lo),
            ci_hi: round(s.ci_hi),
            ci_lo_raw: round(s.ci_lo_raw),
            ci_hi_raw: round(s.ci_hi_raw),
            ..s.clone()
        })
        .collect();
    Ok(serde_json::to_string_pretty(&rounded)?)
}
