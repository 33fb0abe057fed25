//! The complete estimation recipe at one block size.
//!
//! 1. Pick the threshold as the `floor(kτ)`-th largest observation, with τ
//!    either fixed or estimated as variance-optimal from pilot estimates of
//!    θ and c² at τ = 1.
//! 2. Compute the disjoint and sliding blocks estimates at that threshold.
//! 3. Optionally subtract the estimated first-order bias μ̂/k.
//! 4. Attach a normal confidence interval from the plug-in asymptotic
//!    variance.
//!
//! The intervals estimator is evaluated at the τ = 1 threshold under the
//! optimal rule and at the common threshold under a fixed rule.

use alloc::format;
use core::fmt;
use core::str::FromStr;

use crate::asymptotics::{
    bias_corrected, confidence_interval_at, optimal_tau, AsymptoticParams, ConfidenceInterval,
    CorrectedEstimate, OptimalTau,
};
use crate::blocks::{
    block_stats, intervals_estimator, select_threshold, theta_from_stats, EstimatorKind,
    ThetaEstimate,
};
use crate::{BlockConfig, Error, Result, Scheme, TimeSeries};

/// How the threshold is chosen at each block size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    Fixed(f64),
    /// One-shot variance-optimal τ from pilot estimates at τ = 1.
    Optimal,
}

impl TauRule {
    pub const DEFAULT: TauRule = TauRule::Fixed(1.0);
}

impl fmt::Display for TauRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauRule::Fixed(t) => write!(f, "{t}"),
            TauRule::Optimal => f.write_str("optimal"),
        }
    }
}

impl FromStr for TauRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "optimal" {
            return Ok(TauRule::Optimal);
        }
        let t: f64 = s.parse().map_err(|_| {
            Error::InvalidConfig(format!("tau rule must be a number or 'optimal', got '{s}'"))
        })?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "fixed tau must be finite and positive, got {t}"
            )));
        }
        Ok(TauRule::Fixed(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Correction {
    None,
    SubtractMu,
}

impl Correction {
    pub fn as_str(self) -> &'static str {
        match self {
            Correction::None => "none",
            Correction::SubtractMu => "subtract_mu",
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Correction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Correction::None),
            "subtract_mu" => Ok(Correction::SubtractMu),
            other => Err(Error::InvalidConfig(format!(
                "correction must be 'none' or 'subtract_mu', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcedureConfig {
    pub r: usize,
    pub tau_rule: TauRule,
    pub correction: Correction,
    pub level: f64,
}

/// Pilot quantities at τ = 1 used by the optimal rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pilot {
    pub u: f64,
    pub theta_dj: Option<f64>,
    pub theta_sl: Option<f64>,
    pub c2_hat: Option<f64>,
}

/// One estimator's result at one block size.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub kind: EstimatorKind,
    /// τ used to pick the threshold.
    pub tau: f64,
    pub estimate: ThetaEstimate,
    /// Unclipped ĉ² at the estimator's threshold (blocks estimators only).
    pub c2_hat: Option<f64>,
    pub tau_opt: Option<OptimalTau>,
    pub corrected: Option<CorrectedEstimate>,
    /// The reported value: bias-corrected when requested, else clipped.
    pub theta: f64,
    pub ci: Option<ConfidenceInterval>,
}

impl EstimatorReport {
    /// Reported value before clipping, for studying the effect of clipping.
    pub fn theta_unclipped(&self) -> f64 {
        match &self.corrected {
            Some(c) => c.theta_raw_corrected,
            None => self.estimate.theta_raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSizeReport {
    pub r: usize,
    pub k: usize,
    pub pilot: Option<Pilot>,
    /// Disjoint, sliding, intervals, in that order.
    pub estimators: [Result<EstimatorReport>; 3],
}

impl BlockSizeReport {
    pub fn get(&self, kind: EstimatorKind) -> &Result<EstimatorReport> {
        match kind {
            EstimatorKind::Disjoint => &self.estimators[0],
            EstimatorKind::Sliding => &self.estimators[1],
            EstimatorKind::Intervals => &self.estimators[2],
        }
    }
}

/// Runs the full recipe at block size `cfg.r`. Fails as a whole only for
/// invalid configuration or `n < 2r`; threshold degeneracies are reported
/// per estimator.
pub fn estimate_at_block_size(
    series: &TimeSeries,
    cfg: &ProcedureConfig,
) -> Result<BlockSizeReport> {
    let n = series.len();
    if cfg.r == 0 {
        return Err(Error::InvalidConfig(
            "block size r must be at least 1".into(),
        ));
    }
    if n < 2 * cfg.r {
        return Err(Error::InsufficientData {
            what: "block size sweep (n >= 2r for the sliding excess variance)",
            n,
            required: 2 * cfg.r,
        });
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "confidence level must lie in (0, 1), got {}",
            cfg.level
        )));
    }
    let k = n / cfg.r;

    let (pilot, intervals_u) = match cfg.tau_rule {
        TauRule::Fixed(tau) => (None, select_threshold(series, cfg.r, tau)?),
        TauRule::Optimal => {
            let u = select_threshold(series, cfg.r, 1.0)?;
            let bc = BlockConfig::new(n, cfg.r, u)?;
            let stats = block_stats(series, &bc)?;
            let theta = |s| {
                theta_from_stats(&stats, &bc, s)
                    .ok()
                    .map(|e| e.theta_clipped)
            };
            let pilot = Pilot {
                u,
                theta_dj: theta(Scheme::Disjoint),
                theta_sl: theta(Scheme::Sliding),
                c2_hat: stats.c2_hat,
            };
            (Some(pilot), u)
        }
    };

    let blocks = |scheme: Scheme| -> Result<EstimatorReport> {
        let (tau, tau_opt) = match (cfg.tau_rule, &pilot) {
            (TauRule::Fixed(t), _) => (t, None),
            (TauRule::Optimal, Some(p)) => {
                let pilot_theta = match scheme {
                    Scheme::Disjoint => p.theta_dj,
                    Scheme::Sliding => p.theta_sl,
                };
                // a missing pilot means the τ = 1 threshold was degenerate
                let theta =
                    pilot_theta.ok_or_else(|| degenerate_pilot(series, cfg.r, p.u, scheme))?;
                let c2 = p
                    .c2_hat
                    .ok_or_else(|| degenerate_pilot(series, cfg.r, p.u, Scheme::Sliding))?;
                let opt = optimal_tau(scheme, theta, c2)?;
                (opt.tau, Some(opt))
            }
            (TauRule::Optimal, None) => unreachable!("pilot is computed for the optimal rule"),
        };
        let u = select_threshold(series, cfg.r, tau)?;
        let bc = BlockConfig::new(n, cfg.r, u)?;
        let stats = block_stats(series, &bc)?;
        let estimate = theta_from_stats(&stats, &bc, scheme)?;
        let c2_hat = stats
            .c2_hat
            .ok_or(Error::AllBlocksExceed { fhat: stats.f_sl })?;
        let p_hat = AsymptoticParams::plug_in(estimate.theta_clipped, stats.tau_hat, c2_hat)?;
        let corrected = match cfg.correction {
            Correction::None => None,
            Correction::SubtractMu => Some(bias_corrected(&estimate, &p_hat)?),
        };
        let theta = corrected
            .as_ref()
            .map_or(estimate.theta_clipped, |c| c.theta_corrected);
        let ci = confidence_interval_at(theta, &estimate, &p_hat, cfg.level)?;
        Ok(EstimatorReport {
            kind: scheme.into(),
            tau,
            estimate,
            c2_hat: Some(c2_hat),
            tau_opt,
            corrected,
            theta,
            ci: Some(ci),
        })
    };

    let intervals = intervals_estimator(series, intervals_u).map(|estimate| EstimatorReport {
        kind: EstimatorKind::Intervals,
        tau: match cfg.tau_rule {
            TauRule::Fixed(t) => t,
            TauRule::Optimal => 1.0,
        },
        theta: estimate.theta_clipped,
        estimate,
        c2_hat: None,
        tau_opt: None,
        corrected: None,
        ci: None,
    });

    Ok(BlockSizeReport {
        r: cfg.r,
        k,
        pilot,
        estimators: [blocks(Scheme::Disjoint), blocks(Scheme::Sliding), intervals],
    })
}

/// Recomputes the pilot error so the caller sees which statistic failed.
fn degenerate_pilot(series: &TimeSeries, r: usize, u: f64, scheme: Scheme) -> Error {
    let err = BlockConfig::new(series.len(), r, u)
        .and_then(|bc| block_stats(series, &bc).and_then(|s| theta_from_stats(&s, &bc, scheme)));
    match err {
        Err(e) => e,
        Ok(_) => Error::Domain("pilot estimate unavailable".into()),
    }
}
