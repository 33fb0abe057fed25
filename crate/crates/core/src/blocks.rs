//! Finite-sample block statistics and the extremal index estimators.
//!
//! Conventions: an observation exceeds `u` when it is strictly greater than
//! `u`, and a block maximum is counted in F̂ when it is `<= u`. Disjoint
//! blocks and τ̂ ignore the trailing `n - r·k` observations; sliding blocks
//! use all `n - r + 1` windows.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use crate::series::check_block_size;
use crate::{BlockConfig, Error, Result, Scheme, TimeSeries};

/// Which estimator produced a [`ThetaEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Disjoint,
    Sliding,
    Intervals,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [
        EstimatorKind::Disjoint,
        EstimatorKind::Sliding,
        EstimatorKind::Intervals,
    ];

    pub fn scheme(self) -> Option<Scheme> {
        match self {
            EstimatorKind::Disjoint => Some(Scheme::Disjoint),
            EstimatorKind::Sliding => Some(Scheme::Sliding),
            EstimatorKind::Intervals => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Disjoint => "disjoint",
            EstimatorKind::Sliding => "sliding",
            EstimatorKind::Intervals => "intervals",
        }
    }
}

impl From<Scheme> for EstimatorKind {
    fn from(scheme: Scheme) -> Self {
        match scheme {
            Scheme::Disjoint => EstimatorKind::Disjoint,
            Scheme::Sliding => EstimatorKind::Sliding,
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Diagnostics shared by both blocks estimators at one `(r, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStats {
    /// Proportion of disjoint block maxima `<= u` (denominator `k`).
    pub f_dj: f64,
    /// Proportion of sliding window maxima `<= u` (denominator `n - r + 1`).
    pub f_sl: f64,
    /// Mean number of exceedances per disjoint block.
    pub tau_hat: f64,
    /// Mean sliding-window excess count; `None` when `n < 2r`.
    pub nbar: Option<f64>,
    /// Sliding-window excess count variance; `None` when `n < 2r`.
    pub sigma2_hat: Option<f64>,
    /// Unclipped ĉ²; `None` when `n < 2r` or the sliding estimator is undefined.
    pub c2_hat: Option<f64>,
}

impl BlockStats {
    pub fn fhat(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::Disjoint => self.f_dj,
            Scheme::Sliding => self.f_sl,
        }
    }

    /// ĉ² floored at zero, the value fed to variance and bias formulas.
    pub fn c2_floored(&self) -> Option<f64> {
        self.c2_hat.map(floor_c2)
    }
}

/// Output of one estimator at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEstimate {
    pub kind: EstimatorKind,
    pub theta_raw: f64,
    /// `min(theta_raw, 1)`.
    pub theta_clipped: f64,
    /// Number of disjoint blocks; zero for the intervals estimator.
    pub k: usize,
    pub u: f64,
    /// Block diagnostics; `None` for the intervals estimator.
    pub stats: Option<BlockStats>,
}

/// Maxima of consecutive disjoint blocks (`k` values, trailing remainder
/// discarded) or of all `n - r + 1` sliding windows.
pub fn block_maxima(series: &TimeSeries, r: usize, scheme: Scheme) -> Result<Vec<f64>> {
    let x = series.values();
    check_block_size(x.len(), r)?;
    Ok(match scheme {
        Scheme::Disjoint => x
            .chunks_exact(r)
            .map(|block| block.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect(),
        Scheme::Sliding => sliding_maxima(x, r),
    })
}

/// Window maxima in O(n) with a monotone queue of candidate indices.
fn sliding_maxima(x: &[f64], r: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() + 1 - r);
    // Indices with strictly decreasing values, front is the window maximum.
    let mut queue: VecDeque<usize> = VecDeque::with_capacity(r);
    for (i, &v) in x.iter().enumerate() {
        while queue.back().is_some_and(|&j| x[j] <= v) {
            queue.pop_back();
        }
        queue.push_back(i);
        if queue[0] + r <= i {
            queue.pop_front();
        }
        if i + 1 >= r {
            out.push(x[queue[0]]);
        }
    }
    out
}

/// Number of exceedances of `u` in each sliding window of length `r`.
pub fn window_excess_counts(series: &TimeSeries, r: usize, u: f64) -> Result<Vec<usize>> {
    let x = series.values();
    check_block_size(x.len(), r)?;
    let mut counts = Vec::with_capacity(x.len() + 1 - r);
    let mut current = x[..r].iter().filter(|&&v| v > u).count();
    counts.push(current);
    for i in r..x.len() {
        current += usize::from(x[i] > u);
        current -= usize::from(x[i - r] > u);
        counts.push(current);
    }
    Ok(counts)
}

/// Empirical distribution function of the block maximum at `u`.
pub fn fhat(series: &TimeSeries, cfg: &BlockConfig, scheme: Scheme) -> Result<f64> {
    cfg.check_series(series)?;
    let maxima = block_maxima(series, cfg.r(), scheme)?;
    let below = maxima.iter().filter(|&&m| m <= cfg.u()).count();
    Ok(below as f64 / maxima.len() as f64)
}

/// Mean number of exceedances per disjoint block over the first `r·k`
/// observations.
pub fn tau_hat(series: &TimeSeries, cfg: &BlockConfig) -> Result<f64> {
    cfg.check_series(series)?;
    let used = cfg.r() * cfg.k();
    let exceedances = series.values()[..used]
        .iter()
        .filter(|&&v| v > cfg.u())
        .count();
    Ok(exceedances as f64 / cfg.k() as f64)
}

/// Mean and variance of the sliding-window excess counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessVariance {
    pub nbar: f64,
    pub sigma2_hat: f64,
}

/// Sliding-window mean excess count N̄ and the variance estimate σ̂² with
/// denominator `n - 2r + 1`. Requires `n >= 2r`.
pub fn sliding_excess_variance(series: &TimeSeries, cfg: &BlockConfig) -> Result<ExcessVariance> {
    cfg.check_series(series)?;
    let (n, r) = (cfg.n(), cfg.r());
    if n < 2 * r {
        return Err(Error::InsufficientData {
            what: "the sliding excess variance (n >= 2r)",
            n,
            required: 2 * r,
        });
    }
    let counts = window_excess_counts(series, r, cfg.u())?;
    let nbar = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let ss: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - nbar;
            d * d
        })
        .sum();
    Ok(ExcessVariance {
        nbar,
        sigma2_hat: ss / (n - 2 * r + 1) as f64,
    })
}

/// All block diagnostics at `(r, u)`. The variance-based fields are `None`
/// when `n < 2r`; ĉ² is also `None` when the sliding estimator is degenerate.
pub fn block_stats(series: &TimeSeries, cfg: &BlockConfig) -> Result<BlockStats> {
    let f_dj = fhat(series, cfg, Scheme::Disjoint)?;
    let f_sl = fhat(series, cfg, Scheme::Sliding)?;
    let tau = tau_hat(series, cfg)?;
    let (nbar, sigma2_hat) = match sliding_excess_variance(series, cfg) {
        Ok(v) => (Some(v.nbar), Some(v.sigma2_hat)),
        Err(Error::InsufficientData { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let c2_hat = match (sigma2_hat, raw_theta(f_sl, tau)) {
        (Some(s2), Ok(theta_sl)) => Some(theta_sl / tau * s2 - 1.0),
        _ => None,
    };
    Ok(BlockStats {
        f_dj,
        f_sl,
        tau_hat: tau,
        nbar,
        sigma2_hat,
        c2_hat,
    })
}

fn raw_theta(f: f64, tau: f64) -> Result<f64> {
    if tau <= 0.0 {
        return Err(Error::NoExceedances { tau_hat: tau });
    }
    if f <= 0.0 {
        return Err(Error::AllBlocksExceed { fhat: f });
    }
    Ok(-libm::log(f) / tau)
}

/// The disjoint or sliding blocks estimator `-log F̂ / τ̂`.
pub fn theta_hat(series: &TimeSeries, cfg: &BlockConfig, scheme: Scheme) -> Result<ThetaEstimate> {
    let stats = block_stats(series, cfg)?;
    theta_from_stats(&stats, cfg, scheme)
}

/// Both blocks estimators from one set of diagnostics.
pub fn theta_from_stats(
    stats: &BlockStats,
    cfg: &BlockConfig,
    scheme: Scheme,
) -> Result<ThetaEstimate> {
    let theta_raw = raw_theta(stats.fhat(scheme), stats.tau_hat)?;
    Ok(ThetaEstimate {
        kind: scheme.into(),
        theta_raw,
        theta_clipped: theta_raw.min(1.0),
        k: cfg.k(),
        u: cfg.u(),
        stats: Some(*stats),
    })
}

/// ĉ² = (θ̂_sl / τ̂)·σ̂² − 1, unclipped. See [`floor_c2`].
pub fn c2_hat(series: &TimeSeries, cfg: &BlockConfig) -> Result<f64> {
    let sliding = theta_hat(series, cfg, Scheme::Sliding)?;
    let stats = sliding.stats.expect("blocks estimates carry stats");
    let var = sliding_excess_variance(series, cfg)?;
    Ok(sliding.theta_raw / stats.tau_hat * var.sigma2_hat - 1.0)
}

/// c² is non-negative by definition; negative finite-sample estimates are
/// floored before entering asymptotic formulas.
pub fn floor_c2(c2: f64) -> f64 {
    c2.max(0.0)
}

/// Rank `m = floor(k·τ)` of the order-statistic threshold, clamped to `[1, n]`.
pub fn threshold_rank(n: usize, r: usize, tau: f64) -> Result<usize> {
    check_block_size(n, r)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidConfig(alloc::format!(
            "threshold rule needs a finite tau > 0, got {tau}"
        )));
    }
    let k = (n / r) as f64;
    let m = libm::floor(k * tau);
    Ok((m as usize).clamp(1, n))
}

/// The `floor(k·τ)`-th largest observation, so that roughly τ exceedances
/// fall in each block. The rank convention (floor, clamped to `[1, n]`) is
/// a choice, not part of the estimator definition.
pub fn select_threshold(series: &TimeSeries, r: usize, tau: f64) -> Result<f64> {
    let m = threshold_rank(series.len(), r, tau)?;
    let mut values = series.values().to_vec();
    let (_, mth, _) = values.select_nth_unstable_by(m - 1, |a, b| b.total_cmp(a));
    Ok(*mth)
}

/// Intervals estimator from inter-exceedance times, using the bias-adjusted
/// form whenever some gap exceeds 2.
pub fn intervals_estimator(series: &TimeSeries, u: f64) -> Result<ThetaEstimate> {
    let positions: Vec<usize> = series
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > u)
        .map(|(i, _)| i)
        .collect();
    if positions.len() < 2 {
        return Err(Error::InsufficientExceedances {
            found: positions.len(),
        });
    }
    let gaps: Vec<f64> = positions.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let pairs = gaps.len() as f64;
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    let theta_raw = if max_gap <= 2.0 {
        let sum: f64 = gaps.iter().sum();
        let sum_sq: f64 = gaps.iter().map(|t| t * t).sum();
        2.0 * sum * sum / (pairs * sum_sq)
    } else {
        let sum: f64 = gaps.iter().map(|t| t - 1.0).sum();
        let cross: f64 = gaps.iter().map(|t| (t - 1.0) * (t - 2.0)).sum();
        2.0 * sum * sum / (pairs * cross)
    };
    Ok(ThetaEstimate {
        kind: EstimatorKind::Intervals,
        theta_raw,
        theta_clipped: theta_raw.min(1.0),
        k: 0,
        u,
        stats: None,
    })
}
