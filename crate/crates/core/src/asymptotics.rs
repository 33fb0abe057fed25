//! Closed-form asymptotics of the blocks estimators.
//!
//! Everything here is a function of the triple `(θ, τ, c²)` with `α = θτ`:
//! the joint covariance of `(F̂_dj, F̂_sl, τ̂)`, the asymptotic variance of
//! the two θ estimators, the variance functions used for tuning, the
//! first-order bias, and the plug-in bias correction and confidence
//! intervals built from them.

use alloc::format;

use crate::blocks::{EstimatorKind, ThetaEstimate};
use crate::optimize::golden_section;
use crate::quantile::two_sided_z;
use crate::{Error, Result, Scheme};

/// Search interval for the variance-optimal α.
pub const ALPHA_SEARCH: (f64, f64) = (0.05, 10.0);
/// Absolute tolerance of the golden-section search in α.
pub const ALPHA_TOL: f64 = 1e-6;
/// Below this c² the variance functions are increasing on the search
/// interval and the optimum is the left boundary.
pub const C2_BOUNDARY: f64 = 1e-6;
/// Default floor applied when a bias correction drives θ to zero or below.
pub const CORRECTION_FLOOR: f64 = 1e-6;

/// `(θ, τ, c²)` with derived `α = θτ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    theta: f64,
    tau: f64,
    c2: f64,
}

impl AsymptoticParams {
    pub fn new(theta: f64, tau: f64, c2: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::Domain(format!(
                "theta must lie in (0, 1], got {theta}"
            )));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Domain(format!(
                "tau must be finite and positive, got {tau}"
            )));
        }
        if !(c2 >= 0.0) || !c2.is_finite() {
            return Err(Error::Domain(format!(
                "c2 must be finite and non-negative, got {c2}"
            )));
        }
        Ok(Self { theta, tau, c2 })
    }

    /// Plug-in parameters from a clipped θ̂, τ̂ and a raw ĉ² (floored here).
    pub fn plug_in(theta_clipped: f64, tau_hat: f64, c2_raw: f64) -> Result<Self> {
        Self::new(theta_clipped, tau_hat, crate::blocks::floor_c2(c2_raw))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn alpha(&self) -> f64 {
        self.theta * self.tau
    }

    /// Mean cluster size `m₁ = 1/θ`.
    pub fn m1(&self) -> f64 {
        1.0 / self.theta
    }

    /// Second moment of the cluster size, `m₂ = (c² + 1)/θ²`.
    pub fn m2(&self) -> f64 {
        (self.c2 + 1.0) / (self.theta * self.theta)
    }
}

/// `e^α − Σ_{j<order} α^j / j!` for `α >= 0`. Summed as a power series for
/// `α < 1` so that small arguments do not cancel.
pub(crate) fn exp_tail(alpha: f64, order: u32) -> f64 {
    if alpha < 1.0 {
        let mut term = 1.0;
        for j in 1..=order {
            term *= alpha / j as f64;
        }
        let mut sum = 0.0;
        let mut j = order;
        while term > f64::EPSILON * 1e-3 * sum || sum == 0.0 {
            sum += term;
            j += 1;
            term *= alpha / j as f64;
            if term == 0.0 {
                break;
            }
        }
        sum
    } else {
        let mut partial = 0.0;
        let mut term = 1.0;
        for j in 1..order {
            term *= alpha / j as f64;
            partial += term;
        }
        // order >= 1 always; subtract the terms j = 1..order-1 from e^α − 1
        libm::expm1(alpha) - partial
    }
}

/// Symmetric covariance matrix of `(F̂_dj, F̂_sl, τ̂)` scaled by `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix3 {
    pub sigma: [[f64; 3]; 3],
}

impl CovMatrix3 {
    /// Entry `σ_ij` with one-based indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sigma[i - 1][j - 1]
    }
}

pub fn sigma_matrix(p: &AsymptoticParams) -> CovMatrix3 {
    let a = p.alpha();
    let e = libm::exp(-a);
    let s11 = -e * libm::expm1(-a);
    // 1 − (1+α)e^{−α} = e^{−α}(e^α − 1 − α)
    let s22 = 2.0 / a * e * e * exp_tail(a, 2);
    let s31 = -p.tau() * e;
    let s33 = a * p.m2();
    CovMatrix3 {
        sigma: [[s11, s22, s31], [s22, s22, s31], [s31, s31, s33]],
    }
}

/// Symmetric asymptotic covariance of `√k (θ̂_dj − θ, θ̂_sl − θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarMatrix2 {
    pub v: [[f64; 2]; 2],
}

impl VarMatrix2 {
    pub fn v11(&self) -> f64 {
        self.v[0][0]
    }

    pub fn v22(&self) -> f64 {
        self.v[1][1]
    }

    pub fn for_scheme(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::Disjoint => self.v11(),
            Scheme::Sliding => self.v22(),
        }
    }
}

pub fn v_matrix(p: &AsymptoticParams) -> VarMatrix2 {
    let t2 = p.theta() * p.theta();
    let v11 = t2 * variance_at(Scheme::Disjoint, p.alpha(), p.c2());
    let v22 = t2 * variance_at(Scheme::Sliding, p.alpha(), p.c2());
    VarMatrix2 {
        v: [[v11, v22], [v22, v22]],
    }
}

fn variance_at(scheme: Scheme, a: f64, c2: f64) -> f64 {
    let base = match scheme {
        Scheme::Disjoint => exp_tail(a, 2) / (a * a),
        Scheme::Sliding => 2.0 * exp_tail(a, 3) / (a * a * a),
    };
    base + c2 / a
}

/// Asymptotic variance of `√k (θ̂/θ − 1)` as a function of `α` for fixed c².
pub fn variance_fn(scheme: Scheme, alpha: f64, c2: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be finite and positive, got {alpha}"
        )));
    }
    if !(c2 >= 0.0) || !c2.is_finite() {
        return Err(Error::Domain(format!(
            "c2 must be finite and non-negative, got {c2}"
        )));
    }
    Ok(variance_at(scheme, alpha, c2))
}

/// Minimizer of [`variance_fn`] over [`ALPHA_SEARCH`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalAlpha {
    pub alpha: f64,
    pub value: f64,
    /// The optimum sits on the edge of the search interval.
    pub boundary: bool,
}

pub fn optimal_alpha(scheme: Scheme, c2: f64) -> OptimalAlpha {
    let c2 = c2.max(0.0);
    let (lo, hi) = ALPHA_SEARCH;
    if c2 < C2_BOUNDARY {
        return OptimalAlpha {
            alpha: lo,
            value: variance_at(scheme, lo, c2),
            boundary: true,
        };
    }
    let m = golden_section(|a| variance_at(scheme, a, c2), lo, hi, ALPHA_TOL);
    OptimalAlpha {
        alpha: m.x,
        value: m.value,
        boundary: m.x - lo < 2.0 * ALPHA_TOL || hi - m.x < 2.0 * ALPHA_TOL,
    }
}

/// Estimated variance-optimal τ for one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalTau {
    pub tau: f64,
    pub alpha: f64,
    pub boundary: bool,
}

/// `τ_opt = α*(ĉ²) / θ̂`, with θ̂ clipped to `(0, 1]` and ĉ² floored at 0.
pub fn optimal_tau(scheme: Scheme, theta_hat: f64, c2_hat: f64) -> Result<OptimalTau> {
    if !(theta_hat > 0.0 && theta_hat <= 1.0) {
        return Err(Error::Domain(format!(
            "pilot theta must lie in (0, 1], got {theta_hat}"
        )));
    }
    if c2_hat.is_nan() {
        return Err(Error::Domain("pilot c2 is NaN".into()));
    }
    let opt = optimal_alpha(scheme, crate::blocks::floor_c2(c2_hat));
    Ok(OptimalTau {
        tau: opt.alpha / theta_hat,
        alpha: opt.alpha,
        boundary: opt.boundary,
    })
}

/// First-order biases `k(E θ̂ − θ_r) → μ` of the two estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPair {
    pub mu_dj: f64,
    pub mu_sl: f64,
}

impl BiasPair {
    pub fn for_scheme(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::Disjoint => self.mu_dj,
            Scheme::Sliding => self.mu_sl,
        }
    }
}

pub fn asymptotic_bias(p: &AsymptoticParams) -> BiasPair {
    let (t, a, c2) = (p.theta(), p.alpha(), p.c2());
    let cluster = t * c2 / a;
    BiasPair {
        mu_dj: t * exp_tail(a, 1) / (2.0 * a) + cluster,
        mu_sl: t * exp_tail(a, 2) / (a * a) + cluster,
    }
}

/// A blocks estimate with its first-order bias removed.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedEstimate {
    pub estimate: ThetaEstimate,
    /// Estimated μ for the estimator's scheme.
    pub mu_hat: f64,
    /// `μ̂ / k`.
    pub correction: f64,
    /// `θ̂_clipped − μ̂/k`, clipped to `[floor, 1]`.
    pub theta_corrected: f64,
    /// `θ̂_raw − μ̂/k` without any clipping.
    pub theta_raw_corrected: f64,
    /// The correction pushed the estimate to or below zero.
    pub floored: bool,
}

pub fn bias_corrected(est: &ThetaEstimate, p_hat: &AsymptoticParams) -> Result<CorrectedEstimate> {
    bias_corrected_with_floor(est, p_hat, CORRECTION_FLOOR)
}

pub fn bias_corrected_with_floor(
    est: &ThetaEstimate,
    p_hat: &AsymptoticParams,
    floor: f64,
) -> Result<CorrectedEstimate> {
    let scheme = blocks_scheme(est)?;
    let mu_hat = asymptotic_bias(p_hat).for_scheme(scheme);
    let correction = mu_hat / est.k as f64;
    let shifted = est.theta_clipped - correction;
    let floored = shifted <= 0.0;
    Ok(CorrectedEstimate {
        estimate: est.clone(),
        mu_hat,
        correction,
        theta_corrected: if floored { floor } else { shifted.min(1.0) },
        theta_raw_corrected: est.theta_raw - correction,
        floored,
    })
}

fn blocks_scheme(est: &ThetaEstimate) -> Result<Scheme> {
    if est.k == 0 {
        return Err(Error::Domain("estimate has no blocks".into()));
    }
    est.kind.scheme().ok_or_else(|| {
        Error::Domain(format!(
            "{} estimates have no blocks asymptotics",
            EstimatorKind::Intervals
        ))
    })
}

/// Normal-approximation interval; `lo`/`hi` are the raw endpoints
/// intersected with `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub center: f64,
    pub half_width: f64,
    pub lo_raw: f64,
    pub hi_raw: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, theta: f64) -> bool {
        self.lo <= theta && theta <= self.hi
    }

    pub fn contains_raw(&self, theta: f64) -> bool {
        self.lo_raw <= theta && theta <= self.hi_raw
    }
}

/// `θ̂ ± z·sqrt(v/k)` centred at the clipped estimate.
pub fn confidence_interval(
    est: &ThetaEstimate,
    p_hat: &AsymptoticParams,
    level: f64,
) -> Result<ConfidenceInterval> {
    confidence_interval_at(est.theta_clipped, est, p_hat, level)
}

/// As [`confidence_interval`] but centred at `center`, e.g. a bias-corrected
/// value.
pub fn confidence_interval_at(
    center: f64,
    est: &ThetaEstimate,
    p_hat: &AsymptoticParams,
    level: f64,
) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) && level != 0.0 {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let scheme = blocks_scheme(est)?;
    let v = v_matrix(p_hat).for_scheme(scheme);
    let half_width = two_sided_z(level) * libm::sqrt(v / est.k as f64);
    let (lo_raw, hi_raw) = (center - half_width, center + half_width);
    Ok(ConfidenceInterval {
        center,
        half_width,
        lo_raw,
        hi_raw,
        lo: lo_raw.clamp(0.0, 1.0),
        hi: hi_raw.clamp(0.0, 1.0),
    })
}
