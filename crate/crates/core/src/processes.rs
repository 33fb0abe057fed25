//! Simulators and exact finite-block theory for three stationary models:
//! IID sequences (θ = 1), the max-autoregressive process (θ) and the moving
//! maximum process (θ = 1/2).

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::rng::{open_uniform, sim_rng, unit_frechet};
use crate::{Error, Result, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessSpec {
    /// IID Uniform(0, 1).
    IidUniform,
    /// IID unit Fréchet.
    IidFrechet,
    /// `X_1 = W_1/θ`, `X_n = max((1−θ) X_{n−1}, W_n)` with unit-Fréchet `W`.
    Mar { theta: f64 },
    /// `X_1 = 2 W_1`, `X_n = max(W_{n−1}, W_n)`.
    Mm,
}

impl ProcessSpec {
    pub fn mar(theta: f64) -> Result<Self> {
        let spec = ProcessSpec::Mar { theta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessSpec::Mar { theta } if !(theta > 0.0 && theta <= 1.0) => {
                Err(Error::InvalidConfig(format!(
                    "max-autoregressive theta must lie in (0, 1], got {theta}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ProcessSpec::IidUniform => "iid_uniform",
            ProcessSpec::IidFrechet => "iid_frechet",
            ProcessSpec::Mar { .. } => "mar",
            ProcessSpec::Mm => "mm",
        }
    }

    /// The extremal index of the process.
    pub fn theoretical_theta(&self) -> f64 {
        match *self {
            ProcessSpec::IidUniform | ProcessSpec::IidFrechet => 1.0,
            ProcessSpec::Mar { theta } => theta,
            ProcessSpec::Mm => 0.5,
        }
    }

    /// Stationary marginal distribution function.
    pub fn marginal_cdf(&self, u: f64) -> f64 {
        match *self {
            ProcessSpec::IidUniform => u.clamp(0.0, 1.0),
            ProcessSpec::IidFrechet => frechet_cdf(u, 1.0),
            ProcessSpec::Mar { theta } => frechet_cdf(u, 1.0 / theta),
            ProcessSpec::Mm => frechet_cdf(u, 2.0),
        }
    }
}

/// `exp(-scale/u)` for `u > 0`, zero otherwise.
fn frechet_cdf(u: f64, scale: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        libm::exp(-scale / u)
    }
}

impl fmt::Display for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessSpec::Mar { theta } => write!(f, "mar:{theta}"),
            other => f.write_str(other.kind()),
        }
    }
}

impl FromStr for ProcessSpec {
    type Err = Error;

    /// Parses `iid_uniform`, `iid_frechet`, `mm` or `mar:<theta>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s, None),
        };
        match (kind, arg) {
            ("iid_uniform" | "iid", None) => Ok(ProcessSpec::IidUniform),
            ("iid_frechet", None) => Ok(ProcessSpec::IidFrechet),
            ("mm", None) => Ok(ProcessSpec::Mm),
            ("mar", Some(a)) => {
                let theta: f64 = a
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("cannot parse mar theta '{a}'")))?;
                ProcessSpec::mar(theta)
            }
            ("mar", None) => Err(Error::InvalidConfig(
                "mar needs a theta, e.g. mar:0.5".into(),
            )),
            _ => Err(Error::InvalidConfig(format!("unknown process '{s}'"))),
        }
    }
}

/// Simulates `n` observations; deterministic in `(spec, n, seed)`.
pub fn simulate(spec: &ProcessSpec, n: usize, seed: u64) -> Result<TimeSeries> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig(
            "series length must be at least 1".into(),
        ));
    }
    let mut rng = sim_rng(seed);
    let mut x = Vec::with_capacity(n);
    match *spec {
        ProcessSpec::IidUniform => x.extend((0..n).map(|_| open_uniform(&mut rng))),
        ProcessSpec::IidFrechet => x.extend((0..n).map(|_| unit_frechet(&mut rng))),
        ProcessSpec::Mar { theta } => {
            let mut prev = unit_frechet(&mut rng) / theta;
            x.push(prev);
            for _ in 1..n {
                prev = ((1.0 - theta) * prev).max(unit_frechet(&mut rng));
                x.push(prev);
            }
        }
        ProcessSpec::Mm => {
            let mut w_prev = unit_frechet(&mut rng);
            x.push(2.0 * w_prev);
            for _ in 1..n {
                let w = unit_frechet(&mut rng);
                x.push(w_prev.max(w));
                w_prev = w;
            }
        }
    }
    TimeSeries::new(x)
}

/// Exact `F_r(u) = P(max(X_1..X_r) <= u)`.
pub fn theoretical_fr(spec: &ProcessSpec, r: usize, u: f64) -> Result<f64> {
    spec.validate()?;
    if r == 0 {
        return Err(Error::Domain("block size must be at least 1".into()));
    }
    let rm1 = (r - 1) as f64;
    Ok(match *spec {
        ProcessSpec::IidUniform => libm::pow(u.clamp(0.0, 1.0), r as f64),
        ProcessSpec::IidFrechet => frechet_cdf(u, r as f64),
        ProcessSpec::Mar { theta } => frechet_cdf(u, 1.0 / theta + rm1),
        ProcessSpec::Mm => frechet_cdf(u, 2.0 + rm1),
    })
}

/// Threshold `u_r` solving `r (1 − F(u_r)) = τ` exactly.
pub fn exact_threshold(spec: &ProcessSpec, r: usize, tau: f64) -> Result<f64> {
    spec.validate()?;
    check_tau(r, tau)?;
    // L = -log(1 - τ/r) > 0
    let l = -libm::log1p(-tau / r as f64);
    Ok(match *spec {
        ProcessSpec::IidUniform => 1.0 - tau / r as f64,
        ProcessSpec::IidFrechet => 1.0 / l,
        ProcessSpec::Mar { theta } => 1.0 / (theta * l),
        ProcessSpec::Mm => 2.0 / l,
    })
}

fn check_tau(r: usize, tau: f64) -> Result<()> {
    if r == 0 {
        return Err(Error::Domain("block size must be at least 1".into()));
    }
    if !(tau > 0.0) || tau >= r as f64 {
        return Err(Error::Domain(format!(
            "tau must lie in (0, r) = (0, {r}), got {tau}"
        )));
    }
    Ok(())
}

/// `θ_r(u_r) = −log F_r(u_r) / τ` at the exact threshold of
/// [`exact_threshold`]. Computed from closed forms so that `θ_r − θ` keeps
/// full relative precision at large `r`.
pub fn theoretical_theta_r(spec: &ProcessSpec, r: usize, tau: f64) -> Result<f64> {
    spec.validate()?;
    check_tau(r, tau)?;
    let l = -libm::log1p(-tau / r as f64);
    let rf = r as f64;
    Ok(match *spec {
        ProcessSpec::IidUniform | ProcessSpec::IidFrechet => rf * l / tau,
        ProcessSpec::Mar { theta } => l * (1.0 + (rf - 1.0) * theta) / tau,
        ProcessSpec::Mm => (rf + 1.0) * l / (2.0 * tau),
    })
}

/// First two moments of the limiting cluster size distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterTheory {
    pub m1: f64,
    pub m2: f64,
    pub c2: f64,
}

/// Clusters have size 1 for IID data, size exactly 2 for the moving maximum
/// and a geometric size `π_j = θ(1−θ)^{j−1}` for the max-autoregressive
/// process.
pub fn cluster_theory(spec: &ProcessSpec) -> Result<ClusterTheory> {
    spec.validate()?;
    Ok(match *spec {
        ProcessSpec::IidUniform | ProcessSpec::IidFrechet => ClusterTheory {
            m1: 1.0,
            m2: 1.0,
            c2: 0.0,
        },
        ProcessSpec::Mm => ClusterTheory {
            m1: 2.0,
            m2: 4.0,
            c2: 0.0,
        },
        ProcessSpec::Mar { theta } => ClusterTheory {
            m1: 1.0 / theta,
            m2: (2.0 - theta) / (theta * theta),
            c2: 1.0 - theta,
        },
    })
}
