use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// A finite stretch of a stationary sequence. Every value is finite and
/// there is at least one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries(
                "series must contain at least one value".into(),
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "value at position {pos} is not finite ({})",
                values[pos]
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The series with every value negated, for studying lower tails.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Disjoint blocks partition the sample; sliding blocks start at every offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Disjoint,
    Sliding,
}

impl Scheme {
    pub const BOTH: [Scheme; 2] = [Scheme::Disjoint, Scheme::Sliding];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Disjoint => "disjoint",
            Scheme::Sliding => "sliding",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjoint" | "dj" => Ok(Scheme::Disjoint),
            "sliding" | "sl" => Ok(Scheme::Sliding),
            other => Err(Error::InvalidConfig(format!(
                "unknown block scheme '{other}'"
            ))),
        }
    }
}

/// Block size and threshold of one estimation run, with the derived number
/// of disjoint blocks `k = floor(n / r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockConfig {
    n: usize,
    r: usize,
    k: usize,
    u: f64,
}

impl BlockConfig {
    pub fn new(n: usize, r: usize, u: f64) -> Result<Self> {
        check_block_size(n, r)?;
        if u.is_nan() {
            return Err(Error::InvalidConfig("threshold must not be NaN".into()));
        }
        Ok(Self { n, r, k: n / r, u })
    }

    pub fn for_series(series: &TimeSeries, r: usize, u: f64) -> Result<Self> {
        Self::new(series.len(), r, u)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Number of sliding windows, `n - r + 1`.
    pub fn windows(&self) -> usize {
        self.n - self.r + 1
    }

    pub(crate) fn check_series(&self, series: &TimeSeries) -> Result<()> {
        if series.len() != self.n {
            return Err(Error::InvalidConfig(format!(
                "block configuration built for n = {} applied to a series of length {}",
                self.n,
                series.len()
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_block_size(n: usize, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidConfig(
            "block size r must be at least 1".into(),
        ));
    }
    if r > n {
        return Err(Error::InvalidConfig(format!(
            "block size r = {r} exceeds series length n = {n}"
        )));
    }
    Ok(())
}
