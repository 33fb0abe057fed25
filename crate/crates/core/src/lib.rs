//! Extremal index estimation for stationary time series.
//!
//! The crate provides the disjoint and sliding blocks estimators of the
//! extremal index θ together with everything needed to use them in
//! practice:
//!
//! - [`blocks`]: block maxima, excess counts, the two blocks estimators,
//!   the sliding-window excess variance and the cluster-size dispersion
//!   estimate ĉ², order-statistic thresholds and the intervals estimator.
//! - [`asymptotics`]: closed-form asymptotic covariance, variance and bias
//!   expressions, variance-optimal tuning, bias correction and normal
//!   confidence intervals.
//! - [`processes`]: exact simulators for IID, max-autoregressive and
//!   moving-maximum sequences with their finite-block theory.
//! - [`procedure`]: the full estimation recipe at one block size (threshold
//!   rule, pilot estimates, bias correction, intervals).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod blocks;
mod error;
pub mod optimize;
pub mod procedure;
pub mod processes;
pub mod quantile;
pub mod rng;
mod series;

pub use crate::error::{Error, Result};
pub use crate::series::{BlockConfig, Scheme, TimeSeries};
