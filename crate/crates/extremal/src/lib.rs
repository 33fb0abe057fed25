//! Monte Carlo studies, CSV ingestion and reporting for the
//! `extremal-core` estimators, plus the library side of the `extremal`
//! command-line tool.

pub mod commands;
mod error;
pub mod experiments;
pub mod ingest;
pub mod report;
pub mod study_config;
pub mod sweep;

pub use crate::error::{Error, Result};
