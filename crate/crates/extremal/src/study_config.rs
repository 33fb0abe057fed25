//! Plain-text study configuration.
//!
//! One `key = value` per line; `#` starts a comment; lists are
//! comma-separated.
//!
//! ```text
//! processes   = mar:0.25, mar:0.5, mar:0.75, mar:1
//! n           = 10000
//! r_grid      = 25, 50, 100, 200, 400
//! tau_rules   = 1, optimal
//! corrections = none, subtract_mu
//! replicates  = 2000
//! base_seed   = 1
//! ci_level    = 0.90
//! workers     = 8          # optional
//! ```
//!
//! `processes`, `n` and `r_grid` are required; the rest default to
//! `tau_rules = 1`, `corrections = none`, `replicates = 2000`,
//! `base_seed = 0` and `ci_level = 0.90`.

use std::collections::BTreeMap;
use std::str::FromStr;

use extremal_core::procedure::{Correction, TauRule};
use extremal_core::processes::ProcessSpec;

use crate::experiments::{StudyConfig, DEFAULT_REPLICATES};
use crate::{Error, Result};

const KEYS: [&str; 9] = [
    "processes",
    "n",
    "r_grid",
    "tau_rules",
    "corrections",
    "replicates",
    "base_seed",
    "ci_level",
    "workers",
];

/// Parses and validates a configuration, reporting every problem at once.
pub fn parse_study_config(text: &str) -> Result<StudyConfig> {
    let mut errs = Vec::new();
    let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errs.push(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            ));
            continue;
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            errs.push(format!("line {}: unknown key '{key}'", lineno + 1));
        } else if entries.insert(key, value.trim()).is_some() {
            errs.push(format!("line {}: duplicate key '{key}'", lineno + 1));
        }
    }

    let processes: Vec<ProcessSpec> = list(&entries, "processes", &mut errs, true);
    let r_grid: Vec<usize> = list(&entries, "r_grid", &mut errs, true);
    let tau_rules = list(&entries, "tau_rules", &mut errs, false);
    let corrections = list(&entries, "corrections", &mut errs, false);
    let n: Option<usize> = scalar(&entries, "n", &mut errs);
    if !entries.contains_key("n") {
        errs.push("n: missing required key".into());
    }

    let cfg = StudyConfig {
        processes,
        n: n.unwrap_or(0),
        r_grid,
        tau_rules: if entries.contains_key("tau_rules") {
            tau_rules
        } else {
            vec![TauRule::DEFAULT]
        },
        corrections: if entries.contains_key("corrections") {
            corrections
        } else {
            vec![Correction::None]
        },
        replicates: scalar(&entries, "replicates", &mut errs).unwrap_or(DEFAULT_REPLICATES),
        base_seed: scalar(&entries, "base_seed", &mut errs).unwrap_or(0),
        ci_level: scalar(&entries, "ci_level", &mut errs).unwrap_or(0.90),
        workers: scalar(&entries, "workers", &mut errs),
    };
    if let Err(Error::Config(more)) = cfg.validate() {
        for e in more {
            // avoid repeating messages already produced while parsing
            if !errs
                .iter()
                .any(|x| x.starts_with(e.split(':').next().unwrap_or("")))
            {
                errs.push(e);
            }
        }
    }
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errs))
    }
}

fn scalar<T: FromStr>(
    entries: &BTreeMap<&str, &str>,
    key: &str,
    errs: &mut Vec<String>,
) -> Option<T> {
    let raw = entries.get(key)?;
    match raw.parse() {
        Ok(v) => Some(v),
        Err(_) => {
            errs.push(format!("{key}: cannot parse '{raw}'"));
            None
        }
    }
}

fn list<T: FromStr>(
    entries: &BTreeMap<&str, &str>,
    key: &str,
    errs: &mut Vec<String>,
    required: bool,
) -> Vec<T>
where
    T::Err: std::fmt::Display,
{
    let Some(raw) = entries.get(key) else {
        if required {
            errs.push(format!("{key}: missing required key"));
        }
        return Vec::new();
    };
    let mut out = Vec::new();
    for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.parse() {
            Ok(v) => out.push(v),
            Err(e) => errs.push(format!("{key}: '{item}': {e}")),
        }
    }
    out
}
