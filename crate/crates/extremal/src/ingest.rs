//! Reading a numeric column from delimited text.
//!
//! Parsing is locale-independent: `.` is the only decimal separator and
//! scientific notation is accepted. Lines starting with `#` are comments.
//! Rows whose selected field is missing, unparsable or non-finite are
//! skipped and counted.

use std::path::{Path, PathBuf};

use extremal_core::TimeSeries;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IngestSpec {
    pub path: PathBuf,
    /// Zero-based column index.
    pub column: usize,
    pub delimiter: u8,
    pub skip_header: bool,
    pub negate: bool,
    /// Replace prices `p_t` by log returns `log(p_t / p_{t-1})`.
    pub log_returns: bool,
}

impl IngestSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            column: 0,
            delimiter: b',',
            skip_header: false,
            negate: false,
            log_returns: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub series: TimeSeries,
    pub rows_read: usize,
    pub rows_skipped: usize,
}

pub fn read_series(spec: &IngestSpec) -> Result<Ingested> {
    let file = std::fs::File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    parse_series(file, spec)
}

/// As [`read_series`] but from any reader; `spec.path` is used for messages.
pub fn parse_series<R: std::io::Read>(reader: R, spec: &IngestSpec) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(spec.skip_header)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let (mut rows_read, mut rows_skipped) = (0, 0);
    for record in rdr.records() {
        let record = record.map_err(|source| csv_error(&spec.path, source))?;
        rows_read += 1;
        match record.get(spec.column).and_then(|f| f.parse::<f64>().ok()) {
            Some(v) if v.is_finite() => values.push(v),
            _ => rows_skipped += 1,
        }
    }
    if spec.log_returns {
        values = log_returns(&values, &spec.path)?;
    }
    if spec.negate {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    if values.is_empty() {
        return Err(Error::Data(format!(
            "{}: no numeric values in column {} ({rows_read} rows read, {rows_skipped} skipped)",
            spec.path.display(),
            spec.column
        )));
    }
    Ok(Ingested {
        series: TimeSeries::new(values)?,
        rows_read,
        rows_skipped,
    })
}

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn log_returns(prices: &[f64], path: &Path) -> Result<Vec<f64>> {
    if let Some(p) = prices.iter().find(|&&p| p <= 0.0) {
        return Err(Error::Data(format!(
            "{}: log returns need positive prices, found {p}",
            path.display()
        )));
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}
