//! Reading `time,value` CSV files into [`TimeSeries`].

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const DEFAULT_TIME_COLUMN: &str = "time";
pub const DEFAULT_VALUE_COLUMN: &str = "value";

const MISSING: [&str; 7] = ["", "na", "n/a", "nan", "null", ".", "-"];

/// A parsed series plus the number of rows dropped for missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    pub series: TimeSeries,
    pub dropped_rows: usize,
}

/// Reads the `time_column` and `value_column` of a headed CSV.
///
/// Rows whose value is empty, a missing-value marker or non-finite are dropped
/// and counted. Rows may appear in any order; a repeated time stamp is an
/// error.
pub fn read_series_csv<R: Read>(
    reader: R,
    time_column: &str,
    value_column: &str,
    label: &str,
) -> Result<CsvSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    };
    let time_idx = find(time_column)?;
    let value_idx = find(value_column)?;

    let mut rows: BTreeMap<i64, f64> = BTreeMap::new();
    let mut dropped_rows = 0;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i as u64 + 2;
        let time_raw = record.get(time_idx).unwrap_or("");
        let value_raw = record.get(value_idx).unwrap_or("");
        let time: i64 = time_raw.parse().map_err(|_| Error::BadNumber {
            row,
            value: time_raw.to_owned(),
        })?;
        if MISSING.contains(&value_raw.to_ascii_lowercase().as_str()) {
            dropped_rows += 1;
            continue;
        }
        let value: f64 = value_raw.parse().map_err(|_| Error::BadNumber {
            row,
            value: value_raw.to_owned(),
        })?;
        if !value.is_finite() {
            dropped_rows += 1;
            continue;
        }
        if rows.insert(time, value).is_some() {
            return Err(Error::DuplicateTime(time));
        }
    }
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    let (times, values) = rows.into_iter().unzip();
    Ok(CsvSeries {
        series: TimeSeries::new(label, times, values)?,
        dropped_rows,
    })
}

/// File variant of [`read_series_csv`]. The label is the value column, or the
/// file stem when the default column name is used.
pub fn read_series_csv_path(
    path: &Path,
    time_column: &str,
    value_column: &str,
) -> Result<CsvSeries> {
    let file = File::open(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
    let label = if value_column == DEFAULT_VALUE_COLUMN {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| value_column.to_owned())
    } else {
        value_column.to_owned()
    };
    read_series_csv(file, time_column, value_column, &label)
        .map_err(|e| e.context(path.display().to_string()))
}

/// Writes a series as `time,value`.
pub fn write_series_csv<W: std::io::Write>(series: &TimeSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([DEFAULT_TIME_COLUMN, DEFAULT_VALUE_COLUMN])?;
    for (t, v) in series.times().iter().zip(series.values()) {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
