//! Result rows and their CSV form.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "experiment",
    "scheme",
    "series",
    "snr_db",
    "metric",
    "value",
    "trials",
    "seed",
];

/// One output row. `series` distinguishes branches or power ratios within
/// a scheme and is empty when a scheme has a single series.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub experiment: String,
    pub scheme: String,
    pub series: String,
    pub snr_db: f64,
    pub metric: String,
    pub value: f64,
    pub trials: usize,
    pub seed: u64,
}

impl ResultRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        experiment: &str,
        scheme: &str,
        series: &str,
        snr_db: f64,
        metric: &str,
        value: f64,
        trials: usize,
        seed: u64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            scheme: scheme.into(),
            series: series.into(),
            snr_db,
            metric: metric.into(),
            value,
            trials,
            seed,
        }
    }
}

/// Twelve significant digits in scientific notation; `inf`, `-inf`, `nan`
/// for the non-finite values.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.11e}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

pub fn write_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.experiment.as_str(),
            r.scheme.as_str(),
            r.series.as_str(),
            &format_float(r.snr_db),
            r.metric.as_str(),
            &format_float(r.value),
            &r.trials.to_string(),
            &r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn to_csv_string(records: &[ResultRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

/// Write `records` to `path`, header first, creating parent directories.
pub fn emit_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(records, std::io::BufWriter::new(file))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let bad = |what: &str, line: usize| {
        Error::Numerical(format!("{}: bad {what} on line {line}", path.display()))
    };
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let line = i + 2;
        if row.len() != CSV_HEADER.len() {
            return Err(bad("column count", line));
        }
        out.push(ResultRecord {
            experiment: row[0].into(),
            scheme: row[1].into(),
            series: row[2].into(),
            snr_db: parse_float(&row[3]).ok_or_else(|| bad("snr_db", line))?,
            metric: row[4].into(),
            value: parse_float(&row[5]).ok_or_else(|| bad("value", line))?,
            trials: row[6].parse().map_err(|_| bad("trials", line))?,
            seed: row[7].parse().map_err(|_| bad("seed", line))?,
        });
    }
    Ok(out)
}
