//! Figure-ready output tables.
//!
//! Results flatten to one row per (sweep value, scheme, metric) with mean,
//! sample standard deviation, and the count of aggregated trials. CSV uses
//! the exact header `sweep_value,scheme,metric,mean,std,n`; numbers are
//! written with the shortest representation that parses back to the same
//! f64, so a round trip is lossless. An optional leading `#` comment line
//! carries the generation timestamp and is suppressible for byte-stable
//! reruns.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use uavsec::error::{Error, Result};
use uavsec::harness::{ExperimentResult, METRICS};

pub const CSV_HEADER: [&str; 6] = ["sweep_value", "scheme", "metric", "mean", "std", "n"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRow {
    pub sweep_value: String,
    pub scheme: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OutputTable {
    pub rows: Vec<OutputRow>,
}

fn format_sweep_value(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "default".to_string(),
    }
}

impl OutputTable {
    /// Flatten an experiment result. Scheme aggregates with zero finite
    /// trials have no meaningful statistics and produce no rows.
    pub fn from_result(result: &ExperimentResult) -> Self {
        let mut rows = Vec::new();
        for point in &result.points {
            for scheme in &point.schemes {
                if scheme.n_trials == 0 {
                    continue;
                }
                for (metric, stats) in METRICS.iter().zip(&scheme.stats) {
                    rows.push(OutputRow {
                        sweep_value: format_sweep_value(point.sweep_value),
                        scheme: scheme.scheme.clone(),
                        metric: (*metric).to_string(),
                        mean: stats.mean,
                        std: stats.std,
                        n: stats.n,
                    });
                }
            }
        }
        Self { rows }
    }

    pub fn to_csv_string(&self, timestamp: Option<u64>) -> Result<String> {
        let mut bytes = Vec::new();
        if let Some(stamp) = timestamp {
            writeln!(&mut bytes, "# generated_unix_s {stamp}")?;
        }
        {
            let mut writer = csv::Writer::from_writer(&mut bytes);
            writer
                .write_record(CSV_HEADER)
                .and_then(|_| {
                    for row in &self.rows {
                        writer.write_record([
                            row.sweep_value.as_str(),
                            row.scheme.as_str(),
                            row.metric.as_str(),
                            &format!("{}", row.mean),
                            &format!("{}", row.std),
                            &format!("{}", row.n),
                        ])?;
                    }
                    writer.flush().map_err(csv::Error::from)
                })
                .map_err(|e| Error::Config(format!("CSV encoding failed: {e}")))?;
        }
        String::from_utf8(bytes).map_err(|e| Error::Internal(format!("non-UTF8 CSV: {e}")))
    }

    /// Parse a table back from CSV text (skipping `#` comment lines).
    pub fn parse_csv(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .filter(|line| !line.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Config(format!("CSV parse failed: {e}")))?;
            if record.len() != CSV_HEADER.len() {
                return Err(Error::Config(format!(
                    "CSV row has {} fields, expected {}",
                    record.len(),
                    CSV_HEADER.len()
                )));
            }
            let parse_f64 = |idx: usize, name: &str| -> Result<f64> {
                record[idx]
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("{name}: bad number '{}'", &record[idx])))
            };
            rows.push(OutputRow {
                sweep_value: record[0].to_string(),
                scheme: record[1].to_string(),
                metric: record[2].to_string(),
                mean: parse_f64(3, "mean")?,
                std: parse_f64(4, "std")?,
                n: record[5]
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("n: bad count '{}'", &record[5])))?,
            });
        }
        Ok(Self { rows })
    }

    /// Write the table and read it back: emitted files must reparse to the
    /// exact same values.
    pub fn write_csv(&self, path: &Path, timestamp: Option<u64>) -> Result<()> {
        let text = self.to_csv_string(timestamp)?;
        std::fs::write(path, &text)?;
        let reparsed = Self::parse_csv(&std::fs::read_to_string(path)?)?;
        if reparsed != *self {
            return Err(Error::Internal(format!(
                "emitted CSV did not round-trip: {}",
                path.display()
            )));
        }
        Ok(())
    }
}

/// JSON summary of the raw experiment result.
pub fn write_json(result: &ExperimentResult, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(result)
        .map_err(|e| Error::Internal(format!("JSON encoding failed: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use uavsec::harness::{MetricStats, SchemeAggregate, SweepPointResult};

    fn sample_result() -> ExperimentResult {
        let stats = |base: f64| {
            vec![
                MetricStats { mean: base, std: 0.25, n: 2 },
                MetricStats { mean: base / 12.0, std: 0.01, n: 2 },
                MetricStats { mean: 1.0 + base / 100.0, std: 0.001, n: 2 },
            ]
        };
        ExperimentResult {
            axis: "Q".into(),
            points: vec![SweepPointResult {
                sweep_value: Some(4.0),
                schemes: vec![
                    SchemeAggregate {
                        scheme: "PMA+OCFA".into(),
                        stats: stats(17.123456789012345),
                        n_trials: 2,
                        n_failed: 0,
                    },
                    SchemeAggregate {
                        scheme: "PMA+AS".into(),
                        stats: stats(11.0),
                        n_trials: 2,
                        n_failed: 0,
                    },
                ],
            }],
        }
    }

    #[test]
    fn row_arithmetic() {
        let table = OutputTable::from_result(&sample_result());
        // 1 sweep point x 2 schemes x 3 metrics.
        assert_eq!(table.rows.len(), 6);
        assert!(table.rows.iter().all(|r| r.sweep_value == "4"));
    }

    #[test]
    fn empty_result_is_header_only() {
        let empty = ExperimentResult { axis: "M".into(), points: vec![] };
        let table = OutputTable::from_result(&empty);
        let text = table.to_csv_string(None).unwrap();
        assert_eq!(text.trim(), "sweep_value,scheme,metric,mean,std,n");
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let table = OutputTable::from_result(&sample_result());
        let text = table.to_csv_string(Some(1_700_000_000)).unwrap();
        assert!(text.starts_with("# generated_unix_s"));
        let parsed = OutputTable::parse_csv(&text).unwrap();
        assert_eq!(parsed.rows.len(), table.rows.len());
        for (a, b) in table.rows.iter().zip(&parsed.rows) {
            assert_eq!(a.sweep_value, b.sweep_value);
            assert_eq!(a.scheme, b.scheme);
            assert_eq!(a.metric, b.metric);
            assert_eq!(a.mean.to_bits(), b.mean.to_bits(), "mean must round-trip exactly");
            assert_eq!(a.std.to_bits(), b.std.to_bits());
            assert_eq!(a.n, b.n);
        }
    }

    #[test]
    fn timestamp_is_suppressible() {
        let table = OutputTable::from_result(&sample_result());
        let with = table.to_csv_string(Some(1)).unwrap();
        let without = table.to_csv_string(None).unwrap();
        assert_ne!(with, without);
        let stripped: Vec<&str> = with.lines().skip(1).collect();
        let bare: Vec<&str> = without.lines().collect();
        assert_eq!(stripped, bare);
    }
}
