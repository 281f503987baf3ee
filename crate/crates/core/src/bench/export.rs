use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{BenchError, ComparisonRow, ComparisonTable};

/// Metric names in the order they are written for each row.
pub const METRICS: [&str; 3] = ["picked_pct", "time_s", "picks_per_min"];

/// Long-format CSV: `controller,pattern,metric,value`, one line per metric.
pub fn write_csv<W: Write>(table: &ComparisonTable, w: W) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["controller", "pattern", "metric", "value"])?;
    for r in &table.rows {
        for (metric, value) in METRICS.iter().zip([r.picked_pct, r.time_s, r.picks_per_min]) {
            out.write_record([r.controller.as_str(), r.pattern.as_str(), metric, &value.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn export_csv(table: &ComparisonTable, path: impl AsRef<Path>) -> Result<(), BenchError> {
    write_csv(table, File::create(path)?)
}

/// Inverse of [`write_csv`]; rows keep first-appearance order.
pub fn read_csv<R: Read>(r: R) -> Result<ComparisonTable, BenchError> {
    let mut input = csv::Reader::from_reader(r);
    let header: Vec<String> = input.headers()?.iter().map(str::to_string).collect();
    if header != ["controller", "pattern", "metric", "value"] {
        return Err(BenchError::BadCsv(format!("unexpected header {header:?}")));
    }
    let mut table = ComparisonTable::default();
    for record in input.records() {
        let record = record?;
        let (controller, pattern, metric, value) = (&record[0], &record[1], &record[2], &record[3]);
        let value: f64 = value
            .parse()
            .map_err(|_| BenchError::BadCsv(format!("value {value:?} is not a number")))?;
        let idx = match table.rows.iter().position(|r| r.controller == controller && r.pattern == pattern) {
            Some(i) => i,
            None => {
                table.rows.push(ComparisonRow {
                    controller: controller.to_string(),
                    pattern: pattern.to_string(),
                    picked_pct: f64::NAN,
                    time_s: f64::NAN,
                    picks_per_min: f64::NAN,
                });
                table.rows.len() - 1
            }
        };
        let row = &mut table.rows[idx];
        match metric {
            "picked_pct" => row.picked_pct = value,
            "time_s" => row.time_s = value,
            "picks_per_min" => row.picks_per_min = value,
            other => return Err(BenchError::BadCsv(format!("unknown metric {other:?}"))),
        }
    }
    if let Some(r) = table
        .rows
        .iter()
        .find(|r| r.picked_pct.is_nan() || r.time_s.is_nan() || r.picks_per_min.is_nan())
    {
        return Err(BenchError::BadCsv(format!("incomplete metrics for {} / {}", r.controller, r.pattern)));
    }
    Ok(table)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<ComparisonTable, BenchError> {
    read_csv(File::open(path)?)
}
