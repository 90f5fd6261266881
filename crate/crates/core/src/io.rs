//! CSV helpers shared by the trajectory, coherence, envelope and heatmap
//! formats. Floats are written in scientific notation with 17 significant
//! digits so that files round-trip exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits (`NaN` for holes).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn csv_err(context: &str, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        context: context.to_string(),
        reason: e.to_string(),
    }
}

/// Writes a header and rows of floats.
pub fn write_table<W: Write>(writer: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header).map_err(|e| csv_err("header", e))?;
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != header.len() {
            return Err(csv_err(
                "row",
                format!("row {i} has {} fields, expected {}", row.len(), header.len()),
            ));
        }
        w.write_record(row.iter().map(|x| fmt_f64(*x)))
            .map_err(|e| csv_err("row", e))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_table(File::create(path)?, header, rows)
}

/// Reads a float table, checking the header against `expected` exactly.
pub fn read_table<R: Read>(reader: R, expected: &[&str], context: &str) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = r.headers().map_err(|e| csv_err(context, e))?.clone();
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(csv_err(
            context,
            format!("expected columns {}, found {}", expected.join(","), found.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_err(context, e))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| csv_err(context, format!("line {}: cannot parse `{field}`", i + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_table_file(path: &Path, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    read_table(File::open(path)?, expected, &path.display().to_string())
}
