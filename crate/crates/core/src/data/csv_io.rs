//! CSV contract: UTF-8, comma separated, one header row, numeric feature
//! columns, and a final column named `label` holding 0 (control) or 1 (FASD).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::{Battery, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn load_csv(path: impl AsRef<Path>, battery: Battery) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, battery)
}

/// Parses a dataset and validates its column count against the battery schema.
///
/// Published feature counts may or may not include the `sex`/`age` columns, so
/// a file is accepted when its feature count matches either with or without
/// the demographic columns it contains. Row-count differences only warn.
pub fn read_csv<R: Read>(reader: R, battery: Battery) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            column: 0,
            message: e.to_string(),
        })?
        .clone();
    let names: Vec<String> = headers.iter().map(str::to_string).collect();
    if names.last().map(String::as_str) != Some("label") {
        return Err(Error::Schema(format!(
            "final column must be named `label`, header is {names:?}"
        )));
    }
    let feature_names = names[..names.len() - 1].to_vec();
    if feature_names.is_empty() {
        return Err(Error::Schema("no feature columns before `label`".into()));
    }
    check_feature_count(battery, &feature_names)?;

    let width = feature_names.len();
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        // Row numbers are 1-based file lines; the header is line 1.
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        if record.len() != width + 1 {
            return Err(Error::Parse {
                row,
                column: record.len(),
                message: format!("expected {} cells, found {}", width + 1, record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let value = parse_cell(cell).map_err(|message| Error::Parse {
                row,
                column: j + 1,
                message,
            })?;
            if j < width {
                data.push(value);
            } else if value == 0.0 || value == 1.0 {
                labels.push(value as u8);
            } else {
                return Err(Error::Parse {
                    row,
                    column: j + 1,
                    message: format!("label must be 0 or 1, found `{cell}`"),
                });
            }
        }
    }
    if let Some(schema) = battery.schema() {
        if labels.len() != schema.expected_rows {
            log::warn!(
                "{battery}: {} rows loaded, reference shape has {}",
                labels.len(),
                schema.expected_rows
            );
        }
    }
    let x = Matrix::new(labels.len(), width, data)?;
    Dataset::new(battery, feature_names, x, labels)
}

fn parse_cell(cell: &str) -> std::result::Result<f64, String> {
    if cell.is_empty() {
        return Err("missing value".into());
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("non-finite value `{cell}`")),
        Err(_) => Err(format!("non-numeric value `{cell}`")),
    }
}

fn check_feature_count(battery: Battery, names: &[String]) -> Result<()> {
    let Some(schema) = battery.schema() else {
        return Ok(());
    };
    let n = names.len();
    let demographics = crate::data::DEMOGRAPHIC_COLUMNS
        .iter()
        .filter(|d| names.iter().any(|name| name == *d))
        .count();
    let expected = schema.expected_feature_count;
    if n == expected || n - demographics == expected {
        Ok(())
    } else {
        Err(Error::Schema(format!(
            "{battery} data needs {expected} feature columns plus `label`, found {n} feature columns"
        )))
    }
}

pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(ds, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Values are written with Rust's shortest round-trip formatting, so reading
/// the output back yields bit-identical numbers.
pub fn write_csv_to<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let to_err = |e: csv::Error| Error::io("<csv>", std::io::Error::other(e.to_string()));
    let header = ds.feature_names.iter().map(String::as_str).chain(["label"]);
    wtr.write_record(header).map_err(to_err)?;
    for r in 0..ds.len() {
        let cells = ds
            .x
            .row(r)
            .iter()
            .map(|v| v.to_string())
            .chain([ds.y[r].to_string()]);
        wtr.write_record(cells).map_err(to_err)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
