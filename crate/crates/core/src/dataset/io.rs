use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

use super::{Dataset, DatasetMeta};

/// Loads the selected numeric columns of a headed CSV file.
///
/// Each column is min-max quantized onto `[0, 2^n_a - 1]`; a column whose
/// values are all equal maps to 0. Row order becomes index order.
pub fn load_csv(path: impl AsRef<Path>, columns: &[&str], attr_bits: u32) -> Result<Dataset> {
    let path = path.as_ref();
    if columns.is_empty() {
        return Err(Error::EmptySelection);
    }
    if !(1..=32).contains(&attr_bits) {
        return Err(Error::AttributeWidth(attr_bits));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers()?.clone();
    let positions = columns
        .iter()
        .map(|c| headers.iter().position(|h| h == *c).ok_or_else(|| Error::MissingColumn(c.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let dims = columns.len();
    let mut raw: Vec<f64> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (&pos, &name) in positions.iter().zip(columns) {
            let cell = record.get(pos).unwrap_or("");
            let v = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    column: name.to_string(),
                    row: row + 1,
                    value: cell.to_string(),
                })?;
            raw.push(v);
        }
    }
    if raw.is_empty() {
        return Err(Error::NoRows(path.to_path_buf()));
    }

    let top = ((1u64 << attr_bits) - 1) as f64;
    let mut flat = vec![0u32; raw.len()];
    for j in 0..dims {
        let col = raw.iter().skip(j).step_by(dims);
        let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let range = hi - lo;
        for (i, &v) in raw.iter().enumerate().skip(j).step_by(dims) {
            flat[i] = if range > 0.0 {
                ((v - lo) / range * top).round() as u32
            } else {
                0
            };
        }
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Dataset::from_flat(flat, dims, attr_bits, DatasetMeta::named(name))
}

/// Writes quantized tuples as a headed CSV (`a0,a1,...`).
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record((0..ds.dims()).map(|j| format!("a{j}")))?;
    for t in ds.iter() {
        w.write_record(t.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
