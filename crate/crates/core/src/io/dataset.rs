use std::io::Read;
use std::path::{Path, PathBuf};

use crate::data::{Point, PointStore};
use crate::error::{Error, Result};

const REQUIRED: [&str; 4] = ["x", "y", "m", "b"];

/// Loads a comma-separated file with a header naming `x,y,m,b` and an
/// optional `t` column, in any order.
///
/// Parse errors carry the file line; validation errors cite the row by its
/// file line too, so the first data row is row 2.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<PointStore> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::File { path: path.to_owned(), source })?;
    parse_dataset(file, path)
}

/// As [`load_dataset`] over any reader; `path` only labels errors.
pub fn parse_dataset(input: impl Read, path: impl Into<PathBuf>) -> Result<PointStore> {
    let path = path.into();
    let parse_err = |line: usize, msg: String| Error::Parse { path: path.clone(), line, msg };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let find = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let mut cols = [0usize; 4];
    for (slot, name) in cols.iter_mut().zip(REQUIRED) {
        *slot = find(name).ok_or_else(|| parse_err(1, format!("missing column '{name}'")))?;
    }
    let t_col = find("t");

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(points.len() + 2, |p| p.line() as usize);
        let field = |idx: usize, name: &str| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            raw.parse::<f64>()
                .map_err(|_| parse_err(line, format!("column '{name}': cannot parse '{raw}' as a number")))
        };
        let [x, y, m, b] = [
            field(cols[0], "x")?,
            field(cols[1], "y")?,
            field(cols[2], "m")?,
            field(cols[3], "b")?,
        ];
        let mut p = Point::new(x, y, m, b);
        if let Some(tc) = t_col {
            p = p.with_time(field(tc, "t")?);
        }
        if let Some((column, msg)) = p.defect(t_col.is_some()) {
            return Err(Error::Validation { row: line, column: column.into(), msg: msg.into() });
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    PointStore::new(points)
}
