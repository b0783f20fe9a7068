//! Field files (`.fld` + `.fld.json`) and CSV tables.
//!
//! A `.fld` file holds little-endian interleaved `f64` pairs `(re, im)` in
//! row-major order; the JSON sidecar records the grid and domain.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Domain, GridSpec, SampledField};

const DTYPE: &str = "c128";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub dim: usize,
    pub n_per_axis: usize,
    pub extent: f64,
    pub domain_tag: String,
    pub dtype: String,
}

/// Sidecar path `<path>.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_field(path: &Path, field: &SampledField) -> Result<()> {
    let g = field.grid();
    let header = FieldHeader {
        dim: g.dim(),
        n_per_axis: g.n(),
        extent: g.extent(),
        domain_tag: field.domain().tag().to_string(),
        dtype: DTYPE.to_string(),
    };
    let mut bytes = Vec::with_capacity(16 * field.values().len());
    for v in field.values() {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&header).expect("serializable header");
    fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
}

pub fn read_field(path: &Path) -> Result<SampledField> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let header: FieldHeader = serde_json::from_str(&text).map_err(|e| Error::format(&side, e.to_string()))?;
    if header.dtype != DTYPE {
        return Err(Error::format(&side, format!("unsupported dtype {}", header.dtype)));
    }
    let domain = match header.domain_tag.as_str() {
        t if t == Domain::Real.tag() => Domain::Real,
        t if t == Domain::Frequency.tag() => Domain::Frequency,
        t => return Err(Error::format(&side, format!("unknown domain tag {t}"))),
    };
    let grid = GridSpec::new(header.dim, header.n_per_axis, header.extent)?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != 16 * grid.len() {
        return Err(Error::format(path, format!("expected {} bytes, found {}", 16 * grid.len(), bytes.len())));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    let values = bytes.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect();
    SampledField::from_values(grid, domain, values)
}

/// Shortest round-trip text for a float; scientific notation for very small
/// or large magnitudes.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes a UTF-8, comma-separated, LF-terminated table.
pub fn write_csv<S: AsRef<str>>(path: &Path, header: &[&str], rows: &[Vec<S>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::format(path, e.to_string()))?;
    let err = |e: csv::Error| Error::format(path, e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::format(path, format!("row of width {} under header of width {}", row.len(), header.len())));
        }
        w.write_record(row.iter().map(|s| s.as_ref())).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a table written by [`write_csv`] as `(header, rows)`.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let header = r.headers().map_err(|e| Error::format(path, e.to_string()))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(|e| Error::format(path, e.to_string())))
        .collect::<Result<_>>()?;
    Ok((header, rows))
}
