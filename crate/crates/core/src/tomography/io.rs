//! Export/import of images and sinograms.
//!
//! CSV: a header line naming the two dimensions (`width,height` or
//! `angles,rays`), a line with their values, then one value per line.
//! Binary: two little-endian `u64` dimensions followed by little-endian
//! `f64` values. Both round-trip bit-exactly.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Which pair of dimension names heads a CSV export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Image,
    Sinogram,
}

impl GridKind {
    fn header(self) -> &'static str {
        match self {
            GridKind::Image => "width,height",
            GridKind::Sinogram => "angles,rays",
        }
    }
}

/// Formats a float with 17 significant digits; parsing it back gives the
/// same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(kind: GridKind, dims: (usize, usize), data: &[f64]) -> Result<String> {
    if dims.0 * dims.1 != data.len() {
        return Err(Error::DimensionMismatch {
            context: "to_csv",
            expected: dims.0 * dims.1,
            got: data.len(),
        });
    }
    let mut s = String::with_capacity(24 * data.len() + 32);
    let _ = writeln!(s, "{}", kind.header());
    let _ = writeln!(s, "{},{}", dims.0, dims.1);
    for &v in data {
        s.push_str(&fmt_f64(v));
        s.push('\n');
    }
    Ok(s)
}

pub fn from_csv(kind: GridKind, text: &str) -> Result<((usize, usize), Vec<f64>)> {
    parse_csv(kind, BufReader::new(text.as_bytes()))
}

fn parse_csv(kind: GridKind, reader: impl BufRead) -> Result<((usize, usize), Vec<f64>)> {
    let bad = |line: usize, msg: String| Error::config(Some(line), msg);
    let mut lines = reader.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i + 1, l)),
            Some((i, Err(e))) => Err(bad(i + 1, e.to_string())),
            None => Err(Error::config(None, format!("missing {what}"))),
        }
    };
    let (ln, header) = next("header")?;
    if header.trim() != kind.header() {
        return Err(bad(ln, format!("expected header `{}`, got `{header}`", kind.header())));
    }
    let (ln, dims) = next("dimensions")?;
    let mut it = dims.trim().split(',');
    let mut dim = || -> Result<usize> {
        it.next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(ln, format!("bad dimensions line `{dims}`")))
    };
    let (d0, d1) = (dim()?, dim()?);
    let mut data = Vec::with_capacity(d0 * d1);
    while let Ok((ln, l)) = next("value") {
        let t = l.trim();
        if t.is_empty() {
            continue;
        }
        data.push(t.parse::<f64>().map_err(|e| bad(ln, format!("`{t}`: {e}")))?);
    }
    if data.len() != d0 * d1 {
        return Err(Error::DimensionMismatch {
            context: "from_csv",
            expected: d0 * d1,
            got: data.len(),
        });
    }
    Ok(((d0, d1), data))
}

pub fn to_binary(dims: (usize, usize), data: &[f64]) -> Result<Vec<u8>> {
    if dims.0 * dims.1 != data.len() {
        return Err(Error::DimensionMismatch {
            context: "to_binary",
            expected: dims.0 * dims.1,
            got: data.len(),
        });
    }
    let mut out = Vec::with_capacity(16 + 8 * data.len());
    out.extend_from_slice(&(dims.0 as u64).to_le_bytes());
    out.extend_from_slice(&(dims.1 as u64).to_le_bytes());
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn from_binary(bytes: &[u8]) -> Result<((usize, usize), Vec<f64>)> {
    if bytes.len() < 16 || !(bytes.len() - 16).is_multiple_of(8) {
        return Err(Error::invalid(format!("binary grid of {} bytes is malformed", bytes.len())));
    }
    let u = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().expect("8 bytes")) as usize;
    let dims = (u(0), u(8));
    let data: Vec<f64> = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if dims.0.checked_mul(dims.1) != Some(data.len()) {
        return Err(Error::DimensionMismatch {
            context: "from_binary",
            expected: dims.0.saturating_mul(dims.1),
            got: data.len(),
        });
    }
    Ok((dims, data))
}

pub fn write_csv(path: &Path, kind: GridKind, dims: (usize, usize), data: &[f64]) -> Result<()> {
    let text = to_csv(kind, dims, data)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path, kind: GridKind) -> Result<((usize, usize), Vec<f64>)> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(kind, BufReader::new(f))
}

pub fn write_binary(path: &Path, dims: (usize, usize), data: &[f64]) -> Result<()> {
    let bytes = to_binary(dims, data)?;
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub fn read_binary(path: &Path) -> Result<((usize, usize), Vec<f64>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    from_binary(&bytes)
}
