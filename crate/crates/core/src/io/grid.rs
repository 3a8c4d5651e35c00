//! `PWHF` binary field files: a 40-byte little-endian header
//! (magic, u32 version, u32 nx, u32 ny, f64 dx, f64 dy, f64 t) followed by
//! `nx·ny` f64 values, row-major with `y` as the slow index.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::write_atomic;

pub const MAGIC: &[u8; 4] = b"PWHF";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHeader {
    pub nx: u32,
    pub ny: u32,
    pub dx: f64,
    pub dy: f64,
    pub t: f64,
}

impl GridHeader {
    pub fn new(grid: &Grid, t: f64) -> Self {
        Self {
            nx: grid.nx as u32,
            ny: grid.ny as u32,
            dx: grid.dx,
            dy: grid.dy,
            t,
        }
    }

    pub fn grid(&self) -> Grid {
        Grid {
            nx: self.nx as usize,
            ny: self.ny as usize,
            dx: self.dx,
            dy: self.dy,
        }
    }

    fn values(&self) -> Option<usize> {
        (self.nx as usize).checked_mul(self.ny as usize)
    }
}

pub fn encode_grid(field: &[f64], header: &GridHeader) -> Result<Vec<u8>> {
    if header.values() != Some(field.len()) {
        return Err(Error::GridFormat(format!(
            "{} values for a {}x{} grid",
            field.len(),
            header.nx,
            header.ny
        )));
    }
    if let Some(i) = field.iter().position(|v| !v.is_finite()) {
        return Err(Error::GridFormat(format!("non-finite value at index {i}")));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * field.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&header.nx.to_le_bytes());
    out.extend_from_slice(&header.ny.to_le_bytes());
    for v in [header.dx, header.dy, header.t] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in field {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_grid(bytes: &[u8]) -> Result<(GridHeader, Vec<f64>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::GridFormat(format!(
            "truncated header: {} of {HEADER_LEN} bytes",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::GridFormat(format!("bad magic {:?}", &bytes[..4])));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::GridFormat(format!("unsupported version {version}")));
    }
    let header = GridHeader {
        nx: u32_at(8),
        ny: u32_at(12),
        dx: f64_at(16),
        dy: f64_at(24),
        t: f64_at(32),
    };
    let expected = header
        .values()
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN));
    if expected != Some(bytes.len()) {
        return Err(Error::GridFormat(format!(
            "{} bytes for a {}x{} grid",
            bytes.len(),
            header.nx,
            header.ny
        )));
    }
    let field = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, field))
}

pub fn write_grid(field: &[f64], header: &GridHeader, path: &Path) -> Result<()> {
    write_atomic(path, &encode_grid(field, header)?)
}

pub fn read_grid(path: &Path) -> Result<(GridHeader, Vec<f64>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_grid(&bytes).map_err(|e| match e {
        Error::GridFormat(m) => Error::GridFormat(format!("{}: {m}", path.display())),
        other => other,
    })
}
