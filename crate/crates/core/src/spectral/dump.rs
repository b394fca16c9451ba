//! Binary field dump.
//!
//! Layout (all integers and floats little-endian):
//!
//! | bytes            | content                                   |
//! |------------------|-------------------------------------------|
//! | 0..8             | magic `KRTWDUMP`                          |
//! | 8..12            | format version (`u32`, currently 1)       |
//! | 12..16           | component count `C` (`u32`)               |
//! | 16..24           | dimension `N` (`u64`)                     |
//! | next `8N`        | resolution per axis (`u64`)               |
//! | next `8N`        | domain length per axis (`f64`)            |
//! | rest             | `C` blocks of row-major `f64` samples     |

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use super::field::ScalarField;
use super::grid::SpectralGrid;
use crate::error::{Error, Result};

pub const DUMP_MAGIC: &[u8; 8] = b"KRTWDUMP";
pub const DUMP_VERSION: u32 = 1;

/// Decoded dump contents.
#[derive(Debug, Clone)]
pub struct FieldDump {
    pub grid: Arc<SpectralGrid>,
    pub components: Vec<ScalarField>,
}

pub fn encode_dump(fields: &[&ScalarField]) -> Result<Vec<u8>> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidField("dump needs at least one component".into()))?;
    for f in &fields[1..] {
        first.check_grid(f)?;
    }
    let grid = first.grid();
    let mut out = Vec::with_capacity(32 + 8 * grid.len() * fields.len());
    out.extend_from_slice(DUMP_MAGIC);
    out.extend_from_slice(&DUMP_VERSION.to_le_bytes());
    out.extend_from_slice(&(fields.len() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u64).to_le_bytes());
    for &n in grid.resolution() {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for &l in grid.length() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for f in fields {
        for v in f.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::DumpFormat {
                offset: self.bytes.len() as u64,
                reason: format!(
                    "truncated while reading {what} (needed {n} bytes at offset {})",
                    self.pos
                ),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::DumpFormat {
            offset: self.pos as u64,
            reason: reason.into(),
        }
    }
}

pub fn decode_dump(bytes: &[u8]) -> Result<FieldDump> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(8, "magic")? != DUMP_MAGIC {
        cur.pos = 0;
        return Err(cur.fail("bad magic"));
    }
    let version = cur.u32("version")?;
    if version != DUMP_VERSION {
        cur.pos = 8;
        return Err(cur.fail(format!("unsupported version {version}")));
    }
    let count = cur.u32("component count")? as usize;
    if count == 0 {
        cur.pos = 12;
        return Err(cur.fail("zero components"));
    }
    let dim = cur.u64("dimension")?;
    if dim != 1 && dim != 2 {
        cur.pos = 16;
        return Err(cur.fail(format!("unsupported dimension {dim}")));
    }
    let mut resolution = Vec::new();
    for _ in 0..dim {
        resolution.push(cur.u64("resolution")? as usize);
    }
    let mut length = Vec::new();
    for _ in 0..dim {
        length.push(cur.f64("length")?);
    }
    let header_end = cur.pos;
    let grid = SpectralGrid::new(&resolution, &length).map_err(|e| Error::DumpFormat {
        offset: 16,
        reason: e.to_string(),
    })?;
    let mut components = Vec::with_capacity(count);
    for c in 0..count {
        let raw = cur.take(8 * grid.len(), &format!("samples of component {c}"))?;
        let data = raw
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        components.push(ScalarField::new(&grid, data)?);
    }
    if cur.pos != bytes.len() {
        return Err(cur.fail(format!(
            "{} trailing bytes after header ending at {header_end}",
            bytes.len() - cur.pos
        )));
    }
    Ok(FieldDump { grid, components })
}

pub fn save_dump(path: impl AsRef<Path>, fields: &[&ScalarField]) -> Result<()> {
    let bytes = encode_dump(fields)?;
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

pub fn load_dump(path: impl AsRef<Path>) -> Result<FieldDump> {
    decode_dump(&fs::read(path)?)
}
