//! Binary field snapshots and checksums.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic      8 bytes  "IBNLSFLD"
//! version    u32      currently 1
//! kind       u8       0 = cartesian, 1 = radial
//! dimension  u32      physical dimension N
//! axes       u32      number of stored axes (cartesian: grid rank, radial: 1)
//! sizes      u64 × axes
//! extents    f64 × axes   cartesian: half-widths; radial: dr
//! values     (re, im) f64 pairs, row-major, sizes product entries
//! ```

use num_complex::Complex64 as C64;
use std::io::{Read as _, Write as _};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid, Field, Grid, RadialGrid};

const MAGIC: &[u8; 8] = b"IBNLSFLD";
const VERSION: u32 = 1;

/// Writes a field snapshot.
pub fn dump_field(field: &Field, path: &Path) -> Result<()> {
    let mut buf: Vec<u8> = Vec::with_capacity(64 + 16 * field.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    match field.grid().as_ref() {
        Grid::Cartesian(g) => {
            buf.push(0);
            buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
            buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
            for &n in g.sizes() {
                buf.extend_from_slice(&(n as u64).to_le_bytes());
            }
            for &l in g.half_widths() {
                buf.extend_from_slice(&l.to_le_bytes());
            }
        }
        Grid::Radial(g) => {
            buf.push(1);
            buf.extend_from_slice(&g.n_dim().to_le_bytes());
            buf.extend_from_slice(&1u32.to_le_bytes());
            buf.extend_from_slice(&(g.len() as u64).to_le_bytes());
            buf.extend_from_slice(&g.dr().to_le_bytes());
        }
    }
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

/// Reads a field snapshot written by [`dump_field`].
pub fn load_field(path: &Path) -> Result<Field> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut cur = Cursor { bytes: &bytes, at: 0 };
    if cur.take(8)? != MAGIC {
        return Err(Error::Format("bad magic, not a field snapshot".into()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let kind = cur.u8()?;
    let dimension = cur.u32()?;
    let axes = cur.u32()? as usize;
    let mut sizes = Vec::with_capacity(axes);
    for _ in 0..axes {
        sizes.push(cur.u64()? as usize);
    }
    let mut extents = Vec::with_capacity(axes);
    for _ in 0..axes {
        extents.push(cur.f64()?);
    }
    let grid = match kind {
        0 => {
            if axes != dimension as usize {
                return Err(Error::Format("cartesian snapshot with mismatched rank".into()));
            }
            Grid::Cartesian(CartesianGrid::new(&sizes, &extents)?)
        }
        1 => {
            if axes != 1 {
                return Err(Error::Format("radial snapshot must store one axis".into()));
            }
            Grid::Radial(RadialGrid::with_dr(dimension, sizes[0], extents[0])?)
        }
        other => return Err(Error::Format(format!("unknown grid kind {other}"))),
    };
    let count = grid.len();
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let re = cur.f64()?;
        let im = cur.f64()?;
        values.push(C64::new(re, im));
    }
    if cur.at != bytes.len() {
        return Err(Error::Format("trailing bytes after field values".into()));
    }
    Field::new(Arc::new(grid), values)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.bytes.len() {
            return Err(Error::Format("snapshot truncated".into()));
        }
        let s = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// FNV-1a hash of a byte stream; used to fingerprint outputs in manifests.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
