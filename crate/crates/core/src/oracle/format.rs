//! FZG1 model files. All integers are little-endian.
//!
//! ```text
//! offset  size      field
//! 0       4         magic "FZG1"
//! 4       4         version (u32) = 1
//! 8       4         flags (u32): bit 0 directed, bit 1 quantized
//! 12      8         n (u64)
//! 20      4         k (u32)
//! 24      4         fcl_len (u32)
//! 28      8n        external ids (u64) in internal-id order
//! ..      8nk       coordinates (f64), row-major
//! ..      16n       radii (f64 r, f64 R); r = -1 and R = +inf when absent
//! ..      fcl_len   FCL source (UTF-8)
//! ..      4         CRC-32 of every preceding byte
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

use super::CompressedGraph;
use crate::fastmap::Embedding;
use crate::fuzzy::{parse_fcl, FclError};
use crate::radii::{NodeRadii, Radius};

pub const MAGIC: [u8; 4] = *b"FZG1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 28;

const FLAG_DIRECTED: u32 = 1;
const FLAG_QUANTIZED: u32 = 1 << 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic at offset 0")]
    BadMagic,
    #[error("unsupported version {version} at offset 4")]
    Version { version: u32 },
    #[error("unknown flag bits {bits:#x} at offset 8")]
    Flags { bits: u32 },
    #[error("truncated: needed {needed} bytes at offset {offset}, file has {len}")]
    Truncated { offset: usize, needed: usize, len: usize },
    #[error("checksum mismatch at offset {offset}: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { offset: usize, stored: u32, computed: u32 },
    #[error("{extra} trailing bytes after checksum at offset {offset}")]
    Trailing { offset: usize, extra: usize },
    #[error("invalid {what} at offset {offset}")]
    Invalid { offset: usize, what: &'static str },
    #[error("embedded FCL at offset {offset}: {source}")]
    Fcl { offset: usize, source: FclError },
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// Size of the coordinate and radius blocks: `n * (8k + 16)` bytes.
pub fn body_size(n: usize, k: usize) -> usize {
    n * (8 * k + 16)
}

/// Total file size for a model with the given shape.
pub fn file_size(n: usize, k: usize, fcl_len: usize) -> usize {
    HEADER_LEN + 8 * n + body_size(n, k) + fcl_len + 4
}

/// Writes `cg` and returns the number of bytes written.
pub fn save<W: Write>(cg: &CompressedGraph, mut sink: W) -> Result<u64, FormatError> {
    let n = cg.node_count();
    let k = cg.dimensions();
    let fcl = cg.fuzzy().to_fcl();
    let k32 = u32::try_from(k).map_err(|_| FormatError::Invalid { offset: 20, what: "dimension" })?;
    let fcl_len = u32::try_from(fcl.len()).map_err(|_| FormatError::Invalid { offset: 24, what: "FCL length" })?;

    let mut buf = Vec::with_capacity(file_size(n, k, fcl.len()));
    let mut flags = 0;
    if cg.is_directed() {
        flags |= FLAG_DIRECTED;
    }
    if cg.is_quantized() {
        flags |= FLAG_QUANTIZED;
    }
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&flags.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&k32.to_le_bytes());
    buf.extend_from_slice(&fcl_len.to_le_bytes());
    for id in cg.external_ids() {
        buf.extend_from_slice(&id.to_le_bytes());
    }
    for c in cg.embedding().coords() {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    for r in cg.radii().as_slice() {
        buf.extend_from_slice(&r.yes.to_le_bytes());
        buf.extend_from_slice(&r.no.to_le_bytes());
    }
    buf.extend_from_slice(fcl.as_bytes());
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());

    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(buf.len() as u64)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: len,
                len: self.bytes.len(),
            });
        };
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Reads a model written by [`save`].
pub fn load<R: Read>(mut source: R) -> Result<CompressedGraph, FormatError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let mut cur = Cursor { bytes: &bytes, pos: 0 };

    if cur.take(4)? != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(FormatError::Version { version });
    }
    let flags = cur.u32()?;
    if flags & !(FLAG_DIRECTED | FLAG_QUANTIZED) != 0 {
        return Err(FormatError::Flags { bits: flags });
    }
    let n = usize::try_from(cur.u64()?).map_err(|_| FormatError::Invalid { offset: 12, what: "node count" })?;
    let k = cur.u32()? as usize;
    if n < 2 {
        return Err(FormatError::Invalid { offset: 12, what: "node count" });
    }
    if k == 0 {
        return Err(FormatError::Invalid { offset: 20, what: "dimension" });
    }
    let fcl_len = cur.u32()? as usize;

    // Check the full length up front so huge headers fail before allocating.
    let expected = n
        .checked_mul(8 * k + 24)
        .and_then(|body| body.checked_add(HEADER_LEN + fcl_len + 4));
    match expected {
        Some(total) if total <= bytes.len() => {}
        _ => {
            return Err(FormatError::Truncated {
                offset: HEADER_LEN,
                needed: expected.map_or(usize::MAX, |t| t - HEADER_LEN),
                len: bytes.len(),
            })
        }
    }

    let ids_offset = cur.pos;
    let mut external_ids = Vec::with_capacity(n);
    for _ in 0..n {
        external_ids.push(cur.u64()?);
    }
    if external_ids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FormatError::Invalid { offset: ids_offset, what: "id map (must be strictly increasing)" });
    }

    let coords_offset = cur.pos;
    let mut coords = Vec::with_capacity(n * k);
    for _ in 0..n * k {
        coords.push(cur.f64()?);
    }

    let mut radii = Vec::with_capacity(n);
    for _ in 0..n {
        let offset = cur.pos;
        let yes = cur.f64()?;
        let no = cur.f64()?;
        let valid_yes = yes == -1.0 || (yes.is_finite() && yes >= 0.0);
        let valid_no = no == f64::INFINITY || (no.is_finite() && no >= 0.0);
        if !valid_yes || !valid_no {
            return Err(FormatError::Invalid { offset, what: "radius" });
        }
        radii.push(Radius { yes, no });
    }

    let fcl_offset = cur.pos;
    let fcl_bytes = cur.take(fcl_len)?;
    let crc_offset = cur.pos;
    let stored = cur.u32()?;
    let computed = crc32fast::hash(&bytes[..crc_offset]);
    if stored != computed {
        return Err(FormatError::Checksum { offset: crc_offset, stored, computed });
    }
    if cur.pos != bytes.len() {
        return Err(FormatError::Trailing { offset: cur.pos, extra: bytes.len() - cur.pos });
    }

    let fcl = std::str::from_utf8(fcl_bytes)
        .map_err(|_| FormatError::Invalid { offset: fcl_offset, what: "FCL encoding" })?;
    let fuzzy = parse_fcl(fcl).map_err(|source| FormatError::Fcl { offset: fcl_offset, source })?;
    let embedding = Embedding::from_parts(n, k, coords, 0)
        .ok_or(FormatError::Invalid { offset: coords_offset, what: "coordinates" })?;

    Ok(CompressedGraph::from_parts(
        embedding,
        NodeRadii::new(radii, flags & FLAG_QUANTIZED != 0),
        flags & FLAG_DIRECTED != 0,
        fuzzy,
        external_ids,
    ))
}
