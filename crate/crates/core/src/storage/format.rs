// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! On-disk layout.
//!
//! A chunk set is a directory with two files. All integers are
//! little-endian; lengths and counts are 32-bit.
//!
//! `manifest.bin`:
//!
//! ```text
//! magic "CHNAMNFT" | version u32 | payload_len u32 | payload | crc32(payload) u32
//! payload := table str | schema | chunk_size u64 | rows u64
//!            | per column: dictionary (string columns) or global MIN/MAX (integer columns)
//!            | chunk_count u32 | chunk entry*
//! chunk entry := rows u32 | users u32
//!                | per column: offset u64 | len u32 | crc32 u32
//!                | action chunk dictionary (count u32, u32*)
//!                | per integer column: has_range u8 [min i64 max i64]
//! ```
//!
//! `chunks.bin`:
//!
//! ```text
//! magic "CHNACHNK" | version u32 | segment*
//! segment := tag u8 (0 users, 1 string, 2 integer) | body
//! users   := count u32 | (user u32, first u32, len u32)*
//! string  := dict_len u32 | global-id u32* | packed
//! integer := min i64 | max i64 | packed
//! packed  := bit_width u8 | len u32 | word_count u32 | word u64*
//! ```
//!
//! Segment offsets recorded in the manifest are absolute file offsets.

use super::dict::GlobalDict;
use super::packed::PackedArray;
use super::rle::RleTriple;
use super::segment::{IntSegment, Segment, StringSegment};
use super::StorageError;
use crate::model::{ActivitySchema, ColumnKind};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_MAGIC: &[u8; 8] = b"CHNAMNFT";
pub const DATA_MAGIC: &[u8; 8] = b"CHNACHNK";
pub const MANIFEST_FILE: &str = "manifest.bin";
pub const DATA_FILE: &str = "chunks.bin";
pub const DATA_HEADER_LEN: u64 = 12;

#[derive(Default)]
pub(crate) struct ByteWriter {
    pub buf: Vec<u8>,
}

impl ByteWriter {
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn i64(&mut self, v: i64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn len32(&mut self, n: usize) {
        self.u32(u32::try_from(n).expect("length exceeds the 32-bit format limit"));
    }
    pub fn str(&mut self, s: &str) {
        self.len32(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }
}

pub(crate) struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8], what: &'static str) -> Self {
        ByteReader { buf, pos: 0, what }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], StorageError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| StorageError::Truncated(self.what.to_string()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, StorageError> {
        Ok(self.take(1)?[0])
    }
    pub fn u32(&mut self) -> Result<u32, StorageError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn u64(&mut self) -> Result<u64, StorageError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn i64(&mut self) -> Result<i64, StorageError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn str(&mut self) -> Result<String, StorageError> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| StorageError::Corrupt(format!("invalid UTF-8 in {}", self.what)))
    }
    /// Count prefix for `elem_size`-byte elements, checked against the
    /// remaining input so corrupt counts cannot trigger huge allocations.
    pub fn count(&mut self, elem_size: usize) -> Result<usize, StorageError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(elem_size) > self.buf.len() - self.pos {
            return Err(StorageError::Truncated(self.what.to_string()));
        }
        Ok(n)
    }
    pub fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn write_packed(w: &mut ByteWriter, p: &PackedArray) {
    w.u8(p.bit_width());
    w.len32(p.len());
    w.len32(p.words().len());
    for &word in p.words() {
        w.u64(word);
    }
}

fn read_packed(r: &mut ByteReader<'_>) -> Result<PackedArray, StorageError> {
    let width = r.u8()?;
    let len = r.u32()? as usize;
    let n = r.count(8)?;
    let words = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>, _>>()?;
    PackedArray::from_raw_parts(width, len, words)
}

pub(crate) fn encode_segment(seg: &Segment) -> Vec<u8> {
    let mut w = ByteWriter::default();
    match seg {
        Segment::Users(runs) => {
            w.u8(0);
            w.len32(runs.len());
            for r in runs {
                w.u32(r.user);
                w.u32(r.first);
                w.u32(r.len);
            }
        }
        Segment::Str(s) => {
            w.u8(1);
            w.len32(s.chunk_dict().len());
            for &id in s.chunk_dict() {
                w.u32(id);
            }
            write_packed(&mut w, s.codes());
        }
        Segment::Int(s) => {
            w.u8(2);
            w.i64(s.min());
            w.i64(s.max());
            write_packed(&mut w, s.deltas());
        }
    }
    w.buf
}

pub(crate) fn decode_segment(bytes: &[u8]) -> Result<Segment, StorageError> {
    let mut r = ByteReader::new(bytes, "segment");
    let seg = match r.u8()? {
        0 => {
            let n = r.count(12)?;
            let mut runs = Vec::with_capacity(n);
            for _ in 0..n {
                runs.push(RleTriple {
                    user: r.u32()?,
                    first: r.u32()?,
                    len: r.u32()?,
                });
            }
            Segment::Users(runs)
        }
        1 => {
            let n = r.count(4)?;
            let dict = (0..n).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
            Segment::Str(StringSegment::from_parts(dict, read_packed(&mut r)?)?)
        }
        2 => {
            let min = r.i64()?;
            let max = r.i64()?;
            Segment::Int(IntSegment::from_parts(min, max, read_packed(&mut r)?)?)
        }
        tag => return Err(StorageError::Corrupt(format!("unknown segment tag {tag}"))),
    };
    if !r.is_done() {
        return Err(StorageError::Corrupt("trailing bytes after segment".into()));
    }
    Ok(seg)
}

pub(crate) fn write_schema(w: &mut ByteWriter, s: &ActivitySchema) {
    w.str(s.user_attr());
    w.str(s.time_attr());
    w.str(s.action_attr());
    w.len32(s.dimensions().len());
    for (name, kind) in s.dimensions() {
        w.str(name);
        w.u8(match kind {
            ColumnKind::String => 0,
            ColumnKind::Integer => 1,
        });
    }
    w.len32(s.measures().len());
    for m in s.measures() {
        w.str(m);
    }
}

pub(crate) fn read_schema(r: &mut ByteReader<'_>) -> Result<ActivitySchema, StorageError> {
    let user = r.str()?;
    let time = r.str()?;
    let action = r.str()?;
    let nd = r.count(5)?;
    let mut dims = Vec::with_capacity(nd);
    for _ in 0..nd {
        let name = r.str()?;
        let kind = match r.u8()? {
            0 => ColumnKind::String,
            1 => ColumnKind::Integer,
            k => return Err(StorageError::Corrupt(format!("unknown column kind {k}"))),
        };
        dims.push((name, kind));
    }
    let nm = r.count(4)?;
    let measures = (0..nm).map(|_| r.str()).collect::<Result<Vec<_>, _>>()?;
    ActivitySchema::new(user, time, action, dims, measures).map_err(|e| StorageError::Corrupt(format!("schema: {e}")))
}

pub(crate) fn write_dict(w: &mut ByteWriter, d: &GlobalDict) {
    w.len32(d.len());
    for v in d.values() {
        w.str(v);
    }
}

pub(crate) fn read_dict(r: &mut ByteReader<'_>) -> Result<GlobalDict, StorageError> {
    let n = r.count(4)?;
    let values = (0..n).map(|_| r.str()).collect::<Result<Vec<_>, _>>()?;
    GlobalDict::from_sorted(values).ok_or_else(|| StorageError::Corrupt("global dictionary not sorted".into()))
}

/// Wraps a payload with magic, version, length and checksum.
pub(crate) fn frame(magic: &[u8; 8], payload: &[u8]) -> Vec<u8> {
    let mut w = ByteWriter::default();
    w.buf.extend_from_slice(magic);
    w.u32(FORMAT_VERSION);
    w.len32(payload.len());
    w.buf.extend_from_slice(payload);
    w.u32(crc32fast::hash(payload));
    w.buf
}

pub(crate) fn unframe<'a>(magic: &[u8; 8], what: &'static str, bytes: &'a [u8]) -> Result<&'a [u8], StorageError> {
    if bytes.len() < 8 || &bytes[..8] != magic {
        if bytes.len() < 8 && magic.starts_with(bytes) {
            return Err(StorageError::Truncated(what.to_string()));
        }
        return Err(StorageError::BadMagic(what));
    }
    let mut r = ByteReader::new(&bytes[8..], what);
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(StorageError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let len = r.u32()? as usize;
    let start = 16;
    let end = start + len;
    if bytes.len() < end + 4 {
        return Err(StorageError::Truncated(what.to_string()));
    }
    let payload = &bytes[start..end];
    let crc = u32::from_le_bytes(bytes[end..end + 4].try_into().unwrap());
    if crc32fast::hash(payload) != crc {
        return Err(StorageError::Checksum(what.to_string()));
    }
    if bytes.len() != end + 4 {
        return Err(StorageError::Corrupt(format!("trailing bytes after {what}")));
    }
    Ok(payload)
}
