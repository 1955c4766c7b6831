// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Compressed, chunked, user-aligned column storage.
//!
//! The table is kept sorted by `(user, time, action)` and split into chunks so
//! that every user's rows live in exactly one chunk. Inside a chunk each
//! column is stored separately:
//!
//! * user column: run-length triples `(user, first, len)`;
//! * string columns: two-level dictionary encoding;
//! * integer columns: two-level delta encoding against the chunk MIN;
//!
//! with the per-row integer arrays bit-packed for O(1) random access.
//! See [`format`] for the on-disk layout.

mod chunk;
mod chunkset;
mod dict;
pub mod format;
mod packed;
mod rle;
mod segment;

use thiserror::Error;

pub use chunk::{Chunk, ChunkRow};
pub use chunkset::{open_chunkset, write_chunkset, ChunkEntry, ChunkSet, Manifest, WriteSummary};
pub use dict::{build_global_dict, GlobalDict};
pub use packed::{bits_needed, PackedArray};
pub use rle::{decode_user_column, encode_user_column, RleTriple};
pub use segment::{IntSegment, Segment, StringSegment};

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a cohana {0} file (bad magic)")]
    BadMagic(&'static str),
    #[error("unsupported format version {found} (this build reads version {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("truncated {0}")]
    Truncated(String),
    #[error("checksum mismatch in {0}")]
    Checksum(String),
    #[error("corrupt data: {0}")]
    Corrupt(String),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("value `{0}` missing from the global dictionary")]
    UnknownValue(String),
    #[error("rows of user id {user} are not contiguous (run restarts at row {row})")]
    NonContiguousUser { user: u32, row: usize },
    #[error("input is not sorted by (user, time, action) at row {0}")]
    Unsorted(usize),
    #[error("user `{0}` is split across chunks")]
    UserSplit(String),
    #[error("tuple at row {0} does not match the schema")]
    SchemaMismatch(usize),
    #[error("column {0} was not loaded for this chunk")]
    ColumnNotLoaded(usize),
    #[error("chunk {index} does not exist ({count} chunks)")]
    NoSuchChunk { index: usize, count: usize },
}
