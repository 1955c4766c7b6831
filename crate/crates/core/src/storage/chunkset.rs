// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::fs::{self, File};
use std::ops::Range;
use std::os::unix::fs::FileExt;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use super::chunk::Chunk;
use super::dict::GlobalDict;
use super::format::{self, ByteReader, ByteWriter};
use super::rle::{check_runs, encode_user_column};
use super::segment::{IntSegment, Segment, StringSegment};
use super::StorageError;
use crate::model::{ActivitySchema, ActivityTuple, ColumnId, ColumnKind, Row, ValueRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentLocation {
    pub offset: u64,
    pub len: u32,
    pub crc: u32,
}

/// Directory entry for one chunk, including the pruning metadata (action
/// chunk dictionary and integer column ranges) so chunks can be skipped
/// without being read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkEntry {
    pub rows: u32,
    pub users: u32,
    pub segments: Vec<SegmentLocation>,
    pub action_dict: Vec<u32>,
    pub ranges: Vec<Option<(i64, i64)>>,
}

impl ChunkEntry {
    pub fn has_action(&self, action_global_id: u32) -> bool {
        self.action_dict.binary_search(&action_global_id).is_ok()
    }

    /// `[min, max]` of an integer column in this chunk; `None` for empty
    /// chunks and string columns.
    pub fn range(&self, col: ColumnId) -> Option<(i64, i64)> {
        self.ranges.get(col.0).copied().flatten()
    }

    /// Closed-interval overlap between the chunk range and `[lo, hi]`.
    pub fn range_overlaps(&self, col: ColumnId, lo: i64, hi: i64) -> bool {
        match self.range(col) {
            Some((min, max)) => min <= hi && lo <= max,
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub table: String,
    pub schema: ActivitySchema,
    pub chunk_size: u64,
    pub rows: u64,
    /// Global dictionary per string column (`None` for integer columns).
    pub dicts: Vec<Option<GlobalDict>>,
    /// Global MIN/MAX per integer column (`None` for strings or an empty table).
    pub ranges: Vec<Option<(i64, i64)>>,
    pub chunks: Vec<ChunkEntry>,
}

impl Manifest {
    fn encode(&self) -> Vec<u8> {
        let mut w = ByteWriter::default();
        w.str(&self.table);
        format::write_schema(&mut w, &self.schema);
        w.u64(self.chunk_size);
        w.u64(self.rows);
        for col in self.schema.columns() {
            match col.kind {
                ColumnKind::String => format::write_dict(&mut w, self.dicts[col.id.0].as_ref().expect("dict")),
                ColumnKind::Integer => write_range(&mut w, self.ranges[col.id.0]),
            }
        }
        w.len32(self.chunks.len());
        for c in &self.chunks {
            w.u32(c.rows);
            w.u32(c.users);
            for s in &c.segments {
                w.u64(s.offset);
                w.u32(s.len);
                w.u32(s.crc);
            }
            w.len32(c.action_dict.len());
            for &id in &c.action_dict {
                w.u32(id);
            }
            for col in self.schema.columns() {
                if col.kind == ColumnKind::Integer {
                    write_range(&mut w, c.ranges[col.id.0]);
                }
            }
        }
        w.buf
    }

    fn decode(bytes: &[u8]) -> Result<Self, StorageError> {
        let mut r = ByteReader::new(bytes, "manifest");
        let table = r.str()?;
        let schema = format::read_schema(&mut r)?;
        let chunk_size = r.u64()?;
        let rows = r.u64()?;
        let ncols = schema.column_count();
        let mut dicts = vec![None; ncols];
        let mut ranges = vec![None; ncols];
        for col in schema.columns() {
            match col.kind {
                ColumnKind::String => dicts[col.id.0] = Some(format::read_dict(&mut r)?),
                ColumnKind::Integer => ranges[col.id.0] = read_range(&mut r)?,
            }
        }
        let nchunks = r.count(8)?;
        let mut chunks = Vec::with_capacity(nchunks);
        for _ in 0..nchunks {
            let crows = r.u32()?;
            let users = r.u32()?;
            let segments = (0..ncols)
                .map(|_| {
                    Ok(SegmentLocation {
                        offset: r.u64()?,
                        len: r.u32()?,
                        crc: r.u32()?,
                    })
                })
                .collect::<Result<Vec<_>, StorageError>>()?;
            let n = r.count(4)?;
            let action_dict = (0..n).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
            let mut cranges = vec![None; ncols];
            for col in schema.columns() {
                if col.kind == ColumnKind::Integer {
                    cranges[col.id.0] = read_range(&mut r)?;
                }
            }
            chunks.push(ChunkEntry {
                rows: crows,
                users,
                segments,
                action_dict,
                ranges: cranges,
            });
        }
        if !r.is_done() {
            return Err(StorageError::Corrupt("trailing bytes in manifest".into()));
        }
        if chunks.iter().map(|c| c.rows as u64).sum::<u64>() != rows {
            return Err(StorageError::Corrupt(
                "chunk row counts do not sum to table rows".into(),
            ));
        }
        Ok(Manifest {
            table,
            schema,
            chunk_size,
            rows,
            dicts,
            ranges,
            chunks,
        })
    }
}

fn write_range(w: &mut ByteWriter, r: Option<(i64, i64)>) {
    match r {
        Some((lo, hi)) => {
            w.u8(1);
            w.i64(lo);
            w.i64(hi);
        }
        None => w.u8(0),
    }
}

fn read_range(r: &mut ByteReader<'_>) -> Result<Option<(i64, i64)>, StorageError> {
    Ok(match r.u8()? {
        0 => None,
        1 => Some((r.i64()?, r.i64()?)),
        t => return Err(StorageError::Corrupt(format!("bad range flag {t}"))),
    })
}

#[derive(Debug)]
enum Backing {
    Memory(Vec<u8>),
    File(File),
}

/// An opened (or freshly built) chunk set. Immutable and safe to share
/// between threads; chunks are read on demand.
#[derive(Debug)]
pub struct ChunkSet {
    manifest: Manifest,
    data: Backing,
    opened: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WriteSummary {
    pub rows: u64,
    pub chunks: usize,
    pub bytes: u64,
}

impl ChunkSet {
    /// Encodes PK-sorted `tuples`, partitioned into user-aligned `chunks`
    /// (contiguous ranges covering every tuple), into an in-memory chunk set.
    pub fn build(
        schema: &ActivitySchema,
        table: &str,
        tuples: &[ActivityTuple],
        chunks: &[Range<usize>],
        chunk_size: u64,
    ) -> Result<ChunkSet, StorageError> {
        check_layout(schema, tuples, chunks)?;
        let ncols = schema.column_count();

        let mut dicts: Vec<Option<GlobalDict>> = vec![None; ncols];
        let mut ranges: Vec<Option<(i64, i64)>> = vec![None; ncols];
        for col in schema.columns() {
            match col.kind {
                ColumnKind::String => {
                    dicts[col.id.0] = Some(GlobalDict::build(tuples.iter().map(|t| match t.value(col.id) {
                        ValueRef::Str(s) => s,
                        ValueRef::Int(_) => unreachable!("checked by conforms_to"),
                    })));
                }
                ColumnKind::Integer => {
                    let vals = tuples.iter().map(|t| int_of(t, col.id));
                    ranges[col.id.0] = vals.clone().min().zip(vals.max());
                }
            }
        }

        let mut data = ByteWriter::default();
        data.buf.extend_from_slice(format::DATA_MAGIC);
        data.u32(format::FORMAT_VERSION);
        let mut entries = Vec::with_capacity(chunks.len());
        for range in chunks {
            let rows = &tuples[range.clone()];
            let mut segments = Vec::with_capacity(ncols);
            let mut action_dict = Vec::new();
            let mut cranges = vec![None; ncols];
            let mut users = 0;
            for col in schema.columns() {
                let seg = match (col.id, col.kind) {
                    (ColumnId::USER, _) => {
                        let d = dicts[0].as_ref().unwrap();
                        let ids: Vec<u32> = rows.iter().map(|t| d.id_of(&t.user).unwrap()).collect();
                        let runs = encode_user_column(&ids)?;
                        users = runs.len() as u32;
                        Segment::Users(runs)
                    }
                    (id, ColumnKind::String) => {
                        let d = dicts[id.0].as_ref().unwrap();
                        let ids: Vec<u32> = rows
                            .iter()
                            .map(|t| match t.value(id) {
                                ValueRef::Str(s) => d.id_of(s).unwrap(),
                                ValueRef::Int(_) => unreachable!(),
                            })
                            .collect();
                        let seg = StringSegment::from_global_ids(&ids);
                        if id == ColumnId::ACTION {
                            action_dict = seg.chunk_dict().to_vec();
                        }
                        Segment::Str(seg)
                    }
                    (id, ColumnKind::Integer) => {
                        let vals: Vec<i64> = rows.iter().map(|t| int_of(t, id)).collect();
                        let seg = IntSegment::encode(&vals);
                        if !vals.is_empty() {
                            cranges[id.0] = Some((seg.min(), seg.max()));
                        }
                        Segment::Int(seg)
                    }
                };
                let bytes = format::encode_segment(&seg);
                segments.push(SegmentLocation {
                    offset: data.buf.len() as u64,
                    len: u32::try_from(bytes.len()).expect("segment exceeds 4 GiB"),
                    crc: crc32fast::hash(&bytes),
                });
                data.buf.extend_from_slice(&bytes);
            }
            entries.push(ChunkEntry {
                rows: rows.len() as u32,
                users,
                segments,
                action_dict,
                ranges: cranges,
            });
        }

        Ok(ChunkSet {
            manifest: Manifest {
                table: table.to_string(),
                schema: schema.clone(),
                chunk_size,
                rows: tuples.len() as u64,
                dicts,
                ranges,
                chunks: entries,
            },
            data: Backing::Memory(data.buf),
            opened: AtomicU64::new(0),
        })
    }

    /// Writes `manifest.bin` and `chunks.bin` into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<WriteSummary, StorageError> {
        fs::create_dir_all(dir)?;
        let manifest = format::frame(format::MANIFEST_MAGIC, &self.manifest.encode());
        let data_len = match &self.data {
            Backing::Memory(buf) => {
                fs::write(dir.join(format::DATA_FILE), buf)?;
                buf.len() as u64
            }
            Backing::File(f) => {
                let len = f.metadata()?.len();
                let mut buf = vec![0u8; len as usize];
                f.read_exact_at(&mut buf, 0)?;
                fs::write(dir.join(format::DATA_FILE), &buf)?;
                len
            }
        };
        fs::write(dir.join(format::MANIFEST_FILE), &manifest)?;
        Ok(WriteSummary {
            rows: self.manifest.rows,
            chunks: self.manifest.chunks.len(),
            bytes: data_len + manifest.len() as u64,
        })
    }

    pub fn open(dir: &Path) -> Result<ChunkSet, StorageError> {
        let raw = fs::read(dir.join(format::MANIFEST_FILE))?;
        let manifest = Manifest::decode(format::unframe(format::MANIFEST_MAGIC, "manifest", &raw)?)?;
        let file = File::open(dir.join(format::DATA_FILE))?;
        let len = file.metadata()?.len();
        let mut header = [0u8; format::DATA_HEADER_LEN as usize];
        if len < format::DATA_HEADER_LEN {
            return Err(StorageError::Truncated("chunk data".into()));
        }
        file.read_exact_at(&mut header, 0)?;
        if &header[..8] != format::DATA_MAGIC {
            return Err(StorageError::BadMagic("chunk data"));
        }
        let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
        if version != format::FORMAT_VERSION {
            return Err(StorageError::VersionMismatch {
                found: version,
                expected: format::FORMAT_VERSION,
            });
        }
        let end = manifest
            .chunks
            .iter()
            .flat_map(|c| c.segments.iter())
            .map(|s| s.offset + s.len as u64)
            .max()
            .unwrap_or(format::DATA_HEADER_LEN);
        if end > len {
            return Err(StorageError::Truncated("chunk data".into()));
        }
        Ok(ChunkSet {
            manifest,
            data: Backing::File(file),
            opened: AtomicU64::new(0),
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn schema(&self) -> &ActivitySchema {
        &self.manifest.schema
    }

    pub fn dicts(&self) -> &[Option<GlobalDict>] {
        &self.manifest.dicts
    }

    pub fn dict(&self, col: ColumnId) -> Option<&GlobalDict> {
        self.manifest.dicts.get(col.0).and_then(Option::as_ref)
    }

    pub fn chunk_count(&self) -> usize {
        self.manifest.chunks.len()
    }

    pub fn rows(&self) -> u64 {
        self.manifest.rows
    }

    pub fn entry(&self, index: usize) -> &ChunkEntry {
        &self.manifest.chunks[index]
    }

    pub fn action_global_id(&self, action: &str) -> Option<u32> {
        self.dict(ColumnId::ACTION).and_then(|d| d.id_of(action))
    }

    /// True iff the chunk's action dictionary contains `action_global_id`.
    pub fn chunk_has_action(&self, index: usize, action_global_id: u32) -> bool {
        self.manifest.chunks[index].has_action(action_global_id)
    }

    pub fn chunk_range_overlaps(&self, index: usize, col: ColumnId, lo: i64, hi: i64) -> bool {
        self.manifest.chunks[index].range_overlaps(col, lo, hi)
    }

    /// Number of [`load_chunk`](Self::load_chunk) calls since creation or the
    /// last [`reset_counters`](Self::reset_counters).
    pub fn chunks_opened(&self) -> u64 {
        self.opened.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.opened.store(0, Ordering::Relaxed);
    }

    fn read_segment(&self, loc: SegmentLocation) -> Result<Segment, StorageError> {
        let owned;
        let bytes: &[u8] = match &self.data {
            Backing::Memory(buf) => {
                let end = loc.offset as usize + loc.len as usize;
                buf.get(loc.offset as usize..end)
                    .ok_or_else(|| StorageError::Truncated("chunk data".into()))?
            }
            Backing::File(f) => {
                let mut buf = vec![0u8; loc.len as usize];
                f.read_exact_at(&mut buf, loc.offset).map_err(|e| {
                    if e.kind() == std::io::ErrorKind::UnexpectedEof {
                        StorageError::Truncated("chunk data".into())
                    } else {
                        StorageError::Io(e)
                    }
                })?;
                owned = buf;
                &owned
            }
        };
        if crc32fast::hash(bytes) != loc.crc {
            return Err(StorageError::Checksum(format!("segment at offset {}", loc.offset)));
        }
        format::decode_segment(bytes)
    }

    /// Reads the user column plus `columns` of chunk `index`.
    pub fn load_chunk(&self, index: usize, columns: &[ColumnId]) -> Result<Chunk, StorageError> {
        let entry = self.manifest.chunks.get(index).ok_or(StorageError::NoSuchChunk {
            index,
            count: self.manifest.chunks.len(),
        })?;
        self.opened.fetch_add(1, Ordering::Relaxed);
        let ncols = self.manifest.schema.column_count();
        let mut segments: Vec<Option<Segment>> = vec![None; ncols];
        let rows = entry.rows as usize;
        for col in std::iter::once(ColumnId::USER).chain(columns.iter().copied()) {
            if col.0 >= ncols {
                return Err(StorageError::ColumnNotLoaded(col.0));
            }
            if segments[col.0].is_some() {
                continue;
            }
            let seg = self.read_segment(entry.segments[col.0])?;
            let ok = match (&seg, self.manifest.schema.kind(col)) {
                (Segment::Users(runs), _) if col == ColumnId::USER => {
                    check_runs(runs, rows)?;
                    runs.len() == entry.users as usize
                }
                (Segment::Str(s), ColumnKind::String) if col != ColumnId::USER => {
                    let dict_len = self.manifest.dicts[col.0].as_ref().map_or(0, |d| d.len());
                    s.len() == rows && s.chunk_dict().iter().all(|&g| (g as usize) < dict_len)
                }
                (Segment::Int(s), ColumnKind::Integer) => s.len() == rows,
                _ => false,
            };
            if !ok {
                return Err(StorageError::Corrupt(format!(
                    "segment for column {} of chunk {index} does not match the manifest",
                    col.0
                )));
            }
            segments[col.0] = Some(seg);
        }
        Ok(Chunk::new(index, rows, segments))
    }

    /// Decodes the whole table back into tuples, in storage order.
    pub fn decode_all(&self) -> Result<Vec<ActivityTuple>, StorageError> {
        let schema = &self.manifest.schema;
        let all: Vec<ColumnId> = schema.columns().map(|c| c.id).collect();
        let mut out = Vec::with_capacity(self.manifest.rows as usize);
        for i in 0..self.chunk_count() {
            let chunk = self.load_chunk(i, &all)?;
            for run in chunk.users() {
                for r in run.first..run.end() {
                    let row = chunk.row(self.dicts(), run.user, r as usize);
                    let nd = schema.dimensions().len();
                    out.push(ActivityTuple {
                        user: str_of(row.value(ColumnId::USER)),
                        time: int_of(&row, ColumnId::TIME),
                        action: str_of(row.value(ColumnId::ACTION)),
                        dims: (0..nd).map(|d| row.value(ColumnId(3 + d)).to_owned()).collect(),
                        measures: (0..schema.measures().len())
                            .map(|m| int_of(&row, ColumnId(3 + nd + m)))
                            .collect(),
                    });
                }
            }
        }
        Ok(out)
    }
}

fn str_of(v: ValueRef<'_>) -> String {
    match v {
        ValueRef::Str(s) => s.to_string(),
        ValueRef::Int(i) => i.to_string(),
    }
}

fn int_of<R: Row + ?Sized>(row: &R, col: ColumnId) -> i64 {
    match row.value(col) {
        ValueRef::Int(i) => i,
        ValueRef::Str(_) => unreachable!("integer column"),
    }
}

fn check_layout(
    schema: &ActivitySchema,
    tuples: &[ActivityTuple],
    chunks: &[Range<usize>],
) -> Result<(), StorageError> {
    for (i, t) in tuples.iter().enumerate() {
        if !t.conforms_to(schema) {
            return Err(StorageError::SchemaMismatch(i));
        }
    }
    for i in 1..tuples.len() {
        if tuples[i - 1].cmp_key(&tuples[i]) != std::cmp::Ordering::Less {
            return Err(StorageError::Unsorted(i));
        }
    }
    let mut next = 0;
    for r in chunks {
        if r.start != next || r.end < r.start {
            return Err(StorageError::Corrupt(format!(
                "chunk ranges must be contiguous; got {r:?} after row {next}"
            )));
        }
        if r.start > 0 && r.start < tuples.len() && tuples[r.start - 1].user == tuples[r.start].user {
            return Err(StorageError::UserSplit(tuples[r.start].user.clone()));
        }
        next = r.end;
    }
    if next != tuples.len() {
        return Err(StorageError::Corrupt(format!(
            "chunk ranges cover {next} of {} rows",
            tuples.len()
        )));
    }
    Ok(())
}

/// Encodes and writes a chunk set to `dir`.
pub fn write_chunkset(
    dir: &Path,
    schema: &ActivitySchema,
    table: &str,
    tuples: &[ActivityTuple],
    chunks: &[Range<usize>],
    chunk_size: u64,
) -> Result<WriteSummary, StorageError> {
    ChunkSet::build(schema, table, tuples, chunks, chunk_size)?.save(dir)
}

pub fn open_chunkset(dir: &Path) -> Result<ChunkSet, StorageError> {
    ChunkSet::open(dir)
}
