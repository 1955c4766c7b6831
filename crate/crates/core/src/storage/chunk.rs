// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use super::dict::GlobalDict;
use super::rle::RleTriple;
use super::segment::{IntSegment, Segment, StringSegment};
use super::StorageError;
use crate::model::{ColumnId, Row, ValueRef};

/// A chunk with some or all of its columns loaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    index: usize,
    rows: usize,
    segments: Vec<Option<Segment>>,
}

impl Chunk {
    pub(crate) fn new(index: usize, rows: usize, segments: Vec<Option<Segment>>) -> Self {
        Chunk { index, rows, segments }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn segment(&self, col: ColumnId) -> Result<&Segment, StorageError> {
        self.segments
            .get(col.0)
            .and_then(Option::as_ref)
            .ok_or(StorageError::ColumnNotLoaded(col.0))
    }

    pub fn is_loaded(&self, col: ColumnId) -> bool {
        matches!(self.segments.get(col.0), Some(Some(_)))
    }

    /// The user column's run-length triples. Always loaded.
    pub fn users(&self) -> &[RleTriple] {
        match &self.segments[0] {
            Some(Segment::Users(runs)) => runs,
            _ => unreachable!("user column is always loaded"),
        }
    }

    /// Panics if the column is not a loaded string column.
    pub fn string(&self, col: ColumnId) -> &StringSegment {
        match &self.segments[col.0] {
            Some(Segment::Str(s)) => s,
            _ => panic!("column {} is not a loaded string column", col.0),
        }
    }

    /// Panics if the column is not a loaded integer column.
    pub fn int(&self, col: ColumnId) -> &IntSegment {
        match &self.segments[col.0] {
            Some(Segment::Int(s)) => s,
            _ => panic!("column {} is not a loaded integer column", col.0),
        }
    }

    /// Binary search for an action's global-id in the chunk dictionary of the
    /// action column.
    pub fn has_action(&self, action_global_id: u32) -> bool {
        self.string(ColumnId::ACTION).chunk_code_of(action_global_id).is_some()
    }

    pub fn row<'a>(&'a self, dicts: &'a [Option<GlobalDict>], user: u32, row: usize) -> ChunkRow<'a> {
        ChunkRow {
            chunk: self,
            dicts,
            user,
            row,
        }
    }
}

/// A lazily decoded view of one row of a loaded chunk.
#[derive(Clone, Copy)]
pub struct ChunkRow<'a> {
    chunk: &'a Chunk,
    dicts: &'a [Option<GlobalDict>],
    user: u32,
    row: usize,
}

impl ChunkRow<'_> {
    pub fn position(&self) -> usize {
        self.row
    }
}

impl Row for ChunkRow<'_> {
    #[inline]
    fn value(&self, column: ColumnId) -> ValueRef<'_> {
        let dict = |c: usize| self.dicts[c].as_ref().expect("string column has a dictionary");
        match &self.chunk.segments[column.0] {
            Some(Segment::Users(_)) => ValueRef::Str(dict(0).value(self.user)),
            Some(Segment::Str(s)) => ValueRef::Str(dict(column.0).value(s.global_id_at(self.row))),
            Some(Segment::Int(s)) => ValueRef::Int(s.value_at(self.row)),
            None => panic!("column {} was not loaded", column.0),
        }
    }
}
