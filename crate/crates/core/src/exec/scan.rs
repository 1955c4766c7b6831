// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use crate::storage::{Chunk, RleTriple};

/// Work counters for one execution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    /// Rows handed out by [`ScanCursor::get_next`].
    pub rows_decoded: u64,
    /// Rows passed over by [`ScanCursor::skip_cur_user`] without decoding.
    pub rows_skipped: u64,
    pub users_scanned: u64,
    /// Users dropped by a birth selection.
    pub users_skipped: u64,
    pub chunks_opened: u64,
}

impl ScanStats {
    pub fn merge(&mut self, other: &ScanStats) {
        self.rows_decoded += other.rows_decoded;
        self.rows_skipped += other.rows_skipped;
        self.users_scanned += other.users_scanned;
        self.users_skipped += other.users_skipped;
        self.chunks_opened += other.chunks_opened;
    }
}

/// Sequential, user-at-a-time cursor over one loaded chunk.
///
/// Segments are random access, so a single row position stands in for the
/// per-column pointers; moving it moves every column at once.
pub struct ScanCursor<'c> {
    runs: &'c [RleTriple],
    next_run: usize,
    pos: usize,
    end: usize,
    stats: ScanStats,
}

impl<'c> ScanCursor<'c> {
    pub fn new(chunk: &'c Chunk) -> Self {
        ScanCursor {
            runs: chunk.users(),
            next_run: 0,
            pos: 0,
            end: 0,
            stats: ScanStats::default(),
        }
    }

    /// Moves to the first row of the next user, abandoning what is left of
    /// the current one. `None` once the chunk is exhausted.
    pub fn get_next_user(&mut self) -> Option<RleTriple> {
        let run = *self.runs.get(self.next_run)?;
        self.next_run += 1;
        self.pos = run.first as usize;
        self.end = run.end() as usize;
        self.stats.users_scanned += 1;
        Some(run)
    }

    /// The next row of the current user, or `None` at the end of its run.
    #[inline]
    pub fn get_next(&mut self) -> Option<usize> {
        if self.pos < self.end {
            self.stats.rows_decoded += 1;
            self.pos += 1;
            Some(self.pos - 1)
        } else {
            None
        }
    }

    /// Jumps past the rest of the current user's run; returns how many rows
    /// were skipped.
    pub fn skip_cur_user(&mut self) -> usize {
        let n = self.end - self.pos;
        self.stats.rows_skipped += n as u64;
        self.pos = self.end;
        n
    }

    /// Row the next `get_next` would return.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn stats(&self) -> ScanStats {
        self.stats
    }
}
