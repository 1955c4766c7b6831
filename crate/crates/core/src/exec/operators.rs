// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use super::scan::{ScanCursor, ScanStats};
use crate::model::{normalize_age, Age, ColumnId, EvalError, Predicate, TimeUnit};
use crate::plan::Selection;
use crate::storage::{Chunk, ChunkRow, GlobalDict, RleTriple};

/// Advances the cursor through the current user's rows until one carries
/// the birth action. Rows before it stay decoded; `None` means the user
/// never performs the action (the whole run has then been read).
pub fn get_birth_tuple(cursor: &mut ScanCursor<'_>, chunk: &Chunk, birth_action_id: u32) -> Option<usize> {
    let actions = chunk.string(ColumnId::ACTION);
    while let Some(r) = cursor.get_next() {
        if actions.global_id_at(r) == birth_action_id {
            return Some(r);
        }
    }
    None
}

/// Receives the output of the selection chain, one user at a time.
pub trait UserSink {
    /// Called once per user that survives every birth selection.
    fn begin_user(&mut self, ctx: &UserContext<'_>);
    /// Called for every surviving row of that user, in storage order.
    fn row(&mut self, ctx: &UserContext<'_>, row: usize);
}

pub struct UserContext<'a> {
    pub chunk: &'a Chunk,
    pub dicts: &'a [Option<GlobalDict>],
    pub run: RleTriple,
    /// Sequence number of the user within the chunk.
    pub seq: u32,
    pub birth_row: usize,
    pub birth_time: i64,
}

impl<'a> UserContext<'a> {
    pub fn view(&self, row: usize) -> ChunkRow<'a> {
        self.chunk.row(self.dicts, self.run.user, row)
    }

    #[inline]
    pub fn time(&self, row: usize) -> i64 {
        self.chunk.int(ColumnId::TIME).value_at(row)
    }

    /// Age of a row after the birth time.
    #[inline]
    pub fn age(&self, row: usize, unit: TimeUnit) -> Option<Age> {
        normalize_age(self.time(row) - self.birth_time, unit).ok()
    }
}

/// Runs the selection chain over a chunk, in chain order per user.
///
/// Birth selections test the birth tuple and skip the rest of a failing
/// user's run. Age selections need every row of the user, so an age
/// selection placed before a birth selection decodes users that the birth
/// selection then throws away.
pub fn run_selections<S: UserSink>(
    chunk: &Chunk,
    dicts: &[Option<GlobalDict>],
    ops: &[Selection],
    birth_action_id: u32,
    unit: TimeUnit,
    sink: &mut S,
) -> Result<ScanStats, EvalError> {
    let mut cursor = ScanCursor::new(chunk);
    let mut buffer: Vec<usize> = Vec::new();
    let mut skipped = 0u64;
    let mut seq = 0u32;
    'users: while let Some(run) = cursor.get_next_user() {
        let Some(birth_row) = get_birth_tuple(&mut cursor, chunk, birth_action_id) else {
            continue;
        };
        let ctx = UserContext {
            chunk,
            dicts,
            run,
            seq,
            birth_row,
            birth_time: chunk.int(ColumnId::TIME).value_at(birth_row),
        };
        seq += 1;
        let birth = ctx.view(birth_row);
        let mut materialized = false;
        for op in ops {
            match op {
                Selection::Birth(c) => {
                    if !c.eval(&birth, Some(&birth), None)? {
                        cursor.skip_cur_user();
                        skipped += 1;
                        continue 'users;
                    }
                }
                Selection::Age(c) => {
                    if !materialized {
                        buffer.clear();
                        buffer.extend(run.first as usize..=birth_row);
                        while let Some(r) = cursor.get_next() {
                            buffer.push(r);
                        }
                        materialized = true;
                    }
                    let mut err = None;
                    buffer.retain(|&r| match age_keep(c, &ctx, &birth, r, unit) {
                        Ok(keep) => keep,
                        Err(e) => {
                            err = Some(e);
                            false
                        }
                    });
                    if let Some(e) = err {
                        return Err(e);
                    }
                }
            }
        }
        sink.begin_user(&ctx);
        if materialized {
            for &r in &buffer {
                sink.row(&ctx, r);
            }
        } else {
            for r in run.first as usize..=birth_row {
                sink.row(&ctx, r);
            }
            while let Some(r) = cursor.get_next() {
                sink.row(&ctx, r);
            }
        }
    }
    let mut stats = cursor.stats();
    stats.users_skipped = skipped;
    Ok(stats)
}

// A row survives an age selection if it is at the birth time, or after it
// and satisfies the condition.
fn age_keep(
    c: &Predicate,
    ctx: &UserContext<'_>,
    birth: &ChunkRow<'_>,
    row: usize,
    unit: TimeUnit,
) -> Result<bool, EvalError> {
    let t = ctx.time(row);
    if t == ctx.birth_time {
        return Ok(true);
    }
    if t < ctx.birth_time {
        return Ok(false);
    }
    let age = normalize_age(t - ctx.birth_time, unit).ok();
    c.eval(&ctx.view(row), Some(birth), age)
}

/// Collects surviving row positions.
#[derive(Debug, Default)]
pub struct RowCollector {
    pub rows: Vec<usize>,
}

impl UserSink for RowCollector {
    fn begin_user(&mut self, _: &UserContext<'_>) {}

    fn row(&mut self, _: &UserContext<'_>, row: usize) {
        self.rows.push(row);
    }
}
