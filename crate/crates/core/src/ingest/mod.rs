// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Getting activity data into a chunk set: CSV loading, primary-key sorting,
//! user-aligned partitioning, and synthetic benchmark data.

mod csv;
mod generate;
mod partition;
pub mod sample;
mod scale;

use std::collections::HashMap;

pub use self::csv::{infer_schema, load_csv, write_csv, CsvSpec, IngestError, IngestErrorKind, SchemaHints};
pub use generate::{game_schema, generate, ActivityDistribution, GenSpec, ACTIONS};
pub use partition::{sort_and_partition, Partitioned, DEFAULT_CHUNK_SIZE};
pub use scale::scale_dataset;

use crate::model::{ActivitySchema, ActivityTuple};
use crate::storage::{ChunkSet, StorageError};

/// Sorts, partitions and encodes `tuples` into an in-memory chunk set.
/// Fails on a duplicate `(user, time, action)` key.
pub fn build_chunkset(
    schema: &ActivitySchema,
    table: &str,
    tuples: Vec<ActivityTuple>,
    chunk_size: usize,
) -> Result<ChunkSet, StorageError> {
    let p = sort_and_partition(tuples, chunk_size);
    ChunkSet::build(schema, table, &p.tuples, &p.chunks, chunk_size as u64)
}

/// Position (in input order) of the first tuple whose primary key repeats
/// an earlier one, with the earlier position.
pub fn find_duplicate_key(tuples: &[ActivityTuple]) -> Option<(usize, usize)> {
    let mut seen: HashMap<(&str, i64, &str), usize> = HashMap::with_capacity(tuples.len());
    for (i, t) in tuples.iter().enumerate() {
        if let Some(&first) = seen.get(&(t.user.as_str(), t.time, t.action.as_str())) {
            return Some((first, i));
        }
        seen.insert((&t.user, t.time, &t.action), i);
    }
    None
}
