// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::ops::Range;

use crate::model::ActivityTuple;

pub const DEFAULT_CHUNK_SIZE: usize = 262_144;

/// Tuples in primary-key order with the row ranges of each chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioned {
    pub tuples: Vec<ActivityTuple>,
    pub chunks: Vec<Range<usize>>,
}

/// Sorts by `(user, time, action)` and cuts the table into user-aligned
/// chunks: a chunk is closed once it holds at least `chunk_size` tuples and
/// the next tuple starts a new user. A chunk can therefore exceed
/// `chunk_size` by up to one user's activity.
pub fn sort_and_partition(mut tuples: Vec<ActivityTuple>, chunk_size: usize) -> Partitioned {
    let chunk_size = chunk_size.max(1);
    tuples.sort_by(ActivityTuple::cmp_key);
    let mut chunks = Vec::new();
    let mut start = 0;
    for i in 1..tuples.len() {
        if i - start >= chunk_size && tuples[i].user != tuples[i - 1].user {
            chunks.push(start..i);
            start = i;
        }
    }
    if start < tuples.len() {
        chunks.push(start..tuples.len());
    }
    Partitioned { tuples, chunks }
}
