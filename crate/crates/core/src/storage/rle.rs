// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::collections::HashSet;

use super::StorageError;

/// One user run in a chunk's user column: global user id, position of the
/// user's first row in the chunk, and number of rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RleTriple {
    pub user: u32,
    pub first: u32,
    pub len: u32,
}

impl RleTriple {
    pub fn end(&self) -> u32 {
        self.first + self.len
    }
}

/// Run-length encodes a user column. Each user's rows must be contiguous.
pub fn encode_user_column(users: &[u32]) -> Result<Vec<RleTriple>, StorageError> {
    let mut runs: Vec<RleTriple> = Vec::new();
    let mut seen = HashSet::new();
    for (pos, &user) in users.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if run.user == user => run.len += 1,
            _ => {
                if !seen.insert(user) {
                    return Err(StorageError::NonContiguousUser { user, row: pos });
                }
                runs.push(RleTriple {
                    user,
                    first: pos as u32,
                    len: 1,
                });
            }
        }
    }
    Ok(runs)
}

pub fn decode_user_column(runs: &[RleTriple]) -> Vec<u32> {
    runs.iter()
        .flat_map(|r| std::iter::repeat_n(r.user, r.len as usize))
        .collect()
}

/// Checks that runs are ordered, contiguous and cover `rows` rows exactly.
pub(crate) fn check_runs(runs: &[RleTriple], rows: usize) -> Result<(), StorageError> {
    let mut next = 0u32;
    for r in runs {
        if r.first != next || r.len == 0 {
            return Err(StorageError::Corrupt(format!(
                "user run for {} starts at {} (expected {next})",
                r.user, r.first
            )));
        }
        next = r.end();
    }
    if next as usize != rows {
        return Err(StorageError::Corrupt(format!(
            "user runs cover {next} rows, chunk has {rows}"
        )));
    }
    Ok(())
}
