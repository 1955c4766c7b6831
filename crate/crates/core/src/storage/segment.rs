// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Per-chunk column segments.
//!
//! String columns use two-level dictionary encoding: the chunk dictionary is
//! the sorted list of global-ids present in the chunk, and each row stores a
//! chunk-id (its global-id's position in the chunk dictionary). Integer
//! columns store the chunk range and each row's offset from the chunk MIN.
//! Both row arrays are bit-packed.

use super::dict::GlobalDict;
use super::packed::PackedArray;
use super::rle::RleTriple;
use super::StorageError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringSegment {
    chunk_dict: Vec<u32>,
    codes: PackedArray,
}

impl StringSegment {
    pub fn encode<S: AsRef<str>>(values: &[S], dict: &GlobalDict) -> Result<Self, StorageError> {
        let ids = values
            .iter()
            .map(|v| {
                dict.id_of(v.as_ref())
                    .ok_or_else(|| StorageError::UnknownValue(v.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_global_ids(&ids))
    }

    pub fn from_global_ids(ids: &[u32]) -> Self {
        let mut chunk_dict = ids.to_vec();
        chunk_dict.sort_unstable();
        chunk_dict.dedup();
        let codes: Vec<u64> = ids
            .iter()
            .map(|id| chunk_dict.binary_search(id).expect("id is in chunk dict") as u64)
            .collect();
        StringSegment {
            chunk_dict,
            codes: PackedArray::pack(&codes),
        }
    }

    pub(crate) fn from_parts(chunk_dict: Vec<u32>, codes: PackedArray) -> Result<Self, StorageError> {
        if !chunk_dict.windows(2).all(|w| w[0] < w[1]) {
            return Err(StorageError::Corrupt("chunk dictionary not strictly increasing".into()));
        }
        if codes.iter().any(|c| c as usize >= chunk_dict.len()) {
            return Err(StorageError::Corrupt("chunk-id outside chunk dictionary".into()));
        }
        Ok(StringSegment { chunk_dict, codes })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn chunk_dict(&self) -> &[u32] {
        &self.chunk_dict
    }

    pub fn codes(&self) -> &PackedArray {
        &self.codes
    }

    #[inline]
    pub fn code_at(&self, row: usize) -> u32 {
        self.codes.at(row) as u32
    }

    #[inline]
    pub fn global_id_at(&self, row: usize) -> u32 {
        self.chunk_dict[self.code_at(row) as usize]
    }

    pub fn decode_at<'d>(&self, row: usize, dict: &'d GlobalDict) -> Result<&'d str, StorageError> {
        let code = self.codes.get(row)?;
        Ok(dict.value(self.chunk_dict[code as usize]))
    }

    /// Chunk-id of a global-id, by binary search in the chunk dictionary.
    pub fn chunk_code_of(&self, global_id: u32) -> Option<u32> {
        self.chunk_dict.binary_search(&global_id).ok().map(|i| i as u32)
    }

    pub fn encoded_bytes(&self) -> usize {
        self.chunk_dict.len() * 4 + self.codes.encoded_bytes()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSegment {
    min: i64,
    max: i64,
    deltas: PackedArray,
}

impl IntSegment {
    pub fn encode(values: &[i64]) -> Self {
        let min = values.iter().copied().min().unwrap_or(0);
        let max = values.iter().copied().max().unwrap_or(0);
        let deltas: Vec<u64> = values.iter().map(|&v| v.wrapping_sub(min) as u64).collect();
        IntSegment {
            min,
            max,
            deltas: PackedArray::pack(&deltas),
        }
    }

    pub(crate) fn from_parts(min: i64, max: i64, deltas: PackedArray) -> Result<Self, StorageError> {
        let span = max.wrapping_sub(min) as u64;
        if max < min || deltas.iter().any(|d| d > span) {
            return Err(StorageError::Corrupt("integer delta outside chunk range".into()));
        }
        Ok(IntSegment { min, max, deltas })
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn max(&self) -> i64 {
        self.max
    }

    pub fn deltas(&self) -> &PackedArray {
        &self.deltas
    }

    #[inline]
    pub fn value_at(&self, row: usize) -> i64 {
        self.min.wrapping_add(self.deltas.at(row) as i64)
    }

    pub fn decode_at(&self, row: usize) -> Result<i64, StorageError> {
        Ok(self.min.wrapping_add(self.deltas.get(row)? as i64))
    }

    pub fn encoded_bytes(&self) -> usize {
        16 + self.deltas.encoded_bytes()
    }
}

/// One column of one chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Users(Vec<RleTriple>),
    Str(StringSegment),
    Int(IntSegment),
}

impl Segment {
    pub fn encoded_bytes(&self) -> usize {
        match self {
            Segment::Users(runs) => runs.len() * 12,
            Segment::Str(s) => s.encoded_bytes(),
            Segment::Int(s) => s.encoded_bytes(),
        }
    }
}
