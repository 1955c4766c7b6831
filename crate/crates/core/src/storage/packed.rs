// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Fixed-width bit packing into 64-bit words.
//!
//! Every value occupies `bit_width` bits and a word holds
//! `64 / bit_width` values; values never straddle a word boundary, so a
//! random read is one word load, one shift and one mask.

use super::StorageError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedArray {
    bit_width: u8,
    len: usize,
    words: Vec<u64>,
}

/// Minimum number of bits needed for `max`, never less than one.
pub fn bits_needed(max: u64) -> u8 {
    (64 - max.leading_zeros()).max(1) as u8
}

impl PackedArray {
    pub fn pack(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        Self::pack_with_width(values, bits_needed(max))
    }

    /// Panics if a value does not fit in `bit_width` bits.
    pub fn pack_with_width(values: &[u64], bit_width: u8) -> Self {
        assert!((1..=64).contains(&bit_width), "bit width {bit_width} out of range");
        let per_word = 64 / bit_width as usize;
        let mask = Self::mask_for(bit_width);
        let mut words = vec![0u64; values.len().div_ceil(per_word)];
        for (i, &v) in values.iter().enumerate() {
            assert!(v & !mask == 0, "value {v} does not fit in {bit_width} bits");
            let shift = (i % per_word) * bit_width as usize;
            words[i / per_word] |= v << shift;
        }
        PackedArray {
            bit_width,
            len: values.len(),
            words,
        }
    }

    pub(crate) fn from_raw_parts(bit_width: u8, len: usize, words: Vec<u64>) -> Result<Self, StorageError> {
        if !(1..=64).contains(&bit_width) {
            return Err(StorageError::Corrupt(format!("bit width {bit_width}")));
        }
        let per_word = 64 / bit_width as usize;
        if words.len() != len.div_ceil(per_word) {
            return Err(StorageError::Corrupt(format!(
                "{} words cannot hold {len} values of {bit_width} bits",
                words.len()
            )));
        }
        Ok(PackedArray { bit_width, len, words })
    }

    fn mask_for(bit_width: u8) -> u64 {
        if bit_width == 64 {
            u64::MAX
        } else {
            (1u64 << bit_width) - 1
        }
    }

    pub fn bit_width(&self) -> u8 {
        self.bit_width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> Result<u64, StorageError> {
        if i >= self.len {
            return Err(StorageError::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.at(i))
    }

    /// Unchecked-by-contract read; panics on an out-of-range index.
    #[inline]
    pub fn at(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let per_word = 64 / self.bit_width as usize;
        let shift = (i % per_word) * self.bit_width as usize;
        (self.words[i / per_word] >> shift) & Self::mask_for(self.bit_width)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    pub fn encoded_bytes(&self) -> usize {
        self.words.len() * 8
    }
}
