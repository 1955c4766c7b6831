// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::collections::BTreeSet;

/// Table-wide sorted dictionary of the distinct values of a string column.
/// A value's global-id is its rank, so id order equals string order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GlobalDict {
    values: Vec<String>,
}

impl GlobalDict {
    pub fn build<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set: BTreeSet<String> = values.into_iter().map(|s| s.as_ref().to_string()).collect();
        GlobalDict {
            values: set.into_iter().collect(),
        }
    }

    pub(crate) fn from_sorted(values: Vec<String>) -> Option<Self> {
        values.windows(2).all(|w| w[0] < w[1]).then_some(GlobalDict { values })
    }

    /// Binary search for the global-id of `value`.
    pub fn id_of(&self, value: &str) -> Option<u32> {
        self.values
            .binary_search_by(|v| v.as_str().cmp(value))
            .ok()
            .map(|i| i as u32)
    }

    /// Number of dictionary entries strictly less than `value`.
    pub fn rank(&self, value: &str) -> u32 {
        self.values.partition_point(|v| v.as_str() < value) as u32
    }

    pub fn value(&self, id: u32) -> &str {
        &self.values[id as usize]
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds the dictionary and returns it together with each input's global-id.
pub fn build_global_dict<S: AsRef<str>>(values: &[S]) -> (GlobalDict, Vec<u32>) {
    let dict = GlobalDict::build(values.iter().map(|s| s.as_ref()));
    let ids = values
        .iter()
        .map(|v| dict.id_of(v.as_ref()).expect("value was just inserted"))
        .collect();
    (dict, ids)
}
