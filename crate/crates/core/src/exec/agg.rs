// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::collections::{BTreeMap, HashMap};

use super::operators::{UserContext, UserSink};
use crate::model::{Accumulator, AggFunc, AggSpec, CohortRow, ColumnId, TimeUnit, Value};
use crate::storage::{Chunk, GlobalDict, Segment};

/// One component of a cohort key. String values are kept as global
/// dictionary ids, whose order matches the order of the strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeyPart {
    Gid(u32),
    Int(i64),
}

/// Per-cohort state: size plus one bucket per age. Bucket slot 0 counts
/// rows and users; slots `1..` hold the query's aggregates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CohortAcc {
    pub size: u64,
    /// `width` accumulators per age, ages starting at 0.
    pub buckets: Vec<Accumulator>,
    stamps: Vec<u32>,
}

impl CohortAcc {
    fn ensure_age(&mut self, age: usize, width: usize) {
        if self.stamps.len() <= age {
            self.stamps.resize(age + 1, u32::MAX);
            self.buckets.resize((age + 1) * width, Accumulator::default());
        }
    }

    fn merge(&mut self, other: &CohortAcc, width: usize) {
        self.size += other.size;
        let ages = other.buckets.len() / width;
        if ages > 0 {
            self.ensure_age(ages - 1, width);
        }
        for (mine, theirs) in self.buckets.iter_mut().zip(&other.buckets) {
            mine.merge(theirs);
        }
    }
}

enum Slots {
    /// Indexed by the global id of a single string cohort attribute.
    Dense(Vec<Option<Box<CohortAcc>>>),
    Hash(HashMap<Vec<KeyPart>, CohortAcc>),
}

/// Cohort aggregation over the rows of one chunk.
pub struct CohortAggregator<'p> {
    cohort_by: &'p [ColumnId],
    aggregates: &'p [AggSpec],
    unit: TimeUnit,
    width: usize,
    slots: Slots,
    current: Option<Vec<KeyPart>>,
    current_gid: u32,
    key_buf: Vec<KeyPart>,
}

impl<'p> CohortAggregator<'p> {
    pub fn new(
        cohort_by: &'p [ColumnId],
        aggregates: &'p [AggSpec],
        unit: TimeUnit,
        dicts: &[Option<GlobalDict>],
    ) -> Self {
        let slots = match cohort_by {
            [c] if dicts[c.0].is_some() => {
                let n = dicts[c.0].as_ref().map_or(0, |d| d.len());
                Slots::Dense((0..n).map(|_| None).collect())
            }
            _ => Slots::Hash(HashMap::new()),
        };
        CohortAggregator {
            cohort_by,
            aggregates,
            unit,
            width: 1 + aggregates.len(),
            slots,
            current: None,
            current_gid: 0,
            key_buf: Vec::with_capacity(cohort_by.len()),
        }
    }

    fn slot(&mut self) -> &mut CohortAcc {
        match &mut self.slots {
            Slots::Dense(v) => v[self.current_gid as usize].get_or_insert_with(Default::default),
            Slots::Hash(m) => m
                .get_mut(self.current.as_ref().expect("user started"))
                .expect("slot created in begin_user"),
        }
    }

    /// Per-chunk result, keyed by encoded cohort key.
    pub fn finish(self) -> PartialAgg {
        let cohorts = match self.slots {
            Slots::Dense(v) => v
                .into_iter()
                .enumerate()
                .filter_map(|(gid, acc)| acc.map(|a| (vec![KeyPart::Gid(gid as u32)], *a)))
                .collect(),
            Slots::Hash(m) => m.into_iter().collect(),
        };
        PartialAgg {
            width: self.width,
            cohorts,
        }
    }
}

fn key_part(chunk: &Chunk, col: ColumnId, row: usize) -> KeyPart {
    match chunk.segment(col).expect("cohort column loaded") {
        Segment::Str(s) => KeyPart::Gid(s.global_id_at(row)),
        Segment::Int(s) => KeyPart::Int(s.value_at(row)),
        Segment::Users(_) => unreachable!("user attribute is never a cohort attribute"),
    }
}

impl UserSink for CohortAggregator<'_> {
    fn begin_user(&mut self, ctx: &UserContext<'_>) {
        match &mut self.slots {
            Slots::Dense(_) => {
                let KeyPart::Gid(g) = key_part(ctx.chunk, self.cohort_by[0], ctx.birth_row) else {
                    unreachable!("dense slots are only used for string attributes")
                };
                self.current_gid = g;
            }
            Slots::Hash(m) => {
                self.key_buf.clear();
                self.key_buf
                    .extend(self.cohort_by.iter().map(|c| key_part(ctx.chunk, *c, ctx.birth_row)));
                if !m.contains_key(&self.key_buf) {
                    m.insert(self.key_buf.clone(), CohortAcc::default());
                }
                self.current = Some(self.key_buf.clone());
            }
        }
        self.slot().size += 1;
    }

    #[inline]
    fn row(&mut self, ctx: &UserContext<'_>, row: usize) {
        if ctx.time(row) <= ctx.birth_time {
            return;
        }
        let Some(age) = ctx.age(row, self.unit) else {
            return;
        };
        let age = age.0 as usize;
        let width = self.width;
        let aggregates = self.aggregates;
        let acc = self.slot();
        acc.ensure_age(age, width);
        let base = age * width;
        let bucket = &mut acc.buckets[base..base + width];
        bucket[0].add(0);
        if acc.stamps[age] != ctx.seq {
            acc.stamps[age] = ctx.seq;
            bucket[0].users += 1;
        }
        for (k, a) in aggregates.iter().enumerate() {
            let v = a.column.map_or(0, |c| ctx.chunk.int(c).value_at(row));
            bucket[1 + k].add(v);
        }
    }
}

/// Mergeable aggregation state of a set of chunks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialAgg {
    width: usize,
    cohorts: BTreeMap<Vec<KeyPart>, CohortAcc>,
}

impl PartialAgg {
    pub fn empty(aggregates: usize) -> Self {
        PartialAgg {
            width: 1 + aggregates,
            cohorts: BTreeMap::new(),
        }
    }

    pub fn cohort_count(&self) -> usize {
        self.cohorts.len()
    }

    /// Order-insensitive merge of two states built from disjoint users.
    pub fn merge(mut self, other: PartialAgg) -> PartialAgg {
        let width = self.width.max(other.width);
        self.width = width;
        for (k, v) in other.cohorts {
            self.cohorts.entry(k).or_default().merge(&v, width);
        }
        self
    }

    /// Decodes keys and emits one row per non-empty (cohort, age > 0)
    /// bucket, sorted by cohort key then age.
    pub fn into_rows(
        self,
        aggregates: &[AggSpec],
        cohort_by: &[ColumnId],
        dicts: &[Option<GlobalDict>],
    ) -> Vec<CohortRow> {
        let mut out = Vec::new();
        for (key, acc) in self.cohorts {
            let decoded: Vec<Value> = key
                .iter()
                .zip(cohort_by)
                .map(|(part, col)| match part {
                    KeyPart::Gid(g) => Value::Str(dicts[col.0].as_ref().expect("string column").value(*g).to_string()),
                    KeyPart::Int(v) => Value::Int(*v),
                })
                .collect();
            for (age, bucket) in acc.buckets.chunks(self.width).enumerate().skip(1) {
                if bucket[0].count == 0 {
                    continue;
                }
                let measures = aggregates
                    .iter()
                    .enumerate()
                    .map(|(k, a)| match a.func {
                        AggFunc::UserCount => bucket[0].finish(AggFunc::UserCount),
                        f => bucket[1 + k].finish(f),
                    })
                    .collect();
                out.push(CohortRow {
                    key: decoded.clone(),
                    age: age as u32,
                    size: acc.size,
                    measures,
                });
            }
        }
        out
    }
}
