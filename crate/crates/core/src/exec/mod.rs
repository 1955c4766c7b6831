// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Query execution over compressed chunks.
//!
//! Each chunk is processed independently: a [`ScanCursor`] walks the chunk
//! user by user, the selection chain runs per user against that user's
//! birth tuple, and a [`CohortAggregator`] folds the surviving rows into
//! per-(cohort, age) buckets. Chunk results are merged at the end; this is
//! sound because a user's rows never span two chunks.

mod agg;
mod operators;
mod output;
mod scan;

use rayon::prelude::*;

pub use agg::{CohortAcc, CohortAggregator, KeyPart, PartialAgg};
pub use operators::{get_birth_tuple, run_selections, RowCollector, UserContext, UserSink};
pub use output::QueryOutput;
pub use scan::{ScanCursor, ScanStats};

use crate::error::{Error, Result};
use crate::model::{ActivitySchema, ActivityTuple, ColumnId, Row};
use crate::plan::{all_chunks, build_plan, optimize, prune_chunks, ChunkPlan, LogicalPlan};
use crate::query::{parse, validate};
use crate::storage::ChunkSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    /// Worker threads for chunk-parallel execution; `None` uses every core.
    pub threads: Option<usize>,
    /// Skip chunks that cannot contribute (see [`prune_chunks`]).
    pub prune: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            threads: None,
            prune: true,
        }
    }
}

impl ExecOptions {
    pub fn single_threaded() -> Self {
        ExecOptions {
            threads: Some(1),
            ..Self::default()
        }
    }
}

/// Parses, validates, plans and optimizes query text against `schema`.
pub fn prepare(text: &str, schema: &ActivitySchema) -> Result<LogicalPlan> {
    let spec = parse(text)?;
    let bound = validate(&spec, schema)?;
    Ok(optimize(build_plan(&bound)))
}

/// Runs query text end to end.
pub fn run_query(text: &str, chunkset: &ChunkSet, opts: &ExecOptions) -> Result<QueryOutput> {
    let plan = prepare(text, chunkset.schema())?;
    execute(&plan, chunkset, opts)
}

/// Executes `plan` as given; callers wanting push-down apply
/// [`optimize`] first.
pub fn execute(plan: &LogicalPlan, chunkset: &ChunkSet, opts: &ExecOptions) -> Result<QueryOutput> {
    let cp = if opts.prune {
        prune_chunks(plan.clone(), chunkset)
    } else {
        all_chunks(plan.clone(), chunkset)
    };
    execute_chunks(&cp, chunkset, opts)
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn run_chunk(
    cp: &ChunkPlan,
    chunkset: &ChunkSet,
    index: usize,
    columns: &[ColumnId],
) -> Result<(PartialAgg, ScanStats)> {
    let plan = &cp.plan;
    let gid = cp
        .birth_action_id
        .expect("chunks are only planned for a known birth action");
    let chunk = chunkset.load_chunk(index, columns)?;
    let dicts = chunkset.dicts();
    let mut agg = CohortAggregator::new(&plan.cohort_by, &plan.aggregates, plan.age_unit, dicts);
    let mut stats = run_selections(&chunk, dicts, &plan.ops, gid, plan.age_unit, &mut agg)?;
    stats.chunks_opened = 1;
    Ok((agg.finish(), stats))
}

/// Executes a pruned plan over its chunks and merges the partial results.
pub fn execute_chunks(cp: &ChunkPlan, chunkset: &ChunkSet, opts: &ExecOptions) -> Result<QueryOutput> {
    let plan = &cp.plan;
    let columns = plan.columns();
    let empty = || (PartialAgg::empty(plan.aggregates.len()), ScanStats::default());
    let combine = |(a, mut sa): (PartialAgg, ScanStats), (b, sb): (PartialAgg, ScanStats)| {
        sa.merge(&sb);
        (a.merge(b), sa)
    };
    let (state, stats) = if cp.birth_action_id.is_none() || cp.chunks.is_empty() {
        empty()
    } else if opts.threads == Some(1) {
        let mut acc = empty();
        for &i in &cp.chunks {
            acc = combine(acc, run_chunk(cp, chunkset, i, &columns)?);
        }
        acc
    } else {
        in_pool(opts.threads, || {
            cp.chunks
                .par_iter()
                .map(|&i| run_chunk(cp, chunkset, i, &columns))
                .try_reduce(empty, |a, b| Ok(combine(a, b)))
        })??
    };
    let rows = state.into_rows(&plan.aggregates, &plan.cohort_by, chunkset.dicts());
    Ok(QueryOutput::new(plan.output.clone(), rows, stats))
}

/// Tuples that survive the plan's selection chain, in storage order.
/// Mostly useful for inspecting what the selections do.
pub fn select_tuples(plan: &LogicalPlan, chunkset: &ChunkSet) -> Result<(Vec<ActivityTuple>, ScanStats)> {
    let schema = chunkset.schema();
    let all: Vec<ColumnId> = schema.columns().map(|c| c.id).collect();
    let mut out = Vec::new();
    let mut stats = ScanStats::default();
    let Some(gid) = chunkset.action_global_id(&plan.birth_action) else {
        return Ok((out, stats));
    };
    let nd = schema.dimensions().len();
    for i in 0..chunkset.chunk_count() {
        let chunk = chunkset.load_chunk(i, &all)?;
        let mut rows = RowCollector::default();
        let s = run_selections(&chunk, chunkset.dicts(), &plan.ops, gid, plan.age_unit, &mut rows)?;
        stats.merge(&s);
        stats.chunks_opened += 1;
        let runs = chunk.users();
        let mut run = 0;
        for r in rows.rows {
            while runs[run].end() as usize <= r {
                run += 1;
            }
            let v = chunk.row(chunkset.dicts(), runs[run].user, r);
            let int = |c: ColumnId| match v.value(c) {
                crate::model::ValueRef::Int(x) => x,
                crate::model::ValueRef::Str(_) => unreachable!("integer column"),
            };
            out.push(ActivityTuple {
                user: v.value(ColumnId::USER).to_string(),
                time: int(ColumnId::TIME),
                action: v.value(ColumnId::ACTION).to_string(),
                dims: (0..nd).map(|d| v.value(ColumnId(3 + d)).to_owned()).collect(),
                measures: (0..schema.measures().len())
                    .map(|m| int(ColumnId(3 + nd + m)))
                    .collect(),
            });
        }
    }
    Ok((out, stats))
}
