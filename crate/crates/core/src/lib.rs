// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Cohana: an embedded columnar engine for cohort queries over activity tables.
//!
//! An activity table records one row per user action, keyed by
//! `(user, time, action)`. Cohort queries group users by the attributes of
//! their *birth* tuple (the first time they performed a chosen action) and
//! aggregate their later activity by age.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: schema, tuples, age normalization and predicate evaluation.
//! * [`storage`]: the compressed, user-aligned chunked column format.
//! * [`ingest`]: CSV loading, sorting/partitioning, synthetic data.
//! * [`query`]: the cohort query language (parser, printer, validator).
//! * [`plan`]: logical plans, birth-selection push-down and chunk pruning.
//! * [`exec`]: skip-capable scan and the cohort operators.
//! * [`oracle`]: a naive reference evaluator used for cross-checking.
//! * [`bench`]: the named benchmark query templates and a timing harness.

pub mod bench;
pub mod error;
pub mod exec;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod plan;
pub mod query;
pub mod storage;

pub use error::{Error, Result};
pub use exec::{execute, ExecOptions, QueryOutput, ScanStats};
pub use model::{ActivitySchema, ActivityTuple, ColumnId, ColumnKind, TimeUnit, Value};
pub use query::{parse, validate, BoundQuery, QuerySpec};
pub use storage::ChunkSet;
