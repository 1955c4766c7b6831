// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Shared domain types and the pure semantic functions used by both the
//! engine and the reference oracle.

mod cohort;
mod predicate;
mod schema;
mod time;
mod tuple;
mod value;

pub use cohort::{Accumulator, AggFunc, AggSpec, AggValue, CohortRow};
pub use predicate::{eval_predicate, CmpOp, EvalError, Operand, Predicate, Row};
pub use schema::{ActivitySchema, ColumnDef, ColumnId, ColumnKind, ColumnRole, SchemaError};
pub use time::{format_timestamp, normalize_age, parse_day, parse_timestamp, Age, NegativeDelta, TimeUnit, Timestamp};
pub use tuple::{ActivityTuple, BirthInfo};
pub use value::{Value, ValueRef};
