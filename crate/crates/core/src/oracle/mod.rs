// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! A deliberately naive evaluator of the cohort operators over plain
//! tuples, written straight from their set definitions. It shares nothing
//! with the engine except age normalization and predicate evaluation, and
//! serves as ground truth in tests and behind `--engine oracle`.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    normalize_age, ActivityTuple, AggFunc, AggSpec, AggValue, BirthInfo, CohortRow, ColumnId, EvalError, Predicate,
    Row, TimeUnit, Value,
};
use crate::plan::{LogicalPlan, Selection};
use crate::query::{BoundQuery, ClauseOrder};

/// Birth of `user` with respect to action `e`: the minimum time over the
/// user's `e` tuples, and the position of the tuple realizing it.
pub fn oracle_birth(table: &[ActivityTuple], user: &str, e: &str) -> BirthInfo {
    table
        .iter()
        .enumerate()
        .filter(|(_, d)| d.user == user && d.action == e)
        .min_by_key(|(_, d)| d.time)
        .map_or(BirthInfo::NEVER, |(i, d)| BirthInfo::at(d.time, i))
}

fn births<'t>(table: &'t [ActivityTuple], e: &str) -> BTreeMap<&'t str, &'t ActivityTuple> {
    let mut out: BTreeMap<&str, &ActivityTuple> = BTreeMap::new();
    for d in table.iter().filter(|d| d.action == e) {
        out.entry(&d.user)
            .and_modify(|b| {
                if d.time < b.time {
                    *b = d;
                }
            })
            .or_insert(d);
    }
    out
}

/// Tuples of users whose birth tuple satisfies `c`.
pub fn birth_select(table: &[ActivityTuple], c: &Predicate, e: &str) -> Result<Vec<ActivityTuple>, EvalError> {
    let births = births(table, e);
    let mut out = Vec::new();
    for d in table {
        if let Some(b) = births.get(d.user.as_str()) {
            if c.eval(*b, Some(*b), None)? {
                out.push(d.clone());
            }
        }
    }
    Ok(out)
}

/// Tuples at a born user's birth time, plus later tuples satisfying `c`.
pub fn age_select(
    table: &[ActivityTuple],
    c: &Predicate,
    e: &str,
    unit: TimeUnit,
) -> Result<Vec<ActivityTuple>, EvalError> {
    let births = births(table, e);
    let mut out = Vec::new();
    for d in table {
        let Some(b) = births.get(d.user.as_str()) else {
            continue;
        };
        let keep =
            d.time == b.time || (d.time > b.time && c.eval(d, Some(*b), normalize_age(d.time - b.time, unit).ok())?);
        if keep {
            out.push(d.clone());
        }
    }
    Ok(out)
}

/// Cohort aggregation: one row per (cohort, age > 0) with the cohort size
/// and the aggregates over that bucket's tuples.
pub fn cohort_agg(
    table: &[ActivityTuple],
    cohort_by: &[ColumnId],
    e: &str,
    aggregates: &[AggSpec],
    unit: TimeUnit,
) -> Vec<CohortRow> {
    let births = births(table, e);
    // D_g restricted to born users: (tuple, cohort key, age).
    let mut dg: Vec<(&ActivityTuple, Vec<Value>, i64)> = Vec::new();
    for d in table {
        if let Some(b) = births.get(d.user.as_str()) {
            let key = cohort_by.iter().map(|c| b.value(*c).to_owned()).collect();
            let age = match normalize_age(d.time - b.time, unit) {
                Ok(a) => a.0 as i64,
                Err(_) => -1,
            };
            dg.push((d, key, age));
        }
    }
    let mut sizes: BTreeMap<&Vec<Value>, BTreeSet<&str>> = BTreeMap::new();
    for (d, key, _) in &dg {
        sizes.entry(key).or_default().insert(&d.user);
    }
    let mut buckets: BTreeMap<(&Vec<Value>, i64), Vec<&ActivityTuple>> = BTreeMap::new();
    for (d, key, age) in &dg {
        if *age > 0 {
            buckets.entry((key, *age)).or_default().push(d);
        }
    }
    buckets
        .into_iter()
        .map(|((key, age), rows)| CohortRow {
            key: key.clone(),
            age: age as u32,
            size: sizes[key].len() as u64,
            measures: aggregates.iter().map(|a| aggregate(a, &rows)).collect(),
        })
        .collect()
}

fn aggregate(a: &AggSpec, rows: &[&ActivityTuple]) -> AggValue {
    let values = || {
        rows.iter()
            .map(|d| match d.value(a.column.expect("measure aggregate")) {
                crate::model::ValueRef::Int(v) => v as i128,
                crate::model::ValueRef::Str(_) => unreachable!("measures are integers"),
            })
    };
    match a.func {
        AggFunc::Sum => AggValue::Int(values().sum()),
        AggFunc::Avg => AggValue::Float(values().sum::<i128>() as f64 / rows.len() as f64),
        AggFunc::Count => AggValue::Int(rows.len() as i128),
        AggFunc::Min => AggValue::Int(values().min().expect("non-empty bucket")),
        AggFunc::Max => AggValue::Int(values().max().expect("non-empty bucket")),
        AggFunc::UserCount => {
            AggValue::Int(rows.iter().map(|d| d.user.as_str()).collect::<BTreeSet<_>>().len() as i128)
        }
    }
}

/// Applies a selection chain in order, each operator computing births
/// from its own input.
pub fn apply_selections(
    table: &[ActivityTuple],
    ops: &[Selection],
    e: &str,
    unit: TimeUnit,
) -> Result<Vec<ActivityTuple>, EvalError> {
    let mut d: Vec<ActivityTuple> = table.to_vec();
    d.sort_by(ActivityTuple::cmp_key);
    for op in ops {
        d = match op {
            Selection::Birth(c) => birth_select(&d, c, e)?,
            Selection::Age(c) => age_select(&d, c, e, unit)?,
        };
    }
    Ok(d)
}

pub fn oracle_eval_plan(plan: &LogicalPlan, table: &[ActivityTuple]) -> Result<Vec<CohortRow>, EvalError> {
    let d = apply_selections(table, &plan.ops, &plan.birth_action, plan.age_unit)?;
    Ok(cohort_agg(
        &d,
        &plan.cohort_by,
        &plan.birth_action,
        &plan.aggregates,
        plan.age_unit,
    ))
}

/// Evaluates a bound query; the two clauses apply in the order written.
pub fn oracle_eval(q: &BoundQuery, table: &[ActivityTuple]) -> Result<Vec<CohortRow>, EvalError> {
    let birth = q.birth_predicate.clone().map(Selection::Birth);
    let age = q.age_predicate.clone().map(Selection::Age);
    let ops: Vec<Selection> = match q.spec.clause_order {
        ClauseOrder::BirthFirst => birth.into_iter().chain(age).collect(),
        ClauseOrder::AgeFirst => age.into_iter().chain(birth).collect(),
    };
    let d = apply_selections(table, &ops, &q.birth_action, q.age_unit)?;
    Ok(cohort_agg(&d, &q.cohort_by, &q.birth_action, &q.aggregates, q.age_unit))
}
