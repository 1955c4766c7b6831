// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Logical plans: a linear chain of cohort selections over a table scan,
//! topped by cohort aggregation.

use std::fmt::Write as _;

use crate::model::{ActivitySchema, AggSpec, CmpOp, ColumnId, ColumnKind, Operand, Predicate, TimeUnit, Value};
use crate::query::{BoundQuery, ClauseOrder, OutputColumn};
use crate::storage::ChunkSet;

/// A cohort selection. All selections of a plan share its birth action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    /// Keep users whose birth tuple satisfies the predicate.
    Birth(Predicate),
    /// Keep birth-time tuples and later tuples satisfying the predicate.
    Age(Predicate),
}

impl Selection {
    pub fn is_birth(&self) -> bool {
        matches!(self, Selection::Birth(_))
    }

    pub fn predicate(&self) -> &Predicate {
        match self {
            Selection::Birth(p) | Selection::Age(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalPlan {
    pub birth_action: String,
    /// Applied in order; `ops[0]` sits directly on the scan.
    pub ops: Vec<Selection>,
    pub cohort_by: Vec<ColumnId>,
    pub aggregates: Vec<AggSpec>,
    pub age_unit: TimeUnit,
    pub output: Vec<OutputColumn>,
}

/// Builds the unoptimized plan. Selections appear in the order their
/// clauses were written.
pub fn build_plan(q: &BoundQuery) -> LogicalPlan {
    let birth = q.birth_predicate.clone().map(Selection::Birth);
    let age = q.age_predicate.clone().map(Selection::Age);
    let ops = match q.spec.clause_order {
        ClauseOrder::BirthFirst => birth.into_iter().chain(age).collect(),
        ClauseOrder::AgeFirst => age.into_iter().chain(birth).collect(),
    };
    LogicalPlan {
        birth_action: q.birth_action.clone(),
        ops,
        cohort_by: q.cohort_by.clone(),
        aggregates: q.aggregates.clone(),
        age_unit: q.age_unit,
        output: q.output.clone(),
    }
}

/// Moves every birth selection below every age selection, keeping the
/// relative order within each kind.
pub fn push_down_birth(mut plan: LogicalPlan) -> LogicalPlan {
    let (births, ages): (Vec<_>, Vec<_>) = plan.ops.into_iter().partition(Selection::is_birth);
    plan.ops = births.into_iter().chain(ages).collect();
    plan
}

pub fn optimize(plan: LogicalPlan) -> LogicalPlan {
    push_down_birth(plan)
}

impl LogicalPlan {
    /// True when no age selection runs before a birth selection.
    pub fn is_pushed_down(&self) -> bool {
        let first_age = self.ops.iter().position(|s| !s.is_birth()).unwrap_or(self.ops.len());
        self.ops[first_age..].iter().all(|s| !s.is_birth())
    }

    /// Every column the executor reads.
    pub fn columns(&self) -> Vec<ColumnId> {
        let mut cols = vec![ColumnId::USER, ColumnId::TIME, ColumnId::ACTION];
        for s in &self.ops {
            cols.extend(s.predicate().row_columns());
            cols.extend(s.predicate().birth_columns());
        }
        cols.extend(&self.cohort_by);
        cols.extend(self.aggregates.iter().filter_map(|a| a.column));
        cols.sort();
        cols.dedup();
        cols
    }

    /// Operator tree, root first.
    pub fn explain(&self, schema: &ActivitySchema) -> String {
        let mut out = String::new();
        let cohort: Vec<&str> = self.cohort_by.iter().map(|c| schema.name(*c)).collect();
        let aggs: Vec<String> = self
            .aggregates
            .iter()
            .map(|a| match a.column {
                Some(c) => format!("{}({})", a.func, schema.name(c)),
                None => format!("{}()", a.func),
            })
            .collect();
        let _ = writeln!(
            out,
            "CohortAgg cohort=[{}] birth={:?} aggregates=[{}] unit={}",
            cohort.join(", "),
            self.birth_action,
            aggs.join(", "),
            self.age_unit
        );
        let mut depth = 1;
        for s in self.ops.iter().rev() {
            let (name, p) = match s {
                Selection::Birth(p) => ("BirthSelect", p),
                Selection::Age(p) => ("AgeSelect", p),
            };
            let _ = writeln!(out, "{}{name} {}", "  ".repeat(depth), p.display(schema));
            depth += 1;
        }
        let _ = writeln!(out, "{}TableScan", "  ".repeat(depth));
        out
    }
}

/// The chunks left to scan after pruning, with the plan to run on them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkPlan {
    pub plan: LogicalPlan,
    pub chunks: Vec<usize>,
    /// Global dictionary id of the birth action; `None` when no tuple in the
    /// table has that action, in which case the result is empty.
    pub birth_action_id: Option<u32>,
}

/// The range `[lo, hi]` implied for an integer column by one conjunct, if
/// it has that shape.
fn conjunct_range(p: &Predicate, schema: &ActivitySchema) -> Option<(ColumnId, i64, i64)> {
    let int_col = |o: &Operand| match o {
        Operand::Column(c) if schema.kind(*c) == ColumnKind::Integer => Some(*c),
        _ => None,
    };
    let int_lit = |o: &Operand| match o {
        Operand::Literal(Value::Int(v)) => Some(*v),
        _ => None,
    };
    match p {
        Predicate::Compare { left, op, right } => {
            let (c, v, op) = match (int_col(left), int_lit(right), int_col(right), int_lit(left)) {
                (Some(c), Some(v), _, _) => (c, v, *op),
                (_, _, Some(c), Some(v)) => (c, v, op.flipped()),
                _ => return None,
            };
            let (lo, hi) = match op {
                CmpOp::Eq => (v, v),
                CmpOp::Lt => (i64::MIN, v.checked_sub(1)?),
                CmpOp::Le => (i64::MIN, v),
                CmpOp::Gt => (v.checked_add(1)?, i64::MAX),
                CmpOp::Ge => (v, i64::MAX),
                CmpOp::Ne => return None,
            };
            Some((c, lo, hi))
        }
        Predicate::Between {
            operand,
            low: Value::Int(lo),
            high: Value::Int(hi),
        } => Some((int_col(operand)?, *lo, *hi)),
        Predicate::InList { operand, list } => {
            let c = int_col(operand)?;
            let ints: Vec<i64> = list
                .iter()
                .map(|v| match v {
                    Value::Int(i) => Some(*i),
                    Value::Str(_) => None,
                })
                .collect::<Option<_>>()?;
            Some((c, *ints.iter().min()?, *ints.iter().max()?))
        }
        _ => None,
    }
}

/// Drops chunks that cannot contain a birth-qualified user: chunks without
/// the birth action, and chunks whose value range misses a range conjunct of
/// a birth predicate on the time attribute or an integer dimension.
pub fn prune_chunks(plan: LogicalPlan, chunkset: &ChunkSet) -> ChunkPlan {
    let schema = chunkset.schema();
    let Some(gid) = chunkset.action_global_id(&plan.birth_action) else {
        return ChunkPlan {
            plan,
            chunks: Vec::new(),
            birth_action_id: None,
        };
    };
    let ranges: Vec<(ColumnId, i64, i64)> = plan
        .ops
        .iter()
        .filter_map(|s| match s {
            Selection::Birth(p) => Some(p),
            Selection::Age(_) => None,
        })
        .flat_map(|p| p.conjuncts())
        .filter_map(|c| conjunct_range(c, schema))
        .filter(|(c, _, _)| schema.role(*c) != crate::model::ColumnRole::Measure)
        .collect();
    let chunks = (0..chunkset.chunk_count())
        .filter(|&i| chunkset.chunk_has_action(i, gid))
        .filter(|&i| {
            ranges
                .iter()
                .all(|&(c, lo, hi)| lo <= hi && chunkset.chunk_range_overlaps(i, c, lo, hi))
        })
        .collect();
    ChunkPlan {
        plan,
        chunks,
        birth_action_id: Some(gid),
    }
}

/// Every chunk, for running without pruning.
pub fn all_chunks(plan: LogicalPlan, chunkset: &ChunkSet) -> ChunkPlan {
    ChunkPlan {
        birth_action_id: chunkset.action_global_id(&plan.birth_action),
        chunks: (0..chunkset.chunk_count()).collect(),
        plan,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::sample::{sample_schema, sample_tuples};
    use crate::ingest::{build_chunkset, game_schema};
    use crate::query::{parse, validate};

    fn plan_of(q: &str, schema: &ActivitySchema) -> LogicalPlan {
        build_plan(&validate(&parse(q).unwrap(), schema).unwrap())
    }

    const Q1: &str = r#"SELECT country, COHORTSIZE, AGE, Sum(gold) AS spent FROM D
        BIRTH FROM action = "launch" AND role = "dwarf"
        AGE ACTIVITIES IN action = "shop" COHORT BY country"#;

    #[test]
    fn running_example_plan_shape() {
        let p = plan_of(Q1, &sample_schema());
        assert!(matches!(p.ops.as_slice(), [Selection::Birth(_), Selection::Age(_)]));
        assert!(p.is_pushed_down());
        let text = p.explain(&sample_schema());
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("CohortAgg cohort=[country] birth=\"launch\" aggregates=[Sum(gold)]"));
        assert_eq!(lines[1], "  AgeSelect action = \"shop\"");
        assert_eq!(lines[2], "    BirthSelect role = \"dwarf\"");
        assert_eq!(lines[3], "      TableScan");
    }

    #[test]
    fn push_down_reorders_stably() {
        let p = plan_of(
            r#"SELECT AGE FROM D AGE ACTIVITIES IN action = "shop" BIRTH FROM action = "launch" AND role = "dwarf" COHORT BY country"#,
            &sample_schema(),
        );
        assert!(matches!(p.ops.as_slice(), [Selection::Age(_), Selection::Birth(_)]));
        assert!(!p.is_pushed_down());
        let pushed = push_down_birth(p.clone());
        assert!(matches!(
            pushed.ops.as_slice(),
            [Selection::Birth(_), Selection::Age(_)]
        ));
        assert_eq!(push_down_birth(pushed.clone()), pushed);

        let mut chain = p;
        let b = |s: &str| Selection::Birth(Predicate::Const(s == "t"));
        let a = |s: &str| Selection::Age(Predicate::Const(s == "t"));
        chain.ops = vec![a("t"), b("t"), a("f"), b("f")];
        assert_eq!(push_down_birth(chain).ops, vec![b("t"), b("f"), a("t"), a("f")]);
    }

    #[test]
    fn no_predicates() {
        let p = plan_of(
            r#"SELECT AGE FROM D BIRTH FROM action = "launch" COHORT BY country"#,
            &sample_schema(),
        );
        assert!(p.ops.is_empty());
        assert_eq!(p.explain(&sample_schema()).lines().nth(1), Some("  TableScan"));
    }

    #[test]
    fn prunes_by_action_and_time() {
        let cs = build_chunkset(&sample_schema(), "D", sample_tuples(), 1).unwrap();
        assert_eq!(cs.chunk_count(), 3);
        let p = plan_of(
            r#"SELECT AGE FROM D BIRTH FROM action = "shop" COHORT BY country"#,
            &sample_schema(),
        );
        assert_eq!(prune_chunks(p, &cs).chunks, vec![0, 1]);

        let p = plan_of(
            r#"SELECT AGE FROM D BIRTH FROM action = "launch" AND time > "2013-05-22" COHORT BY country"#,
            &sample_schema(),
        );
        assert_eq!(prune_chunks(p, &cs).chunks, vec![0, 1]);

        let p = plan_of(
            r#"SELECT AGE FROM D BIRTH FROM action = "launch" AND "2013-05-20" > time COHORT BY country"#,
            &sample_schema(),
        );
        assert_eq!(prune_chunks(p, &cs).chunks, vec![0]);

        let p = plan_of(
            r#"SELECT AGE FROM D BIRTH FROM action = "launch" AND time BETWEEN "2013-05-19" AND "2013-05-19" COHORT BY country"#,
            &sample_schema(),
        );
        assert_eq!(prune_chunks(p, &cs).chunks, vec![0]);

        let p = plan_of(
            r#"SELECT AGE FROM D BIRTH FROM action = "teleport" COHORT BY country"#,
            &sample_schema(),
        );
        let cp = prune_chunks(p, &cs);
        assert!(cp.chunks.is_empty());
        assert_eq!(cp.birth_action_id, None);
    }

    #[test]
    fn columns_cover_every_reference() {
        let q = r#"SELECT city, COHORTSIZE, AGE, Avg(gold) FROM D BIRTH FROM action = "shop"
            AGE ACTIVITIES IN country = Birth(country) COHORT BY city"#;
        let s = game_schema();
        let cols = plan_of(q, &s).columns();
        for name in ["player", "time", "action", "country", "city", "gold"] {
            assert!(cols.contains(&s.lookup(name).unwrap()), "{name}");
        }
        assert!(!cols.contains(&s.lookup("role").unwrap()));
    }
}
