// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Random activity tables and cohort plans for differential tests.

#![allow(dead_code)]

pub mod workload;

use cohana::model::{
    ActivitySchema, ActivityTuple, AggFunc, AggSpec, CmpOp, CohortRow, ColumnId, ColumnKind, Operand, Predicate,
    TimeUnit, Value,
};
use cohana::plan::{LogicalPlan, Selection};
use cohana::query::{OutputColumn, OutputKind};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const ACTIONS: [&str; 5] = ["launch", "shop", "fight", "chat", "achievement"];
pub const ROLES: [&str; 4] = ["dwarf", "assassin", "wizard", "bandit"];
pub const COUNTRIES: [&str; 4] = ["Australia", "China", "United States", "Germany"];
pub const T0: i64 = 1_368_957_600;

pub fn schema() -> ActivitySchema {
    ActivitySchema::new(
        "player",
        "time",
        "action",
        vec![
            ("role".into(), ColumnKind::String),
            ("country".into(), ColumnKind::String),
            ("level".into(), ColumnKind::Integer),
        ],
        vec!["gold".into(), "session".into()],
    )
    .unwrap()
}

pub const ROLE: ColumnId = ColumnId(3);
pub const COUNTRY: ColumnId = ColumnId(4);
pub const LEVEL: ColumnId = ColumnId(5);
pub const GOLD: ColumnId = ColumnId(6);
pub const SESSION: ColumnId = ColumnId(7);

/// Up to `max_tuples` tuples over up to `max_users` users, spread over a few
/// weeks with occasional same-second ties between actions. Primary keys are
/// unique; order is shuffled.
pub fn random_table<R: Rng>(rng: &mut R, max_tuples: usize, max_users: usize) -> Vec<ActivityTuple> {
    let users = rng.random_range(1..=max_users);
    let n = rng.random_range(0..=max_tuples);
    let span = rng.random_range(1..=40) * 86_400;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    let mut last: Option<(String, i64)> = None;
    for _ in 0..n {
        let (user, time) = match &last {
            Some((u, t)) if rng.random_bool(0.15) => (u.clone(), *t),
            _ => (
                format!("u{:02}", rng.random_range(0..users)),
                T0 + rng.random_range(0..span),
            ),
        };
        let action = ACTIONS.choose(rng).unwrap().to_string();
        if !seen.insert((user.clone(), time, action.clone())) {
            continue;
        }
        last = Some((user.clone(), time));
        out.push(ActivityTuple {
            user,
            time,
            action,
            dims: vec![
                Value::from(*ROLES.choose(rng).unwrap()),
                Value::from(*COUNTRIES.choose(rng).unwrap()),
                Value::Int(rng.random_range(1..=5)),
            ],
            measures: vec![rng.random_range(-20..=100), rng.random_range(0..=3600)],
        });
    }
    out
}

fn random_literal<R: Rng>(rng: &mut R, col: ColumnId, tuples: &[ActivityTuple]) -> Value {
    // Mostly values present in the data so predicates are selective.
    if let Some(t) = tuples.choose(rng) {
        if rng.random_bool(0.8) {
            return match col.0 {
                0 => Value::Str(t.user.clone()),
                1 => Value::Int(t.time),
                2 => Value::Str(t.action.clone()),
                i if i < 6 => t.dims[i - 3].clone(),
                i => Value::Int(t.measures[i - 6]),
            };
        }
    }
    match col.0 {
        0 => Value::Str(format!("u{:02}", rng.random_range(0..60))),
        1 => Value::Int(T0 + rng.random_range(-86_400..40 * 86_400)),
        2 => Value::from(*ACTIONS.choose(rng).unwrap()),
        3 => Value::from(*ROLES.choose(rng).unwrap()),
        4 => Value::from(*COUNTRIES.choose(rng).unwrap()),
        5 => Value::Int(rng.random_range(0..=6)),
        _ => Value::Int(rng.random_range(-20..=100)),
    }
}

fn random_op<R: Rng>(rng: &mut R) -> CmpOp {
    *[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge]
        .choose(rng)
        .unwrap()
}

/// A random atom. Birth-clause atoms never use `Birth()` or `AGE`.
fn random_atom<R: Rng>(rng: &mut R, tuples: &[ActivityTuple], age_clause: bool) -> Predicate {
    let col = ColumnId(rng.random_range(0..8));
    let shape = rng.random_range(0..if age_clause { 7 } else { 4 });
    match shape {
        0 | 1 => Predicate::Compare {
            left: Operand::Column(col),
            op: random_op(rng),
            right: Operand::Literal(random_literal(rng, col, tuples)),
        },
        2 => Predicate::InList {
            operand: Operand::Column(col),
            list: (0..rng.random_range(1..=3))
                .map(|_| random_literal(rng, col, tuples))
                .collect(),
        },
        3 => {
            let (a, b) = (random_literal(rng, col, tuples), random_literal(rng, col, tuples));
            let (low, high) = if a <= b { (a, b) } else { (b, a) };
            Predicate::Between {
                operand: Operand::Column(col),
                low,
                high,
            }
        }
        4 => Predicate::Compare {
            left: Operand::Column(col),
            op: *[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Ge].choose(rng).unwrap(),
            right: Operand::Birth(col),
        },
        5 => Predicate::Compare {
            left: Operand::Age,
            op: random_op(rng),
            right: Operand::Literal(Value::Int(rng.random_range(0..8))),
        },
        _ => Predicate::Between {
            operand: Operand::Age,
            low: Value::Int(rng.random_range(0..4)),
            high: Value::Int(rng.random_range(2..10)),
        },
    }
}

pub fn random_predicate<R: Rng>(rng: &mut R, tuples: &[ActivityTuple], age_clause: bool, depth: u32) -> Predicate {
    if depth == 0 || rng.random_bool(0.5) {
        return random_atom(rng, tuples, age_clause);
    }
    match rng.random_range(0..3) {
        0 => random_predicate(rng, tuples, age_clause, depth - 1).and(random_predicate(
            rng,
            tuples,
            age_clause,
            depth - 1,
        )),
        1 => random_predicate(rng, tuples, age_clause, depth - 1).or(random_predicate(
            rng,
            tuples,
            age_clause,
            depth - 1,
        )),
        _ => random_predicate(rng, tuples, age_clause, depth - 1).not(),
    }
}

pub fn random_selection<R: Rng>(rng: &mut R, tuples: &[ActivityTuple]) -> Selection {
    if rng.random_bool(0.5) {
        Selection::Birth(random_predicate(rng, tuples, false, 2))
    } else {
        Selection::Age(random_predicate(rng, tuples, true, 2))
    }
}

/// A random plan with `ops` selections in random order, every aggregate
/// function available, and one or two cohort attributes.
pub fn random_plan<R: Rng>(rng: &mut R, tuples: &[ActivityTuple], ops: usize) -> LogicalPlan {
    let birth_action = if rng.random_bool(0.95) {
        (*ACTIONS[..4].choose(rng).unwrap()).to_string()
    } else {
        "teleport".to_string()
    };
    let candidates = [ColumnId::TIME, ROLE, COUNTRY, LEVEL];
    let mut cohort_by = vec![*candidates.choose(rng).unwrap()];
    if rng.random_bool(0.3) {
        let c = *candidates.choose(rng).unwrap();
        if !cohort_by.contains(&c) {
            cohort_by.push(c);
        }
    }
    let mut funcs: Vec<AggFunc> = AggFunc::ALL.to_vec();
    funcs.retain(|_| rng.random_bool(0.5));
    if funcs.is_empty() {
        funcs.push(*AggFunc::ALL.choose(rng).unwrap());
    }
    let aggregates: Vec<AggSpec> = funcs
        .into_iter()
        .map(|func| AggSpec {
            func,
            column: func
                .needs_measure()
                .then(|| if rng.random_bool(0.5) { GOLD } else { SESSION }),
        })
        .collect();
    let mut output: Vec<OutputColumn> = (0..cohort_by.len())
        .map(|i| OutputColumn {
            name: format!("k{i}"),
            kind: OutputKind::Cohort(i),
        })
        .collect();
    output.push(OutputColumn {
        name: "AGE".into(),
        kind: OutputKind::Age,
    });
    output.extend((0..aggregates.len()).map(|i| OutputColumn {
        name: format!("m{i}"),
        kind: OutputKind::Agg(i),
    }));
    LogicalPlan {
        birth_action,
        ops: (0..ops).map(|_| random_selection(rng, tuples)).collect(),
        cohort_by,
        aggregates,
        age_unit: *[TimeUnit::Day, TimeUnit::Day, TimeUnit::Week, TimeUnit::Month]
            .choose(rng)
            .unwrap(),
        output,
    }
}

/// Row-set equality with a relative tolerance on Avg.
pub fn same_rows(a: &[CohortRow], b: &[CohortRow]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, 1e-9))
}

pub fn describe_mismatch(engine: &[CohortRow], oracle: &[CohortRow]) -> String {
    format!(
        "engine ({} rows): {:?}\noracle ({} rows): {:?}",
        engine.len(),
        engine.iter().take(8).collect::<Vec<_>>(),
        oracle.len(),
        oracle.iter().take(8).collect::<Vec<_>>()
    )
}

use cohana::exec::{execute, ExecOptions};
use cohana::ingest::build_chunkset;
use cohana::oracle::oracle_eval_plan;
use cohana::plan::optimize;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn opts() -> ExecOptions {
    ExecOptions {
        threads: Some(1),
        prune: true,
    }
}

/// One differential trial: a random table and plan, run by the engine
/// (after push-down) and by the oracle (as written).
pub fn oracle_trial(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let tuples = random_table(&mut r, 1000, 50);
    let ops = r.random_range(0..=3);
    let plan = random_plan(&mut r, &tuples, ops);
    let chunk_size = *[4usize, 16, 64, 262_144].choose(&mut r).unwrap();
    let cs = build_chunkset(&schema(), "D", tuples.clone(), chunk_size).map_err(|e| e.to_string())?;
    let engine = execute(&optimize(plan.clone()), &cs, &opts()).map_err(|e| e.to_string())?;
    let oracle = oracle_eval_plan(&plan, &tuples).map_err(|e| e.to_string())?;
    if same_rows(&engine.rows, &oracle) {
        Ok(())
    } else {
        Err(format!(
            "seed {seed}: {plan:?}\n{}",
            describe_mismatch(&engine.rows, &oracle)
        ))
    }
}

/// Push-down trial: a random interleaving of birth and age selections run
/// as written and after push-down; both must match the oracle.
pub fn pushdown_trial(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let tuples = random_table(&mut r, 600, 40);
    let mut plan = random_plan(&mut r, &tuples, 0);
    let n = r.random_range(2..=5);
    plan.ops = (0..n).map(|_| random_selection(&mut r, &tuples)).collect();
    // At least one age selection ahead of a birth selection.
    plan.ops[0] = Selection::Age(random_predicate(&mut r, &tuples, true, 2));
    plan.ops[n - 1] = Selection::Birth(random_predicate(&mut r, &tuples, false, 2));
    let pushed = optimize(plan.clone());
    if !pushed.is_pushed_down() || plan.is_pushed_down() {
        return Err(format!("seed {seed}: push-down did not normalize the chain"));
    }
    let cs = build_chunkset(&schema(), "D", tuples.clone(), 64).map_err(|e| e.to_string())?;
    let raw = execute(&plan, &cs, &opts()).map_err(|e| e.to_string())?;
    let opt = execute(&pushed, &cs, &opts()).map_err(|e| e.to_string())?;
    let oracle_raw = oracle_eval_plan(&plan, &tuples).map_err(|e| e.to_string())?;
    let oracle_pushed = oracle_eval_plan(&pushed, &tuples).map_err(|e| e.to_string())?;
    if raw.rows != opt.rows {
        return Err(format!(
            "seed {seed}: un-pushed and pushed plans differ\n{}",
            describe_mismatch(&raw.rows, &opt.rows)
        ));
    }
    if !same_rows(&raw.rows, &oracle_raw) || !same_rows(&opt.rows, &oracle_pushed) {
        return Err(format!(
            "seed {seed}: engine differs from oracle\n{}",
            describe_mismatch(&raw.rows, &oracle_raw)
        ));
    }
    if opt.stats.rows_decoded > raw.stats.rows_decoded {
        return Err(format!("seed {seed}: push-down decoded more rows"));
    }
    Ok(())
}

/// Partition trial: identical rows for chunk sizes 4, 64 and 262144.
pub fn partition_trial(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let tuples = random_table(&mut r, 1000, 50);
    let ops = r.random_range(0..=3);
    let plan = optimize(random_plan(&mut r, &tuples, ops));
    let mut results = Vec::new();
    for size in [4usize, 64, 262_144] {
        let cs = build_chunkset(&schema(), "D", tuples.clone(), size).map_err(|e| e.to_string())?;
        results.push(
            execute(&plan, &cs, &ExecOptions::default())
                .map_err(|e| e.to_string())?
                .rows,
        );
    }
    if results[0] == results[1] && results[1] == results[2] {
        Ok(())
    } else {
        Err(format!(
            "seed {seed}: results depend on chunk size\n{}",
            describe_mismatch(&results[0], &results[2])
        ))
    }
}

/// The selection examples on the ten-row sample table, checked against both
/// the engine and the oracle. Tuple numbers are 1-based.
pub fn sample_selection_check() -> Result<(), String> {
    use cohana::exec::{prepare, select_tuples};
    use cohana::ingest::sample::{sample_schema, sample_tuples};
    use cohana::oracle::{age_select, birth_select, oracle_birth};

    let all = sample_tuples();
    let numbers = |ts: &[cohana::ActivityTuple]| -> Vec<usize> {
        let mut v: Vec<usize> = ts
            .iter()
            .map(|t| all.iter().position(|x| x == t).unwrap() + 1)
            .collect();
        v.sort_unstable();
        v
    };
    let cases: [(&str, Vec<usize>); 3] = [
        (
            r#"BIRTH FROM action = "launch" AND country = "Australia""#,
            vec![1, 2, 3, 4, 5],
        ),
        (
            r#"BIRTH FROM action = "shop" AGE ACTIVITIES IN action = "shop" AND country <> "China""#,
            vec![2, 3, 4, 7, 8],
        ),
        (
            r#"BIRTH FROM action = "shop" AGE ACTIVITIES IN role = Birth(role)"#,
            vec![2, 3, 7, 8],
        ),
    ];
    for size in [1usize, 4, 262_144] {
        let cs = build_chunkset(&sample_schema(), "GameActions", all.clone(), size).map_err(|e| e.to_string())?;
        for (clauses, want) in &cases {
            let text =
                format!("SELECT country, COHORTSIZE, AGE, Sum(gold) FROM GameActions {clauses} COHORT BY country");
            let plan = prepare(&text, cs.schema()).map_err(|e| e.to_string())?;
            let (engine, _) = select_tuples(&plan, &cs).map_err(|e| e.to_string())?;
            if numbers(&engine) != *want {
                return Err(format!(
                    "engine, chunk size {size}: {clauses} selected {:?}, want {want:?}",
                    numbers(&engine)
                ));
            }
            let op = &plan.ops[0];
            let oracle = if op.is_birth() {
                birth_select(&all, op.predicate(), &plan.birth_action)
            } else {
                age_select(&all, op.predicate(), &plan.birth_action, plan.age_unit)
            }
            .map_err(|e| e.to_string())?;
            if numbers(&oracle) != *want {
                return Err(format!(
                    "oracle: {clauses} selected {:?}, want {want:?}",
                    numbers(&oracle)
                ));
            }
        }
    }
    if !oracle_birth(&all, "003", "shop").is_never() {
        return Err("user 003 should never be born with respect to shop".into());
    }
    Ok(())
}

use proptest::collection::vec as pvec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u64, String> {
    runner(cases)
        .run(&strategy, test)
        .map(|_| cases as u64)
        .map_err(|e| format!("{name}: {e}"))
}

/// Round-trip and random-access properties of the four codecs. Returns the
/// number of cases run.
pub fn codec_properties(cases_per_codec: u32) -> Result<u64, String> {
    use cohana::storage::{
        bits_needed, build_global_dict, decode_user_column, encode_user_column, IntSegment, PackedArray, StringSegment,
    };
    let mut total = 0;

    // User runs: distinct users with run lengths.
    total += check("rle", cases_per_codec, pvec((0u32..5000, 1usize..20), 0..40), |runs| {
        let mut seen = std::collections::HashSet::new();
        let users: Vec<u32> = runs
            .iter()
            .filter(|(u, _)| seen.insert(*u))
            .flat_map(|&(u, n)| std::iter::repeat_n(u, n))
            .collect();
        let triples = encode_user_column(&users).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(decode_user_column(&triples), users.clone());
        for t in &triples {
            for r in t.first..t.end() {
                prop_assert_eq!(users[r as usize], t.user);
            }
        }
        prop_assert_eq!(triples.len(), seen.len());
        Ok(())
    })?;

    total += check("dictionary", cases_per_codec, pvec("[a-e]{0,3}", 0..200), |values| {
        let (dict, ids) = build_global_dict(&values);
        let seg = StringSegment::encode(&values, &dict).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(dict.values().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(seg.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            prop_assert_eq!(seg.global_id_at(i), ids[i]);
            prop_assert_eq!(seg.decode_at(i, &dict).unwrap(), v.as_str());
            prop_assert_eq!(seg.chunk_code_of(ids[i]), Some(seg.code_at(i)));
        }
        prop_assert!(seg.decode_at(values.len(), &dict).is_err());
        Ok(())
    })?;

    let ints = prop_oneof![
        pvec(any::<i64>(), 0..200),
        pvec(-1000i64..1000, 0..200),
        (any::<i64>(), pvec(0i64..70_000, 0..200))
            .prop_map(|(b, v)| v.into_iter().map(|x| b.wrapping_add(x)).collect()),
    ];
    total += check("delta", cases_per_codec, ints, |values| {
        let seg = IntSegment::encode(&values);
        prop_assert_eq!(seg.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            prop_assert_eq!(seg.value_at(i), v);
            prop_assert_eq!(seg.decode_at(i).unwrap(), v);
        }
        if let (Some(lo), Some(hi)) = (values.iter().min(), values.iter().max()) {
            prop_assert_eq!((seg.min(), seg.max()), (*lo, *hi));
        }
        prop_assert!(seg.decode_at(values.len()).is_err());
        Ok(())
    })?;

    let packed = (0u8..=64).prop_flat_map(|w| {
        let max = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        pvec(0..=max, 0..300)
    });
    total += check("bit-packing", cases_per_codec, packed, |values| {
        let p = PackedArray::pack(&values);
        let max = values.iter().copied().max().unwrap_or(0);
        prop_assert_eq!(p.bit_width(), bits_needed(max));
        prop_assert_eq!(p.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            prop_assert_eq!(p.at(i), v);
            prop_assert_eq!(p.get(i).unwrap(), v);
        }
        prop_assert_eq!(p.iter().collect::<Vec<_>>(), values.clone());
        prop_assert!(p.get(values.len()).is_err());
        Ok(())
    })?;
    Ok(total)
}

/// open(write(x)) decodes to exactly the sorted input, and every chunk loads
/// identical to its in-memory counterpart.
pub fn file_roundtrip_properties(cases: u32) -> Result<u64, String> {
    check(
        "file round trip",
        cases,
        (any::<u64>(), 1usize..100),
        |(seed, chunk_size)| {
            let mut r = rng(seed);
            let tuples = random_table(&mut r, 300, 30);
            let cs = build_chunkset(&schema(), "D", tuples.clone(), chunk_size)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let dir = tempfile::tempdir().map_err(|e| TestCaseError::fail(e.to_string()))?;
            cs.save(dir.path()).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let back = cohana::storage::open_chunkset(dir.path()).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let mut sorted = tuples;
            sorted.sort_by(|a, b| a.cmp_key(b));
            prop_assert_eq!(back.decode_all().unwrap(), sorted);
            prop_assert_eq!(back.manifest(), cs.manifest());
            let all: Vec<cohana::ColumnId> = schema().columns().map(|c| c.id).collect();
            for i in 0..cs.chunk_count() {
                prop_assert_eq!(back.load_chunk(i, &all).unwrap(), cs.load_chunk(i, &all).unwrap());
            }
            Ok(())
        },
    )
}
