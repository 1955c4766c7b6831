// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Checks over the synthetic game workload.

use std::collections::HashMap;
use std::time::Duration;

use cohana::bench::{benchmark_query, time_query, BenchParams, QUERY_NAMES};
use cohana::exec::{run_query, ExecOptions};
use cohana::ingest::{build_chunkset, game_schema, generate, GenSpec, DEFAULT_CHUNK_SIZE};
use cohana::oracle::oracle_eval;
use cohana::{parse, validate, ActivityTuple, ChunkSet};

use super::{describe_mismatch, same_rows};

pub fn dataset(spec: &GenSpec, chunk_size: usize) -> (Vec<ActivityTuple>, ChunkSet) {
    let tuples = generate(spec);
    let cs =
        build_chunkset(&game_schema(), "GameActions", tuples.clone(), chunk_size).expect("generated data is valid");
    (tuples, cs)
}

fn serial() -> ExecOptions {
    ExecOptions::single_threaded()
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Index of each user's earliest `action` tuple.
fn births(tuples: &[ActivityTuple], action: &str) -> HashMap<String, usize> {
    let mut out: HashMap<String, usize> = HashMap::new();
    for (i, t) in tuples.iter().enumerate().filter(|(_, t)| t.action == action) {
        let e = out.entry(t.user.clone()).or_insert(i);
        if t.time < tuples[*e].time {
            *e = i;
        }
    }
    out
}

/// Rows a birth selection must decode for users it rejects: up to and
/// including the birth tuple, or every row of a user never born.
fn rejected_allowance(
    tuples: &[ActivityTuple],
    action: &str,
    qualifies: impl Fn(&ActivityTuple) -> bool,
) -> (u64, usize, usize) {
    let mut by_user: HashMap<&str, Vec<&ActivityTuple>> = HashMap::new();
    for t in tuples {
        by_user.entry(&t.user).or_default().push(t);
    }
    let born = births(tuples, action);
    let (mut allowance, mut qualified) = (0u64, 0usize);
    for rows in by_user.values() {
        match born.get(rows[0].user.as_str()).copied() {
            Some(i) if qualifies(&tuples[i]) => qualified += 1,
            Some(i) => {
                let birth = &tuples[i];
                allowance += rows.iter().filter(|t| t.cmp_key(birth).is_le()).count() as u64;
            }
            None => allowance += rows.len() as u64,
        }
    }
    (allowance, qualified, by_user.len())
}

/// Rows decoded under a ~10% birth selection stay within
/// 0.15 x total + the rejected users' allowance.
pub fn scan_work_check() -> Result<String, String> {
    let spec = GenSpec {
        users: 2_000,
        ..GenSpec::default()
    };
    let (tuples, cs) = dataset(&spec, DEFAULT_CHUNK_SIZE);
    let total = tuples.len() as u64;
    let mut report = Vec::new();
    for (action, extra) in [("launch", ""), ("shop", r#" AGE ACTIVITIES IN action = "shop""#)] {
        let q = format!(
            r#"SELECT country, COHORTSIZE, AGE, UserCount() FROM GameActions BIRTH FROM action = "{action}" AND country = "Australia"{extra} COHORT BY country"#
        );
        let out = run_query(&q, &cs, &serial()).map_err(|e| e.to_string())?;
        let country = game_schema().lookup("country").unwrap();
        let (allowance, qualified, users) = rejected_allowance(&tuples, action, |b| {
            b.dims[country.0 - 3] == cohana::Value::from("Australia")
        });
        let bound = (0.15 * total as f64) as u64 + allowance;
        let sel = qualified as f64 / users as f64;
        let line = format!(
            "{action}: selectivity {:.1}%, decoded {} <= bound {bound} (total {total}, allowance {allowance})",
            sel * 100.0,
            out.stats.rows_decoded
        );
        if !(0.05..=0.15).contains(&sel) || out.stats.rows_decoded > bound {
            return Err(line);
        }
        report.push(line);
    }
    Ok(report.join("; "))
}

/// Q5 runtime rises with the fraction of users born inside `[d1, d2]`.
pub fn q5_trend_check(repeat: usize) -> Result<String, String> {
    let (tuples, cs) = dataset(&GenSpec::default(), DEFAULT_CHUNK_SIZE);
    let mut users: Vec<&str> = tuples.iter().map(|t| t.user.as_str()).collect();
    users.dedup();
    let births: Vec<i64> = births(&tuples, "launch").values().map(|&i| tuples[i].time).collect();
    let d1 = "2013-05-19";
    let mut cases = Vec::new();
    for d2 in ["2013-05-21", "2013-05-26", "2013-06-02", "2013-06-09", "2013-06-18"] {
        let p = BenchParams {
            d1: d1.into(),
            d2: d2.into(),
            ..BenchParams::default()
        };
        let hi = cohana::model::parse_day(d2).unwrap() + 86_399;
        let frac = births.iter().filter(|&&b| b <= hi).count() as f64 / users.len() as f64;
        cases.push((frac, benchmark_query("q5", &p).unwrap()));
    }
    // One untimed pass, then rounds interleaved across ranges so drift in
    // machine load hits every range alike.
    let mut best = vec![f64::INFINITY; cases.len()];
    let mut rows = vec![0u64; cases.len()];
    for round in 0..=repeat {
        for (i, (_, q)) in cases.iter().enumerate() {
            let (res, out) = time_query("q5", q, &cs, 1, &serial()).map_err(|e| e.to_string())?;
            if round > 0 {
                best[i] = best[i].min(ms(res.best()));
            }
            rows[i] = out.stats.rows_decoded;
        }
    }
    let points: Vec<(f64, f64, u64)> = (0..cases.len()).map(|i| (cases[i].0, best[i], rows[i])).collect();
    let desc = points
        .iter()
        .map(|(f, t, r)| format!("{:.0}%:{t:.1}ms/{r}rows", f * 100.0))
        .collect::<Vec<_>>()
        .join(" ");
    let monotone = points
        .windows(2)
        .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1 && w[0].2 < w[1].2);
    if monotone {
        Ok(desc)
    } else {
        Err(format!("not monotone: {desc}"))
    }
}

/// Birth action present in exactly one of at least four chunks: only that
/// chunk is opened, and results match the unpruned run.
pub fn pruning_check() -> Result<String, String> {
    let spec = GenSpec {
        users: 3_000,
        achievement_users: Some(40),
        ..GenSpec::default()
    };
    let (_, cs) = dataset(&spec, 16_384);
    let gid = cs
        .action_global_id("achievement")
        .ok_or("no achievement tuples generated")?;
    let holders = (0..cs.chunk_count()).filter(|&i| cs.chunk_has_action(i, gid)).count();
    if cs.chunk_count() < 4 || holders != 1 {
        return Err(format!("setup: {} chunks, achievement in {holders}", cs.chunk_count()));
    }
    let q = r#"SELECT country, COHORTSIZE, AGE, UserCount(), Sum(gold) FROM GameActions BIRTH FROM action = "achievement" COHORT BY country"#;
    cs.reset_counters();
    let pruned = run_query(q, &cs, &serial()).map_err(|e| e.to_string())?;
    let opened = cs.chunks_opened();
    let full = run_query(
        q,
        &cs,
        &ExecOptions {
            prune: false,
            ..serial()
        },
    )
    .map_err(|e| e.to_string())?;
    let line = format!(
        "{} chunks, opened {} (stats {}), unpruned opened {}, {} rows",
        cs.chunk_count(),
        opened,
        pruned.stats.chunks_opened,
        full.stats.chunks_opened,
        pruned.rows.len()
    );
    if opened == 1 && pruned.stats.chunks_opened == 1 && pruned.rows == full.rows && !pruned.rows.is_empty() {
        Ok(line)
    } else {
        Err(line)
    }
}

/// Q1..Q8 on scale-1 data, engine against oracle.
pub fn benchmark_queries_check() -> Result<String, String> {
    let (tuples, cs) = dataset(&GenSpec::default(), DEFAULT_CHUNK_SIZE);
    let mut sizes = Vec::new();
    for name in QUERY_NAMES {
        let text = benchmark_query(name, &BenchParams::default()).unwrap();
        let bound = validate(&parse(&text).map_err(|e| format!("{name}: {e}"))?, cs.schema())
            .map_err(|e| format!("{name}: {e}"))?;
        let engine = run_query(&text, &cs, &ExecOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let oracle = oracle_eval(&bound, &tuples).map_err(|e| format!("{name}: {e}"))?;
        if !same_rows(&engine.rows, &oracle) {
            return Err(format!("{name}: {}", describe_mismatch(&engine.rows, &oracle)));
        }
        if engine.rows.is_empty() {
            return Err(format!("{name}: empty result"));
        }
        sizes.push(format!("{name}={}", engine.rows.len()));
    }
    Ok(sizes.join(" "))
}

/// Best-of-`repeat` single-threaded Q1 and Q3 times at scales 1, 2 and 4;
/// successive ratios must fall in [1.5, 3.0] and every run under 60 s.
pub fn scaling_check(repeat: usize) -> Result<String, String> {
    let mut best: HashMap<(&str, usize), f64> = HashMap::new();
    let mut worst = 0f64;
    for scale in [1usize, 2, 4] {
        let (_, cs) = dataset(
            &GenSpec {
                scale,
                ..GenSpec::default()
            },
            DEFAULT_CHUNK_SIZE,
        );
        for name in ["q1", "q3"] {
            let q = benchmark_query(name, &BenchParams::default()).unwrap();
            let (res, _) = time_query(name, &q, &cs, repeat, &serial()).map_err(|e| e.to_string())?;
            worst = worst.max(res.runs.iter().map(|d| ms(*d)).fold(0.0, f64::max));
            best.insert((name, scale), ms(res.best()));
        }
    }
    let mut parts = Vec::new();
    let mut ok = worst < 60_000.0;
    for name in ["q1", "q3"] {
        for (a, b) in [(1, 2), (2, 4)] {
            let r = best[&(name, b)] / best[&(name, a)];
            ok &= (1.5..=3.0).contains(&r);
            parts.push(format!("{name} x{a}->x{b}: {r:.2}"));
        }
    }
    let line = format!("{}; slowest run {worst:.0} ms", parts.join(", "));
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}
