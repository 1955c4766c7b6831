// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! Named benchmark queries over the synthetic game table, and a small
//! timing harness.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::exec::{execute, prepare, ExecOptions, QueryOutput};
use crate::storage::ChunkSet;

/// Template parameters. `d1`/`d2` bound birth dates for q5/q6, `g` caps
/// ages for q7/q8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchParams {
    pub d1: String,
    pub d2: String,
    pub g: u32,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            d1: "2013-05-21".into(),
            d2: "2013-05-27".into(),
            g: 7,
        }
    }
}

pub const QUERY_NAMES: [&str; 8] = ["q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8"];

/// Query text of a named benchmark query (`q1` .. `q8`, case-insensitive).
pub fn benchmark_query(name: &str, p: &BenchParams) -> Option<String> {
    const USERS: &str = "SELECT country, COHORTSIZE, AGE, UserCount() FROM GameActions";
    const GOLD: &str = "SELECT country, COHORTSIZE, AGE, Avg(gold) FROM GameActions";
    let (d1, d2, g) = (&p.d1, &p.d2, p.g);
    let text = match name.to_ascii_lowercase().as_str() {
        "q1" => format!(r#"{USERS} BIRTH FROM action = "launch" COHORT BY country"#),
        "q2" => format!(
            r#"{USERS} BIRTH FROM action = "launch" AND time BETWEEN "2013-05-21" AND "2013-05-27" COHORT BY country"#
        ),
        "q3" => format!(r#"{GOLD} BIRTH FROM action = "shop" AGE ACTIVITIES IN action = "shop" COHORT BY country"#),
        "q4" => format!(
            r#"{GOLD} BIRTH FROM action = "shop" AND time BETWEEN "2013-05-21" AND "2013-05-27" AND role = "dwarf" AND country IN ["China", "Australia", "United States"] AGE ACTIVITIES IN action = "shop" AND country = Birth(country) COHORT BY country"#
        ),
        "q5" => format!(r#"{USERS} BIRTH FROM action = "launch" AND time BETWEEN "{d1}" AND "{d2}" COHORT BY country"#),
        "q6" => format!(
            r#"{GOLD} BIRTH FROM action = "shop" AND time BETWEEN "{d1}" AND "{d2}" AGE ACTIVITIES IN action = "shop" COHORT BY country"#
        ),
        "q7" => format!(r#"{USERS} BIRTH FROM action = "launch" AGE ACTIVITIES IN AGE < {g} COHORT BY country"#),
        "q8" => format!(
            r#"{GOLD} BIRTH FROM action = "shop" AGE ACTIVITIES IN action = "shop" AND AGE < {g} COHORT BY country"#
        ),
        _ => return None,
    };
    Some(text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub query: String,
    pub runs: Vec<Duration>,
}

impl BenchResult {
    pub fn mean(&self) -> Duration {
        if self.runs.is_empty() {
            return Duration::ZERO;
        }
        self.runs.iter().sum::<Duration>() / self.runs.len() as u32
    }

    pub fn best(&self) -> Duration {
        self.runs.iter().min().copied().unwrap_or_default()
    }
}

/// Runs query text `repeat` times (after planning once) and records the
/// wall time of each execution.
pub fn time_query(
    name: &str,
    text: &str,
    chunkset: &ChunkSet,
    repeat: usize,
    opts: &ExecOptions,
) -> Result<(BenchResult, QueryOutput)> {
    let plan = prepare(text, chunkset.schema())?;
    let mut runs = Vec::with_capacity(repeat);
    let mut last = None;
    for _ in 0..repeat.max(1) {
        let start = Instant::now();
        let out = execute(&plan, chunkset, opts)?;
        runs.push(start.elapsed());
        last = Some(out);
    }
    Ok((
        BenchResult {
            query: name.to_string(),
            runs,
        },
        last.expect("at least one run"),
    ))
}

/// CSV with one row per query: name, mean, then each run, in milliseconds.
pub fn bench_csv(results: &[BenchResult]) -> String {
    let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
    let runs = results.iter().map(|r| r.runs.len()).max().unwrap_or(0);
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let mut header = vec!["query".to_string(), "mean_ms".to_string()];
    header.extend((1..=runs).map(|i| format!("run{i}_ms")));
    w.write_record(&header).expect("in-memory write");
    for r in results {
        let mut rec = vec![r.query.clone(), ms(r.mean())];
        rec.extend(r.runs.iter().map(|d| ms(*d)));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("UTF-8")
}
