// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! `cohana`: ingest activity CSVs, run cohort queries, benchmark.
//!
//! Exit status is 0 on success, 1 for I/O and data errors, and 2 for usage
//! and query errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohana::bench::{bench_csv, benchmark_query, time_query, BenchParams, QUERY_NAMES};
use cohana::exec::{execute, ExecOptions, QueryOutput, ScanStats};
use cohana::ingest::{
    generate, infer_schema, load_csv, sort_and_partition, write_csv, CsvSpec, GenSpec, IngestError, IngestErrorKind,
    SchemaHints, DEFAULT_CHUNK_SIZE,
};
use cohana::oracle::oracle_eval;
use cohana::plan::{build_plan, optimize};
use cohana::storage::{open_chunkset, write_chunkset};
use cohana::{parse, validate, BoundQuery, ChunkSet, TimeUnit};

#[derive(Parser, Debug)]
#[command(name = "cohana", version, about = "Cohort queries over user activity tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a CSV activity table into a chunk set directory.
    Ingest(IngestArgs),
    /// Run a cohort query against a chunk set.
    Query(QueryArgs),
    /// Time the benchmark queries against a chunk set.
    Bench(BenchArgs),
    /// Write a synthetic game activity table as CSV.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Chunk set directory to create.
    #[arg(long)]
    output: PathBuf,
    /// Target rows per chunk; a chunk closes at the first user boundary
    /// after reaching it.
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE, value_parser = positive)]
    chunk_size: usize,
    /// Table name recorded in the manifest (default: the input file stem).
    #[arg(long)]
    table: Option<String>,
    #[arg(long)]
    user: Option<String>,
    #[arg(long)]
    time: Option<String>,
    #[arg(long)]
    action: Option<String>,
    /// Measure columns. By default every all-integer column is a measure.
    #[arg(long, value_delimiter = ',')]
    measures: Option<Vec<String>>,
    /// Columns to keep as integer dimensions rather than measures.
    #[arg(long, value_delimiter = ',')]
    int_dims: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Engine {
    Cohana,
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Args, Debug)]
struct ExecArgs {
    /// Worker threads (default: all cores).
    #[arg(long, env = "COHANA_THREADS", value_parser = positive)]
    threads: Option<usize>,
}

impl ExecArgs {
    fn options(&self) -> ExecOptions {
        ExecOptions {
            threads: self.threads,
            ..ExecOptions::default()
        }
    }
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Chunk set directory.
    #[arg(long)]
    db: PathBuf,
    /// Query text.
    #[arg(long, required_unless_present = "query_file", conflicts_with = "query_file")]
    query: Option<String>,
    /// File holding the query text.
    #[arg(long)]
    query_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Engine::Cohana)]
    engine: Engine,
    /// Print the optimized plan instead of running the query.
    #[arg(long)]
    explain: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Age unit: day, week or month.
    #[arg(long, default_value = "day")]
    age_unit: TimeUnit,
    /// Print scan counters to stderr.
    #[arg(long)]
    stats: bool,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    db: PathBuf,
    /// Queries to run, q1..q8.
    #[arg(long, value_delimiter = ',', default_values_t = QUERY_NAMES.map(String::from))]
    queries: Vec<String>,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    repeat: usize,
    /// Birth range start for q5 and q6.
    #[arg(long)]
    d1: Option<String>,
    /// Birth range end for q5 and q6.
    #[arg(long)]
    d2: Option<String>,
    /// Age bound for q7 and q8.
    #[arg(long)]
    g: Option<u32>,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = GenSpec::default().users)]
    users: usize,
    /// Replicate every user this many times.
    #[arg(long, default_value_t = 1, value_parser = positive)]
    scale: usize,
    #[arg(long, default_value_t = GenSpec::default().seed)]
    seed: u64,
    /// Only the first N users ever perform `achievement`.
    #[arg(long)]
    achievement_users: Option<usize>,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// A failure carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

fn data(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn engine_error(e: cohana::Error) -> Failure {
    if e.is_query_error() {
        usage(e)
    } else {
        data(e)
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_ingest(a: IngestArgs) -> CliResult {
    let start = Instant::now();
    let hints = SchemaHints {
        user: a.user,
        time: a.time,
        action: a.action,
        measures: a.measures,
        int_dims: a.int_dims,
    };
    let schema = infer_schema(&a.input, &hints).map_err(|e| data(format!("{}: {e}", a.input.display())))?;
    let tuples =
        load_csv(&a.input, &CsvSpec::new(schema.clone())).map_err(|e| data(format!("{}: {e}", a.input.display())))?;
    let table = a.table.unwrap_or_else(|| {
        a.input
            .file_stem()
            .map_or_else(|| "activity".into(), |s| s.to_string_lossy().into_owned())
    });
    let p = sort_and_partition(tuples, a.chunk_size);
    let summary = write_chunkset(&a.output, &schema, &table, &p.tuples, &p.chunks, a.chunk_size as u64)
        .map_err(|e| data(format!("{}: {e}", a.output.display())))?;
    println!(
        "ingested {} tuples into {} chunks, {} bytes, in {:.1} ms",
        summary.rows,
        summary.chunks,
        summary.bytes,
        start.elapsed().as_secs_f64() * 1e3
    );
    Ok(())
}

fn open(db: &Path) -> Result<ChunkSet, Failure> {
    open_chunkset(db).map_err(|e| data(format!("{}: {e}", db.display())))
}

fn bind(text: &str, unit: TimeUnit, cs: &ChunkSet) -> Result<BoundQuery, Failure> {
    let mut spec = parse(text).map_err(usage)?;
    spec.age_unit = unit;
    validate(&spec, cs.schema()).map_err(usage)
}

fn cmd_query(a: QueryArgs) -> CliResult {
    let text = match (&a.query, &a.query_file) {
        (Some(q), _) => q.clone(),
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?,
        (None, None) => unreachable!("clap requires one of --query and --query-file"),
    };
    let cs = open(&a.db)?;
    let bound = bind(&text, a.age_unit, &cs)?;
    let plan = optimize(build_plan(&bound));
    if a.explain {
        print!("{}", plan.explain(cs.schema()));
        return Ok(());
    }
    let out = match a.engine {
        Engine::Cohana => execute(&plan, &cs, &a.exec.options()).map_err(engine_error)?,
        Engine::Oracle => {
            let tuples = cs.decode_all().map_err(data)?;
            let rows = oracle_eval(&bound, &tuples).map_err(data)?;
            QueryOutput::new(bound.output.clone(), rows, ScanStats::default())
        }
    };
    let mut stdout = io::stdout().lock();
    match a.format {
        Format::Csv => out.write_csv(&mut stdout),
        Format::Table => stdout.write_all(out.to_table().as_bytes()),
    }
    .map_err(data)?;
    if a.stats {
        let s = out.stats;
        eprintln!(
            "chunks_opened={} users_scanned={} users_skipped={} rows_decoded={} rows_skipped={}",
            s.chunks_opened, s.users_scanned, s.users_skipped, s.rows_decoded, s.rows_skipped
        );
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CliResult {
    let defaults = BenchParams::default();
    let params = BenchParams {
        d1: a.d1.unwrap_or(defaults.d1),
        d2: a.d2.unwrap_or(defaults.d2),
        g: a.g.unwrap_or(defaults.g),
    };
    let texts = a
        .queries
        .iter()
        .map(|name| {
            benchmark_query(name, &params)
                .map(|t| (name.to_ascii_lowercase(), t))
                .ok_or_else(|| {
                    usage(format!(
                        "unknown query `{name}` (expected one of {})",
                        QUERY_NAMES.join(", ")
                    ))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cs = open(&a.db)?;
    let mut results = Vec::with_capacity(texts.len());
    for (name, text) in &texts {
        let (r, _) = time_query(name, text, &cs, a.repeat, &a.exec.options()).map_err(engine_error)?;
        results.push(r);
    }
    print!("{}", bench_csv(&results));
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let spec = GenSpec {
        users: a.users,
        scale: a.scale,
        seed: a.seed,
        achievement_users: a.achievement_users,
        ..GenSpec::default()
    };
    let tuples = generate(&spec);
    let schema = cohana::ingest::game_schema();
    match &a.output {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
            write_csv(io::BufWriter::new(file), &schema, &tuples).map_err(data)?;
        }
        None => match write_csv(io::stdout().lock(), &schema, &tuples) {
            // The reader went away (`cohana gen | head`); not an error.
            Err(IngestError {
                kind: IngestErrorKind::Io(e),
                ..
            }) if e.kind() == io::ErrorKind::BrokenPipe => {}
            r => r.map_err(data)?,
        },
    }
    Ok(())
}
