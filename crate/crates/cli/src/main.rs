//! `frechet`: batch range queries, benchmark harness, self-test and data
//! generator for polygonal-curve databases.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use frechet_core::bench::{
    generate_query, measured_config, run_bench, BenchOptions, MAX_ATTEMPTS_PER_QUERY,
};
use frechet_core::dataset::{
    load_database, load_queries, synthesize, write_database, write_queries, Database, Profile,
    SyntheticSpec,
};
use frechet_core::engine::{Engine, PhaseTimings};
use frechet_core::index::{IndexConfig, DEFAULT_LEAF_CAPACITY};
use frechet_core::selftest::{selftest, SelftestOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_SELFTEST: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "frechet",
    version,
    about = "Fréchet-distance range queries over curve databases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Answer every query of a query file against a database.
    Query(QueryArgs),
    /// Time random queries with exactly k results, plus ablated pipelines.
    Bench(BenchArgs),
    /// Run the randomized oracle and property checks.
    Selftest(SelftestArgs),
    /// Write a synthetic database (and optionally generated queries).
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Args, Debug)]
struct IndexArgs {
    /// Leaf capacity of the spatial index.
    #[arg(long, default_value_t = DEFAULT_LEAF_CAPACITY, value_parser = clap::value_parser!(usize))]
    capacity: usize,
}

impl IndexArgs {
    fn config(&self) -> IndexConfig {
        IndexConfig {
            leaf_capacity: self.capacity.max(1),
        }
    }
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Database manifest: one curve file per line.
    #[arg(long)]
    db: PathBuf,
    /// Query file: `<curve file> <delta>` per line.
    #[arg(long)]
    queries: PathBuf,
    /// Worker threads; queries run in parallel, output order is unchanged.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[command(flatten)]
    index: IndexArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write per-query phase timings as JSON lines to this file.
    #[arg(long)]
    timings: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Database manifest; a synthetic database is generated when omitted.
    #[arg(long)]
    db: Option<PathBuf>,
    /// Synthetic profile: clustered-paths or uniform.
    #[arg(long, default_value = "clustered-paths")]
    profile: String,
    /// Number of synthetic curves.
    #[arg(long, default_value_t = 20_000)]
    count: usize,
    /// Output sizes to generate queries for.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [0usize, 1, 10, 100, 1000])]
    ks: Vec<usize>,
    /// Generated queries per output size.
    #[arg(long, default_value_t = 100)]
    per_k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    index: IndexArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Run each pipeline once untimed before measuring it.
    #[arg(long)]
    warmup: bool,
    /// Write the full report as JSON to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write per-query records as JSON lines to this file.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    iterations: u64,
    /// Largest vertex count of the random curves.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    max_vertices: u64,
    /// File receiving the first counterexample, if any.
    #[arg(long, default_value = "selftest-repro.json")]
    repro: PathBuf,
    /// Scales delta inside the full-block shortcut test (mutation testing).
    #[arg(long, hide = true, default_value_t = 1.0)]
    mutate_full_shortcut: f64,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Output directory; receives manifest.txt and one file per curve.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "clustered-paths")]
    profile: String,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write queries.txt with queries having exactly these result sizes.
    #[arg(long = "k", value_delimiter = ',')]
    ks: Vec<usize>,
    /// Generated queries per output size.
    #[arg(long, default_value_t = 10)]
    per_k: usize,
    #[command(flatten)]
    index: IndexArgs,
}

#[derive(Debug)]
enum Failure {
    Data(String),
    Selftest,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Query(a) => query(a),
        Command::Bench(a) => bench(a),
        Command::Selftest(a) => run_selftest(a),
        Command::Gen(a) => gen(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Selftest) => ExitCode::from(EXIT_SELFTEST),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct TimingRecord<'a> {
    query: usize,
    id: &'a str,
    delta: f64,
    candidates: usize,
    false_positives: usize,
    matches: usize,
    #[serde(flatten)]
    timings: PhaseTimings,
    total_us: f64,
}

fn query(a: QueryArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let db = load_database(&a.db)?;
    let queries = load_queries(&a.queries)?;
    let loaded = started.elapsed();
    let engine = Engine::new(db, a.index.config());
    eprintln!(
        "loaded {} curves and {} queries in {:.1} ms, index built in {:.1} ms",
        engine.database().len(),
        queries.len(),
        loaded.as_secs_f64() * 1e3,
        engine.build_time().as_secs_f64() * 1e3
    );

    let started = Instant::now();
    let results = engine.run_queries(&queries, measured_config(), a.threads.max(1));
    eprintln!(
        "answered in {:.1} ms",
        started.elapsed().as_secs_f64() * 1e3
    );

    let mut out = io::BufWriter::new(io::stdout().lock());
    for r in &results {
        let line = match a.format {
            Format::Text => r.result_line(),
            Format::Jsonl => serde_json::to_string(r).expect("result serializes"),
        };
        writeln!(out, "{line}")?;
    }
    out.flush()?;

    if let Some(path) = &a.timings {
        let mut sidecar = String::new();
        for (r, q) in results.iter().zip(&queries) {
            let record = TimingRecord {
                query: r.query,
                id: q.curve.id(),
                delta: q.delta,
                candidates: r.candidates,
                false_positives: r.false_positives,
                matches: r.matches.len(),
                timings: r.timings,
                total_us: r.timings.total_us(),
            };
            sidecar.push_str(&serde_json::to_string(&record).expect("record serializes"));
            sidecar.push('\n');
        }
        write_file(path, &sidecar)?;
    }
    Ok(())
}

fn database_for(
    db: Option<&Path>,
    profile: &str,
    count: usize,
    seed: u64,
) -> Result<Database, Failure> {
    match db {
        Some(path) => Ok(load_database(path)?),
        None => {
            let profile: Profile = profile.parse()?;
            Ok(synthesize(SyntheticSpec {
                seed,
                count,
                profile,
            })
            .database)
        }
    }
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let db = database_for(a.db.as_deref(), &a.profile, a.count, a.seed)?;
    eprintln!(
        "database ready in {:.1} ms: {} curves",
        started.elapsed().as_secs_f64() * 1e3,
        db.len()
    );
    let engine = Engine::new(db, a.index.config());
    let report = run_bench(
        &engine,
        &BenchOptions {
            ks: a.ks,
            queries_per_k: a.per_k,
            seed: a.seed,
            warmup: a.warmup,
        },
    )?;
    match a.format {
        Format::Text => print!("{}", report.render_table()),
        Format::Jsonl => {
            for row in &report.rows {
                println!("{}", serde_json::to_string(row).expect("row serializes"));
            }
        }
    }
    if let Some(path) = &a.report {
        write_file(path, &report.to_json())?;
    }
    if let Some(path) = &a.records {
        write_file(path, &report.records_jsonl())?;
    }
    Ok(())
}

fn run_selftest(a: SelftestArgs) -> Result<(), Failure> {
    let options = SelftestOptions {
        seed: a.seed,
        iterations: a.iterations as usize,
        max_vertices: a.max_vertices as usize,
        repro_path: Some(a.repro.clone()),
        full_shortcut_inflation: a.mutate_full_shortcut,
        ..Default::default()
    };
    let report = selftest(&options);
    print!("{}", report.summary());
    if report.passed() {
        return Ok(());
    }
    if let Some(cex) = &report.counterexample {
        eprintln!(
            "first counterexample ({}: {}) written to {}",
            cex.suite,
            cex.check,
            a.repro.display()
        );
    }
    Err(Failure::Selftest)
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let profile: Profile = a.profile.parse()?;
    let db = synthesize(SyntheticSpec {
        seed: a.seed,
        count: a.count,
        profile,
    })
    .database;
    let manifest = write_database(&a.out, &db)?;
    println!("{}", manifest.display());
    if a.ks.is_empty() {
        return Ok(());
    }

    let engine = Engine::new(db, a.index.config());
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut queries = Vec::new();
    for &k in &a.ks {
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < a.per_k {
            if attempts == MAX_ATTEMPTS_PER_QUERY * a.per_k {
                return Err(Failure::Data(format!(
                    "could not generate queries with exactly k = {k} results"
                )));
            }
            attempts += 1;
            if let Some(g) = generate_query(&engine, k, &mut rng) {
                queries.push(g.query);
                accepted += 1;
            }
        }
    }
    let path = a.out.join("queries.txt");
    write_queries(&path, &queries)?;
    println!("{}", path.display());
    Ok(())
}
