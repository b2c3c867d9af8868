//! Benchmark harness: random queries with a prescribed output size, timed
//! per pipeline phase, plus three ablated pipelines.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::dataset::Query;
use crate::decider::{Cascade, CascadeConfig, ExactDecider, RecursiveOptions};
use crate::engine::{Engine, QueryResult};
use crate::geometry::{Curve, Point};

/// Bisection steps before a drawn curve is given up on.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Bracket width, relative to the initial one, below which bisection stops.
pub const MIN_RELATIVE_BRACKET: f64 = 1e-9;

/// For `k = 0` the query is the drawn curve moved by this fraction of its
/// bounding-box diagonal (the unmoved curve always matches itself).
pub const ZERO_K_SHIFT: f64 = 0.01;

/// Drawn curves tried per requested query before giving up on a `k`.
pub const MAX_ATTEMPTS_PER_QUERY: usize = 50;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("database is empty")]
    EmptyDatabase,
    #[error("could not generate queries with exactly k = {k} results ({accepted} of {wanted} after {attempts} draws)")]
    Starved {
        k: usize,
        accepted: usize,
        wanted: usize,
        attempts: usize,
    },
    #[error("ablation {ablation} changed the result of query {query} (k = {k})")]
    AblationMismatch {
        k: usize,
        query: usize,
        ablation: &'static str,
    },
}

/// A generated query and the database curve it was derived from.
#[derive(Debug, Clone)]
pub struct GeneratedQuery {
    pub query: Query,
    pub source: usize,
    pub k: usize,
    pub bisection_steps: usize,
}

fn count_config() -> CascadeConfig {
    CascadeConfig {
        timing: false,
        ..measured_config()
    }
}

/// The full pipeline as timed by the benchmark: shortcut audits off even in
/// debug builds, so the recursive decider is not charged for them.
pub fn measured_config() -> CascadeConfig {
    CascadeConfig {
        recursive: RecursiveOptions {
            audit_shortcuts: false,
            ..Default::default()
        },
        ..Default::default()
    }
}

/// Upper bound on the Fréchet distance from `curve` to any indexed curve:
/// the diagonal of the union of all bounding boxes.
fn distance_upper_bound(engine: &Engine, curve: &Curve) -> f64 {
    let s = curve.summary();
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (s.min_x, s.max_x, s.min_y, s.max_y);
    if let Some((lo, hi)) = engine.index().bounds() {
        min_x = min_x.min(lo[4]);
        max_x = max_x.max(hi[5]);
        min_y = min_y.min(lo[6]);
        max_y = max_y.max(hi[7]);
    }
    Point::new(min_x, min_y).distance(Point::new(max_x, max_y))
}

/// Draws a random database curve and searches for a threshold with exactly
/// `k` results. `None` means the drawn curve was rejected; draw again.
pub fn generate_query<R: Rng>(engine: &Engine, k: usize, rng: &mut R) -> Option<GeneratedQuery> {
    let db = engine.database();
    if db.is_empty() {
        return None;
    }
    let source = rng.gen_range(0..db.len());
    let drawn = db.curve(source);
    let curve = if k == 0 {
        let shift = ZERO_K_SHIFT * drawn.summary().bbox_diameter().max(f64::MIN_POSITIVE);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let (dx, dy) = (shift * angle.cos(), shift * angle.sin());
        let moved = drawn
            .vertices()
            .iter()
            .map(|v| v.translate(dx, dy))
            .collect();
        Curve::new(format!("{}+shift", drawn.id()), moved).ok()?
    } else {
        drawn.clone()
    };

    let mut cascade = Cascade::new(count_config());
    let mut lo = 0.0;
    let mut hi = distance_upper_bound(engine, &curve);
    let min_width = MIN_RELATIVE_BRACKET * hi;
    for step in 1..=MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let count = engine.count(&curve, mid, &mut cascade);
        if count == k {
            return Some(GeneratedQuery {
                query: Query::new(curve, mid),
                source,
                k,
                bisection_steps: step,
            });
        }
        if count > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < min_width {
            break;
        }
    }
    None
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation (0 for fewer than two values).
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return Self::default();
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() < 2 {
            0.0
        } else {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self { mean, std }
    }
}

/// Per-query measurements; one JSON line each in the sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct QueryRecord {
    pub k: usize,
    pub query_id: String,
    pub delta: f64,
    pub result: QueryResult,
    pub without_greedy_us: f64,
    pub without_negative_us: f64,
    pub without_recursive_us: f64,
}

/// One row of the report per output size `k`; times in milliseconds.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub queries: usize,
    pub rejected_draws: usize,
    pub total_ms: MeanStd,
    pub index_ms: MeanStd,
    pub greedy_ms: MeanStd,
    pub negative_ms: MeanStd,
    pub exact_ms: MeanStd,
    pub without_greedy_ms: MeanStd,
    pub without_negative_ms: MeanStd,
    pub without_recursive_ms: MeanStd,
    pub false_positives: MeanStd,
    pub candidates: MeanStd,
}

impl BenchRow {
    /// Aggregates the records of one `k`.
    pub fn from_records(k: usize, records: &[QueryRecord], rejected_draws: usize) -> Self {
        let ms =
            |f: &dyn Fn(&QueryRecord) -> f64| MeanStd::of(records.iter().map(|r| f(r) / 1000.0));
        BenchRow {
            k,
            queries: records.len(),
            rejected_draws,
            total_ms: ms(&|r| r.result.timings.total_us()),
            index_ms: ms(&|r| r.result.timings.index_us),
            greedy_ms: ms(&|r| r.result.timings.greedy_us),
            negative_ms: ms(&|r| r.result.timings.negative_us),
            exact_ms: ms(&|r| r.result.timings.exact_us),
            without_greedy_ms: ms(&|r| r.without_greedy_us),
            without_negative_ms: ms(&|r| r.without_negative_us),
            without_recursive_ms: ms(&|r| r.without_recursive_us),
            false_positives: MeanStd::of(records.iter().map(|r| r.result.false_positives as f64)),
            candidates: MeanStd::of(records.iter().map(|r| r.result.candidates as f64)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub curves: usize,
    pub vertices: usize,
    pub index_build_ms: f64,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    #[serde(skip)]
    pub records: Vec<QueryRecord>,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub ks: Vec<usize>,
    pub queries_per_k: usize,
    pub seed: u64,
    /// Run every pipeline once untimed before measuring it.
    pub warmup: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            ks: vec![0, 1, 10, 100, 1000],
            queries_per_k: 100,
            seed: 0,
            warmup: false,
        }
    }
}

fn timed(engine: &Engine, q: &Query, config: CascadeConfig, warmup: bool) -> QueryResult {
    let mut cascade = Cascade::new(config);
    if warmup {
        engine.query(0, &q.curve, q.delta, &mut cascade);
    }
    engine.query(0, &q.curve, q.delta, &mut cascade)
}

pub fn run_bench(engine: &Engine, options: &BenchOptions) -> Result<BenchReport, BenchError> {
    if engine.database().is_empty() {
        return Err(BenchError::EmptyDatabase);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
    let full = measured_config();
    let ablations: [(&'static str, CascadeConfig); 3] = [
        (
            "without-greedy",
            CascadeConfig {
                greedy: false,
                ..full
            },
        ),
        (
            "without-negative",
            CascadeConfig {
                negative: false,
                ..full
            },
        ),
        (
            "standard-decider",
            CascadeConfig {
                exact: ExactDecider::Standard,
                ..full
            },
        ),
    ];

    let mut rows = Vec::new();
    let mut all_records = Vec::new();
    for &k in &options.ks {
        let mut records = Vec::with_capacity(options.queries_per_k);
        let mut attempts = 0;
        let budget = MAX_ATTEMPTS_PER_QUERY * options.queries_per_k.max(1);
        while records.len() < options.queries_per_k {
            if attempts == budget {
                return Err(BenchError::Starved {
                    k,
                    accepted: records.len(),
                    wanted: options.queries_per_k,
                    attempts,
                });
            }
            attempts += 1;
            let Some(generated) = generate_query(engine, k, &mut rng) else {
                continue;
            };
            let q = &generated.query;
            let number = records.len();
            let mut result = timed(engine, q, full, options.warmup);
            result.query = number;
            let mut ablated = [0.0; 3];
            for (slot, (name, config)) in ablated.iter_mut().zip(&ablations) {
                let r = timed(engine, q, *config, options.warmup);
                if r.matches != result.matches {
                    return Err(BenchError::AblationMismatch {
                        k,
                        query: number,
                        ablation: name,
                    });
                }
                *slot = r.timings.total_us();
            }
            records.push(QueryRecord {
                k,
                query_id: q.curve.id().to_string(),
                delta: q.delta,
                result,
                without_greedy_us: ablated[0],
                without_negative_us: ablated[1],
                without_recursive_us: ablated[2],
            });
        }
        rows.push(BenchRow::from_records(
            k,
            &records,
            attempts - records.len(),
        ));
        all_records.extend(records);
    }

    Ok(BenchReport {
        curves: engine.database().len(),
        vertices: engine.database().total_vertices(),
        index_build_ms: engine.build_time().as_secs_f64() * 1e3,
        seed: options.seed,
        rows,
        records: all_records,
    })
}

impl BenchReport {
    /// Aligned text table, one column per `k`.
    pub fn render_table(&self) -> String {
        let mut lines: Vec<(String, Vec<String>)> = Vec::new();
        let pm = |m: &MeanStd, unit: &str| format!("{:.3} ± {:.3}{unit}", m.mean, m.std);
        lines.push((
            "output size k".into(),
            self.rows.iter().map(|r| r.k.to_string()).collect(),
        ));
        lines.push((
            "queries".into(),
            self.rows.iter().map(|r| r.queries.to_string()).collect(),
        ));
        type Field = fn(&BenchRow) -> &MeanStd;
        let timed_rows: [(&str, Field); 8] = [
            ("total time", |r| &r.total_ms),
            ("time for index", |r| &r.index_ms),
            ("time for greedy filter", |r| &r.greedy_ms),
            ("time for negative filter", |r| &r.negative_ms),
            ("time for exact decider", |r| &r.exact_ms),
            ("total without greedy filter", |r| &r.without_greedy_ms),
            ("total without negative filter", |r| &r.without_negative_ms),
            ("total with standard decider", |r| &r.without_recursive_ms),
        ];
        for (label, f) in timed_rows {
            lines.push((
                label.into(),
                self.rows.iter().map(|r| pm(f(r), " ms")).collect(),
            ));
        }
        lines.push((
            "# false positives of index".into(),
            self.rows
                .iter()
                .map(|r| pm(&r.false_positives, ""))
                .collect(),
        ));
        lines.push((
            "standard / recursive total".into(),
            self.rows
                .iter()
                .map(|r| {
                    if r.total_ms.mean > 0.0 {
                        format!("{:.2}x", r.without_recursive_ms.mean / r.total_ms.mean)
                    } else {
                        "-".into()
                    }
                })
                .collect(),
        ));

        let label_w = lines.iter().map(|l| l.0.chars().count()).max().unwrap_or(0);
        let col_w: Vec<usize> = (0..self.rows.len())
            .map(|c| {
                lines
                    .iter()
                    .map(|l| l.1[c].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} curves, {} vertices, index built in {:.1} ms, seed {}",
            self.curves, self.vertices, self.index_build_ms, self.seed
        );
        for (label, cells) in &lines {
            let _ = write!(out, "{label:<label_w$}");
            for (cell, w) in cells.iter().zip(&col_w) {
                let pad = w - cell.chars().count();
                let _ = write!(out, " | {}{cell}", " ".repeat(pad));
            }
            out.push('\n');
        }
        out
    }

    /// Report as one JSON document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-query records as JSON lines.
    pub fn records_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("record serializes"));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std() {
        let m = MeanStd::of([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(
            MeanStd::of([7.0]),
            MeanStd {
                mean: 7.0,
                std: 0.0
            }
        );
        assert_eq!(MeanStd::of([]), MeanStd::default());
    }
}
