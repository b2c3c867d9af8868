//! The query pipeline: index candidates, then the decision cascade on each.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{Database, Query};
use crate::decider::{Cascade, CascadeConfig, Stage};
use crate::freespace::{decide_standard_with, Scratch};
use crate::geometry::Curve;
use crate::index::{IndexConfig, SpatialIndex};

/// Wall-clock time per pipeline phase, in microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, serde::Deserialize)]
pub struct PhaseTimings {
    pub index_us: f64,
    pub greedy_us: f64,
    pub negative_us: f64,
    pub exact_us: f64,
}

impl PhaseTimings {
    pub fn total_us(&self) -> f64 {
        self.index_us + self.greedy_us + self.negative_us + self.exact_us
    }
}

fn micros(d: Duration) -> f64 {
    d.as_secs_f64() * 1e6
}

/// How many candidates each cascade stage settled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct StageCounts {
    pub greedy: usize,
    pub negative: usize,
    pub exact: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct QueryResult {
    pub query: usize,
    /// Ids of the matching curves, sorted.
    pub matches: Vec<String>,
    pub candidates: usize,
    pub false_positives: usize,
    pub timings: PhaseTimings,
    pub stages: StageCounts,
}

impl QueryResult {
    /// `<query-index> <count> <id> <id> ...`
    pub fn result_line(&self) -> String {
        let mut s = format!("{} {}", self.query, self.matches.len());
        for id in &self.matches {
            s.push(' ');
            s.push_str(id);
        }
        s
    }
}

/// A database together with its spatial index.
#[derive(Debug, Clone)]
pub struct Engine {
    database: Database,
    index: SpatialIndex,
    build_time: Duration,
}

impl Engine {
    pub fn new(database: Database, config: IndexConfig) -> Self {
        let start = Instant::now();
        let index = SpatialIndex::build(
            database
                .curves()
                .iter()
                .enumerate()
                .map(|(k, c)| (*c.summary(), k)),
            config,
        );
        Self {
            database,
            index,
            build_time: start.elapsed(),
        }
    }

    pub fn database(&self) -> &Database {
        &self.database
    }

    pub fn index(&self) -> &SpatialIndex {
        &self.index
    }

    pub fn build_time(&self) -> Duration {
        self.build_time
    }

    /// Answers one query with the given cascade (whose scratch is reused).
    pub fn query(
        &self,
        number: usize,
        curve: &Curve,
        delta: f64,
        cascade: &mut Cascade,
    ) -> QueryResult {
        let timing = cascade.config.timing;
        let start = timing.then(Instant::now);
        let mut candidates = Vec::new();
        self.index
            .candidates_into(curve.summary(), delta, &mut candidates);
        let mut timings = PhaseTimings {
            index_us: start.map_or(0.0, |s| micros(s.elapsed())),
            ..Default::default()
        };

        let mut stages = StageCounts::default();
        let mut matches = Vec::new();
        for &pos in &candidates {
            let other = self.database.curve(pos);
            let out = cascade.decide(curve, other, delta);
            timings.greedy_us += micros(out.timings.greedy);
            timings.negative_us += micros(out.timings.negative);
            timings.exact_us += micros(out.timings.exact);
            match out.stage {
                Stage::Greedy => stages.greedy += 1,
                Stage::Negative => stages.negative += 1,
                Stage::Exact => stages.exact += 1,
            }
            if out.within {
                matches.push(other.id().to_string());
            }
        }
        matches.sort_unstable();
        QueryResult {
            query: number,
            candidates: candidates.len(),
            false_positives: candidates.len() - matches.len(),
            matches,
            timings,
            stages,
        }
    }

    /// Number of curves within `delta` of `curve`.
    pub fn count(&self, curve: &Curve, delta: f64, cascade: &mut Cascade) -> usize {
        let mut candidates = Vec::new();
        self.index
            .candidates_into(curve.summary(), delta, &mut candidates);
        candidates
            .iter()
            .filter(|&&pos| {
                cascade
                    .decide(curve, self.database.curve(pos), delta)
                    .within
            })
            .count()
    }

    /// Answers a batch of queries on `threads` worker threads. Results come
    /// back in query order regardless of the thread count.
    pub fn run_queries(
        &self,
        queries: &[Query],
        config: CascadeConfig,
        threads: usize,
    ) -> Vec<QueryResult> {
        if threads <= 1 {
            let mut cascade = Cascade::new(config);
            return queries
                .iter()
                .enumerate()
                .map(|(k, q)| self.query(k, &q.curve, q.delta, &mut cascade))
                .collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            queries
                .par_iter()
                .enumerate()
                .map_init(
                    || Cascade::new(config),
                    |cascade, (k, q)| self.query(k, &q.curve, q.delta, cascade),
                )
                .collect()
        })
    }

    /// Reference answer: the classic decider against every curve.
    pub fn naive_scan(&self, curve: &Curve, delta: f64) -> Vec<String> {
        naive_scan(&self.database, curve, delta)
    }
}

/// Ids of all curves of `db` within Fréchet distance `delta` of `curve`,
/// sorted, by running the classic decider on every curve.
pub fn naive_scan(db: &Database, curve: &Curve, delta: f64) -> Vec<String> {
    let mut scratch = Scratch::new();
    let mut out: Vec<String> = db
        .curves()
        .iter()
        .filter(|c| decide_standard_with(curve, c, delta, &mut scratch))
        .map(|c| c.id().to_string())
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_engine() -> Engine {
        let curves = vec![
            Curve::from_coords("a", &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap(),
            Curve::from_coords("b", &[(0.0, 0.1), (2.0, 0.1)]).unwrap(),
            Curve::from_coords("c", &[(0.0, 5.0), (2.0, 5.0)]).unwrap(),
        ];
        Engine::new(
            Database::from_curves(curves).unwrap(),
            IndexConfig::default(),
        )
    }

    #[test]
    fn query_matches_naive_scan() {
        let e = small_engine();
        let q = Curve::from_coords("q", &[(0.0, 0.0), (2.0, 0.0)]).unwrap();
        let mut cascade = Cascade::default();
        for delta in [0.0, 0.05, 0.1, 1.0, 5.0, 10.0] {
            let r = e.query(0, &q, delta, &mut cascade);
            assert_eq!(r.matches, e.naive_scan(&q, delta), "delta {delta}");
            assert_eq!(r.false_positives, r.candidates - r.matches.len());
        }
    }

    #[test]
    fn identical_curve_at_zero() {
        let e = small_engine();
        let q = e.database().curve(0).with_id("q");
        let r = e.query(3, &q, 0.0, &mut Cascade::default());
        assert!(r.matches.contains(&"a".to_string()));
        assert_eq!(r.result_line(), "3 1 a");
    }

    #[test]
    fn below_lower_bound_is_empty() {
        let e = small_engine();
        let q = Curve::from_coords("q", &[(100.0, 100.0), (101.0, 100.0)]).unwrap();
        let r = e.query(0, &q, 1.0, &mut Cascade::default());
        assert!(r.matches.is_empty());
        assert_eq!(r.candidates, 0);
        assert_eq!(r.result_line(), "0 0");
    }

    #[test]
    fn threads_do_not_change_results() {
        let e = small_engine();
        let queries: Vec<_> = (0..20)
            .map(|k| Query::new(e.database().curve(k % 3).clone(), 0.05 * k as f64))
            .collect();
        let one = e.run_queries(&queries, CascadeConfig::default(), 1);
        let four = e.run_queries(&queries, CascadeConfig::default(), 4);
        let strip = |v: Vec<QueryResult>| {
            v.into_iter()
                .map(|r| (r.query, r.matches))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(one), strip(four));
    }
}
