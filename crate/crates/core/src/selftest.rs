//! Randomized differential checks packaged for the command line.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{random_triple, Triple};
use crate::decider::{
    decide_recursive_with, greedy_filter, negative_filter, Cascade, CascadeConfig, FilterVerdict,
    RecursionStats, RecursiveOptions,
};
use crate::freespace::{decide_standard_with, Scratch};
use crate::geometry::{lb_frechet, summarize, CurveSummary, Point};
use crate::index::{IndexConfig, SpatialIndex};

#[derive(Debug, Clone)]
pub struct SelftestOptions {
    pub seed: u64,
    pub iterations: usize,
    pub max_vertices: usize,
    pub index_points: usize,
    /// Where to write the first counterexample, if any.
    pub repro_path: Option<PathBuf>,
    #[doc(hidden)]
    pub full_shortcut_inflation: f64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 1000,
            max_vertices: 50,
            index_points: 1000,
            repro_path: None,
            full_shortcut_inflation: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

/// A failing input, serialized to the reproduction file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub suite: &'static str,
    pub check: String,
    pub p: Vec<[f64; 2]>,
    pub q: Vec<[f64; 2]>,
    pub delta: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SelftestReport {
    pub suites: Vec<SuiteReport>,
    pub counterexample: Option<Counterexample>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }

    pub fn failures(&self) -> usize {
        self.suites.iter().map(|s| s.failures).sum()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for suite in &self.suites {
            s.push_str(&format!(
                "{:<22} {:>7} cases {:>5} failures\n",
                suite.name, suite.cases, suite.failures
            ));
        }
        s.push_str(if self.passed() { "PASS\n" } else { "FAIL\n" });
        s
    }
}

fn coords(points: &[Point]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.x, p.y]).collect()
}

struct Recorder {
    report: SelftestReport,
}

impl Recorder {
    fn suite(&mut self, name: &'static str) -> usize {
        self.report.suites.push(SuiteReport {
            name,
            ..Default::default()
        });
        self.report.suites.len() - 1
    }

    fn case(&mut self, suite: usize, ok: bool, failure: impl FnOnce() -> Counterexample) {
        let s = &mut self.report.suites[suite];
        s.cases += 1;
        if !ok {
            s.failures += 1;
            if self.report.counterexample.is_none() {
                self.report.counterexample = Some(failure());
            }
        }
    }
}

fn triple_failure(suite: &'static str, check: &str, t: &Triple, delta: f64) -> Counterexample {
    Counterexample {
        suite,
        check: check.to_string(),
        p: coords(t.p.vertices()),
        q: coords(t.q.vertices()),
        delta,
    }
}

/// Runs every suite; the report says which checks failed.
pub fn selftest(options: &SelftestOptions) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut rec = Recorder {
        report: SelftestReport::default(),
    };
    let equivalence = rec.suite("decider-equivalence");
    let soundness = rec.suite("filter-soundness");
    let properties = rec.suite("freespace-properties");
    let index_suite = rec.suite("index-box-query");

    let recursive = RecursiveOptions {
        audit_shortcuts: false,
        full_shortcut_inflation: options.full_shortcut_inflation,
    };
    let mut cascade = Cascade::new(CascadeConfig {
        timing: false,
        recursive,
        ..Default::default()
    });
    let mut standard_scratch = Scratch::new();
    let mut recursive_scratch = Scratch::new();

    for _ in 0..options.iterations {
        let t = random_triple(&mut rng, options.max_vertices.max(2));
        let (p, q, delta) = (&t.p, &t.q, t.delta);

        let expected = decide_standard_with(p, q, delta, &mut standard_scratch);
        let mut stats = RecursionStats::default();
        let got =
            decide_recursive_with(p, q, delta, &recursive, &mut recursive_scratch, &mut stats);
        rec.case(equivalence, got == expected, || {
            triple_failure(
                "decider-equivalence",
                "recursive verdict differs from standard",
                &t,
                delta,
            )
        });
        let corners_free =
            p.first().distance(q.first()) <= delta && p.last().distance(q.last()) <= delta;
        if corners_free {
            let same_frontiers = standard_scratch.horizontal == recursive_scratch.horizontal
                && standard_scratch.vertical == recursive_scratch.vertical;
            rec.case(equivalence, same_frontiers, || {
                triple_failure(
                    "decider-equivalence",
                    "final frontiers differ from standard",
                    &t,
                    delta,
                )
            });
        }
        rec.case(
            equivalence,
            (stats.blocks as f64) <= RecursionStats::block_budget(p.len(), q.len()),
            || {
                triple_failure(
                    "decider-equivalence",
                    "block-visit budget exceeded",
                    &t,
                    delta,
                )
            },
        );
        let cascaded = cascade.decide(p, q, delta).within;
        rec.case(equivalence, cascaded == expected, || {
            triple_failure(
                "decider-equivalence",
                "cascade verdict differs from standard",
                &t,
                delta,
            )
        });

        let greedy = greedy_filter(p, q, delta);
        rec.case(
            soundness,
            greedy != FilterVerdict::CertifiedYes || expected,
            || {
                triple_failure(
                    "filter-soundness",
                    "greedy certified a no-instance",
                    &t,
                    delta,
                )
            },
        );
        for (a, b, name) in [(p, q, "negative (p, q)"), (q, p, "negative (q, p)")] {
            let verdict = negative_filter(a, b, delta);
            rec.case(
                soundness,
                verdict != FilterVerdict::CertifiedNo || !expected,
                || {
                    triple_failure(
                        "filter-soundness",
                        &format!("{name} rejected a yes-instance"),
                        &t,
                        delta,
                    )
                },
            );
        }

        let swapped = decide_standard_with(q, p, delta, &mut standard_scratch);
        rec.case(properties, swapped == expected, || {
            triple_failure(
                "freespace-properties",
                "decider is not symmetric",
                &t,
                delta,
            )
        });
        let larger = delta * rng.gen_range(1.0..2.0) + rng.gen_range(0.0..0.1);
        let at_larger = decide_standard_with(p, q, larger, &mut standard_scratch);
        rec.case(properties, !expected || at_larger, || {
            triple_failure(
                "freespace-properties",
                "decider is not monotone in delta",
                &t,
                larger,
            )
        });
        let lb = lb_frechet(p.summary(), q.summary());
        rec.case(properties, !expected || lb <= delta, || {
            triple_failure(
                "freespace-properties",
                "yes-instance below the lower bound",
                &t,
                delta,
            )
        });
    }

    let summaries = random_summaries(&mut rng, options.index_points);
    let index = SpatialIndex::build(
        summaries.iter().enumerate().map(|(k, s)| (*s, k)),
        IndexConfig::default(),
    );
    rec.case(index_suite, index.validate().is_ok(), || Counterexample {
        suite: "index-box-query",
        check: "tree invariants violated".into(),
        p: vec![],
        q: vec![],
        delta: 0.0,
    });
    for _ in 0..options.iterations {
        let centre = if summaries.is_empty() || rng.gen_bool(0.2) {
            random_summaries(&mut rng, 1)[0]
        } else {
            summaries[rng.gen_range(0..summaries.len())]
        };
        let delta = rng.gen_range(0.0..3.0f64).powi(2);
        let mut got = index.range(&centre, delta);
        got.sort_unstable();
        let key = centre.to_array();
        let expected: Vec<usize> = summaries
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                s.to_array()
                    .iter()
                    .zip(&key)
                    .all(|(v, c)| (v - c).abs() <= delta)
            })
            .map(|(k, _)| k)
            .collect();
        let box_ok = got == expected;
        let mut got = index.candidates(&centre, delta);
        got.sort_unstable();
        let expected: Vec<usize> = summaries
            .iter()
            .enumerate()
            .filter(|(_, s)| lb_frechet(&centre, s) <= delta)
            .map(|(k, _)| k)
            .collect();
        rec.case(index_suite, box_ok && got == expected, || Counterexample {
            suite: "index-box-query",
            check: "index query differs from linear scan".into(),
            p: vec![
                [centre.start_x, centre.start_y],
                [centre.end_x, centre.end_y],
            ],
            q: vec![],
            delta,
        });
    }

    let report = rec.report;
    if let (Some(path), Some(cex)) = (&options.repro_path, &report.counterexample) {
        // Best effort: the report already carries the counterexample.
        let _ = std::fs::write(path, serde_json::to_string_pretty(cex).expect("serializes"));
    }
    report
}

/// Summaries of short random walks, with a sprinkling of exact duplicates.
pub fn random_summaries<R: Rng>(rng: &mut R, count: usize) -> Vec<CurveSummary> {
    let mut out: Vec<CurveSummary> = Vec::with_capacity(count);
    for _ in 0..count {
        if !out.is_empty() && rng.gen_bool(0.05) {
            let dup = out[rng.gen_range(0..out.len())];
            out.push(dup);
            continue;
        }
        let n = rng.gen_range(2..12);
        let mut at = Point::new(rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            pts.push(at);
            at = at.translate(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        }
        out.push(summarize(&pts).expect("non-empty"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let options = SelftestOptions {
            seed: 5,
            iterations: 200,
            index_points: 200,
            ..Default::default()
        };
        let a = selftest(&options);
        assert!(a.passed(), "{}", a.summary());
        let b = selftest(&options);
        assert_eq!(a.suites, b.suites);
    }
}
