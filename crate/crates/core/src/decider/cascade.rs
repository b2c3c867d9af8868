use std::time::{Duration, Instant};

use serde::Serialize;

use crate::freespace::{decide_standard_with, Scratch};
use crate::geometry::Curve;

use super::filters::{greedy_filter, negative_filter};
use super::recursive::{decide_recursive_with, RecursionStats, RecursiveOptions};
use super::FilterVerdict;

/// Which exact decider the cascade falls back to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactDecider {
    Recursive,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeConfig {
    pub greedy: bool,
    pub negative: bool,
    pub exact: ExactDecider,
    /// Record per-stage wall-clock time.
    pub timing: bool,
    pub recursive: RecursiveOptions,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self {
            greedy: true,
            negative: true,
            exact: ExactDecider::Recursive,
            timing: true,
            recursive: RecursiveOptions::default(),
        }
    }
}

/// Stage that settled a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Greedy,
    Negative,
    Exact,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub greedy: Duration,
    pub negative: Duration,
    pub exact: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.greedy + self.negative + self.exact
    }

    pub fn accumulate(&mut self, other: &StageTimings) {
        self.greedy += other.greedy;
        self.negative += other.negative;
        self.exact += other.exact;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOutcome {
    pub within: bool,
    pub stage: Stage,
    pub timings: StageTimings,
}

/// The filter cascade with its scratch buffers; reuse one per worker.
#[derive(Debug, Clone, Default)]
pub struct Cascade {
    pub config: CascadeConfig,
    scratch: Scratch,
    stats: RecursionStats,
}

struct Stopwatch(Option<Instant>);

impl Stopwatch {
    fn start(enabled: bool) -> Self {
        Stopwatch(enabled.then(Instant::now))
    }

    fn lap(&mut self, into: &mut Duration) {
        if let Some(t) = self.0.as_mut() {
            let now = Instant::now();
            *into += now - *t;
            *t = now;
        }
    }
}

impl Cascade {
    pub fn new(config: CascadeConfig) -> Self {
        Self {
            config,
            ..Default::default()
        }
    }

    /// Recursion counters accumulated over every exact decision so far.
    pub fn recursion_stats(&self) -> &RecursionStats {
        &self.stats
    }

    pub fn decide(&mut self, p: &Curve, q: &Curve, delta: f64) -> CascadeOutcome {
        let mut timings = StageTimings::default();
        let mut clock = Stopwatch::start(self.config.timing);

        if self.config.greedy {
            let verdict = greedy_filter(p, q, delta);
            clock.lap(&mut timings.greedy);
            if verdict == FilterVerdict::CertifiedYes {
                return CascadeOutcome {
                    within: true,
                    stage: Stage::Greedy,
                    timings,
                };
            }
        }

        if self.config.negative {
            let rejected = negative_filter(p, q, delta) == FilterVerdict::CertifiedNo
                || negative_filter(q, p, delta) == FilterVerdict::CertifiedNo;
            clock.lap(&mut timings.negative);
            if rejected {
                return CascadeOutcome {
                    within: false,
                    stage: Stage::Negative,
                    timings,
                };
            }
        }

        let within = match self.config.exact {
            ExactDecider::Recursive => {
                let mut stats = RecursionStats::default();
                let r = decide_recursive_with(
                    p,
                    q,
                    delta,
                    &self.config.recursive,
                    &mut self.scratch,
                    &mut stats,
                );
                self.stats.accumulate(&stats);
                r
            }
            ExactDecider::Standard => decide_standard_with(p, q, delta, &mut self.scratch),
        };
        clock.lap(&mut timings.exact);
        CascadeOutcome {
            within,
            stage: Stage::Exact,
            timings,
        }
    }
}

/// Whether `d_F(p, q) <= delta`, through the full default cascade.
pub fn decide_cascade(p: &Curve, q: &Curve, delta: f64) -> bool {
    Cascade::new(CascadeConfig {
        timing: false,
        ..Default::default()
    })
    .decide(p, q, delta)
    .within
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freespace::decide_standard;

    fn curve(c: &[(f64, f64)]) -> Curve {
        Curve::from_coords("c", c).unwrap()
    }

    #[test]
    fn identical_resolved_by_greedy() {
        let p = curve(&[(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]);
        let out = Cascade::default().decide(&p, &p, 0.0);
        assert!(out.within);
        assert_eq!(out.stage, Stage::Greedy);
    }

    #[test]
    fn far_vertex_resolved_by_negative_filter() {
        let p = curve(&[(0.0, 0.0), (5.0, 0.0)]);
        let q = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        let out = Cascade::default().decide(&p, &q, 1.0);
        assert!(!out.within);
        assert_eq!(out.stage, Stage::Negative);
        assert!(!decide_standard(&p, &q, 1.0));
    }

    #[test]
    fn tent_falls_through_to_exact() {
        let p = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        let q = curve(&[(0.0, 0.0), (0.5, 0.3), (1.0, 0.0)]);
        // Greedy vertex walk needs 0.5; the negative filter is relaxed by
        // the edge lengths; only the exact decider settles 0.3.
        let out = Cascade::default().decide(&p, &q, 0.3);
        assert_eq!(out.stage, Stage::Exact);
        assert!(out.within);
        assert!(decide_cascade(&p, &q, 0.3));
        assert!(!decide_cascade(&p, &q, 0.29));
    }

    #[test]
    fn ablations_agree() {
        let p = curve(&[(0.0, 0.0), (1.0, 0.4), (2.0, -0.2), (3.0, 0.0)]);
        let q = curve(&[(0.0, 0.1), (1.5, 0.0), (3.0, 0.2)]);
        for delta in [0.1, 0.3, 0.5, 1.0] {
            let expected = decide_standard(&p, &q, delta);
            for (greedy, negative, exact) in [
                (false, true, ExactDecider::Recursive),
                (true, false, ExactDecider::Recursive),
                (true, true, ExactDecider::Standard),
                (false, false, ExactDecider::Recursive),
            ] {
                let mut c = Cascade::new(CascadeConfig {
                    greedy,
                    negative,
                    exact,
                    ..Default::default()
                });
                assert_eq!(c.decide(&p, &q, delta).within, expected);
            }
        }
    }
}
