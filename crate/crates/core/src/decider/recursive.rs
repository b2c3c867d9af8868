//! Divide-and-conquer free-space decider.
//!
//! A block `[p0, p1] x [q0, q1]` of vertex ranges receives reachability on
//! its left column and bottom row and produces reachability on its right
//! column and top row. The frontiers in [`Scratch`] are updated in place:
//! the block reads `vertical[q0..q1]` and `horizontal[p0..p1]` and overwrites
//! the same slots with its outputs, so splitting a block in two only means
//! running the halves in order.
//!
//! Before splitting, a block is resolved in constant time when the triangle
//! inequality proves its free space entirely empty or entirely full.

use serde::Serialize;

use crate::freespace::{cell_exits, propagate_exits, Interval, Scratch};
use crate::geometry::Curve;

/// Largest block side (in vertices) on which shortcut audits run.
pub const AUDIT_MAX_VERTICES: usize = 8;

/// Constant `c` in the block-visit bound `c * n * m * log2(n * m)`.
///
/// Without shortcuts the recursion is a binary tree over the
/// `(n - 1)(m - 1)` cells, so it never visits more than `2 (n-1)(m-1) - 1`
/// blocks.
pub const BLOCK_VISIT_CONSTANT: f64 = 2.0;

/// Counters describing how the recursion resolved its blocks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RecursionStats {
    pub blocks: u64,
    pub pruned_unreachable: u64,
    pub empty_shortcuts: u64,
    pub full_shortcuts: u64,
    /// Full shortcuts taken in a block other than the root.
    pub full_shortcuts_below_root: u64,
    pub cells: u64,
    pub splits: u64,
}

impl RecursionStats {
    /// Block-visit budget for curves with `n` and `m` vertices.
    pub fn block_budget(n: usize, m: usize) -> f64 {
        let nm = (n * m) as f64;
        BLOCK_VISIT_CONSTANT * nm * nm.log2().max(1.0)
    }

    pub fn accumulate(&mut self, other: &RecursionStats) {
        self.blocks += other.blocks;
        self.pruned_unreachable += other.pruned_unreachable;
        self.empty_shortcuts += other.empty_shortcuts;
        self.full_shortcuts += other.full_shortcuts;
        self.full_shortcuts_below_root += other.full_shortcuts_below_root;
        self.cells += other.cells;
        self.splits += other.splits;
    }
}

/// Knobs for the recursive decider.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursiveOptions {
    /// Exhaustively check every shortcut taken on blocks of at most
    /// [`AUDIT_MAX_VERTICES`] vertices per side, panicking on a violation.
    /// On by default in debug builds.
    pub audit_shortcuts: bool,
    #[doc(hidden)]
    /// Multiplier on `delta` in the fullness test. Anything but 1.0 breaks
    /// the decider; used to check the self-test catches it.
    pub full_shortcut_inflation: f64,
}

impl Default for RecursiveOptions {
    fn default() -> Self {
        Self {
            audit_shortcuts: cfg!(debug_assertions),
            full_shortcut_inflation: 1.0,
        }
    }
}

/// Whether the Fréchet distance of `p` and `q` is at most `delta`.
pub fn decide_recursive(p: &Curve, q: &Curve, delta: f64) -> bool {
    let mut scratch = Scratch::new();
    let mut stats = RecursionStats::default();
    decide_recursive_with(
        p,
        q,
        delta,
        &RecursiveOptions::default(),
        &mut scratch,
        &mut stats,
    )
}

pub fn decide_recursive_with(
    p: &Curve,
    q: &Curve,
    delta: f64,
    options: &RecursiveOptions,
    scratch: &mut Scratch,
    stats: &mut RecursionStats,
) -> bool {
    scratch.init(p, q, delta);
    if p.first().distance(q.first()) > delta || p.last().distance(q.last()) > delta {
        return false;
    }
    let Scratch {
        horizontal,
        vertical,
    } = scratch;
    let mut solver = Solver {
        p,
        q,
        delta,
        full_delta: delta * options.full_shortcut_inflation,
        audit: options.audit_shortcuts && options.full_shortcut_inflation == 1.0,
        horizontal: &mut horizontal.intervals,
        vertical: &mut vertical.intervals,
        stats,
    };
    solver.solve(0, p.len() - 1, 0, q.len() - 1, true);
    let top = &solver.horizontal;
    top[top.len() - 1].contains_end()
}

struct Solver<'a> {
    p: &'a Curve,
    q: &'a Curve,
    delta: f64,
    full_delta: f64,
    audit: bool,
    horizontal: &'a mut [Interval],
    vertical: &'a mut [Interval],
    stats: &'a mut RecursionStats,
}

impl Solver<'_> {
    fn solve(&mut self, p0: usize, p1: usize, q0: usize, q1: usize, root: bool) {
        self.stats.blocks += 1;

        let unreachable = self.horizontal[p0..p1].iter().all(Interval::is_empty)
            && self.vertical[q0..q1].iter().all(Interval::is_empty);
        if unreachable {
            // Outputs are empty and the slots already say so.
            self.stats.pruned_unreachable += 1;
            return;
        }

        let corner = self.p.vertex(p0).distance(self.q.vertex(q0));
        let p_len = self.p.subcurve_length(p0, p1);
        let q_len = self.q.subcurve_length(q0, q1);

        if corner - p_len - q_len > self.delta {
            self.stats.empty_shortcuts += 1;
            if self.audit {
                self.audit_block(p0, p1, q0, q1, false);
            }
            self.horizontal[p0..p1].fill(Interval::EMPTY);
            self.vertical[q0..q1].fill(Interval::EMPTY);
            return;
        }

        if corner + p_len + q_len <= self.full_delta
            && (self.horizontal[p0].contains_start() || self.vertical[q0].contains_start())
        {
            self.stats.full_shortcuts += 1;
            if !root {
                self.stats.full_shortcuts_below_root += 1;
            }
            if self.audit {
                self.audit_block(p0, p1, q0, q1, true);
            }
            self.horizontal[p0..p1].fill(Interval::FULL);
            self.vertical[q0..q1].fill(Interval::FULL);
            return;
        }

        let (p_edges, q_edges) = (p1 - p0, q1 - q0);
        if p_edges == 1 && q_edges == 1 {
            self.stats.cells += 1;
            let (free_right, free_top) = cell_exits(self.p, self.q, p0, q0, self.delta);
            let (right, top) =
                propagate_exits(self.vertical[q0], self.horizontal[p0], free_right, free_top);
            self.vertical[q0] = right;
            self.horizontal[p0] = top;
            return;
        }

        self.stats.splits += 1;
        if p_edges >= q_edges {
            let mid = (p0 + p1) / 2;
            self.solve(p0, mid, q0, q1, false);
            self.solve(mid, p1, q0, q1, false);
        } else {
            let mid = (q0 + q1) / 2;
            self.solve(p0, p1, q0, mid, false);
            self.solve(p0, p1, mid, q1, false);
        }
    }

    fn audit_block(&self, p0: usize, p1: usize, q0: usize, q1: usize, full: bool) {
        if p1 - p0 + 1 > AUDIT_MAX_VERTICES || q1 - q0 + 1 > AUDIT_MAX_VERTICES {
            return;
        }
        for i in p0..=p1 {
            for j in q0..=q1 {
                let d = self.p.vertex(i).distance(self.q.vertex(j));
                if full {
                    assert!(
                        d <= self.delta,
                        "full shortcut on [{p0},{p1}]x[{q0},{q1}] but |p_{i} - q_{j}| = {d} > {}",
                        self.delta
                    );
                } else {
                    assert!(
                        d > self.delta,
                        "empty shortcut on [{p0},{p1}]x[{q0},{q1}] but |p_{i} - q_{j}| = {d} <= {}",
                        self.delta
                    );
                }
            }
        }
    }
}
