//! Free-space cells, single-cell reachability, and the row-by-row decider.
//!
//! Orientation: the parameter plane is `[0, n-1] x [0, m-1]`, the first
//! coordinate running along `p` (the query side) and the second along `q`.
//! Cell `(i, j)` is spanned by edge `i` of `p` and edge `j` of `q`. Its
//! *left* and *right* sides hold `p` fixed at vertex `i` resp. `i + 1` and
//! are parameterized along edge `j` of `q`; its *bottom* and *top* sides hold
//! `q` fixed at vertex `j` resp. `j + 1` and are parameterized along edge `i`
//! of `p`.
//!
//! Reachability along the whole grid is carried in two frontiers: one
//! interval per edge of `p` (the horizontal frontier, a row of top/bottom
//! sides) and one per edge of `q` (the vertical frontier, a column of
//! left/right sides). Processing a cell reads its left and bottom inputs
//! from the frontiers and overwrites them with its right and top outputs.

use serde::{Deserialize, Serialize};

use crate::geometry::{lb_frechet, segment_circle_free_interval, Curve};

/// Closed parameter interval on one cell side; `lo > hi` encodes empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 1.0, hi: 0.0 };
    pub const FULL: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    /// Whether the side's start vertex (parameter 0) is in the interval.
    #[inline]
    pub fn contains_start(&self) -> bool {
        self.lo == 0.0 && self.hi >= 0.0
    }

    /// Whether the side's end vertex (parameter 1) is in the interval.
    #[inline]
    pub fn contains_end(&self) -> bool {
        self.hi == 1.0 && self.lo <= 1.0
    }

    /// The part of `self` at or above `t`.
    #[inline]
    pub fn from_at_least(&self, t: f64) -> Interval {
        if self.is_empty() || t > self.hi {
            Interval::EMPTY
        } else {
            Interval::new(self.lo.max(t), self.hi)
        }
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.is_empty() || (!other.is_empty() && other.lo <= self.lo && self.hi <= other.hi)
    }
}

/// Free portions of the four sides of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellBoundaries {
    pub left: Interval,
    pub bottom: Interval,
    pub right: Interval,
    pub top: Interval,
}

/// Free intervals on all four sides of cell `(i, j)`.
///
/// Panics if `i` or `j` is not an edge index of its curve.
pub fn cell_boundaries(p: &Curve, q: &Curve, i: usize, j: usize, delta: f64) -> CellBoundaries {
    assert!(
        i < p.edge_count() && j < q.edge_count(),
        "cell ({i}, {j}) out of range"
    );
    let (p0, p1) = (p.vertex(i), p.vertex(i + 1));
    let (q0, q1) = (q.vertex(j), q.vertex(j + 1));
    CellBoundaries {
        left: segment_circle_free_interval(q0, q1, p0, delta),
        bottom: segment_circle_free_interval(p0, p1, q0, delta),
        right: segment_circle_free_interval(q0, q1, p1, delta),
        top: segment_circle_free_interval(p0, p1, q1, delta),
    }
}

/// Free intervals on the right and top side of cell `(i, j)`; the only two
/// a propagation step needs.
#[inline]
pub(crate) fn cell_exits(
    p: &Curve,
    q: &Curve,
    i: usize,
    j: usize,
    delta: f64,
) -> (Interval, Interval) {
    let (p0, p1) = (p.vertex(i), p.vertex(i + 1));
    let (q0, q1) = (q.vertex(j), q.vertex(j + 1));
    (
        segment_circle_free_interval(q0, q1, p1, delta),
        segment_circle_free_interval(p0, p1, q1, delta),
    )
}

/// Reachable parts of the right and top side given reachable parts of the
/// left and bottom side.
///
/// The free space of a cell is convex, so a monotone path exists from any
/// entry point to any free exit point that dominates it coordinate-wise.
pub fn propagate_cell(
    reach_left: Interval,
    reach_bottom: Interval,
    bounds: &CellBoundaries,
) -> (Interval, Interval) {
    propagate_exits(reach_left, reach_bottom, bounds.right, bounds.top)
}

#[inline]
pub(crate) fn propagate_exits(
    reach_left: Interval,
    reach_bottom: Interval,
    free_right: Interval,
    free_top: Interval,
) -> (Interval, Interval) {
    let right = if !reach_bottom.is_empty() {
        free_right
    } else if !reach_left.is_empty() {
        free_right.from_at_least(reach_left.lo)
    } else {
        Interval::EMPTY
    };
    let top = if !reach_left.is_empty() {
        free_top
    } else if !reach_bottom.is_empty() {
        free_top.from_at_least(reach_bottom.lo)
    } else {
        Interval::EMPTY
    };
    (right, top)
}

/// Reachability intervals along one boundary row or column.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Frontier {
    pub intervals: Vec<Interval>,
}

impl Frontier {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.intervals
    }

    fn reset(&mut self, len: usize) {
        self.intervals.clear();
        self.intervals.resize(len, Interval::EMPTY);
    }
}

/// Reusable frontier buffers for one decider invocation at a time.
///
/// After a decision the horizontal frontier holds reachability on the top
/// edge of the diagram (`q` at its last vertex) and the vertical frontier
/// holds reachability on the right edge (`p` at its last vertex), unless the
/// decider returned early on a failed corner check.
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    pub horizontal: Frontier,
    pub vertical: Frontier,
}

impl Scratch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(p_edges: usize, q_edges: usize) -> Self {
        Self {
            horizontal: Frontier {
                intervals: Vec::with_capacity(p_edges),
            },
            vertical: Frontier {
                intervals: Vec::with_capacity(q_edges),
            },
        }
    }

    /// Fills both frontiers with the reachable boundary of the diagram's
    /// bottom row and left column. A blocked edge cuts off everything past it.
    pub(crate) fn init(&mut self, p: &Curve, q: &Curve, delta: f64) {
        self.horizontal.reset(p.edge_count());
        self.vertical.reset(q.edge_count());
        if p.first().distance(q.first()) > delta {
            return;
        }
        fill_contiguous(&mut self.horizontal.intervals, p, q.first(), delta);
        fill_contiguous(&mut self.vertical.intervals, q, p.first(), delta);
    }
}

fn fill_contiguous(out: &mut [Interval], along: &Curve, fixed: crate::geometry::Point, delta: f64) {
    for (k, slot) in out.iter_mut().enumerate() {
        let free = segment_circle_free_interval(along.vertex(k), along.vertex(k + 1), fixed, delta);
        if !free.contains_start() {
            break;
        }
        *slot = free;
        if !free.contains_end() {
            break;
        }
    }
}

/// Whether the Fréchet distance of `p` and `q` is at most `delta`, by the
/// classic dynamic program over all `(n-1)(m-1)` cells.
pub fn decide_standard(p: &Curve, q: &Curve, delta: f64) -> bool {
    decide_standard_with(p, q, delta, &mut Scratch::new())
}

#[allow(clippy::needless_range_loop)]
pub fn decide_standard_with(p: &Curve, q: &Curve, delta: f64, scratch: &mut Scratch) -> bool {
    scratch.init(p, q, delta);
    if p.first().distance(q.first()) > delta || p.last().distance(q.last()) > delta {
        return false;
    }
    let Scratch {
        horizontal,
        vertical,
    } = scratch;
    let row = &mut horizontal.intervals;
    let col = &mut vertical.intervals;
    for i in 0..p.edge_count() {
        for j in 0..q.edge_count() {
            let (left, bottom) = (col[j], row[i]);
            if left.is_empty() && bottom.is_empty() {
                // Outputs stay empty; both slots already hold EMPTY.
                continue;
            }
            let (free_right, free_top) = cell_exits(p, q, i, j, delta);
            let (right, top) = propagate_exits(left, bottom, free_right, free_top);
            col[j] = right;
            row[i] = top;
        }
    }
    row[row.len() - 1].contains_end()
}

/// Estimate of the Fréchet distance by bisection over [`decide_standard`].
///
/// Returns the smallest threshold found for which the decider answers yes,
/// with the bracket narrowed to `rel_tol` relative width. The initial upper
/// end is the largest vertex distance along a greedy vertex traversal, which
/// is itself an achievable leash length.
pub fn frechet_distance_bisection(p: &Curve, q: &Curve, rel_tol: f64) -> f64 {
    let mut scratch = Scratch::new();
    let mut lo = lb_frechet(p.summary(), q.summary());
    if decide_standard_with(p, q, lo, &mut scratch) {
        return lo;
    }
    let mut hi = crate::decider::greedy_leash(p, q);
    let mut slack = hi.max(f64::MIN_POSITIVE) * f64::EPSILON;
    while !decide_standard_with(p, q, hi, &mut scratch) {
        hi += slack;
        slack *= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if decide_standard_with(p, q, mid, &mut scratch) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
