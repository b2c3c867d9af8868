//! Range search over polygonal trajectories under the continuous Fréchet
//! distance.
//!
//! A query `(curve, delta)` returns every database curve within Fréchet
//! distance `delta`. The pipeline has three phases:
//!
//! 1. [`index::SpatialIndex`] enumerates the curves whose start point, end
//!    point and axis extrema are compatible with `delta`
//!    ([`geometry::lb_frechet`]), which never drops a true answer.
//! 2. A greedy vertex walk certifies close pairs and a discrete
//!    earliest-reachable scan rejects far ones ([`decider`]).
//! 3. The remaining pairs go to a divide-and-conquer free-space decider that
//!    settles whole blocks of the free-space diagram at once when the
//!    triangle inequality proves them full or empty.
//!
//! [`freespace::decide_standard`] is the classic cell-by-cell decider; it is
//! kept as the reference the other deciders are tested against.

pub mod bench;
pub mod corpus;
pub mod dataset;
pub mod decider;
pub mod engine;
pub mod freespace;
pub mod geometry;
pub mod index;
pub mod selftest;

pub use dataset::{Database, Query};
pub use decider::{decide_cascade, decide_recursive};
pub use engine::{Engine, QueryResult};
pub use freespace::{decide_standard, Interval};
pub use geometry::{lb_frechet, Curve, CurveSummary, Point};
pub use index::SpatialIndex;
