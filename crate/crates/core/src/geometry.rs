//! Planar polygonal curves and the primitives every decider builds on.
//!
//! Coordinates are treated as planar Euclidean. Vertex indices and curve
//! parameters are 0-based: a curve with `n` vertices is the map
//! `[0, n - 1] -> R^2` that interpolates linearly between consecutive
//! vertices, so parameter `i` is exactly vertex `i`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freespace::Interval;

/// Relative slack under which a negative discriminant is read as tangency.
const TANGENCY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    #[inline]
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn translate(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("curve has {0} vertices, at least 2 are required")]
    TooFewVertices(usize),
    #[error("vertex {index} has a non-finite coordinate")]
    NonFinite { index: usize },
}

/// Start point, end point and axis extrema of a curve.
///
/// Viewed as a point in R^8 via [`CurveSummary::to_array`], this is the key
/// the spatial index stores.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CurveSummary {
    pub start_x: f64,
    pub start_y: f64,
    pub end_x: f64,
    pub end_y: f64,
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
}

impl CurveSummary {
    pub const DIM: usize = 8;

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.start_x,
            self.start_y,
            self.end_x,
            self.end_y,
            self.min_x,
            self.max_x,
            self.min_y,
            self.max_y,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self {
            start_x: a[0],
            start_y: a[1],
            end_x: a[2],
            end_y: a[3],
            min_x: a[4],
            max_x: a[5],
            min_y: a[6],
            max_y: a[7],
        }
    }

    pub fn start(&self) -> Point {
        Point::new(self.start_x, self.start_y)
    }

    pub fn end(&self) -> Point {
        Point::new(self.end_x, self.end_y)
    }

    /// Diagonal of the vertex bounding box.
    pub fn bbox_diameter(&self) -> f64 {
        Point::new(self.min_x, self.min_y).distance(Point::new(self.max_x, self.max_y))
    }
}

/// Summarizes a vertex sequence; `None` for an empty slice.
pub fn summarize(vertices: &[Point]) -> Option<CurveSummary> {
    let first = *vertices.first()?;
    let last = *vertices.last()?;
    let mut s = CurveSummary {
        start_x: first.x,
        start_y: first.y,
        end_x: last.x,
        end_y: last.y,
        min_x: first.x,
        max_x: first.x,
        min_y: first.y,
        max_y: first.y,
    };
    for v in &vertices[1..] {
        s.min_x = s.min_x.min(v.x);
        s.max_x = s.max_x.max(v.x);
        s.min_y = s.min_y.min(v.y);
        s.max_y = s.max_y.max(v.y);
    }
    Some(s)
}

/// Lower bound on the Fréchet distance of the two summarized curves.
///
/// Any traversal pairs the two start points and the two end points, and the
/// vertex attaining an axis extremum on one curve is at least the extremum
/// gap away from every point of the other.
pub fn lb_frechet(a: &CurveSummary, b: &CurveSummary) -> f64 {
    let start = a.start().distance(b.start());
    let end = a.end().distance(b.end());
    start
        .max(end)
        .max((a.min_x - b.min_x).abs())
        .max((a.max_x - b.max_x).abs())
        .max((a.min_y - b.min_y).abs())
        .max((a.max_y - b.max_y).abs())
}

/// An immutable polygonal curve with at least two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    id: String,
    vertices: Vec<Point>,
    prefix_lengths: Vec<f64>,
    summary: CurveSummary,
}

impl Curve {
    pub fn new(id: impl Into<String>, vertices: Vec<Point>) -> Result<Self, CurveError> {
        if vertices.len() < 2 {
            return Err(CurveError::TooFewVertices(vertices.len()));
        }
        if let Some(index) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(CurveError::NonFinite { index });
        }
        let mut prefix_lengths = Vec::with_capacity(vertices.len());
        let mut acc = 0.0;
        prefix_lengths.push(acc);
        for w in vertices.windows(2) {
            acc += w[0].distance(w[1]);
            prefix_lengths.push(acc);
        }
        let summary = summarize(&vertices).expect("non-empty");
        Ok(Self {
            id: id.into(),
            vertices,
            prefix_lengths,
            summary,
        })
    }

    pub fn from_coords(id: impl Into<String>, coords: &[(f64, f64)]) -> Result<Self, CurveError> {
        Self::new(id, coords.iter().copied().map(Point::from).collect())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    /// Number of vertices.
    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn prefix_lengths(&self) -> &[f64] {
        &self.prefix_lengths
    }

    pub fn summary(&self) -> &CurveSummary {
        &self.summary
    }

    pub fn total_length(&self) -> f64 {
        self.prefix_lengths[self.prefix_lengths.len() - 1]
    }

    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        self.vertices[self.vertices.len() - 1]
    }

    /// Point at parameter `t` in `[0, n - 1]`.
    ///
    /// Panics if `t` is outside the parameter range.
    pub fn interpolate(&self, t: f64) -> Point {
        let last = (self.len() - 1) as f64;
        assert!(
            (0.0..=last).contains(&t),
            "parameter {t} outside [0, {last}]"
        );
        let i = (t.floor() as usize).min(self.len() - 2);
        let lambda = t - i as f64;
        if lambda == 0.0 {
            return self.vertices[i];
        }
        if lambda == 1.0 {
            return self.vertices[i + 1];
        }
        self.vertices[i].lerp(self.vertices[i + 1], lambda)
    }

    /// Length of the subcurve between vertices `from` and `to` (inclusive,
    /// 0-based), read off the prefix sums in constant time.
    ///
    /// Panics unless `from <= to < n`.
    #[inline]
    pub fn subcurve_length(&self, from: usize, to: usize) -> f64 {
        assert!(
            from <= to && to < self.len(),
            "vertex range {from}..={to} invalid for {} vertices",
            self.len()
        );
        self.prefix_lengths[to] - self.prefix_lengths[from]
    }

    /// The same vertices under a new id.
    pub fn with_id(&self, id: impl Into<String>) -> Curve {
        Curve {
            id: id.into(),
            ..self.clone()
        }
    }
}

/// Parameters `λ ∈ [0, 1]` for which `(1-λ)·a + λ·b` lies within `radius`
/// of `center`.
///
/// The set is a single closed interval. Its endpoints are snapped so that
/// `lo == 0` exactly when `a` is within `radius`, and `hi == 1` exactly when
/// `b` is; adjacent edges therefore agree at their shared vertex.
pub fn segment_circle_free_interval(a: Point, b: Point, center: Point, radius: f64) -> Interval {
    let a_in = a.distance(center) <= radius;
    let b_in = b.distance(center) <= radius;
    if a_in && b_in {
        // Disk is convex.
        return Interval::FULL;
    }

    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return Interval::EMPTY;
    }
    let fx = a.x - center.x;
    let fy = a.y - center.y;
    let r2 = radius * radius;
    // Squared distance from the line to the centre, scaled by len2, is
    // cross^2 / len2; the discriminant of the normalized quadratic is
    // len2 * r^2 - cross^2.
    let cross = fx * dy - fy * dx;
    let mut disc = len2 * r2 - cross * cross;
    if disc < 0.0 {
        // An inside endpoint means the line does meet the disk.
        if a_in || b_in || -disc <= TANGENCY_EPS * len2 * r2 {
            disc = 0.0;
        } else {
            return Interval::EMPTY;
        }
    }
    let along = -(fx * dx + fy * dy);
    let root = disc.sqrt();
    let mut lo = ((along - root) / len2).max(0.0);
    let mut hi = ((along + root) / len2).min(1.0);

    if a_in {
        lo = 0.0;
        hi = hi.max(0.0);
    } else if lo <= 0.0 {
        lo = f64::MIN_POSITIVE;
    }
    if b_in {
        hi = 1.0;
        lo = lo.min(1.0);
    } else if hi >= 1.0 {
        hi = 1.0 - f64::EPSILON / 2.0;
    }
    if lo > hi {
        return Interval::EMPTY;
    }
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn summary8(s: &CurveSummary) -> [f64; 8] {
        [
            s.start_x, s.start_y, s.end_x, s.end_y, s.min_x, s.max_x, s.min_y, s.max_y,
        ]
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[pt(0.0, 0.0), pt(1.0, 0.0)]).unwrap();
        assert_eq!(summary8(&s), [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);

        let s = summarize(&[pt(0.0, 0.0)]).unwrap();
        assert_eq!(summary8(&s), [0.0; 8]);

        let s = summarize(&[pt(0.0, 0.0), pt(2.0, 3.0), pt(1.0, -1.0)]).unwrap();
        assert_eq!(summary8(&s), [0.0, 0.0, 1.0, -1.0, 0.0, 2.0, -1.0, 3.0]);

        assert!(summarize(&[]).is_none());
    }

    #[test]
    fn curve_rejects_short_and_non_finite() {
        assert_eq!(
            Curve::from_coords("a", &[(0.0, 0.0)]).unwrap_err(),
            CurveError::TooFewVertices(1)
        );
        assert_eq!(
            Curve::from_coords("a", &[]).unwrap_err(),
            CurveError::TooFewVertices(0)
        );
        assert_eq!(
            Curve::from_coords("a", &[(0.0, 0.0), (f64::NAN, 1.0)]).unwrap_err(),
            CurveError::NonFinite { index: 1 }
        );
    }

    #[test]
    fn lb_examples() {
        let a = Curve::from_coords("a", &[(0.0, 0.0), (1.0, 2.0), (4.0, -1.0)]).unwrap();
        assert_eq!(lb_frechet(a.summary(), a.summary()), 0.0);

        let moved: Vec<_> = a.vertices().iter().map(|p| p.translate(3.0, 4.0)).collect();
        let b = Curve::new("b", moved).unwrap();
        assert_eq!(lb_frechet(a.summary(), b.summary()), 5.0);

        let p = Curve::from_coords("p", &[(0.0, 0.0), (10.0, 0.0)]).unwrap();
        let s = Curve::from_coords("s", &[(0.0, 0.0), (10.0, 5.0)]).unwrap();
        assert_eq!(lb_frechet(p.summary(), s.summary()), 5.0);
    }

    #[test]
    fn interpolate_examples() {
        let c = Curve::from_coords("c", &[(0.0, 0.0), (2.0, 0.0)]).unwrap();
        assert_eq!(c.interpolate(0.0), pt(0.0, 0.0));
        assert_eq!(c.interpolate(0.5), pt(1.0, 0.0));
        assert_eq!(c.interpolate(1.0), pt(2.0, 0.0));
        let c = Curve::from_coords("c", &[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0)]).unwrap();
        assert_eq!(c.interpolate(1.25), pt(2.0, 0.5));
        assert_eq!(c.interpolate(2.0), pt(2.0, 2.0));
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn interpolate_out_of_range_panics() {
        let c = Curve::from_coords("c", &[(0.0, 0.0), (2.0, 0.0)]).unwrap();
        c.interpolate(1.5);
    }

    #[test]
    fn subcurve_length_examples() {
        let c = Curve::from_coords("c", &[(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)]).unwrap();
        assert_eq!(c.subcurve_length(1, 1), 0.0);
        assert_eq!(c.subcurve_length(0, 2), 7.0);
        assert_eq!(c.subcurve_length(0, 2), c.total_length());
        assert_eq!(c.subcurve_length(1, 2), 4.0);
    }

    #[test]
    #[should_panic]
    fn subcurve_length_reversed_range_panics() {
        let c = Curve::from_coords("c", &[(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)]).unwrap();
        c.subcurve_length(2, 1);
    }

    #[test]
    fn free_interval_examples() {
        let i = segment_circle_free_interval(pt(-2.0, 0.0), pt(2.0, 0.0), pt(0.0, 0.0), 1.0);
        assert_eq!((i.lo, i.hi), (0.25, 0.75));

        let i = segment_circle_free_interval(pt(0.0, 0.0), pt(1.0, 0.0), pt(5.0, 5.0), 1.0);
        assert!(i.is_empty());

        let i = segment_circle_free_interval(pt(0.0, 0.0), pt(2.0, 0.0), pt(1.0, 1.0), 1.0);
        assert_eq!((i.lo, i.hi), (0.5, 0.5));
    }

    #[test]
    fn free_interval_degenerate_segment() {
        let i = segment_circle_free_interval(pt(1.0, 1.0), pt(1.0, 1.0), pt(0.0, 1.0), 1.0);
        assert_eq!(i, Interval::FULL);
        let i = segment_circle_free_interval(pt(1.0, 1.0), pt(1.0, 1.0), pt(0.0, 1.0), 0.5);
        assert!(i.is_empty());
    }

    #[test]
    fn free_interval_snaps_vertex_endpoints() {
        // Endpoint exactly on the circle is inside.
        let i = segment_circle_free_interval(pt(1.0, 0.0), pt(5.0, 0.0), pt(0.0, 0.0), 1.0);
        assert_eq!((i.lo, i.hi), (0.0, 0.0));
        // Outside endpoint never reports parameter 0.
        let i = segment_circle_free_interval(pt(-1.0, 0.0), pt(3.0, 0.0), pt(0.0, 0.0), 0.5);
        assert!(i.lo > 0.0 && i.hi < 1.0);
    }

    #[test]
    fn endpoint_at_exact_radius_survives_rounding() {
        let a = pt(-0.023980081068454284, -0.8752095245993843);
        let b = pt(0.14203809035368087, -0.8990086610294437);
        let c = pt(1.879027892154298, -0.23584567841979298);
        for (from, to) in [(a, b), (b, a)] {
            for center in [a, b] {
                let r = center.distance(c);
                let i = segment_circle_free_interval(c, c.lerp(from, 0.5), from, from.distance(c));
                assert!(i.contains_start(), "{i:?}");
                let i = segment_circle_free_interval(from, to, c, r);
                if center == from {
                    assert!(i.contains_start(), "{i:?}");
                } else {
                    assert!(i.contains_end(), "{i:?}");
                }
            }
        }
    }

    #[test]
    fn zero_radius_hits_only_exact_points() {
        let i = segment_circle_free_interval(pt(0.0, 0.0), pt(4.0, 0.0), pt(1.0, 0.0), 0.0);
        assert_eq!((i.lo, i.hi), (0.25, 0.25));
        let i = segment_circle_free_interval(pt(0.0, 0.0), pt(4.0, 0.0), pt(1.0, 0.1), 0.0);
        assert!(i.is_empty());
    }
}
