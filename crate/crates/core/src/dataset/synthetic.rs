//! Deterministic synthetic trajectory databases.
//!
//! `clustered-paths` imitates road traffic: hubs sit on a square grid and
//! every curve follows the axis-aligned route between two hubs, so curves
//! sharing both hubs follow the same route and differ only by per-vertex
//! jitter. `uniform` is unstructured random walks.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Curve, Point};

use super::{Database, DatasetError};

pub const MIN_VERTICES: usize = 11;
pub const MAX_VERTICES: usize = 769;
pub const HUB_SPACING: f64 = 1000.0;
pub const JITTER: f64 = 10.0;
const WALK_EXTENT: f64 = 10_000.0;
const WALK_STEP: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    ClusteredPaths,
    Uniform,
}

impl FromStr for Profile {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clustered-paths" | "clustered" => Ok(Profile::ClusteredPaths),
            "uniform" => Ok(Profile::Uniform),
            other => Err(DatasetError::UnknownProfile(other.to_string())),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::ClusteredPaths => "clustered-paths",
            Profile::Uniform => "uniform",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub count: usize,
    pub profile: Profile,
}

/// A generated database plus the hub pair each clustered curve was drawn
/// between.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub database: Database,
    /// `(start hub, end hub)` per curve; `None` for the uniform profile.
    pub hubs: Vec<Option<(usize, usize)>>,
    /// Radius of the per-vertex jitter disk.
    pub jitter: f64,
}

pub fn generate_synthetic(
    seed: u64,
    count: usize,
    profile: &str,
) -> Result<Database, DatasetError> {
    let profile: Profile = profile.parse()?;
    Ok(synthesize(SyntheticSpec {
        seed,
        count,
        profile,
    })
    .database)
}

/// Side of the hub grid: about ten curves per ordered hub pair.
fn hub_grid_side(count: usize) -> usize {
    ((count as f64 / 10.0).sqrt().sqrt().round() as usize).max(2)
}

/// Vertex count, log-uniform on `[MIN_VERTICES, MAX_VERTICES]`.
fn vertex_count(rng: &mut ChaCha8Rng) -> usize {
    let (lo, hi) = ((MIN_VERTICES as f64).ln(), ((MAX_VERTICES + 1) as f64).ln());
    let n = rng.gen_range(lo..hi).exp().floor() as usize;
    n.clamp(MIN_VERTICES, MAX_VERTICES)
}

fn disk_offset(rng: &mut ChaCha8Rng, radius: f64) -> (f64, f64) {
    let r = radius * rng.gen::<f64>().sqrt();
    let a = rng.gen_range(0.0..TAU);
    (r * a.cos(), r * a.sin())
}

pub fn synthesize(spec: SyntheticSpec) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let width = (spec.count.max(1) as f64).log10().ceil().max(1.0) as usize;
    let id = |k: usize| format!("c{k:0width$}.txt");
    let mut curves = Vec::with_capacity(spec.count);
    let mut hubs = Vec::with_capacity(spec.count);

    match spec.profile {
        Profile::ClusteredPaths => {
            let side = hub_grid_side(spec.count);
            let hub = |h: usize| {
                Point::new(
                    (h % side) as f64 * HUB_SPACING,
                    (h / side) as f64 * HUB_SPACING,
                )
            };
            for k in 0..spec.count {
                let a = rng.gen_range(0..side * side);
                let mut b = rng.gen_range(0..side * side - 1);
                if b >= a {
                    b += 1;
                }
                let (pa, pb) = (hub(a), hub(b));
                // The route is a function of the hub pair alone.
                let x_first = (a + b) % 2 == 0;
                let corner = if x_first {
                    Point::new(pb.x, pa.y)
                } else {
                    Point::new(pa.x, pb.y)
                };
                let mut route = vec![pa];
                if corner != pa && corner != pb {
                    route.push(corner);
                }
                route.push(pb);
                let n = vertex_count(&mut rng);
                let vertices = sample_route(&mut rng, &route, n);
                curves.push(Curve::new(id(k), vertices).expect("generated curve is valid"));
                hubs.push(Some((a, b)));
            }
        }
        Profile::Uniform => {
            for k in 0..spec.count {
                let n = vertex_count(&mut rng);
                let mut at = Point::new(
                    rng.gen_range(0.0..WALK_EXTENT),
                    rng.gen_range(0.0..WALK_EXTENT),
                );
                let mut vertices = Vec::with_capacity(n);
                for _ in 0..n {
                    vertices.push(at);
                    at = at.translate(
                        rng.gen_range(-WALK_STEP..WALK_STEP),
                        rng.gen_range(-WALK_STEP..WALK_STEP),
                    );
                }
                curves.push(Curve::new(id(k), vertices).expect("generated curve is valid"));
                hubs.push(None);
            }
        }
    }

    Synthetic {
        database: Database::from_curves(curves).expect("generated ids are unique"),
        hubs,
        jitter: JITTER,
    }
}

/// `n` jittered vertices along a polyline route, always including the
/// route's own vertices so the curve cannot cut corners.
fn sample_route(rng: &mut ChaCha8Rng, route: &[Point], n: usize) -> Vec<Point> {
    let lengths: Vec<f64> = route.windows(2).map(|w| w[0].distance(w[1])).collect();
    let total: f64 = lengths.iter().sum();
    let extra = n.saturating_sub(route.len());
    let mut stations: Vec<f64> = (0..extra).map(|_| rng.gen_range(0.0..total)).collect();
    let mut acc = 0.0;
    for l in &lengths {
        acc += l;
        stations.push(acc);
    }
    stations.push(0.0);
    stations.sort_by(f64::total_cmp);

    let mut out = Vec::with_capacity(stations.len());
    let mut edge = 0;
    let mut edge_start = 0.0;
    for s in stations {
        while edge + 1 < lengths.len() && s > edge_start + lengths[edge] {
            edge_start += lengths[edge];
            edge += 1;
        }
        let t = if lengths[edge] > 0.0 {
            ((s - edge_start) / lengths[edge]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (dx, dy) = disk_offset(rng, JITTER);
        out.push(route[edge].lerp(route[edge + 1], t).translate(dx, dy));
    }
    out
}
