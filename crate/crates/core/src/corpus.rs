//! Random curve pairs for differential testing of the deciders.

use rand::Rng;

use crate::freespace::frechet_distance_bisection;
use crate::geometry::{Curve, Point};

/// Multiples of the estimated distance at which triples are decided.
pub const DELTA_FACTORS: [f64; 5] = [0.5, 0.9, 1.0, 1.1, 2.0];

/// Relative bracket width of the distance estimate.
pub const BISECTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Triple {
    pub p: Curve,
    pub q: Curve,
    pub delta: f64,
    /// Bisection estimate of `d_F(p, q)`.
    pub distance: f64,
}

/// Random walk with `n` vertices starting at `start`.
pub fn random_walk<R: Rng>(rng: &mut R, id: &str, start: Point, n: usize, step: f64) -> Curve {
    let mut at = start;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        vertices.push(at);
        at = at.translate(rng.gen_range(-step..=step), rng.gen_range(-step..=step));
    }
    Curve::new(id, vertices).expect("random walk is a valid curve")
}

/// `m` points along `base` at sorted random parameters, each moved by up to
/// `noise` per coordinate. Endpoints are kept (up to noise).
pub fn resample<R: Rng>(rng: &mut R, id: &str, base: &Curve, m: usize, noise: f64) -> Curve {
    let last = (base.len() - 1) as f64;
    let mut params: Vec<f64> = (0..m.saturating_sub(2))
        .map(|_| rng.gen_range(0.0..=last))
        .collect();
    params.push(0.0);
    params.push(last);
    params.sort_by(f64::total_cmp);
    let vertices = params
        .into_iter()
        .map(|t| {
            base.interpolate(t)
                .translate(rng.gen_range(-noise..=noise), rng.gen_range(-noise..=noise))
        })
        .collect();
    Curve::new(id, vertices).expect("resampled curve is valid")
}

/// A pair of curves with `2..=max_vertices` vertices each.
///
/// Half the pairs are a walk and a noisy resampling of it (similar curves,
/// where the filters and shortcuts matter); the rest are two walks from
/// nearby starts.
pub fn random_pair<R: Rng>(rng: &mut R, max_vertices: usize) -> (Curve, Curve) {
    let n = rng.gen_range(2..=max_vertices);
    let m = rng.gen_range(2..=max_vertices);
    let p = random_walk(rng, "p", Point::new(0.0, 0.0), n, 1.0);
    let q = if rng.gen_bool(0.5) {
        let noise = rng.gen_range(0.0..0.5);
        resample(rng, "q", &p, m, noise)
    } else {
        let start = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        random_walk(rng, "q", start, m, 1.0)
    };
    (p, q)
}

/// A random pair decided at a random multiple of its estimated distance.
pub fn random_triple<R: Rng>(rng: &mut R, max_vertices: usize) -> Triple {
    let (p, q) = random_pair(rng, max_vertices);
    let distance = frechet_distance_bisection(&p, &q, BISECTION_TOLERANCE);
    let factor = DELTA_FACTORS[rng.gen_range(0..DELTA_FACTORS.len())];
    Triple {
        delta: factor * distance,
        p,
        q,
        distance,
    }
}
