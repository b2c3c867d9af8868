use crate::geometry::Curve;

use super::FilterVerdict;

/// Index of the next pair on the greedy vertex walk from `(i, j)`.
///
/// Ties prefer the diagonal, then advancing on `p`.
#[inline]
fn greedy_step(p: &Curve, q: &Curve, i: usize, j: usize) -> (usize, usize, f64) {
    let (n, m) = (p.len(), q.len());
    if i + 1 == n {
        return (i, j + 1, p.vertex(i).distance(q.vertex(j + 1)));
    }
    if j + 1 == m {
        return (i + 1, j, p.vertex(i + 1).distance(q.vertex(j)));
    }
    let diag = p.vertex(i + 1).distance(q.vertex(j + 1));
    let along_p = p.vertex(i + 1).distance(q.vertex(j));
    let along_q = p.vertex(i).distance(q.vertex(j + 1));
    let mut best = (i + 1, j + 1, diag);
    if along_p < best.2 {
        best = (i + 1, j, along_p);
    }
    if along_q < best.2 {
        best = (i, j + 1, along_q);
    }
    best
}

/// Positive filter: walks the vertex grid greedily towards the closest next
/// pair and certifies `d_F <= delta` if every visited pair is within `delta`.
///
/// Soundness: the walk is a discrete traversal. Moving one side along an edge
/// while the other rests on a vertex, or moving both linearly along their
/// edges, keeps the leash within the larger of its two endpoint lengths
/// because distance to a point and distance between two linearly moving
/// points are convex in the interpolation parameter.
pub fn greedy_filter(p: &Curve, q: &Curve, delta: f64) -> FilterVerdict {
    if p.first().distance(q.first()) > delta {
        return FilterVerdict::Unknown;
    }
    let (n, m) = (p.len(), q.len());
    let (mut i, mut j) = (0, 0);
    while i + 1 < n || j + 1 < m {
        let (ni, nj, d) = greedy_step(p, q, i, j);
        if d > delta {
            return FilterVerdict::Unknown;
        }
        i = ni;
        j = nj;
    }
    FilterVerdict::CertifiedYes
}

/// Largest vertex distance along the greedy walk: an upper bound on `d_F`.
pub fn greedy_leash(p: &Curve, q: &Curve) -> f64 {
    let (n, m) = (p.len(), q.len());
    let (mut i, mut j) = (0, 0);
    let mut leash = p.first().distance(q.first());
    while i + 1 < n || j + 1 < m {
        let (ni, nj, d) = greedy_step(p, q, i, j);
        leash = leash.max(d);
        i = ni;
        j = nj;
    }
    leash
}

/// Negative filter in one orientation.
///
/// For each vertex of `p` in order, finds the earliest vertex `j` of `q`, no
/// earlier than the previous one, with `|q_j - p_i| - |q_j q_{j+1}| <= delta`
/// (the segment term is 0 at the last vertex). This rounds down the earliest
/// point of `q` a `delta`-traversal can occupy while at `p_i`, so running out
/// of candidates proves `d_F > delta`.
pub fn negative_filter(p: &Curve, q: &Curve, delta: f64) -> FilterVerdict {
    let m = q.len();
    let mut j = 0;
    for pi in p.vertices() {
        loop {
            if j == m {
                return FilterVerdict::CertifiedNo;
            }
            let slack = if j + 1 < m {
                q.subcurve_length(j, j + 1)
            } else {
                0.0
            };
            if q.vertex(j).distance(*pi) - slack <= delta {
                break;
            }
            j += 1;
        }
    }
    FilterVerdict::Unknown
}

/// Runs [`negative_filter`] on `(p, q)` and then on `(q, p)`, stopping at the
/// first certificate.
pub fn negative_filter_both(p: &Curve, q: &Curve, delta: f64) -> FilterVerdict {
    match negative_filter(p, q, delta) {
        FilterVerdict::CertifiedNo => FilterVerdict::CertifiedNo,
        _ => negative_filter(q, p, delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(c: &[(f64, f64)]) -> Curve {
        Curve::from_coords("c", c).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let p = curve(&[(0.0, 0.0), (1.0, 2.0), (3.0, 1.0), (4.0, 4.0)]);
        assert_eq!(greedy_filter(&p, &p, 0.0), FilterVerdict::CertifiedYes);

        let p = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        let q = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(greedy_filter(&p, &q, 0.5), FilterVerdict::Unknown);
    }

    #[test]
    fn greedy_leash_of_identical_is_zero() {
        let p = curve(&[(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]);
        assert_eq!(greedy_leash(&p, &p), 0.0);
        let q = curve(&[(0.0, 1.0), (3.0, 2.0)]);
        assert!(greedy_leash(&p, &q) >= 1.0);
    }

    #[test]
    fn greedy_prefers_diagonal_on_ties() {
        // From (0,0) all three successors are at distance 1.
        let p = curve(&[(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)]);
        let q = curve(&[(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)]);
        assert_eq!(greedy_step(&p, &q, 0, 0), (1, 1, 0.0));
        let q = curve(&[(1.0, 0.0), (-1.0, 0.0)]);
        let p = curve(&[(0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(greedy_step(&p, &q, 0, 0).0, 1);
    }

    #[test]
    fn negative_examples() {
        let p = curve(&[(0.0, 0.0), (5.0, 0.0)]);
        let q = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(negative_filter(&p, &q, 1.0), FilterVerdict::CertifiedNo);

        let p = curve(&[(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]);
        assert_eq!(negative_filter(&p, &p, 0.0), FilterVerdict::Unknown);
        assert_eq!(negative_filter_both(&p, &p, 0.0), FilterVerdict::Unknown);
    }

    #[test]
    fn negative_filter_is_orientation_dependent() {
        // p visits a far vertex; scanning q for it fails, the swapped scan
        // is relaxed by p's long edges and does not.
        let p = curve(&[(0.0, 0.0), (0.0, 10.0), (1.0, 0.0)]);
        let q = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(negative_filter(&p, &q, 2.0), FilterVerdict::CertifiedNo);
        assert_eq!(negative_filter(&q, &p, 2.0), FilterVerdict::Unknown);
        assert_eq!(
            negative_filter_both(&q, &p, 2.0),
            FilterVerdict::CertifiedNo
        );
    }
}
