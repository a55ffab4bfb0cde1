//! Exact min-cost perfect matching on the complete Euclidean graph.
//!
//! The blossom solver runs on a sparse candidate graph (the `k` nearest
//! neighbours of every point). Its dual solution is then checked against every
//! pair of points; any pair with negative reduced cost joins the candidate
//! graph and the solve repeats. When no pair violates the duals, the matching
//! is optimal on the complete graph by LP duality. Small inputs go straight to
//! the complete graph.

use alloc::vec::Vec;

use super::blossom::max_weight_matching;
use super::{require_pairs, split_leftover, Matching};
use crate::error::Result;
use crate::geometry::{dist, PointSet};

const DENSE_LIMIT: usize = 64;
const INITIAL_NEIGHBOURS: usize = 10;
/// Integer weights carry this many bits of the largest distance.
const WEIGHT_BITS: i32 = 40;

/// Min-cost perfect matching by Edmonds' blossom algorithm. For odd `n` the
/// most isolated point is left out.
pub fn min_cost_matching_exact(points: &PointSet) -> Result<Matching> {
    require_pairs(points)?;
    let (active, leftover) = split_leftover(points);
    let sub = points.select(&active);
    let pairs = solve(&sub)
        .into_iter()
        .map(|(a, b)| (active[a], active[b]))
        .collect();
    Ok(Matching::from_pairs(points, pairs, leftover))
}

struct Weights {
    scale: f64,
    top: i64,
}

impl Weights {
    fn new(points: &PointSet) -> Self {
        let diag = points
            .bounding_box()
            .map(|bb| libm::sqrt(bb.iter().map(|(lo, hi)| (hi - lo) * (hi - lo)).sum::<f64>()))
            .unwrap_or(0.0);
        let scale = if diag > 0.0 {
            libm::ldexp(1.0, WEIGHT_BITS) / diag
        } else {
            1.0
        };
        Weights {
            scale,
            top: (diag * scale) as i64 + 1,
        }
    }

    /// Maximising `top - round(scale * distance)` over perfect matchings
    /// minimises total length.
    #[inline]
    fn weight(&self, points: &PointSet, i: usize, j: usize) -> i64 {
        self.top - libm::round(dist(points.point(i), points.point(j)) * self.scale) as i64
    }
}

fn solve(points: &PointSet) -> Vec<(usize, usize)> {
    let n = points.len();
    let weights = Weights::new(points);
    let mut in_graph: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    let add = |in_graph: &mut Vec<Vec<usize>>, i: usize, j: usize| -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if in_graph[a].contains(&b) {
            return false;
        }
        in_graph[a].push(b);
        true
    };
    let mut k = if n <= DENSE_LIMIT { n - 1 } else { INITIAL_NEIGHBOURS.min(n - 1) };
    for (i, nbrs) in nearest_neighbours(points, k).into_iter().enumerate() {
        for j in nbrs {
            add(&mut in_graph, i, j);
        }
    }
    loop {
        let edges: Vec<(usize, usize, i64)> = in_graph
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
            .map(|(a, b)| (a, b, weights.weight(points, a, b)))
            .collect();
        let sol = max_weight_matching(n, &edges, true);
        if !sol.is_perfect() {
            // the candidate graph has no perfect matching; widen it
            k = (2 * k).min(n - 1);
            for (i, nbrs) in nearest_neighbours(points, k).into_iter().enumerate() {
                for j in nbrs {
                    add(&mut in_graph, i, j);
                }
            }
            continue;
        }
        let cert = sol.certificate();
        let mut added = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                if cert.slack(i, j, weights.weight(points, i, j)) < 0 && add(&mut in_graph, i, j) {
                    added += 1;
                }
            }
        }
        if added == 0 {
            return (0..n)
                .filter_map(|v| sol.mate[v].filter(|&u| u > v).map(|u| (v, u)))
                .collect();
        }
    }
}

/// The `k` nearest other points of every point (brute force, O(n^2 log k)).
fn nearest_neighbours(points: &PointSet, k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut out = Vec::with_capacity(n);
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        cand.clear();
        let pi = points.point(i);
        cand.extend((0..n).filter(|&j| j != i).map(|j| (crate::geometry::dist_sq(pi, points.point(j)), j)));
        let k = k.min(cand.len());
        if k < cand.len() {
            cand.select_nth_unstable_by(k, |a, b| a.partial_cmp(b).expect("finite"));
        }
        out.push(cand[..k].iter().map(|c| c.1).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::min_cost_matching_bruteforce;
    use alloc::vec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn tiny_instances() {
        let ps = PointSet::from_rows(2, &[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let m = min_cost_matching_exact(&ps).unwrap();
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert!((m.cost - 5.0).abs() < 1e-12);

        let line = PointSet::from_rows(1, &[[0.0], [1.0], [10.0], [11.0]]).unwrap();
        let m = min_cost_matching_exact(&line).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert!((m.cost - 2.0).abs() < 1e-12);

        let square = PointSet::from_rows(2, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let m = min_cost_matching_exact(&square).unwrap();
        assert!((m.cost - 2.0).abs() < 1e-12);
        m.validate(&square).unwrap();

        assert!(min_cost_matching_exact(&PointSet::from_rows(2, &[[0.0, 0.0]]).unwrap()).is_err());
    }

    #[test]
    fn odd_sets_leave_out_the_isolated_point() {
        let ps = PointSet::from_rows(1, &[[0.0], [0.1], [5.0], [5.2], [9.0]]).unwrap();
        let m = min_cost_matching_exact(&ps).unwrap();
        assert_eq!(m.leftover, Some(4));
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        m.validate(&ps).unwrap();
    }

    #[test]
    fn agrees_with_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..60 {
            let n = 2 * rng.random_range(1..6);
            let d = 2 + trial % 2;
            let coords: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
            let ps = PointSet::from_flat(d, coords).unwrap();
            let exact = min_cost_matching_exact(&ps).unwrap();
            let brute = min_cost_matching_bruteforce(&ps).unwrap();
            exact.validate(&ps).unwrap();
            assert!((exact.cost - brute.cost).abs() < 1e-9, "trial {trial}");
        }
    }

    #[test]
    fn sparse_path_is_exact() {
        // above the dense limit, so the candidate-graph route is exercised;
        // clustered input forces certificate repairs
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut coords = Vec::new();
        for c in 0..7 {
            for _ in 0..(if c % 2 == 0 { 13 } else { 11 }) {
                coords.push(c as f64 * 5.0 + rng.random::<f64>() * 0.1);
                coords.push(rng.random::<f64>() * 0.1);
            }
        }
        let ps = PointSet::from_flat(2, coords).unwrap();
        let m = min_cost_matching_exact(&ps).unwrap();
        m.validate(&ps).unwrap();
        // local optimality: no 2-opt swap improves the matching
        for (x, &(a, b)) in m.pairs.iter().enumerate() {
            for &(c, e) in &m.pairs[x + 1..] {
                let cur = dist(ps.point(a), ps.point(b)) + dist(ps.point(c), ps.point(e));
                let s1 = dist(ps.point(a), ps.point(c)) + dist(ps.point(b), ps.point(e));
                let s2 = dist(ps.point(a), ps.point(e)) + dist(ps.point(b), ps.point(c));
                assert!(cur <= s1 + 1e-9 && cur <= s2 + 1e-9);
            }
        }
    }
}
