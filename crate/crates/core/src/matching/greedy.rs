use alloc::vec::Vec;

use super::{require_pairs, split_leftover, Matching};
use crate::error::Result;
use crate::geometry::{dist_sq, PointSet};

/// Greedy matching: repeatedly pair the closest two unmatched points.
/// O(n^2) time; the cost is never below the exact optimum.
pub fn min_cost_matching_greedy(points: &PointSet) -> Result<Matching> {
    require_pairs(points)?;
    let (active, leftover) = split_leftover(points);
    let m = active.len();
    let p = |a: usize| points.point(active[a]);
    let mut alive = alloc::vec![true; m];
    let nearest = |a: usize, alive: &[bool]| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for b in 0..m {
            if b != a && alive[b] {
                let d = dist_sq(p(a), p(b));
                if d < best.0 {
                    best = (d, b);
                }
            }
        }
        best
    };
    let mut nn: Vec<(f64, usize)> = (0..m).map(|a| nearest(a, &alive)).collect();
    let mut pairs = Vec::with_capacity(m / 2);
    for _ in 0..m / 2 {
        let a = (0..m)
            .filter(|&a| alive[a])
            .min_by(|&x, &y| nn[x].0.partial_cmp(&nn[y].0).expect("finite").then(x.cmp(&y)))
            .expect("unmatched points remain");
        let b = nn[a].1;
        alive[a] = false;
        alive[b] = false;
        pairs.push((active[a], active[b]));
        for c in 0..m {
            if alive[c] && (nn[c].1 == a || nn[c].1 == b) {
                nn[c] = nearest(c, &alive);
            }
        }
    }
    Ok(Matching::from_pairs(points, pairs, leftover))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::min_cost_matching_exact;
    use alloc::vec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn small_cases() {
        let two = PointSet::from_rows(2, &[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert!((min_cost_matching_greedy(&two).unwrap().cost - 5.0).abs() < 1e-12);
        let line = PointSet::from_rows(1, &[[0.0], [1.0], [10.0], [11.0]]).unwrap();
        let m = min_cost_matching_greedy(&line).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert!((m.cost - 2.0).abs() < 1e-12);
    }

    #[test]
    fn within_factor_three_of_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let coords: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
            let ps = PointSet::from_flat(2, coords).unwrap();
            let g = min_cost_matching_greedy(&ps).unwrap();
            let e = min_cost_matching_exact(&ps).unwrap();
            g.validate(&ps).unwrap();
            assert!(g.cost >= e.cost - 1e-9);
            assert!(g.cost <= 3.0 * e.cost, "{} vs {}", g.cost, e.cost);
        }
    }
}
