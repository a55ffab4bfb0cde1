//! Uniform-cell bucketing for fixed-radius neighbor queries.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geometry::PointSet;

pub(crate) struct CellIndex {
    dim: usize,
    cell: f64,
    /// Cell key of each entry of `order`, row-major, sorted lexicographically.
    keys: Vec<i64>,
    order: Vec<usize>,
}

impl CellIndex {
    pub(crate) fn new(points: &PointSet, cell: f64) -> Self {
        let dim = points.dim();
        let key_of = |i: usize| -> Vec<i64> {
            points
                .point(i)
                .iter()
                .map(|&c| libm::floor(c / cell) as i64)
                .collect()
        };
        let mut entries: Vec<(Vec<i64>, usize)> = (0..points.len()).map(|i| (key_of(i), i)).collect();
        entries.sort();
        let mut keys = Vec::with_capacity(entries.len() * dim);
        let mut order = Vec::with_capacity(entries.len());
        for (k, i) in entries {
            keys.extend_from_slice(&k);
            order.push(i);
        }
        CellIndex {
            dim,
            cell,
            keys,
            order,
        }
    }

    fn key(&self, pos: usize) -> &[i64] {
        &self.keys[pos * self.dim..(pos + 1) * self.dim]
    }

    fn lower_bound(&self, key: &[i64], strict: bool) -> usize {
        let (mut lo, mut hi) = (0, self.order.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let ord = self.key(mid).cmp(key);
            let go_right = if strict {
                ord != Ordering::Greater
            } else {
                ord == Ordering::Less
            };
            if go_right {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Calls `f` for every indexed point whose cell meets the box of
    /// half-width `r` around `x`. Callers filter by exact distance.
    pub(crate) fn for_each_candidate(&self, x: &[f64], r: f64, mut f: impl FnMut(usize)) {
        let lo: Vec<i64> = x.iter().map(|&c| libm::floor((c - r) / self.cell) as i64).collect();
        let hi: Vec<i64> = x.iter().map(|&c| libm::floor((c + r) / self.cell) as i64).collect();
        let mut cur = lo.clone();
        loop {
            let start = self.lower_bound(&cur, false);
            let end = self.lower_bound(&cur, true);
            for &i in &self.order[start..end] {
                f(i);
            }
            // odometer over the cell box
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    for a in axis + 1..self.dim {
                        cur[a] = lo[a];
                    }
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;
    use rand::{Rng, SeedableRng};

    #[test]
    fn candidates_cover_all_neighbors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let coords: Vec<f64> = (0..600).map(|_| rng.random_range(-2.0..2.0)).collect();
        let ps = PointSet::from_flat(2, coords).unwrap();
        let idx = CellIndex::new(&ps, 0.5);
        for _ in 0..50 {
            let x = [rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5)];
            let mut found = Vec::new();
            idx.for_each_candidate(&x, 0.5, |i| {
                if dist(&x, ps.point(i)) <= 0.5 {
                    found.push(i)
                }
            });
            found.sort();
            let brute: Vec<usize> = (0..ps.len()).filter(|&i| dist(&x, ps.point(i)) <= 0.5).collect();
            assert_eq!(found, brute);
        }
    }
}
