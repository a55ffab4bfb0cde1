use alloc::vec::Vec;

use super::{require_pairs, Matching};
use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, PointSet};

pub const BRUTEFORCE_MAX_POINTS: usize = 12;

/// Exhaustive minimum over all `(n-1)!!` perfect matchings of an even set of
/// at most 12 points. Ties go to the lexicographically smallest sorted pair
/// list, which is the first one enumerated.
pub fn min_cost_matching_bruteforce(points: &PointSet) -> Result<Matching> {
    require_pairs(points)?;
    let n = points.len();
    if n % 2 == 1 {
        return Err(invalid("brute-force matching needs an even number of points"));
    }
    if n > BRUTEFORCE_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "brute-force matching input",
            value: n,
            limit: BRUTEFORCE_MAX_POINTS,
        });
    }
    let d: Vec<f64> = (0..n * n)
        .map(|k| dist(points.point(k / n), points.point(k % n)))
        .collect();
    let mut search = Search {
        n,
        d: &d,
        used: alloc::vec![false; n],
        current: Vec::with_capacity(n / 2),
        best_cost: f64::INFINITY,
        best: Vec::new(),
    };
    search.run(0.0);
    Ok(Matching::from_pairs(points, search.best, None))
}

struct Search<'a> {
    n: usize,
    d: &'a [f64],
    used: Vec<bool>,
    current: Vec<(usize, usize)>,
    best_cost: f64,
    best: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn run(&mut self, cost: f64) {
        let Some(i) = (0..self.n).find(|&i| !self.used[i]) else {
            if cost < self.best_cost - 1e-12 * (1.0 + self.best_cost.abs()) || self.best.is_empty() {
                self.best_cost = cost;
                self.best = self.current.clone();
            }
            return;
        };
        self.used[i] = true;
        for j in i + 1..self.n {
            if self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.current.push((i, j));
            self.run(cost + self.d[i * self.n + j]);
            self.current.pop();
            self.used[j] = false;
        }
        self.used[i] = false;
    }
}
