//! Colorings and kernel discrepancy.
//!
//! For a coloring `chi` the discrepancy at a center is
//! `|sum_p chi(p) K(x, p)|`, and the discrepancy of the coloring is its
//! supremum over `x`. Over a net of covering radius `tau` the supremum over the
//! net's region is at most the net maximum plus `tau n sigma`, and outside the
//! region every kernel is below its threshold.
//!
//! When `chi` signs matched pairs `(p_j, q_j)` oppositely at random, the terms
//! `X_j = chi(p_j) K(x, p_j) + chi(q_j) K(x, q_j)` are independent, centered
//! and take the values `+-Delta_j / 2` with `Delta_j = 2 |K(x, p_j) - K(x, q_j)|`.
//! Hoeffding gives `P(|sum X_j| > a) <= 2 exp(-2 a^2 / sum Delta_j^2)`.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, PointSet};
use crate::kernel::KernelSpec;
use crate::matching::Matching;
use crate::net::EvaluationNet;
use crate::rng;

/// Largest input accepted by [`min_disc_bruteforce`].
pub const BRUTEFORCE_MAX_POINTS: usize = 16;

/// Failure probability at which [`DiscrepancyReport::chernoff_alpha`] is quoted.
pub const CHERNOFF_DELTA: f64 = 0.05;

/// A `+-1` coloring together with the structure its randomness came from.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coloring {
    pub signs: Vec<i8>,
    pub seed: u64,
    /// Pairs colored oppositely by one fair coin each.
    pub pairs: Vec<(usize, usize)>,
    /// Points colored by independent fair coins.
    pub singles: Vec<usize>,
    /// The unmatched point of an odd set; always `+1`.
    pub leftover: Option<usize>,
}

impl Coloring {
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| f64::from(s)).collect()
    }

    /// Indices colored `+1`, ascending.
    pub fn positive(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&i| self.signs[i] > 0).collect()
    }

    /// Checks that every pair has opposite signs and the leftover is `+1`.
    pub fn is_consistent(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| self.signs[a] == -self.signs[b])
            && self.leftover.map_or(true, |l| self.signs[l] == 1)
            && self.signs.iter().all(|&s| s == 1 || s == -1)
    }
}

/// Colors each matched pair `(+1, -1)` or `(-1, +1)` by a fair coin drawn
/// from `seed`. The leftover of an odd set gets `+1`.
pub fn color_from_matching(matching: &Matching, seed: u64) -> Coloring {
    let n = matching.pairs.len() * 2 + usize::from(matching.leftover.is_some());
    let mut signs = alloc::vec![1i8; n];
    let mut rng = rng::stream(seed, "pair-signs", 0);
    for &(a, b) in &matching.pairs {
        let s: i8 = if rng.random::<bool>() { 1 } else { -1 };
        signs[a] = s;
        signs[b] = -s;
    }
    Coloring {
        signs,
        seed,
        pairs: matching.pairs.clone(),
        singles: Vec::new(),
        leftover: matching.leftover,
    }
}

/// Independent fair signs for all `n` points.
pub fn random_coloring(n: usize, seed: u64) -> Coloring {
    let mut rng = rng::stream(seed, "independent-signs", 0);
    let signs = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    Coloring {
        signs,
        seed,
        pairs: Vec::new(),
        singles: (0..n).collect(),
        leftover: None,
    }
}

fn check_inputs(points: &PointSet, chi: &Coloring, kernel: &KernelSpec) -> Result<()> {
    kernel.check_dim(points.dim())?;
    if chi.len() != points.len() {
        return Err(invalid("coloring and point set differ in size"));
    }
    Ok(())
}

/// `|sum_p chi(p) K(x, p)|`.
pub fn disc_at(points: &PointSet, chi: &Coloring, kernel: &KernelSpec, x: &[f64]) -> Result<f64> {
    check_inputs(points, chi, kernel)?;
    kernel.check_dim(x.len())?;
    Ok(signed_sum(points, &chi.signs, kernel, x).abs())
}

fn signed_sum(points: &PointSet, signs: &[i8], kernel: &KernelSpec, x: &[f64]) -> f64 {
    points
        .iter()
        .zip(signs)
        .map(|(p, &s)| f64::from(s) * kernel.eval_unchecked(x, p))
        .sum()
}

/// `sum_j Delta_j^2` at `x` for the random units of `chi`:
/// `Delta_j = 2 |K(x, p_j) - K(x, q_j)|` for pairs and `2 K(x, p)` for
/// independently signed points.
pub fn sum_delta_sq(points: &PointSet, chi: &Coloring, kernel: &KernelSpec, x: &[f64]) -> f64 {
    let k = |i: usize| kernel.eval_unchecked(x, points.point(i));
    let pairs: f64 = chi
        .pairs
        .iter()
        .map(|&(a, b)| {
            let d = 2.0 * (k(a) - k(b));
            d * d
        })
        .sum();
    let singles: f64 = chi.singles.iter().map(|&i| 4.0 * k(i) * k(i)).sum();
    pairs + singles
}

/// Result of scanning a net.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscrepancyReport {
    pub max_disc: f64,
    pub argmax: Point,
    pub argmax_index: usize,
    pub centers: usize,
    pub tau: f64,
    /// `tau n sigma`: how far the supremum over the net's region can exceed
    /// `max_disc`. `None` for kernels without a slope bound.
    pub resolution_slack: Option<f64>,
    /// Upper bound on `|sum chi K|` anywhere outside the net's region.
    pub outside_bound: f64,
    /// `sum_j Delta_j^2` at the argmax.
    pub sum_delta_sq: f64,
    /// The `alpha` at which the Hoeffding bound at the argmax equals
    /// [`CHERNOFF_DELTA`].
    pub chernoff_alpha: f64,
    pub per_center: Option<Vec<f64>>,
}

/// Maximum of [`disc_at`] over the centers of `net`.
pub fn disc_max(points: &PointSet, chi: &Coloring, kernel: &KernelSpec, net: &EvaluationNet) -> Result<DiscrepancyReport> {
    disc_max_impl(points, chi, kernel, net, false)
}

/// As [`disc_max`], also returning the value at every center.
pub fn disc_max_with_values(
    points: &PointSet,
    chi: &Coloring,
    kernel: &KernelSpec,
    net: &EvaluationNet,
) -> Result<DiscrepancyReport> {
    disc_max_impl(points, chi, kernel, net, true)
}

fn disc_max_impl(
    points: &PointSet,
    chi: &Coloring,
    kernel: &KernelSpec,
    net: &EvaluationNet,
    keep: bool,
) -> Result<DiscrepancyReport> {
    check_inputs(points, chi, kernel)?;
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    let weights = chi.weights();
    let (max_disc, argmax_index, per_center) = if keep {
        let values: Vec<f64> = net
            .weighted_sums(points, &weights, kernel)?
            .into_iter()
            .map(f64::abs)
            .collect();
        let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
        for (i, &v) in values.iter().enumerate() {
            if v > best {
                best = v;
                arg = i;
            }
        }
        (best, arg, Some(values))
    } else {
        let (m, i) = net.max_abs_weighted_sum(points, &weights, kernel)?;
        (m, i, None)
    };
    let argmax = net.center(argmax_index);
    let sdq = sum_delta_sq(points, chi, kernel, argmax.coords());
    let n = points.len() as f64;
    Ok(DiscrepancyReport {
        max_disc,
        argmax_index,
        centers: net.len(),
        tau: net.tau(),
        resolution_slack: kernel.slope_bound().ok().map(|s| net.tau() * n * s),
        outside_bound: n * kernel.eval_dist(net.region_radius()),
        sum_delta_sq: sdq,
        chernoff_alpha: libm::sqrt(sdq * libm::log(2.0 / CHERNOFF_DELTA) / 2.0),
        per_center,
        argmax,
    })
}

/// Minimum over all `2^n` colorings of the net maximum, with a minimizer.
/// The first sign is fixed to `+1`; negating a coloring keeps its discrepancy.
pub fn min_disc_bruteforce(points: &PointSet, kernel: &KernelSpec, net: &EvaluationNet) -> Result<(f64, Vec<i8>)> {
    kernel.check_dim(points.dim())?;
    let n = points.len();
    if n > BRUTEFORCE_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "brute-force coloring input",
            value: n,
            limit: BRUTEFORCE_MAX_POINTS,
        });
    }
    if n == 0 {
        return Err(invalid("brute-force coloring needs at least one point"));
    }
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    // column i holds K(c, p_i) for every center c
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut w = alloc::vec![0.0; n];
        w[i] = 1.0;
        columns.push(net.weighted_sums(points, &w, kernel)?);
    }
    let centers = net.len();
    let mut signs = alloc::vec![1i8; n];
    let mut sums: Vec<f64> = (0..centers).map(|c| columns.iter().map(|col| col[c]).sum()).collect();
    let mut best = (f64::INFINITY, signs.clone());
    let total = 1u64 << (n - 1);
    for step in 0..total {
        if step > 0 {
            // Gray code: flip point 1 + (index of the lowest set bit)
            let flip = 1 + step.trailing_zeros() as usize;
            let s = -signs[flip];
            signs[flip] = s;
            let col = &columns[flip];
            let f = 2.0 * f64::from(s);
            for (v, k) in sums.iter_mut().zip(col) {
                *v += f * k;
            }
        }
        let mut worst = 0.0f64;
        for v in &sums {
            worst = worst.max(v.abs());
            if worst >= best.0 {
                break;
            }
        }
        if worst < best.0 {
            best = (worst, signs.clone());
        }
    }
    Ok(best)
}

/// Hoeffding bound on `P(|sum_j X_j| > alpha)` at center `x` for a coloring
/// of `matching`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffBound {
    pub bound: f64,
    pub sum_delta_sq: f64,
}

pub fn chernoff_bound(
    points: &PointSet,
    matching: &Matching,
    kernel: &KernelSpec,
    x: &[f64],
    alpha: f64,
) -> Result<ChernoffBound> {
    kernel.check_dim(points.dim())?;
    kernel.check_dim(x.len())?;
    if !(alpha > 0.0) {
        return Err(invalid("alpha must be positive"));
    }
    let k = |i: usize| kernel.eval_unchecked(x, points.point(i));
    let sdq: f64 = matching
        .pairs
        .iter()
        .map(|&(a, b)| {
            let d = 2.0 * (k(a) - k(b));
            d * d
        })
        .sum();
    Ok(ChernoffBound {
        bound: hoeffding(sdq, alpha),
        sum_delta_sq: sdq,
    })
}

/// `2 exp(-2 alpha^2 / sum_delta_sq)`, and `0` when every pair cancels.
pub fn hoeffding(sum_delta_sq: f64, alpha: f64) -> f64 {
    if sum_delta_sq <= 0.0 {
        0.0
    } else {
        2.0 * libm::exp(-2.0 * alpha * alpha / sum_delta_sq)
    }
}

/// The Jensen bound `n^{1-2/d} (sum_j Delta_j^d)^{2/d}` on `sum_j Delta_j^2`.
pub fn jensen_transfer(deltas: &[f64], n: usize, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(invalid("the Jensen transfer needs d >= 2"));
    }
    if deltas.iter().any(|&x| !(x >= 0.0)) {
        return Err(invalid("deltas must be non-negative"));
    }
    let d = d as f64;
    let s: f64 = deltas.iter().map(|&x| libm::pow(x, d)).sum();
    Ok(libm::pow(n as f64, 1.0 - 2.0 / d) * libm::pow(s, 2.0 / d))
}
