//! Min-cost perfect matchings of point sets and the clipped edge-length
//! functionals `rho(B, M)` and `rho(A, M)` over balls and annuli.
//!
//! For a ball `B`, `rho(B, M)` sums `|segment ∩ B|^d` over the matching
//! edges. For the min-cost matching `M*` this stays below a constant times
//! `rad(B)^d` regardless of `n`, which is what makes matching colorings
//! low-discrepancy. The annulus version measures, per edge, the distance
//! between the farthest and nearest points of `segment ∩ A` from the center,
//! and is superadditive: `rho(A_i) <= rho(B_i) - rho(B_{i-1})`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, dist_sq, Ball, Point, PointSet};

mod blossom;
mod brute;
mod exact;
mod greedy;

pub use blossom::{max_weight_matching, BlossomSolution};
pub use brute::{min_cost_matching_bruteforce, BRUTEFORCE_MAX_POINTS};
pub use exact::min_cost_matching_exact;
pub use greedy::min_cost_matching_greedy;

/// Discriminants within this distance of zero count as tangency (no crossing).
const TANGENCY_TOL: f64 = 1e-12;

/// A perfect matching of a point set, up to one leftover point when `n` is odd.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matching {
    /// Index pairs `(i, j)` with `i < j`, sorted.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of Euclidean pair distances.
    pub cost: f64,
    pub leftover: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MatchingAlgo {
    Exact,
    Greedy,
    Brute,
}

impl MatchingAlgo {
    pub fn name(self) -> &'static str {
        match self {
            MatchingAlgo::Exact => "exact",
            MatchingAlgo::Greedy => "greedy",
            MatchingAlgo::Brute => "brute",
        }
    }
}

impl core::str::FromStr for MatchingAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MatchingAlgo::Exact),
            "greedy" => Ok(MatchingAlgo::Greedy),
            "brute" => Ok(MatchingAlgo::Brute),
            other => Err(invalid(alloc::format!("unknown matching algorithm `{other}`"))),
        }
    }
}

pub fn min_cost_matching(points: &PointSet, algo: MatchingAlgo) -> Result<Matching> {
    match algo {
        MatchingAlgo::Exact => min_cost_matching_exact(points),
        MatchingAlgo::Greedy => min_cost_matching_greedy(points),
        MatchingAlgo::Brute => min_cost_matching_bruteforce(points),
    }
}

impl Matching {
    /// Normalizes pair order and recomputes the cost from `points`.
    pub fn from_pairs(points: &PointSet, pairs: Vec<(usize, usize)>, leftover: Option<usize>) -> Self {
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        let cost = pairs
            .iter()
            .map(|&(a, b)| dist(points.point(a), points.point(b)))
            .sum();
        Matching {
            pairs,
            cost,
            leftover,
        }
    }

    /// Checks that every index of `0..n` is covered exactly once and that
    /// the stored cost matches the pair distances.
    pub fn validate(&self, points: &PointSet) -> Result<()> {
        let n = points.len();
        let mut seen = alloc::vec![false; n];
        let mut mark = |i: usize| -> Result<()> {
            if i >= n || seen[i] {
                return Err(invalid(alloc::format!("index {i} is out of range or covered twice")));
            }
            seen[i] = true;
            Ok(())
        };
        for &(a, b) in &self.pairs {
            mark(a)?;
            mark(b)?;
        }
        if let Some(l) = self.leftover {
            mark(l)?;
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("matching does not cover every point"));
        }
        if n % 2 == 0 && self.leftover.is_some() {
            return Err(invalid("even point set with a leftover point"));
        }
        let cost: f64 = self
            .pairs
            .iter()
            .map(|&(a, b)| dist(points.point(a), points.point(b)))
            .sum();
        if (cost - self.cost).abs() > 1e-9 * cost.max(1.0) {
            return Err(invalid("matching cost does not equal the sum of pair distances"));
        }
        Ok(())
    }
}

/// For odd `n`: the point whose nearest neighbor is farthest away (lowest
/// index on ties). It sits out of the matching and keeps color `+1`.
pub fn leftover_point(points: &PointSet) -> usize {
    let n = points.len();
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..n {
        let nn = (0..n)
            .filter(|&j| j != i)
            .map(|j| dist_sq(points.point(i), points.point(j)))
            .fold(f64::INFINITY, f64::min);
        if nn > best.0 {
            best = (nn, i);
        }
    }
    best.1
}

/// Splits off the odd-`n` leftover. Returns the indices to be matched.
pub(crate) fn split_leftover(points: &PointSet) -> (Vec<usize>, Option<usize>) {
    let n = points.len();
    if n % 2 == 0 {
        return ((0..n).collect(), None);
    }
    let l = leftover_point(points);
    ((0..n).filter(|&i| i != l).collect(), Some(l))
}

pub(crate) fn require_pairs(points: &PointSet) -> Result<()> {
    if points.len() < 2 {
        return Err(invalid("matching needs at least two points"));
    }
    Ok(())
}

/// An annulus `{y : inner < |y - center| <= outer}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Annulus {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(center: Point, inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner && outer.is_finite()) {
            return Err(invalid("annulus radii must satisfy 0 <= inner < outer < inf"));
        }
        Ok(Annulus {
            center,
            inner,
            outer,
        })
    }
}

/// Parameter interval `[lo, hi] ⊂ [0, 1]` where the segment `a -> b` lies in
/// the closed ball, as `(lo, hi, |b - a|^2, (a - c).(b - a))`. `None` when the
/// segment misses or only touches the ball.
fn clip_segment(a: &[f64], b: &[f64], center: &[f64], radius: f64) -> Option<(f64, f64)> {
    let qa: f64 = a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum();
    if qa == 0.0 {
        return None;
    }
    let qb: f64 = a
        .iter()
        .zip(b)
        .zip(center)
        .map(|((x, y), c)| (x - c) * (y - x))
        .sum();
    let qc = dist_sq(a, center) - radius * radius;
    let disc = qb * qb - qa * qc;
    if disc <= TANGENCY_TOL {
        return None;
    }
    let root = libm::sqrt(disc);
    let lo = ((-qb - root) / qa).max(0.0);
    let hi = ((-qb + root) / qa).min(1.0);
    (hi > lo).then_some((lo, hi))
}

#[inline]
fn powd(x: f64, d: usize) -> f64 {
    libm::pow(x, d as f64)
}

/// `|segment(a, b) ∩ B|^d`.
pub fn clipped_length_pow(ball: &Ball, a: &[f64], b: &[f64]) -> f64 {
    let d = a.len();
    match clip_segment(a, b, ball.center.coords(), ball.radius) {
        Some((lo, hi)) => powd((hi - lo) * dist(a, b), d),
        None => 0.0,
    }
}

/// `rho(B, M)`: the sum over matched pairs of `|segment ∩ B|^d`.
///
/// With one endpoint `q` inside and `p` outside this is `|q - p_B|^d`, where
/// `p_B` is the crossing of the boundary; with both inside it is the full
/// length. A chord whose endpoints are both outside contributes the length of
/// the chord inside `B` (zero when it misses).
pub fn rho_ball(ball: &Ball, matching: &Matching, points: &PointSet) -> Result<f64> {
    points.check_dim(ball.center.dim())?;
    Ok(matching
        .pairs
        .iter()
        .map(|&(i, j)| clipped_length_pow(ball, points.point(i), points.point(j)))
        .sum())
}

/// Contribution of one segment to `rho(A, M)`.
pub fn annulus_length_pow(annulus: &Annulus, a: &[f64], b: &[f64]) -> f64 {
    let c = annulus.center.coords();
    let d = a.len();
    let Some((olo, ohi)) = clip_segment(a, b, c, annulus.outer) else {
        return 0.0;
    };
    let inner = if annulus.inner > 0.0 {
        clip_segment(a, b, c, annulus.inner)
    } else {
        None
    };
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(2);
    match inner {
        None => pieces.push((olo, ohi)),
        Some((ilo, ihi)) => {
            if ilo > olo {
                pieces.push((olo, ilo.min(ohi)));
            }
            if ihi < ohi {
                pieces.push((ihi.max(olo), ohi));
            }
        }
    }
    pieces.retain(|(lo, hi)| hi > lo);
    if pieces.is_empty() {
        return 0.0;
    }
    let len = dist(a, b);
    let at = |t: f64| -> f64 {
        let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
        dist(&p, c)
    };
    // Distance to the center is convex along the segment: the farthest point
    // is an interval endpoint; the nearest is an endpoint or the foot of the
    // perpendicular.
    let mut far = (f64::NEG_INFINITY, 0.0);
    for &(lo, hi) in &pieces {
        for t in [lo, hi] {
            let r = at(t);
            if r > far.0 {
                far = (r, t);
            }
        }
    }
    let qa = len * len;
    let qb: f64 = a.iter().zip(b).zip(c).map(|((x, y), cc)| (x - cc) * (y - x)).sum();
    let foot = -qb / qa;
    let mut near: Option<(f64, f64)> = None;
    for &(lo, hi) in &pieces {
        let mut cands = alloc::vec![lo, hi];
        if foot > lo && foot < hi {
            cands.push(foot);
        }
        for t in cands {
            let r = at(t);
            near = match near {
                None => Some((r, t)),
                Some((nr, nt)) => {
                    let tol = 1e-12 * (1.0 + nr);
                    if r < nr - tol || ((r - nr).abs() <= tol && (t - far.1).abs() < (nt - far.1).abs()) {
                        Some((r, t))
                    } else {
                        Some((nr, nt))
                    }
                }
            };
        }
    }
    let (_, tn) = near.expect("at least one piece");
    powd((far.1 - tn).abs() * len, d)
}

/// `rho(A, M)`: per pair, the `d`-th power of the distance between the
/// farthest and the nearest point (from the center) of `segment ∩ A`.
pub fn rho_annulus(annulus: &Annulus, matching: &Matching, points: &PointSet) -> Result<f64> {
    points.check_dim(annulus.center.dim())?;
    Ok(matching
        .pairs
        .iter()
        .map(|&(i, j)| annulus_length_pow(annulus, points.point(i), points.point(j)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn unit_ball() -> Ball {
        Ball::new(Point::origin(2), 1.0).unwrap()
    }

    #[test]
    fn rho_ball_cases() {
        let b = unit_ball();
        assert!((clipped_length_pow(&b, &[0.0, 0.0], &[0.5, 0.0]) - 0.25).abs() < 1e-15);
        assert!((clipped_length_pow(&b, &[0.5, 0.0], &[2.0, 0.0]) - 0.25).abs() < 1e-15);
        assert!((clipped_length_pow(&b, &[2.0, 0.0], &[0.5, 0.0]) - 0.25).abs() < 1e-15);
        assert_eq!(clipped_length_pow(&b, &[2.0, 0.0], &[3.0, 0.0]), 0.0);
        // tangent chord
        assert_eq!(clipped_length_pow(&b, &[-2.0, 1.0], &[2.0, 1.0]), 0.0);
        // chord through the center, both ends outside
        assert!((clipped_length_pow(&b, &[-2.0, 0.0], &[2.0, 0.0]) - 4.0).abs() < 1e-12);

        let ps = PointSet::from_rows(2, &[[0.0, 0.0], [0.5, 0.0], [0.5, 0.5], [2.0, 0.5]]).unwrap();
        let m = Matching::from_pairs(&ps, vec![(0, 1), (2, 3)], None);
        assert!((rho_ball(&b, &m, &ps).unwrap() - (0.25 + (libm::sqrt(0.75) - 0.5).powi(2))).abs() < 1e-12);
    }

    #[test]
    fn rho_annulus_cases() {
        let a = Annulus::new(Point::origin(2), 1.0, 1.5).unwrap();
        // entirely inside the annulus
        let inside = annulus_length_pow(&a, &[1.1, 0.0], &[1.3, 0.0]);
        assert!((inside - 0.04).abs() < 1e-12);
        // radial crossing from r = 0.5 to r = 2
        let radial = annulus_length_pow(&a, &[0.5, 0.0], &[2.0, 0.0]);
        assert!((radial - 0.25).abs() < 1e-12);
        // chord missing the annulus
        assert_eq!(annulus_length_pow(&a, &[-3.0, 2.0], &[3.0, 2.0]), 0.0);
        // chord through the hole: the piece on the farther side counts
        let through = annulus_length_pow(&a, &[-1.2, 0.0], &[1.4, 0.0]);
        assert!((through - 0.16).abs() < 1e-12, "{through}");
        assert!(Annulus::new(Point::origin(2), 1.0, 1.0).is_err());
    }

    #[test]
    fn validate_catches_bad_matchings() {
        let ps = PointSet::from_rows(1, &[[0.0], [1.0], [3.0], [4.0]]).unwrap();
        let good = Matching::from_pairs(&ps, vec![(0, 1), (2, 3)], None);
        good.validate(&ps).unwrap();
        let dup = Matching::from_pairs(&ps, vec![(0, 1), (1, 3)], None);
        assert!(dup.validate(&ps).is_err());
        let mut wrong_cost = good.clone();
        wrong_cost.cost = 7.0;
        assert!(wrong_cost.validate(&ps).is_err());
    }

    #[test]
    fn leftover_is_most_isolated() {
        let ps = PointSet::from_rows(1, &[[0.0], [0.1], [5.0], [5.2], [9.0]]).unwrap();
        assert_eq!(leftover_point(&ps), 4);
    }

    fn seg() -> impl Strategy<Value = ([f64; 2], [f64; 2])> {
        (
            prop::array::uniform2(-3.0f64..3.0),
            prop::array::uniform2(-3.0f64..3.0),
        )
    }

    proptest! {
        #[test]
        fn annulus_superadditive((a, b) in seg(), r0 in 0.0f64..2.0, dr in 0.01f64..2.0) {
            let c = Point::origin(2);
            let outer = Ball::new(c.clone(), r0 + dr).unwrap();
            let ann = Annulus::new(c.clone(), r0, r0 + dr).unwrap();
            let lhs = annulus_length_pow(&ann, &a, &b);
            let inner = if r0 > 0.0 {
                clipped_length_pow(&Ball::new(c, r0).unwrap(), &a, &b)
            } else { 0.0 };
            let rhs = clipped_length_pow(&outer, &a, &b) - inner;
            prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
        }

        #[test]
        fn clipped_length_scales((a, b) in seg(), s in 0.1f64..10.0) {
            let ball = unit_ball();
            let scaled = Ball::new(Point::origin(2), s).unwrap();
            let sa = [a[0] * s, a[1] * s];
            let sb = [b[0] * s, b[1] * s];
            let lhs = clipped_length_pow(&scaled, &sa, &sb);
            let rhs = clipped_length_pow(&ball, &a, &b) * s * s;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
        }
    }
}
