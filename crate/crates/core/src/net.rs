//! Grid nets of candidate kernel centers.
//!
//! A net for `(P, K)` is the set of points of the lattice `h Z^d`,
//! `h = tau / sqrt(d)`, that lie within `R + tau/2` of some point of `P`, where
//! `R` is the radius of the region in which a single kernel still matters. Any
//! `y` with `|y - p| <= R` for some `p` is then within `tau / 2` of a center.
//! The lattice is anchored at the origin, so halving `tau` gives a refinement
//! of the same net.
//!
//! Besides listing centers, a net evaluates weighted kernel sums
//! `S(x) = sum_p w_p K(x, p)` at all of them. Gaussian sums use separability
//! across axes; compact kernels use a cell index.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist_sq, Point, PointSet};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::spatial::CellIndex;

/// Center cap applied when no other limit is given.
pub const DEFAULT_MAX_CENTERS: usize = 10_000_000;

/// Gaussian factors below `exp(-GAUSS_CUTOFF^2)` are dropped.
const GAUSS_CUTOFF: f64 = 8.0;
/// Largest per-axis lookup table (entries) for separable Gaussian sums.
const TABLE_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct NetOptions {
    /// Covering radius. `None` picks `1 / (n max(sigma, 1))`.
    pub tau: Option<f64>,
    /// Region threshold as a fraction of the kernel peak. `None` picks
    /// `1 / (2n)` for kernels without compact support; compact kernels always
    /// use their full support.
    pub threshold: Option<f64>,
    /// When the grid would exceed this many centers, `tau` is doubled until
    /// it fits.
    pub max_centers: usize,
    /// Also use every input point as a center.
    pub include_points: bool,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions {
            tau: None,
            threshold: None,
            max_centers: DEFAULT_MAX_CENTERS,
            include_points: true,
        }
    }
}

impl NetOptions {
    pub fn with_tau(tau: f64) -> Self {
        NetOptions {
            tau: Some(tau),
            ..Self::default()
        }
    }

    pub fn capped(max_centers: usize) -> Self {
        NetOptions {
            max_centers,
            ..Self::default()
        }
    }
}

/// Centers of a grid net, stored as runs along the last axis.
#[derive(Debug, Clone)]
pub struct EvaluationNet {
    dim: usize,
    tau: f64,
    requested_tau: f64,
    spacing: f64,
    region_radius: f64,
    /// Lattice coordinates of the first `dim - 1` axes, one block per row.
    row_keys: Vec<i64>,
    row_runs: Vec<usize>,
    runs: Vec<(i64, i64)>,
    /// Index of the first center of each row, plus the grid total.
    row_offsets: Vec<usize>,
    extra: PointSet,
}

/// `1 / (n max(sigma, 1))`, the default covering radius for `n` points.
pub fn default_tau(kernel: &KernelSpec, n: usize) -> Result<f64> {
    let sigma = kernel.slope_bound()?;
    Ok(1.0 / (n.max(1) as f64 * sigma.max(1.0)))
}

/// Radius around each point outside which its kernel falls below
/// `threshold * peak` (or vanishes).
pub fn region_radius(kernel: &KernelSpec, n: usize, threshold: Option<f64>) -> Result<f64> {
    if let Some(r) = kernel.support_limit() {
        return Ok(r);
    }
    let frac = threshold.unwrap_or(1.0 / (2.0 * n.max(1) as f64));
    if !(frac > 0.0 && frac < 1.0) {
        return Err(invalid("net threshold must lie in (0, 1)"));
    }
    kernel.support_radius(frac * kernel.peak())
}

/// The net for `(points, kernel)` with default options.
pub fn build_net(points: &PointSet, kernel: &KernelSpec) -> Result<EvaluationNet> {
    build_net_with(points, kernel, &NetOptions::default())
}

pub fn build_net_with(points: &PointSet, kernel: &KernelSpec, opts: &NetOptions) -> Result<EvaluationNet> {
    kernel.check_dim(points.dim())?;
    if points.is_empty() {
        return Err(invalid("cannot build a net over an empty point set"));
    }
    let n = points.len();
    let requested_tau = match opts.tau {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(invalid(alloc::format!("net spacing must be positive, got {t}"))),
        None => default_tau(kernel, n)?,
    };
    let radius = region_radius(kernel, n, opts.threshold)?;
    let dim = points.dim();
    let bbox = points.bounding_box().expect("non-empty");
    let mut tau = requested_tau;
    loop {
        let h = tau / libm::sqrt(dim as f64);
        let reach = radius + tau / 2.0;
        let mut by_box = 1.0f64;
        let mut per_point = n as f64;
        for &(lo, hi) in &bbox {
            by_box *= libm::floor((hi + reach) / h) - libm::ceil((lo - reach) / h) + 1.0;
            per_point *= 2.0 * reach / h + 2.0;
        }
        if by_box.min(per_point) <= opts.max_centers as f64 {
            break;
        }
        tau *= 2.0;
    }
    let mut net = sweep_rows(points, tau, radius);
    net.requested_tau = requested_tau;
    if opts.include_points {
        net.extra = points.clone();
    }
    Ok(net)
}

fn sweep_rows(points: &PointSet, tau: f64, radius: f64) -> EvaluationNet {
    let dim = points.dim();
    let h = tau / libm::sqrt(dim as f64);
    let reach = radius + tau / 2.0;
    let reach_sq = reach * reach;
    let bbox = points.bounding_box().expect("non-empty");
    let lo: Vec<i64> = bbox[..dim - 1]
        .iter()
        .map(|b| libm::ceil((b.0 - reach) / h) as i64)
        .collect();
    let hi: Vec<i64> = bbox[..dim - 1]
        .iter()
        .map(|b| libm::floor((b.1 + reach) / h) as i64)
        .collect();
    let mut by_first: Vec<(f64, usize)> = (0..points.len()).map(|i| (points.point(i)[0], i)).collect();
    by_first.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut net = EvaluationNet {
        dim,
        tau,
        requested_tau: tau,
        spacing: h,
        region_radius: radius,
        row_keys: Vec::new(),
        row_runs: alloc::vec![0],
        runs: Vec::new(),
        row_offsets: alloc::vec![0],
        extra: PointSet::empty(dim),
    };
    let mut key = lo.clone();
    let mut intervals: Vec<(i64, i64)> = Vec::new();
    loop {
        intervals.clear();
        let (start, end) = if dim == 1 {
            (0, by_first.len())
        } else {
            let x0 = key[0] as f64 * h;
            (
                by_first.partition_point(|e| e.0 < x0 - reach),
                by_first.partition_point(|e| e.0 <= x0 + reach),
            )
        };
        for &(_, i) in &by_first[start..end] {
            let p = points.point(i);
            let partial: f64 = key
                .iter()
                .zip(p)
                .map(|(&k, &c)| (k as f64 * h - c) * (k as f64 * h - c))
                .sum();
            if partial > reach_sq {
                continue;
            }
            let s = libm::sqrt(reach_sq - partial);
            let last = p[dim - 1];
            let a = libm::ceil((last - s) / h) as i64;
            let b = libm::floor((last + s) / h) as i64;
            if a <= b {
                intervals.push((a, b));
            }
        }
        if !intervals.is_empty() {
            intervals.sort_unstable();
            let mut count = 0usize;
            let mut cur = intervals[0];
            for &(a, b) in &intervals[1..] {
                if a <= cur.1 + 1 {
                    cur.1 = cur.1.max(b);
                } else {
                    net.runs.push(cur);
                    count += (cur.1 - cur.0 + 1) as usize;
                    cur = (a, b);
                }
            }
            net.runs.push(cur);
            count += (cur.1 - cur.0 + 1) as usize;
            net.row_keys.extend_from_slice(&key);
            net.row_runs.push(net.runs.len());
            let last = *net.row_offsets.last().expect("non-empty");
            net.row_offsets.push(last + count);
        }
        // odometer over row keys
        let mut axis = dim - 1;
        loop {
            if axis == 0 {
                return net;
            }
            axis -= 1;
            if key[axis] < hi[axis] {
                key[axis] += 1;
                for a in axis + 1..dim - 1 {
                    key[a] = lo[a];
                }
                break;
            }
        }
    }
}

/// A weighted kernel sum evaluated over a net.
struct SumContext<'a> {
    /// Distinct input locations with their summed weights; coincident points
    /// of opposite sign cancel exactly before any kernel is evaluated.
    points: PointSet,
    weights: Vec<f64>,
    kernel: &'a KernelSpec,
    index: Option<CellIndex>,
    /// Gaussian only: `table[(j - j0) * n + p]` is the last-axis factor.
    table: Option<(i64, Vec<f64>)>,
}

impl EvaluationNet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Covering radius actually used.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Covering radius asked for; larger than [`tau`](Self::tau) only when the
    /// center cap forced a coarser grid.
    pub fn requested_tau(&self) -> f64 {
        self.requested_tau
    }

    pub fn coarsened(&self) -> bool {
        self.tau > self.requested_tau
    }

    /// Lattice spacing `tau / sqrt(d)`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn region_radius(&self) -> f64 {
        self.region_radius
    }

    pub fn grid_len(&self) -> usize {
        *self.row_offsets.last().expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.grid_len() + self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn rows(&self) -> usize {
        self.row_offsets.len() - 1
    }

    fn row_key(&self, row: usize) -> &[i64] {
        let k = self.dim - 1;
        &self.row_keys[row * k..(row + 1) * k]
    }

    fn row_run_slice(&self, row: usize) -> &[(i64, i64)] {
        &self.runs[self.row_runs[row]..self.row_runs[row + 1]]
    }

    /// Coordinates of center `i` (grid centers first, then extra centers).
    pub fn center(&self, i: usize) -> Point {
        let grid = self.grid_len();
        assert!(i < self.len(), "center index out of range");
        if i >= grid {
            return self.extra.to_point(i - grid);
        }
        let row = self.row_offsets.partition_point(|&o| o <= i) - 1;
        let mut rest = i - self.row_offsets[row];
        let mut coords: Vec<f64> = self.row_key(row).iter().map(|&k| k as f64 * self.spacing).collect();
        for &(a, b) in self.row_run_slice(row) {
            let len = (b - a + 1) as usize;
            if rest < len {
                coords.push((a + rest as i64) as f64 * self.spacing);
                return Point::new(coords).expect("finite lattice point");
            }
            rest -= len;
        }
        unreachable!("row offsets are consistent with runs")
    }

    /// All centers in index order.
    pub fn centers(&self) -> PointSet {
        let mut flat = Vec::with_capacity(self.len() * self.dim);
        for row in 0..self.rows() {
            for &(a, b) in self.row_run_slice(row) {
                for j in a..=b {
                    flat.extend(self.row_key(row).iter().map(|&k| k as f64 * self.spacing));
                    flat.push(j as f64 * self.spacing);
                }
            }
        }
        flat.extend_from_slice(self.extra.as_flat());
        PointSet::from_flat(self.dim, flat).expect("finite lattice points")
    }

    fn context<'a>(&self, points: &'a PointSet, weights: &'a [f64], kernel: &'a KernelSpec) -> Result<SumContext<'a>> {
        kernel.check_dim(self.dim)?;
        points.check_dim(self.dim)?;
        if weights.len() != points.len() {
            return Err(invalid("one weight per point is required"));
        }
        if self.is_empty() {
            return Err(Error::EmptyNet);
        }
        let (points, weights) = merge_coincident(points, weights);
        let n = points.len();
        let mut ctx = SumContext {
            points,
            weights,
            kernel,
            index: None,
            table: None,
        };
        if kernel.family == KernelFamily::Gaussian {
            let (j0, j1) = self
                .runs
                .iter()
                .fold((i64::MAX, i64::MIN), |acc, r| (acc.0.min(r.0), acc.1.max(r.1)));
            if j0 <= j1 && ((j1 - j0 + 1) as usize).saturating_mul(n) <= TABLE_LIMIT {
                let len = kernel.length();
                let mut table = Vec::with_capacity((j1 - j0 + 1) as usize * n);
                for j in j0..=j1 {
                    let x = j as f64 * self.spacing;
                    table.extend(ctx.points.iter().map(|p| gauss_factor((x - p[self.dim - 1]) / len)));
                }
                ctx.table = Some((j0, table));
            }
        } else if let Some(r) = kernel.support_limit() {
            ctx.index = Some(CellIndex::new(&ctx.points, r));
        }
        Ok(ctx)
    }

    fn grid_row_values(&self, ctx: &SumContext<'_>, row: usize, out: &mut Vec<f64>) {
        out.clear();
        let key = self.row_key(row);
        let runs = self.row_run_slice(row);
        if let Some((j0, table)) = &ctx.table {
            let n = ctx.points.len();
            let len = ctx.kernel.length();
            let peak = ctx.kernel.peak();
            let g: Vec<f64> = ctx
                .points
                .iter()
                .zip(&ctx.weights)
                .map(|(p, &w)| {
                    key.iter()
                        .zip(p)
                        .fold(w * peak, |acc, (&k, &c)| acc * gauss_factor((k as f64 * self.spacing - c) / len))
                })
                .collect();
            for &(a, b) in runs {
                for j in a..=b {
                    let off = (j - j0) as usize * n;
                    let t = &table[off..off + n];
                    out.push(g.iter().zip(t).map(|(x, y)| x * y).sum());
                }
            }
            return;
        }
        let mut x: Vec<f64> = key.iter().map(|&k| k as f64 * self.spacing).collect();
        x.push(0.0);
        for &(a, b) in runs {
            for j in a..=b {
                x[self.dim - 1] = j as f64 * self.spacing;
                out.push(weighted_sum_at(ctx, &x));
            }
        }
    }

    fn extra_values(&self, ctx: &SumContext<'_>) -> Vec<f64> {
        self.extra.iter().map(|x| weighted_sum_at(ctx, x)).collect()
    }

    /// `S(x) = sum_p w_p K(x, p)` at every center, in index order.
    pub fn weighted_sums(&self, points: &PointSet, weights: &[f64], kernel: &KernelSpec) -> Result<Vec<f64>> {
        let ctx = self.context(points, weights, kernel)?;
        let rows: Vec<Vec<f64>> = map_rows(self.rows(), |row| {
            let mut out = Vec::new();
            self.grid_row_values(&ctx, row, &mut out);
            out
        });
        let mut all: Vec<f64> = rows.into_iter().flatten().collect();
        all.extend(self.extra_values(&ctx));
        Ok(all)
    }

    /// `max |S(x)|` over the centers and the first center attaining it.
    pub fn max_abs_weighted_sum(&self, points: &PointSet, weights: &[f64], kernel: &KernelSpec) -> Result<(f64, usize)> {
        let ctx = self.context(points, weights, kernel)?;
        let best_rows: Vec<(f64, usize)> = map_rows(self.rows(), |row| {
            let mut out = Vec::new();
            self.grid_row_values(&ctx, row, &mut out);
            argmax_abs(&out, self.row_offsets[row])
        });
        let extra = self.extra_values(&ctx);
        let mut best = argmax_abs(&extra, self.grid_len());
        for cand in best_rows {
            if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                best = cand;
            }
        }
        Ok(best)
    }
}

/// Groups identical points, summing their weights and dropping groups whose
/// weights cancel to exactly zero.
fn merge_coincident(points: &PointSet, weights: &[f64]) -> (PointSet, Vec<f64>) {
    let dim = points.dim();
    let mut order: Vec<usize> = (0..points.len()).collect();
    let key = |i: usize| points.point(i).iter().map(|c| c + 0.0);
    order.sort_by(|&a, &b| {
        key(a)
            .zip(key(b))
            .map(|(x, y)| x.total_cmp(&y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut coords = Vec::new();
    let mut merged = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let first = points.point(order[k]);
        let mut w = 0.0;
        let mut m = k;
        while m < order.len() && points.point(order[m]).iter().zip(first).all(|(a, b)| a == b) {
            w += weights[order[m]];
            m += 1;
        }
        if w != 0.0 {
            coords.extend_from_slice(first);
            merged.push(w);
        }
        k = m;
    }
    (PointSet::from_flat(dim, coords).expect("finite input coordinates"), merged)
}

fn argmax_abs(values: &[f64], offset: usize) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, usize::MAX);
    for (i, v) in values.iter().enumerate() {
        if v.abs() > best.0 {
            best = (v.abs(), offset + i);
        }
    }
    best
}

#[inline]
fn gauss_factor(z: f64) -> f64 {
    if z.abs() > GAUSS_CUTOFF {
        0.0
    } else {
        libm::exp(-z * z)
    }
}

fn weighted_sum_at(ctx: &SumContext<'_>, x: &[f64]) -> f64 {
    match (&ctx.index, ctx.kernel.support_limit()) {
        (Some(index), Some(r)) => {
            let mut s = 0.0;
            let r_sq = r * r;
            index.for_each_candidate(x, r, |i| {
                let p = ctx.points.point(i);
                if dist_sq(x, p) <= r_sq {
                    s += ctx.weights[i] * ctx.kernel.eval_unchecked(x, p);
                }
            });
            s
        }
        _ => ctx
            .points
            .iter()
            .zip(&ctx.weights)
            .map(|(p, &w)| w * ctx.kernel.eval_unchecked(x, p))
            .sum(),
    }
}

#[cfg(feature = "parallel")]
fn map_rows<T: Send>(rows: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..rows).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_rows<T>(rows: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..rows).map(f).collect()
}
