//! Kernel density estimates and certified L-infinity distances between them.
//!
//! `kde_P(x) = sum_{p in P} K(x, p) / |P|`. The difference of two estimates
//! is `2 sigma`-Lipschitz, and a grid net covers its region within `tau / 2`,
//! so the true supremum lies in `[value, value + 2 sigma tau]` unless it is
//! attained outside the region, where both estimates are below
//! `outside_bound`.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geometry::{Point, PointSet};
use crate::kernel::KernelSpec;
use crate::net::{build_net_with, default_tau, EvaluationNet, NetOptions};

/// A point set read as a density through a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeQuery {
    base: PointSet,
    kernel: KernelSpec,
}

impl KdeQuery {
    pub fn new(base: PointSet, kernel: KernelSpec) -> Result<Self> {
        if base.is_empty() {
            return Err(invalid("a density estimate needs at least one point"));
        }
        kernel.check_dim(base.dim())?;
        Ok(KdeQuery { base, kernel })
    }

    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }
}

/// `kde(x)`.
pub fn kde_at(q: &KdeQuery, x: &[f64]) -> Result<f64> {
    q.kernel.check_dim(x.len())?;
    let s: f64 = q.base.iter().map(|p| q.kernel.eval_unchecked(x, p)).sum();
    Ok(s / q.base.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinfReport {
    /// Largest `|kde_1 - kde_2|` over the net.
    pub value: f64,
    pub argmax: Point,
    pub grid_tau: f64,
    /// `2 sigma tau`; `None` when the kernel has no slope bound, in which case
    /// `value` is only a lower bound.
    pub slack: Option<f64>,
    /// Both estimates are below this outside the scanned region.
    pub outside_bound: f64,
    pub centers: usize,
    /// True when a center cap forced a coarser grid than requested.
    pub coarsened: bool,
    pub certified: bool,
}

impl LinfReport {
    /// Certified upper bound on the true L-infinity distance, if any.
    pub fn upper_bound(&self) -> Option<f64> {
        self.slack.map(|s| (self.value + s).max(self.outside_bound))
    }
}

/// Grid maximum of `|kde_1 - kde_2|`. `opts.tau` defaults to
/// `1 / (|base_1| max(sigma, 1))`; Ball kernels need an explicit `tau`.
pub fn linf_distance(q1: &KdeQuery, q2: &KdeQuery, opts: &NetOptions) -> Result<LinfReport> {
    if q1.kernel != q2.kernel {
        return Err(invalid(alloc::format!(
            "kernel mismatch: `{}` versus `{}`",
            q1.kernel, q2.kernel
        )));
    }
    let kernel = q1.kernel;
    let (n1, n2) = (q1.base.len(), q2.base.len());
    let combined = q1.base.concat(&q2.base)?;
    let mut weights: Vec<f64> = Vec::with_capacity(n1 + n2);
    weights.extend(core::iter::repeat(1.0 / n1 as f64).take(n1));
    weights.extend(core::iter::repeat(-1.0 / n2 as f64).take(n2));
    let mut opts = opts.clone();
    if opts.tau.is_none() {
        opts.tau = Some(default_tau(&kernel, n1)?);
    }
    let net = build_net_with(&combined, &kernel, &opts)?;
    let (value, arg) = net.max_abs_weighted_sum(&combined, &weights, &kernel)?;
    let slack = kernel.slope_bound().ok().map(|s| 2.0 * s * net.tau());
    Ok(LinfReport {
        value,
        argmax: net.center(arg),
        grid_tau: net.tau(),
        certified: slack.is_some(),
        slack,
        outside_bound: kernel.eval_dist(net.region_radius()),
        centers: net.len(),
        coarsened: net.coarsened(),
    })
}

/// `kde_P` tabulated on a net over `P`, for measuring many subsets of `P`.
///
/// Every subset of `P` lives inside the net's region, so the certificate of
/// [`linf_distance`] carries over.
#[derive(Debug, Clone)]
pub struct ReferenceGrid {
    base: PointSet,
    kernel: KernelSpec,
    net: EvaluationNet,
    values: Vec<f64>,
}

impl ReferenceGrid {
    pub fn new(q: &KdeQuery, opts: &NetOptions) -> Result<Self> {
        let n = q.base.len();
        let mut opts = opts.clone();
        if opts.tau.is_none() {
            opts.tau = Some(default_tau(&q.kernel, n)?);
        }
        let net = build_net_with(&q.base, &q.kernel, &opts)?;
        let weights = alloc::vec![1.0 / n as f64; n];
        let values = net.weighted_sums(&q.base, &weights, &q.kernel)?;
        Ok(ReferenceGrid {
            base: q.base.clone(),
            kernel: q.kernel,
            net,
            values,
        })
    }

    pub fn net(&self) -> &EvaluationNet {
        &self.net
    }

    /// `L_inf(kde_P, kde_S)` for `S` the points of `P` at `indices`
    /// (repeats allowed).
    pub fn linf_to_subset(&self, indices: &[usize]) -> Result<LinfReport> {
        if indices.is_empty() {
            return Err(invalid("a density estimate needs at least one point"));
        }
        if indices.iter().any(|&i| i >= self.base.len()) {
            return Err(invalid("subset index out of range"));
        }
        let sample = self.base.select(indices);
        let weights = alloc::vec![1.0 / indices.len() as f64; indices.len()];
        let sums = self.net.weighted_sums(&sample, &weights, &self.kernel)?;
        let (mut value, mut arg) = (f64::NEG_INFINITY, 0);
        for (i, (a, b)) in self.values.iter().zip(&sums).enumerate() {
            let d = (a - b).abs();
            if d > value {
                value = d;
                arg = i;
            }
        }
        let slack = self.kernel.slope_bound().ok().map(|s| 2.0 * s * self.net.tau());
        Ok(LinfReport {
            value,
            argmax: self.net.center(arg),
            grid_tau: self.net.tau(),
            certified: slack.is_some(),
            slack,
            outside_bound: self.kernel.eval_dist(self.net.region_radius()),
            centers: self.net.len(),
            coarsened: self.net.coarsened(),
        })
    }
}
