//! Epsilon-samples by repeated halving.
//!
//! Each level matches the current set, colors the pairs at random and keeps
//! the `+1` half (and the leftover of an odd set). For an even level of size
//! `m` with coloring `chi`, `kde_before - kde_after = -(1/m) sum chi K`, so the
//! final error telescopes into the per-level discrepancies divided by the
//! level sizes.

use alloc::string::String;
use alloc::vec::Vec;

use crate::discrepancy::{color_from_matching, disc_max};
use crate::error::{invalid, Error, Result};
use crate::geometry::PointSet;
use crate::kde::{linf_distance, KdeQuery, LinfReport};
use crate::kernel::KernelSpec;
use crate::matching::{min_cost_matching, MatchingAlgo};
use crate::net::{build_net_with, NetOptions};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Target {
    Eps(f64),
    Size(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalvingConfig {
    pub kernel: KernelSpec,
    pub target: Target,
    pub algo: MatchingAlgo,
    pub seed: u64,
    /// Multiplier on the closed-form size target.
    pub size_constant: f64,
    /// Overall failure probability, split evenly over the levels.
    pub phi: f64,
    /// When set, every level also records its discrepancy over a net built
    /// with these options.
    pub level_net: Option<NetOptions>,
}

impl HalvingConfig {
    pub fn new(kernel: KernelSpec, target: Target, seed: u64) -> Self {
        HalvingConfig {
            kernel,
            target,
            algo: MatchingAlgo::Exact,
            seed,
            size_constant: 1.0,
            phi: 0.1,
            level_net: None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.target {
            Target::Eps(e) if !(e > 0.0 && e < 1.0) => Err(invalid("eps must lie in (0, 1)")),
            Target::Size(0) => Err(invalid("target size must be at least 1")),
            _ if !(self.size_constant > 0.0) => Err(invalid("size constant must be positive")),
            _ if !(self.phi > 0.0 && self.phi < 1.0) => Err(invalid("phi must lie in (0, 1)")),
            _ => Ok(()),
        }
    }
}

/// Closed-form size for an `eps`-sample in dimension `d`:
/// `c (1/eps)^{2d/(d+2)} max(1, ln(1/eps))^{d/(d+2)}`.
pub fn target_size(eps: f64, d: usize, c: f64) -> usize {
    let d = d as f64;
    let inv = 1.0 / eps;
    let log = libm::log(inv).max(1.0);
    let raw = c * libm::pow(inv, 2.0 * d / (d + 2.0)) * libm::pow(log, d / (d + 2.0));
    (libm::ceil(raw - 1e-9) as usize).max(1)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelRecord {
    pub size_before: usize,
    pub size_after: usize,
    pub matching_cost: f64,
    pub seed: u64,
    /// Per-level failure probability `phi / log2 n`.
    pub delta: f64,
    /// `sqrt(2 ln(2 m / delta))` for a level of size `m`: the scale of the
    /// discrepancy the level is expected to stay under, up to a constant.
    pub predicted_disc: f64,
    pub disc: Option<f64>,
    pub disc_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpsSampleResult {
    /// Indices of the retained points in the input, ascending.
    pub indices: Vec<usize>,
    pub target_eps: Option<f64>,
    pub target_size: usize,
    pub levels: Vec<LevelRecord>,
    pub measured_linf: Option<f64>,
    pub note: Option<String>,
}

impl EpsSampleResult {
    pub fn sample(&self, points: &PointSet) -> PointSet {
        points.select(&self.indices)
    }
}

/// One halving step on `indices` (a subset of `points`). Returns the kept
/// indices, ascending, and the level record.
pub fn halve_once(
    points: &PointSet,
    indices: &[usize],
    cfg: &HalvingConfig,
    level: usize,
) -> Result<(Vec<usize>, LevelRecord)> {
    if indices.len() < 2 {
        return Err(invalid("halving needs at least two points"));
    }
    let sub = points.select(indices);
    let matching = min_cost_matching(&sub, cfg.algo)?;
    let seed = rng::derive_seed(cfg.seed, "halving-level", level as u64);
    let chi = color_from_matching(&matching, seed);
    let (disc, disc_slack) = match &cfg.level_net {
        Some(opts) => {
            let net = build_net_with(&sub, &cfg.kernel, opts)?;
            let rep = disc_max(&sub, &chi, &cfg.kernel, &net)?;
            (Some(rep.max_disc), rep.resolution_slack)
        }
        None => (None, None),
    };
    let kept: Vec<usize> = chi.positive().into_iter().map(|i| indices[i]).collect();
    let m = indices.len() as f64;
    let delta = cfg.phi / libm::log2(points.len().max(2) as f64).max(1.0);
    let record = LevelRecord {
        size_before: indices.len(),
        size_after: kept.len(),
        matching_cost: matching.cost,
        seed,
        delta,
        predicted_disc: libm::sqrt(2.0 * libm::log(2.0 * m / delta)),
        disc,
        disc_slack,
    };
    let mut kept = kept;
    kept.sort_unstable();
    Ok((kept, record))
}

/// Halves `points` until at most the target size remains.
pub fn build_eps_sample(points: &PointSet, cfg: &HalvingConfig) -> Result<EpsSampleResult> {
    cfg.validate()?;
    cfg.kernel.check_dim(points.dim())?;
    let n = points.len();
    if n == 0 {
        return Err(invalid("cannot sample an empty point set"));
    }
    let (target_eps, target) = match cfg.target {
        Target::Eps(e) => (Some(e), target_size(e, points.dim(), cfg.size_constant)),
        Target::Size(s) => {
            if s > n {
                return Err(Error::TooLarge {
                    what: "requested sample size",
                    value: s,
                    limit: n,
                });
            }
            (None, s)
        }
    };
    let mut result = EpsSampleResult {
        indices: (0..n).collect(),
        target_eps,
        target_size: target,
        levels: Vec::new(),
        measured_linf: None,
        note: None,
    };
    if target >= n {
        if target_eps.is_some() {
            result.note = Some(alloc::format!(
                "target size {target} is not below the input size {n}; returning the input"
            ));
        }
        return Ok(result);
    }
    while result.indices.len() > target {
        let (kept, record) = halve_once(points, &result.indices, cfg, result.levels.len())?;
        result.indices = kept;
        result.levels.push(record);
    }
    Ok(result)
}

/// Measures `L_inf(kde_P, kde_S)` for a finished sample and stores the value.
pub fn certify(points: &PointSet, result: &mut EpsSampleResult, kernel: &KernelSpec, opts: &NetOptions) -> Result<LinfReport> {
    let full = KdeQuery::new(points.clone(), *kernel)?;
    let sample = KdeQuery::new(result.sample(points), *kernel)?;
    let report = linf_distance(&full, &sample, opts)?;
    result.measured_linf = Some(report.value);
    Ok(report)
}

/// Uniform sample of `size` distinct indices, ascending.
pub fn random_sample_baseline(n: usize, size: usize, seed: u64) -> Result<Vec<usize>> {
    if size > n {
        return Err(Error::TooLarge {
            what: "requested sample size",
            value: size,
            limit: n,
        });
    }
    let mut rng = rng::stream(seed, "random-sample", 0);
    let mut idx = rand::seq::index::sample(&mut rng, n, size).into_vec();
    idx.sort_unstable();
    Ok(idx)
}
