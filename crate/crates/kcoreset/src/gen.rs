//! Synthetic point-set generators.

use kcoreset_core::rng;
use kcoreset_core::PointSet;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn default_separation() -> f64 {
    3.0
}

fn default_isolation() -> f64 {
    4.0
}

fn default_sigma() -> f64 {
    0.05
}

fn default_components() -> usize {
    4
}

fn default_inner() -> f64 {
    0.5
}

fn default_outer() -> f64 {
    1.0
}

/// A point-set family. All randomness comes from the seed passed to
/// [`generate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Generator {
    /// Uniform in `[0, 1]^d`.
    #[serde(alias = "uniform-cube")]
    UniformSquare,
    /// Uniform in the unit ball at the origin.
    UniformDisk,
    /// Equal-weight isotropic Gaussians with centers uniform in `[0, 1]^d`.
    GaussianMixture {
        #[serde(default = "default_components")]
        k: usize,
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    /// Uniform in the shell `inner <= |x| <= outer`.
    Annulus {
        #[serde(default = "default_inner")]
        inner: f64,
        #[serde(default = "default_outer")]
        outer: f64,
    },
    /// `t` sites spaced `separation` apart on the first axis, with the `n`
    /// points split into contiguous blocks of copies.
    CoincidentClusters {
        t: usize,
        #[serde(default = "default_separation")]
        separation: f64,
    },
    /// Half the points at the origin, half at distance `separation`.
    TwoSite {
        #[serde(default = "default_separation")]
        separation: f64,
    },
    /// `n - 1` points uniform in `[0, 1]^d` and one at `(s, ..., s)`.
    IsolatedPoint {
        #[serde(default = "default_isolation")]
        separation: f64,
    },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::UniformSquare => "uniform-square",
            Generator::UniformDisk => "uniform-disk",
            Generator::GaussianMixture { .. } => "gaussian-mixture",
            Generator::Annulus { .. } => "annulus",
            Generator::CoincidentClusters { .. } => "coincident-clusters",
            Generator::TwoSite { .. } => "two-site",
            Generator::IsolatedPoint { .. } => "isolated-point",
        }
    }
}

fn unit_direction(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn shell_point(rng: &mut impl Rng, dim: usize, inner: f64, outer: f64) -> Vec<f64> {
    let d = dim as f64;
    let u: f64 = rng.random();
    let r = (inner.powf(d) + u * (outer.powf(d) - inner.powf(d))).powf(1.0 / d);
    unit_direction(rng, dim).into_iter().map(|x| x * r).collect()
}

pub fn generate(generator: &Generator, n: usize, dim: usize, seed: u64) -> Result<PointSet, CliError> {
    if n == 0 || dim == 0 {
        return Err(CliError::Usage("n and dim must be at least 1".into()));
    }
    let mut rng = rng::stream(seed, generator.name(), 0);
    let mut coords = Vec::with_capacity(n * dim);
    match *generator {
        Generator::UniformSquare => coords.extend((0..n * dim).map(|_| rng.random::<f64>())),
        Generator::UniformDisk => {
            for _ in 0..n {
                coords.extend(shell_point(&mut rng, dim, 0.0, 1.0));
            }
        }
        Generator::GaussianMixture { k, sigma } => {
            if k == 0 || !(sigma > 0.0) {
                return Err(CliError::Usage("gaussian-mixture needs k >= 1 and sigma > 0".into()));
            }
            let centers: Vec<f64> = (0..k * dim).map(|_| rng.random::<f64>()).collect();
            for _ in 0..n {
                let c = rng.random_range(0..k);
                for a in 0..dim {
                    let z: f64 = rng.sample(StandardNormal);
                    coords.push(centers[c * dim + a] + sigma * z);
                }
            }
        }
        Generator::Annulus { inner, outer } => {
            if !(inner >= 0.0 && outer > inner) {
                return Err(CliError::Usage("annulus needs 0 <= inner < outer".into()));
            }
            for _ in 0..n {
                coords.extend(shell_point(&mut rng, dim, inner, outer));
            }
        }
        Generator::CoincidentClusters { t, separation } => {
            if t == 0 || t > n {
                return Err(CliError::Usage(format!("coincident-clusters needs 1 <= t <= n, got t = {t}")));
            }
            for i in 0..n {
                let site = i * t / n;
                coords.push(site as f64 * separation);
                coords.extend(std::iter::repeat(0.0).take(dim - 1));
            }
        }
        Generator::TwoSite { separation } => {
            for i in 0..n {
                coords.push(if i < n / 2 { 0.0 } else { separation });
                coords.extend(std::iter::repeat(0.0).take(dim - 1));
            }
        }
        Generator::IsolatedPoint { separation } => {
            coords.extend((0..(n - 1) * dim).map(|_| rng.random::<f64>()));
            coords.extend(std::iter::repeat(separation).take(dim));
        }
    }
    Ok(PointSet::from_flat(dim, coords)?)
}
