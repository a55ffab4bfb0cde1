//! Shift- and rotation-invariant kernels `K(x, p) = k(|x - p|)`.
//!
//! Each family has a unit profile with `k(0) = 1`, values in `[0, 1]`, and
//! `k` non-increasing in the distance:
//!
//! | family        | `k(z)`                    | max slope      |
//! |---------------|---------------------------|----------------|
//! | Gaussian      | `exp(-z^2)`               | `sqrt(2/e)`    |
//! | Triangle      | `max(0, 1 - z)`           | `1`            |
//! | Epanechnikov  | `max(0, 1 - z^2)`         | `2`            |
//! | Ball          | `1` if `z <= 1`, else `0` | unbounded      |
//!
//! Two scalings are supported. [`Scaling::Bandwidth`] keeps the integral
//! fixed, `k_w(z) = k(z/w) / w^d`, so the peak grows as `w` shrinks.
//! [`Scaling::Unit`] keeps the peak at one, `k_s(z) = k(z/s)`. At `w = s = 1`
//! the two coincide, and that is the default.

use alloc::format;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, Ball, Point};

/// Absolute tolerance used when comparing kernel values with thresholds.
pub const THRESHOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum KernelFamily {
    Gaussian,
    Triangle,
    Epanechnikov,
    Ball,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Triangle => "triangle",
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Ball => "ball",
        }
    }

    /// The unit profile `k(z)` for `z >= 0`.
    #[inline]
    pub fn profile(self, z: f64) -> f64 {
        match self {
            KernelFamily::Gaussian => libm::exp(-z * z),
            KernelFamily::Triangle => (1.0 - z).max(0.0),
            KernelFamily::Epanechnikov => (1.0 - z * z).max(0.0),
            KernelFamily::Ball => {
                if z <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Maximum of `|k'(z)|` for the unit profile.
    pub fn unit_slope(self) -> Option<f64> {
        match self {
            // 2z exp(-z^2) peaks at z = 1/sqrt(2)
            KernelFamily::Gaussian => Some(libm::sqrt(2.0 / core::f64::consts::E)),
            KernelFamily::Triangle => Some(1.0),
            KernelFamily::Epanechnikov => Some(2.0),
            KernelFamily::Ball => None,
        }
    }

    /// Radius outside which the unit profile is zero, if any.
    pub fn unit_support(self) -> Option<f64> {
        match self {
            KernelFamily::Gaussian => None,
            _ => Some(1.0),
        }
    }

    /// The distance `z` at which the unit profile drops to `level`, for
    /// `0 <= level < 1`. `None` when the profile never reaches `level`.
    fn unit_inverse(self, level: f64) -> Option<f64> {
        match self {
            KernelFamily::Gaussian => {
                if level <= 0.0 {
                    None
                } else {
                    Some(libm::sqrt(-libm::log(level)))
                }
            }
            KernelFamily::Triangle => Some(1.0 - level.max(0.0)),
            KernelFamily::Epanechnikov => Some(libm::sqrt(1.0 - level.max(0.0))),
            KernelFamily::Ball => Some(1.0),
        }
    }
}

impl core::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Ok(KernelFamily::Gaussian),
            "triangle" | "tri" => Ok(KernelFamily::Triangle),
            "epanechnikov" | "epan" => Ok(KernelFamily::Epanechnikov),
            "ball" => Ok(KernelFamily::Ball),
            other => Err(invalid(format!("unknown kernel family `{other}`"))),
        }
    }
}

/// How a unit profile is stretched.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scaling {
    /// `k(z / s)`: the peak stays at one.
    Unit { s: f64 },
    /// `k(z / w) / w^d`: the integral stays fixed.
    Bandwidth { w: f64 },
}

/// A kernel family member in a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub scaling: Scaling,
    pub dim: usize,
}

impl KernelSpec {
    /// The unit-scale member (`k(0) = 1`, bandwidth one).
    pub fn unit(family: KernelFamily, dim: usize) -> Self {
        KernelSpec {
            family,
            scaling: Scaling::Unit { s: 1.0 },
            dim,
        }
    }

    pub fn gaussian(dim: usize) -> Self {
        Self::unit(KernelFamily::Gaussian, dim)
    }

    pub fn triangle(dim: usize) -> Self {
        Self::unit(KernelFamily::Triangle, dim)
    }

    pub fn with_bandwidth(family: KernelFamily, dim: usize, w: f64) -> Result<Self> {
        check_positive(w, "bandwidth")?;
        Ok(KernelSpec {
            family,
            scaling: Scaling::Bandwidth { w },
            dim,
        })
    }

    pub fn with_scale(family: KernelFamily, dim: usize, s: f64) -> Result<Self> {
        check_positive(s, "scale")?;
        Ok(KernelSpec {
            family,
            scaling: Scaling::Unit { s },
            dim,
        })
    }

    /// Parses `family[:w=<bandwidth>|:s=<scale>]`, e.g. `gaussian:w=1.0`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("kernel dimension must be at least 1"));
        }
        let mut parts = text.split(':');
        let family: KernelFamily = parts.next().unwrap_or("").parse()?;
        let mut spec = Self::unit(family, dim);
        for param in parts {
            let (key, value) = param
                .split_once('=')
                .ok_or_else(|| invalid(format!("malformed kernel parameter `{param}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| invalid(format!("kernel parameter `{key}` is not a number")))?;
            spec = match key.trim() {
                "w" | "bandwidth" => Self::with_bandwidth(family, dim, value)?,
                "s" | "scale" => Self::with_scale(family, dim, value)?,
                other => return Err(invalid(format!("unknown kernel parameter `{other}`"))),
            };
        }
        Ok(spec)
    }

    /// Length scale dividing the distance before the unit profile is applied.
    #[inline]
    pub fn length(&self) -> f64 {
        match self.scaling {
            Scaling::Unit { s } => s,
            Scaling::Bandwidth { w } => w,
        }
    }

    /// `k(0)`.
    #[inline]
    pub fn peak(&self) -> f64 {
        match self.scaling {
            Scaling::Unit { .. } => 1.0,
            Scaling::Bandwidth { w } => 1.0 / libm::pow(w, self.dim as f64),
        }
    }

    /// `k(z)` for a distance `z >= 0`.
    #[inline]
    pub fn eval_dist(&self, z: f64) -> f64 {
        self.peak() * self.family.profile(z / self.length())
    }

    /// `K(x, p)` without a dimension check.
    #[inline]
    pub fn eval_unchecked(&self, x: &[f64], p: &[f64]) -> f64 {
        self.eval_dist(dist(x, p))
    }

    /// `K(x, p)`.
    pub fn eval(&self, x: &[f64], p: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        self.check_dim(p.len())?;
        Ok(self.eval_unchecked(x, p))
    }

    pub fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            })
        } else {
            Ok(())
        }
    }

    /// A Lipschitz constant of `z -> k(z)`: the tight maximum slope.
    pub fn slope_bound(&self) -> Result<f64> {
        let unit = self
            .family
            .unit_slope()
            .ok_or(Error::UnboundedSlope(self.family.name()))?;
        Ok(unit * self.peak() / self.length())
    }

    /// Radius beyond which the kernel is exactly zero, if it has compact support.
    pub fn support_limit(&self) -> Option<f64> {
        self.family.unit_support().map(|r| r * self.length())
    }

    /// Radius of `{p : K(x, p) > threshold}`.
    pub fn support_radius(&self, threshold: f64) -> Result<f64> {
        let peak = self.peak();
        if threshold >= peak - THRESHOLD_TOL {
            return Err(Error::EmptySupport { threshold, peak });
        }
        let level = threshold / peak;
        match self.family.unit_inverse(level) {
            Some(z) => Ok(z * self.length()),
            None => Err(invalid(format!(
                "{} kernels are positive everywhere; threshold {threshold} gives unbounded support",
                self.family.name()
            ))),
        }
    }

    /// The ball `{p : K(x, p) > threshold}` around `x`.
    pub fn support_ball(&self, x: &Point, threshold: f64) -> Result<Ball> {
        self.check_dim(x.dim())?;
        Ball::new(x.clone(), self.support_radius(threshold)?)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scaling {
            Scaling::Unit { s } if s == 1.0 => write!(f, "{}", self.family.name()),
            Scaling::Unit { s } => write!(f, "{}:s={s}", self.family.name()),
            Scaling::Bandwidth { w } => write!(f, "{}:w={w}", self.family.name()),
        }
    }
}

fn check_positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be positive and finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::E;
    use proptest::prelude::*;

    const FAMILIES: [KernelFamily; 4] = [
        KernelFamily::Gaussian,
        KernelFamily::Triangle,
        KernelFamily::Epanechnikov,
        KernelFamily::Ball,
    ];

    #[test]
    fn values() {
        let g = KernelSpec::gaussian(2);
        assert_eq!(g.eval(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 1.0);
        assert!((g.eval(&[0.0, 0.0], &[0.6, 0.8]).unwrap() - 1.0 / E).abs() < 1e-15);
        let t = KernelSpec::triangle(2);
        assert!((t.eval(&[0.0, 0.0], &[0.25, 0.0]).unwrap() - 0.75).abs() < 1e-15);
        let g2 = KernelSpec::parse("gaussian:w=2", 2).unwrap();
        assert!((g2.eval(&[1.0, 1.0], &[1.0, 1.0]).unwrap() - 0.25).abs() < 1e-15);
        let b = KernelSpec::unit(KernelFamily::Ball, 2);
        assert_eq!(b.eval(&[0.0, 0.0], &[2.0, 0.0]).unwrap(), 0.0);
        assert_eq!(b.eval(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = KernelSpec::gaussian(2);
        assert_eq!(
            g.eval(&[0.0, 0.0, 0.0], &[0.0, 0.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    // Numeric scan of |d/dz k(z)| by central differences, independent of the
    // closed-form slopes.
    fn scanned_slope(family: KernelFamily) -> f64 {
        let h = 1e-6;
        let mut best = 0.0f64;
        let mut z = h;
        while z < 4.0 {
            let d = (family.profile(z - h) - family.profile(z + h)) / (2.0 * h);
            best = best.max(d.abs());
            z += 1e-4;
        }
        best
    }

    #[test]
    fn slopes() {
        assert_eq!(KernelSpec::triangle(2).slope_bound().unwrap(), 1.0);
        let epan = KernelSpec::unit(KernelFamily::Epanechnikov, 2);
        assert_eq!(epan.slope_bound().unwrap(), 2.0);
        let g = KernelSpec::gaussian(2).slope_bound().unwrap();
        assert!((g - 0.857_763_884_960_706_8).abs() < 1e-12);
        for fam in [KernelFamily::Gaussian, KernelFamily::Triangle, KernelFamily::Epanechnikov] {
            let scanned = scanned_slope(fam);
            let closed = fam.unit_slope().unwrap();
            assert!(scanned <= closed + 1e-6, "{fam:?}: {scanned} > {closed}");
            assert!(scanned >= closed - 1e-3, "{fam:?}: {scanned} not tight vs {closed}");
        }
        assert_eq!(
            KernelSpec::unit(KernelFamily::Ball, 2).slope_bound(),
            Err(Error::UnboundedSlope("ball"))
        );
    }

    #[test]
    fn support_radii() {
        let t = KernelSpec::triangle(2);
        assert!((t.support_radius(0.0).unwrap() - 1.0).abs() < 1e-15);
        let g = KernelSpec::gaussian(2);
        let n = 100.0;
        let r = g.support_radius(1.0 / (2.0 * n)).unwrap();
        assert!((r - libm::sqrt(libm::log(2.0 * n))).abs() < 1e-12);
        assert!((g.support_radius(1.0 / E).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(g.support_radius(1.0), Err(Error::EmptySupport { .. })));
        assert!(g.support_radius(0.0).is_err());
        let ball = g.support_ball(&Point::origin(2), 0.5).unwrap();
        assert!((ball.radius - libm::sqrt(libm::log(2.0))).abs() < 1e-12);
    }

    #[test]
    fn parse_and_display() {
        for text in ["gaussian", "triangle:s=0.5", "epanechnikov:w=2", "ball"] {
            let k = KernelSpec::parse(text, 3).unwrap();
            assert_eq!(alloc::format!("{k}"), text);
        }
        assert!(KernelSpec::parse("sinc", 2).is_err());
        assert!(KernelSpec::parse("gaussian:w=-1", 2).is_err());
        assert!(KernelSpec::parse("gaussian:q=1", 2).is_err());
        assert!(KernelSpec::parse("gaussian:w", 2).is_err());
    }

    proptest! {
        #[test]
        fn unit_kernels_are_bounded_and_monotone(
            fam in 0usize..4, a in 0.0f64..5.0, b in 0.0f64..5.0
        ) {
            let k = KernelSpec::unit(FAMILIES[fam], 2);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (vlo, vhi) = (k.eval_dist(lo), k.eval_dist(hi));
            prop_assert!((0.0..=1.0).contains(&vlo));
            prop_assert!(vhi <= vlo);
            prop_assert_eq!(k.eval_dist(0.0), 1.0);
        }

        #[test]
        fn lipschitz(fam in 0usize..3, a in 0.0f64..4.0, b in 0.0f64..4.0, s in 0.2f64..3.0) {
            let k = KernelSpec::with_scale(FAMILIES[fam], 2, s).unwrap();
            let sigma = k.slope_bound().unwrap();
            prop_assert!((k.eval_dist(a) - k.eval_dist(b)).abs() <= sigma * (a - b).abs() + 1e-15);
        }

        #[test]
        fn bandwidth_identity(fam in 0usize..4, z in 0.0f64..3.0, w in 0.1f64..4.0, d in 1usize..4) {
            let kw = KernelSpec::with_bandwidth(FAMILIES[fam], d, w).unwrap();
            let k1 = KernelSpec::unit(FAMILIES[fam], d);
            let lhs = kw.eval_dist(z) * libm::pow(w, d as f64);
            prop_assert!((lhs - k1.eval_dist(z / w)).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn support_radius_brackets_threshold(fam in 0usize..3, t in 0.01f64..0.99, w in 0.3f64..3.0) {
            let k = KernelSpec::with_scale(FAMILIES[fam], 2, w).unwrap();
            let r = k.support_radius(t).unwrap();
            prop_assert!(k.eval_dist(r + 1e-9) <= t + THRESHOLD_TOL);
            prop_assert!(k.eval_dist((r - 1e-9).max(0.0)) > t);
        }
    }

    #[test]
    fn lipschitz_ten_thousand_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for fam in [KernelFamily::Gaussian, KernelFamily::Triangle, KernelFamily::Epanechnikov] {
            let k = KernelSpec::unit(fam, 2);
            let sigma = k.slope_bound().unwrap();
            let mut violations = vec![];
            for _ in 0..10_000 {
                let a: f64 = rng.random_range(0.0..3.0);
                let b: f64 = rng.random_range(0.0..3.0);
                if (k.eval_dist(a) - k.eval_dist(b)).abs() > sigma * (a - b).abs() + 1e-15 {
                    violations.push((a, b));
                }
            }
            assert!(violations.is_empty(), "{fam:?}: {violations:?}");
        }
    }
}
