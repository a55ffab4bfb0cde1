//! Points, point sets and balls in `R^d`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// A single point in `R^d`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("a point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(alloc::vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(dist_sq(a, b))
}

/// An ordered, finite set of points sharing one dimension.
///
/// Coordinates are stored row-major in one buffer; the index of a point is
/// its stable identifier for matchings and colorings.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if coords.len() % dim != 0 {
            return Err(invalid("coordinate buffer length is not a multiple of the dimension"));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(dim, coords)
    }

    pub fn empty(dim: usize) -> Self {
        PointSet {
            dim: dim.max(1),
            coords: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_point(&self, i: usize) -> Point {
        Point(self.point(i).to_vec())
    }

    /// The sub-multiset at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }

    /// Concatenation of two sets of the same dimension.
    pub fn concat(&self, other: &PointSet) -> Result<PointSet> {
        self.check_dim(other.dim)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointSet {
            dim: self.dim,
            coords,
        })
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        self.check_dim(p.len())?;
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: self.len() });
        }
        self.coords.extend_from_slice(p);
        Ok(())
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

    /// Per-axis `(min, max)`; `None` for an empty set.
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        if self.is_empty() {
            return None;
        }
        let mut bb: Vec<(f64, f64)> = self.point(0).iter().map(|&c| (c, c)).collect();
        for p in self.iter() {
            for (b, &c) in bb.iter_mut().zip(p) {
                b.0 = b.0.min(c);
                b.1 = b.1.max(c);
            }
        }
        Some(bb)
    }

    /// Every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }
}

/// A closed ball `{y : |y - center| <= radius}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("ball radius must be positive and finite"));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        dist_sq(self.center.coords(), p) <= self.radius * self.radius
    }

    pub fn volume(&self) -> f64 {
        ball_volume(self.center.dim(), self.radius)
    }
}

/// Volume of a `dim`-dimensional ball: `pi^{d/2} / Gamma(d/2 + 1) * r^d`.
pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    let d = dim as f64;
    libm::pow(PI, d / 2.0) / libm::tgamma(d / 2.0 + 1.0) * libm::pow(radius, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-12);
        assert!((ball_volume(3, 1.0) - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((ball_volume(2, 2.0) - 4.0 * PI).abs() < 1e-12);
        assert!((ball_volume(1, 1.5) - 3.0).abs() < 1e-12);
        assert_eq!(ball_volume(4, 0.0), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            PointSet::from_flat(2, vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 0 })
        ));
        assert!(PointSet::from_flat(2, vec![0.0, 1.0, 2.0]).is_err());
        assert!(PointSet::from_flat(0, vec![]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Ball::new(Point::origin(2), 0.0).is_err());
        let mut ps = PointSet::empty(2);
        assert!(matches!(
            ps.push(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn select_and_bbox() {
        let ps = PointSet::from_rows(2, &[[0.0, 1.0], [2.0, -1.0], [1.0, 5.0]]).unwrap();
        assert_eq!(ps.len(), 3);
        let sub = ps.select(&[2, 0]);
        assert_eq!(sub.point(0), &[1.0, 5.0]);
        assert_eq!(ps.bounding_box().unwrap(), vec![(0.0, 2.0), (-1.0, 5.0)]);
    }
}
