//! Finite point clouds in R^m and the exact set operations on them.
//!
//! A [`PointCloud`] stands for a nonempty compact set. Minkowski
//! combinations and Hausdorff distances are computed exactly over the
//! stored points; the only approximation is the sampling of the
//! underlying compact set, which is the caller's choice.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Coordinate tolerance used when removing duplicate points.
pub const DEDUP_TOL: f64 = 1e-12;

/// Relative tolerance of the orientation predicate in [`convex_hull_2d`].
pub const COLLINEAR_TOL: f64 = 1e-12;

/// A point of R^m.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("vector must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("vector coordinates must be finite"));
        }
        Ok(Vector(coords))
    }

    pub fn zero(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector of R^dim.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// Rescales to unit length. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(Vector(self.0.iter().map(|c| c / n).collect()))
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A nonempty finite subset of R^m, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from a list of points of equal dimension.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("point cloud must be nonempty"))?;
        let mut data = Vec::with_capacity(dim * points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            data.extend_from_slice(p);
        }
        Self::from_flat(dim, data)
    }

    /// Builds a cloud from row-major coordinates.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form a nonempty set of {dim}-dimensional points",
                data.len()
            )));
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(PointCloud { dim, data })
    }

    pub fn singleton(p: &[f64]) -> Result<Self> {
        Self::from_flat(p.len(), p.to_vec())
    }

    /// The set {θ} containing only the origin.
    pub fn origin(dim: usize) -> Self {
        PointCloud {
            dim,
            data: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    /// λ·A.
    pub fn scaled(&self, lambda: f64) -> PointCloud {
        PointCloud {
            dim: self.dim,
            data: self.data.iter().map(|c| lambda * c).collect(),
        }
    }

    /// Largest Euclidean norm of a point, i.e. δ(A, {θ}).
    pub fn max_norm(&self) -> f64 {
        self.points().map(norm).fold(0.0, f64::max)
    }

    /// Largest inner product with `u`: the support function of co A at `u`.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.points()
            .map(|p| dot(p, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Removes points that coincide within [`DEDUP_TOL`] in every coordinate.
    pub fn dedup(&self) -> PointCloud {
        let mut rows: Vec<&[f64]> = self.points().collect();
        rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut kept: Vec<&[f64]> = Vec::with_capacity(rows.len());
        for p in rows {
            // kept is sorted by first coordinate; only the tail can be close.
            let dup = kept
                .iter()
                .rev()
                .take_while(|q| p[0] - q[0] <= DEDUP_TOL)
                .any(|q| p.iter().zip(q.iter()).all(|(x, y)| (x - y).abs() <= DEDUP_TOL));
            if !dup {
                kept.push(p);
            }
        }
        PointCloud {
            dim: self.dim,
            data: kept.concat(),
        }
    }

    /// Set equality up to `tol` in each coordinate (both inclusions).
    pub fn set_eq(&self, other: &PointCloud, tol: f64) -> bool {
        let within = |a: &PointCloud, b: &PointCloud| {
            a.points().all(|p| {
                b.points()
                    .any(|q| p.iter().zip(q).all(|(x, y)| (x - y).abs() <= tol))
            })
        };
        self.dim == other.dim && within(self, other) && within(other, self)
    }

    fn check_dim(&self, other: &PointCloud) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// λA + μB = {λa + μb : a ∈ A, b ∈ B}, deduplicated.
pub fn minkowski_combine(
    lambda: f64,
    a: &PointCloud,
    mu: f64,
    b: &PointCloud,
) -> Result<PointCloud> {
    a.check_dim(b)?;
    let mut data = Vec::with_capacity(a.len() * b.len() * a.dim);
    for p in a.points() {
        for q in b.points() {
            data.extend(p.iter().zip(q).map(|(x, y)| lambda * x + mu * y));
        }
    }
    Ok(PointCloud { dim: a.dim, data }.dedup())
}

/// d(a, B) = min over b ∈ B of ‖a − b‖.
pub fn point_set_distance(a: &[f64], b: &PointCloud) -> f64 {
    b.points().map(|q| dist(a, q)).fold(f64::INFINITY, f64::min)
}

/// Directed distance d(A, B) = max over a ∈ A of d(a, B).
pub fn directed_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    a.check_dim(b)?;
    Ok(a.points()
        .map(|p| point_set_distance(p, b))
        .fold(0.0, f64::max))
}

/// Hausdorff distance δ(A, B) = max{d(A, B), d(B, A)}.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(directed_distance(a, b)?.max(directed_distance(b, a)?))
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Strict left turn o → a → b, with near-collinear triples counted as not turning.
fn left_turn(o: &[f64], a: &[f64], b: &[f64]) -> bool {
    let scale = dist(o, a) * dist(o, b);
    cross(o, a, b) > COLLINEAR_TOL * scale
}

/// Vertices of co A in counterclockwise order (monotone chain).
///
/// Collinear and interior points are dropped. The first vertex is the
/// lexicographically smallest point.
pub fn convex_hull_2d(a: &PointCloud) -> Result<PointCloud> {
    if a.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim,
        });
    }
    let unique = a.dedup();
    let mut pts: Vec<&[f64]> = unique.points().collect();
    pts.sort_by(|p, q| match p[0].total_cmp(&q[0]) {
        Ordering::Equal => p[1].total_cmp(&q[1]),
        o => o,
    });
    if pts.len() <= 2 {
        return Ok(PointCloud {
            dim: 2,
            data: pts.concat(),
        });
    }

    let mut hull: Vec<&[f64]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && !left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && !left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p)
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(PointCloud {
        dim: 2,
        data: hull.concat(),
    })
}

/// δ(co A, co B) for planar clouds, exactly up to rounding.
///
/// On each arc of directions where the maximizing vertices of both hulls are
/// fixed, h_A − h_B is linear in u, so its extreme values occur at hull edge
/// normals or along ±(a − b) for hull vertices a, b.
pub fn convex_hausdorff_2d(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    let (ha, hb) = (convex_hull_2d(a)?, convex_hull_2d(b)?);
    let mut dirs: Vec<[f64; 2]> = Vec::new();
    for h in [&ha, &hb] {
        let n = h.len();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let (p, q) = (h.point(i), h.point((i + 1) % n));
            dirs.push([q[1] - p[1], p[0] - q[0]]);
            dirs.push([p[1] - q[1], q[0] - p[0]]);
        }
    }
    for p in ha.points() {
        for q in hb.points() {
            dirs.push([p[0] - q[0], p[1] - q[1]]);
            dirs.push([q[0] - p[0], q[1] - p[1]]);
        }
    }
    let mut worst: f64 = 0.0;
    for d in dirs {
        let len = d[0].hypot(d[1]);
        if len == 0.0 {
            continue;
        }
        let u = [d[0] / len, d[1] / len];
        worst = worst.max((ha.support(&u) - hb.support(&u)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(pts: &[[f64; 2]]) -> PointCloud {
        PointCloud::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn combine_examples() {
        let r = minkowski_combine(1.0, &cloud(&[[0.0, 0.0]]), 1.0, &cloud(&[[3.0, 4.0]])).unwrap();
        assert_eq!(r, cloud(&[[3.0, 4.0]]));

        let r = minkowski_combine(2.0, &cloud(&[[1.0, 2.0]]), 0.0, &cloud(&[[9.0, 9.0]])).unwrap();
        assert_eq!(r, cloud(&[[2.0, 4.0]]));

        let a = cloud(&[[1.0, 0.0], [0.0, 1.0]]);
        let b = cloud(&[[0.0, 0.0], [1.0, 1.0]]);
        let r = minkowski_combine(1.0, &a, 1.0, &b).unwrap();
        // enumerated by hand: (1,0)+(0,0), (1,0)+(1,1), (0,1)+(0,0), (0,1)+(1,1)
        let expect = cloud(&[[1.0, 0.0], [0.0, 1.0], [2.0, 1.0], [1.0, 2.0]]);
        assert_eq!(r.len(), 4);
        assert!(r.set_eq(&expect, 0.0));
    }

    #[test]
    fn combine_rejects_dimension_mismatch() {
        let a = cloud(&[[0.0, 0.0]]);
        let b = PointCloud::singleton(&[0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            minkowski_combine(1.0, &a, 1.0, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(hausdorff(&a, &b).is_err());
    }

    #[test]
    fn dedup_merges_near_points() {
        let a = cloud(&[[0.0, 0.0], [1e-13, -1e-13], [1.0, 0.0], [0.0, 5e-13]]);
        assert_eq!(a.dedup().len(), 2);
        let b = cloud(&[[0.0, 0.0], [0.0, 1e-9]]);
        assert_eq!(b.dedup().len(), 2);
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff(&cloud(&[[0.0, 0.0]]), &cloud(&[[3.0, 4.0]])).unwrap(), 5.0);
        let a = cloud(&[[0.3, 0.1], [2.0, -1.0], [0.0, 7.0]]);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let a = cloud(&[[0.0, 0.0], [1.0, 0.0]]);
        let b = cloud(&[[0.0, 0.0]]);
        assert_eq!(directed_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(directed_distance(&b, &a).unwrap(), 0.0);
        assert_eq!(hausdorff(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn hull_examples() {
        let h = convex_hull_2d(&cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.2, 0.2]])).unwrap();
        assert_eq!(h, cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]));

        let h = convex_hull_2d(&cloud(&[[0.0, 0.0]])).unwrap();
        assert_eq!(h, cloud(&[[0.0, 0.0]]));

        let h = convex_hull_2d(&cloud(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])).unwrap();
        assert_eq!(h, cloud(&[[0.0, 0.0], [2.0, 2.0]]));
    }

    #[test]
    fn hull_is_counterclockwise_and_drops_edge_points() {
        let sq = cloud(&[
            [1.0, 1.0],
            [0.0, 0.0],
            [0.5, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [0.5, 0.5],
        ]);
        let h = convex_hull_2d(&sq).unwrap();
        assert_eq!(h, cloud(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]));
        let n = h.len();
        for i in 0..n {
            assert!(cross(h.point(i), h.point((i + 1) % n), h.point((i + 2) % n)) > 0.0);
        }
    }

    #[test]
    fn hull_rejects_non_planar() {
        let a = PointCloud::singleton(&[1.0, 2.0, 3.0]).unwrap();
        assert!(convex_hull_2d(&a).is_err());
    }

    #[test]
    fn cloud_validation() {
        assert!(PointCloud::new(vec![]).is_err());
        assert!(PointCloud::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(PointCloud::new(vec![vec![f64::NAN, 0.0]]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::zero(3).normalized().is_err());
    }

    #[test]
    fn convex_distance_of_filled_hulls() {
        let square = cloud(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let centre = cloud(&[[0.5, 0.5]]);
        // vertex sets are sqrt(1/2) apart; the filled square contains the centre
        assert!((convex_hausdorff_2d(&square, &centre).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let shifted = square.scaled(1.0);
        assert_eq!(convex_hausdorff_2d(&square, &shifted).unwrap(), 0.0);
        let seg = cloud(&[[0.0, 0.0], [2.0, 0.0]]);
        let mid = cloud(&[[1.0, 0.0], [1.0, 0.5]]);
        assert!((convex_hausdorff_2d(&seg, &mid).unwrap() - 1.0).abs() < 1e-15);
        let inner = cloud(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.9]]);
        assert!(convex_hausdorff_2d(&square, &inner).unwrap() < 1e-15);
        assert!(hausdorff(&square, &inner).unwrap() > 0.09);
    }
}
