//! Support-function representation of convex compact sets.
//!
//! A convex body is tabulated by its support function h(u) = max⟨a, u⟩
//! on a fixed antipodally symmetric [`DirectionGrid`]. Minkowski sums and
//! nonnegative scaling become coordinate-wise operations, negation is a
//! permutation, and the Hausdorff distance between convex bodies is the
//! sup-norm of the support difference (sampled on the grid).

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, PointCloud};

/// Angles in the default planar grid.
pub const DEFAULT_PLANAR_SIZE: usize = 720;
/// Antipodal pairs in the default 3D Fibonacci grid.
pub const DEFAULT_SPHERE_PAIRS: usize = 1024;
/// Antipodal pairs in the default grid for m > 3.
pub const DEFAULT_HIGH_DIM_PAIRS: usize = 4096;
/// Seed of the quasi-random grid for m > 3.
pub const HIGH_DIM_SEED: u64 = 42;

const UNIT_TOL: f64 = 1e-12;
const WIDTH_TOL: f64 = 1e-12;

/// Unit directions u_j with a fixed-point-free antipodal involution.
#[derive(Debug)]
pub struct DirectionGrid {
    dim: usize,
    directions: Vec<f64>,
    antipode: Vec<usize>,
    covering: OnceLock<f64>,
}

impl PartialEq for DirectionGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.directions == other.directions
            && self.antipode == other.antipode
    }
}

impl DirectionGrid {
    /// Builds a grid from explicit directions and their antipodal pairing.
    pub fn new(dim: usize, directions: Vec<Vec<f64>>, antipode: Vec<usize>) -> Result<Arc<Self>> {
        let n = directions.len();
        if n < 2 * dim {
            return Err(Error::invalid(format!(
                "a grid in R^{dim} needs at least {} directions, got {n}",
                2 * dim
            )));
        }
        if antipode.len() != n {
            return Err(Error::CountMismatch {
                what: "antipodal map",
                expected: n,
                found: antipode.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * dim);
        for d in &directions {
            if d.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d.len(),
                });
            }
            if (norm(d) - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid("grid directions must have unit norm"));
            }
            flat.extend_from_slice(d);
        }
        for (j, &k) in antipode.iter().enumerate() {
            if k >= n || k == j || antipode[k] != j {
                return Err(Error::invalid("antipodal map must be a fixed-point-free involution"));
            }
            let (u, v) = (&directions[j], &directions[k]);
            if u.iter().zip(v).any(|(a, b)| (a + b).abs() > UNIT_TOL) {
                return Err(Error::invalid(format!(
                    "direction {k} is not the antipode of direction {j}"
                )));
            }
        }
        Ok(Arc::new(DirectionGrid {
            dim,
            directions: flat,
            antipode,
            covering: OnceLock::new(),
        }))
    }

    /// `size` equally spaced angles on the unit circle; `size` must be even.
    pub fn planar(size: usize) -> Result<Arc<Self>> {
        if size < 4 || !size.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "planar grid size must be even and at least 4, got {size}"
            )));
        }
        let mut directions = Vec::with_capacity(2 * size);
        for j in 0..size {
            let t = 2.0 * PI * j as f64 / size as f64;
            directions.extend_from_slice(&[t.cos(), t.sin()]);
        }
        // snap the axis directions so e1, e2 and the diagonals sit exactly on the grid
        for v in directions.iter_mut() {
            if v.abs() < 1e-15 {
                *v = 0.0;
            }
        }
        let half = size / 2;
        let mut dirs: Vec<f64> = directions;
        for j in half..size {
            let (a, b) = (dirs[2 * (j - half)], dirs[2 * (j - half) + 1]);
            dirs[2 * j] = -a;
            dirs[2 * j + 1] = -b;
        }
        let antipode = (0..size).map(|j| (j + half) % size).collect();
        let grid = DirectionGrid {
            dim: 2,
            directions: dirs,
            antipode,
            covering: OnceLock::new(),
        };
        let _ = grid.covering.set(PI / size as f64);
        Ok(Arc::new(grid))
    }

    /// `pairs` Fibonacci-lattice directions on the upper hemisphere plus their negatives.
    pub fn fibonacci_sphere(pairs: usize) -> Result<Arc<Self>> {
        if pairs < 3 {
            return Err(Error::invalid("sphere grid needs at least 3 antipodal pairs"));
        }
        let golden = PI * (3.0 - 5f64.sqrt());
        let mut dirs = Vec::with_capacity(6 * pairs);
        for i in 0..pairs {
            let z = 1.0 - (i as f64 + 0.5) / pairs as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            dirs.extend_from_slice(&[r * phi.cos(), r * phi.sin(), z]);
        }
        Ok(Self::with_negatives(3, dirs))
    }

    /// `pairs` seeded Gaussian directions in R^dim plus their negatives.
    pub fn random(dim: usize, pairs: usize, seed: u64) -> Result<Arc<Self>> {
        if dim == 0 || pairs < dim {
            return Err(Error::invalid("random grid needs dim ≥ 1 and pairs ≥ dim"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dirs = Vec::with_capacity(2 * dim * pairs);
        while dirs.len() < dim * pairs {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = norm(&v);
            if n > 1e-8 {
                dirs.extend(v.iter().map(|c| c / n));
            }
        }
        Ok(Self::with_negatives(dim, dirs))
    }

    /// Default grid for dimension `dim`.
    pub fn default_for(dim: usize) -> Result<Arc<Self>> {
        match dim {
            0 => Err(Error::invalid("dimension must be at least 1")),
            1 => Self::new(1, vec![vec![1.0], vec![-1.0]], vec![1, 0]),
            2 => Self::planar(DEFAULT_PLANAR_SIZE),
            3 => Self::fibonacci_sphere(DEFAULT_SPHERE_PAIRS),
            _ => Self::random(dim, DEFAULT_HIGH_DIM_PAIRS, HIGH_DIM_SEED),
        }
    }

    /// Grid for dimension `dim` with a size override: number of angles in
    /// 2D, number of antipodal pairs otherwise.
    pub fn with_size(dim: usize, size: usize) -> Result<Arc<Self>> {
        match dim {
            2 => Self::planar(size),
            3 => Self::fibonacci_sphere(size),
            1 => Self::default_for(1),
            _ => Self::random(dim, size, HIGH_DIM_SEED),
        }
    }

    fn with_negatives(dim: usize, mut dirs: Vec<f64>) -> Arc<Self> {
        let pairs = dirs.len() / dim;
        let negated: Vec<f64> = dirs.iter().map(|c| -c).collect();
        dirs.extend(negated);
        let antipode = (0..2 * pairs).map(|j| (j + pairs) % (2 * pairs)).collect();
        Arc::new(DirectionGrid {
            dim,
            directions: dirs,
            antipode,
            covering: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.antipode.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antipode.is_empty()
    }

    pub fn direction(&self, j: usize) -> &[f64] {
        &self.directions[j * self.dim..(j + 1) * self.dim]
    }

    pub fn directions(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.directions.chunks_exact(self.dim)
    }

    pub fn antipode(&self, j: usize) -> usize {
        self.antipode[j]
    }

    /// Largest angle between a unit vector and its nearest grid direction.
    ///
    /// Exact for planar grids; for other grids it is estimated from 20 000
    /// seeded probe directions and inflated by 25%.
    pub fn covering_angle(&self) -> f64 {
        *self.covering.get_or_init(|| {
            if self.dim == 1 {
                return 0.0;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut worst: f64 = 0.0;
            for _ in 0..20_000 {
                let v: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let n = norm(&v);
                if n < 1e-8 {
                    continue;
                }
                let best = self
                    .directions()
                    .map(|u| dot(u, &v) / n)
                    .fold(f64::NEG_INFINITY, f64::max);
                worst = worst.max(best.clamp(-1.0, 1.0).acos());
            }
            1.25 * worst
        })
    }

    /// Upper bound on how much [`ConvexBody::hausdorff`] can underestimate
    /// the true Hausdorff distance between two convex bodies that both fit
    /// in a ball of radius `radius`.
    ///
    /// The support difference is 2·radius-Lipschitz in the direction, so the
    /// grid maximum misses the true one by at most 2·radius times the chord
    /// to the nearest grid direction.
    pub fn grid_error(&self, radius: f64) -> f64 {
        2.0 * radius * 2.0 * (0.5 * self.covering_angle()).sin()
    }

    pub(crate) fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

/// A convex compact set, tabulated by its support values on a grid.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    grid: Arc<DirectionGrid>,
    support: Vec<f64>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_as(&other.grid) && self.support == other.support
    }
}

impl ConvexBody {
    /// Wraps raw support values, checking finiteness and width nonnegativity.
    pub fn from_support(grid: &Arc<DirectionGrid>, support: Vec<f64>) -> Result<Self> {
        if support.len() != grid.len() {
            return Err(Error::CountMismatch {
                what: "support values",
                expected: grid.len(),
                found: support.len(),
            });
        }
        if support.iter().any(|h| !h.is_finite()) {
            return Err(Error::invalid("support values must be finite"));
        }
        let scale = support.iter().fold(1.0f64, |m, h| m.max(h.abs()));
        for j in 0..support.len() {
            let w = support[j] + support[grid.antipode(j)];
            if w < -WIDTH_TOL * scale {
                return Err(Error::invalid(format!(
                    "negative width {w:e} in direction {j}: not the support function of a set"
                )));
            }
        }
        Ok(ConvexBody {
            grid: Arc::clone(grid),
            support,
        })
    }

    /// Support values of co A.
    pub fn embed(a: &PointCloud, grid: &Arc<DirectionGrid>) -> Result<Self> {
        if a.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: a.dim(),
            });
        }
        Ok(ConvexBody {
            grid: Arc::clone(grid),
            support: grid.directions().map(|u| a.support(u)).collect(),
        })
    }

    /// The body {θ}.
    pub fn zero(grid: &Arc<DirectionGrid>) -> Self {
        ConvexBody {
            grid: Arc::clone(grid),
            support: vec![0.0; grid.len()],
        }
    }

    /// Euclidean ball of the given radius about `center`.
    pub fn ball(grid: &Arc<DirectionGrid>, center: &[f64], radius: f64) -> Result<Self> {
        if center.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: center.len(),
            });
        }
        if !(radius >= 0.0) {
            return Err(Error::invalid("ball radius must be nonnegative"));
        }
        Ok(ConvexBody {
            grid: Arc::clone(grid),
            support: grid.directions().map(|u| dot(center, u) + radius).collect(),
        })
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn into_support(self) -> Vec<f64> {
        self.support
    }

    fn check_grid(&self, other: &ConvexBody) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// λX + μY for λ, μ ≥ 0.
    pub fn combine(lambda: f64, x: &ConvexBody, mu: f64, y: &ConvexBody) -> Result<Self> {
        x.check_grid(y)?;
        if lambda < 0.0 || mu < 0.0 {
            return Err(Error::invalid(
                "support-space combination needs nonnegative coefficients; negate first",
            ));
        }
        Ok(ConvexBody {
            grid: Arc::clone(&x.grid),
            support: x
                .support
                .iter()
                .zip(&y.support)
                .map(|(a, b)| lambda * a + mu * b)
                .collect(),
        })
    }

    /// λX for any real λ; negative factors go through [`ConvexBody::negate`].
    pub fn scaled(&self, lambda: f64) -> Self {
        let base = if lambda < 0.0 { self.negate() } else { self.clone() };
        let s = lambda.abs();
        ConvexBody {
            grid: base.grid,
            support: base.support.iter().map(|h| s * h).collect(),
        }
    }

    /// −X, by permuting support values across antipodes.
    pub fn negate(&self) -> Self {
        ConvexBody {
            grid: Arc::clone(&self.grid),
            support: (0..self.support.len())
                .map(|j| self.support[self.grid.antipode(j)])
                .collect(),
        }
    }

    /// max_j |h_X(u_j) − h_Y(u_j)|.
    pub fn hausdorff(&self, other: &ConvexBody) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .support
            .iter()
            .zip(&other.support)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// max_j |h(u_j)|: the grid estimate of δ(X, {θ}).
    pub fn radius(&self) -> f64 {
        self.support.iter().fold(0.0, |m, h| m.max(h.abs()))
    }

    /// Smallest width h(u) + h(−u) over the grid.
    pub fn min_width(&self) -> f64 {
        (0..self.support.len())
            .map(|j| self.support[j] + self.support[self.grid.antipode(j)])
            .fold(f64::INFINITY, f64::min)
    }

    /// Vertices of the polygon ∩_j {x : ⟨x, u_j⟩ ≤ h(u_j)} (2D only).
    ///
    /// Consecutive supporting lines are intersected; for bodies with many
    /// redundant constraints the result contains repeated or near-repeated
    /// vertices, which is harmless for distance oracles.
    pub fn to_polygon_2d(&self) -> Result<PointCloud> {
        if self.grid.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.grid.dim(),
            });
        }
        let mut order: Vec<usize> = (0..self.grid.len()).collect();
        order.sort_by(|&a, &b| {
            let ua = self.grid.direction(a);
            let ub = self.grid.direction(b);
            ua[1].atan2(ua[0]).total_cmp(&ub[1].atan2(ub[0]))
        });
        let n = order.len();
        let mut pts = Vec::with_capacity(n);
        for k in 0..n {
            let (i, j) = (order[k], order[(k + 1) % n]);
            let (u, v) = (self.grid.direction(i), self.grid.direction(j));
            let det = u[0] * v[1] - u[1] * v[0];
            if det.abs() < 1e-14 {
                continue;
            }
            let (hu, hv) = (self.support[i], self.support[j]);
            let x = (hu * v[1] - hv * u[1]) / det;
            let y = (u[0] * hv - v[0] * hu) / det;
            // keep only vertices that satisfy every constraint
            let feasible = self
                .grid
                .directions()
                .zip(&self.support)
                .all(|(w, h)| w[0] * x + w[1] * y <= h + 1e-9 * (1.0 + h.abs()));
            if feasible {
                pts.push(vec![x, y]);
            }
        }
        PointCloud::new(pts).map(|c| c.dedup())
    }
}
