//! Riemann–Minkowski integration of weighted set-valued trajectories.
//!
//! Sums Σ Δx_i·P(ξ_i)·f(ξ_i) are accumulated in support space, one scalar
//! sum per grid direction, in ascending cell order. A literal point-cloud
//! Minkowski-sum path is kept for small partitions as a cross-check.

use std::sync::Arc;

use crate::convexcal::{ConvexBody, DirectionGrid};
use crate::error::{Error, Result};
use crate::funcspace::{SetTrajectory, Weight};
use crate::geometry::{convex_hull_2d, hausdorff, minkowski_combine, PointCloud};

/// Largest refinement level tried by [`Integrator`]: 2^22 cells.
pub const MAX_LEVEL: u32 = 22;

/// Largest partition accepted by [`riemann_sum_clouds`].
pub const CLOUD_PATH_MAX_CELLS: usize = 64;

const CLOUD_PATH_MAX_POINTS: usize = 1 << 20;

/// Breakpoints a = x_0 < … < x_n = b with tags ξ_i ∈ [x_{i−1}, x_i].
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breakpoints: Vec<f64>,
    tags: Vec<f64>,
}

impl Partition {
    pub fn new(breakpoints: Vec<f64>, tags: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::invalid("partition needs at least one cell"));
        }
        if tags.len() + 1 != breakpoints.len() {
            return Err(Error::CountMismatch {
                what: "partition tags",
                expected: breakpoints.len() - 1,
                found: tags.len(),
            });
        }
        let (a, b) = (breakpoints[0], breakpoints[breakpoints.len() - 1]);
        if a < 0.0 || b > 1.0 {
            return Err(Error::invalid("partition must lie inside [0, 1]"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("partition breakpoints must be strictly increasing"));
        }
        for (i, t) in tags.iter().enumerate() {
            if !(breakpoints[i] <= *t && *t <= breakpoints[i + 1]) {
                return Err(Error::invalid(format!("tag {t} lies outside cell {i}")));
            }
        }
        Ok(Partition { breakpoints, tags })
    }

    /// `n` equal cells of [0, 1] tagged at their midpoints.
    pub fn uniform_midpoint(n: usize) -> Result<Self> {
        Self::uniform_midpoint_on(0.0, 1.0, n)
    }

    /// `n` equal cells of [a, b] tagged at their midpoints.
    pub fn uniform_midpoint_on(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("partition needs at least one cell"));
        }
        let h = (b - a) / n as f64;
        let mut breakpoints: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
        breakpoints[n] = b;
        let tags = (0..n).map(|i| a + h * (i as f64 + 0.5)).collect();
        Self::new(breakpoints, tags)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn tags(&self) -> &[f64] {
        &self.tags
    }

    /// λ = max Δx_i.
    pub fn mesh(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// (Δx_i, ξ_i) in ascending cell order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.tags)
            .map(|(w, t)| (w[1] - w[0], *t))
    }
}

/// Σ Δx_i·P(ξ_i)·co f(ξ_i), accumulated in support space.
pub fn riemann_sum(
    f: &SetTrajectory,
    part: &Partition,
    weight: &Weight,
    grid: &Arc<DirectionGrid>,
) -> Result<ConvexBody> {
    let mut acc = vec![0.0; grid.len()];
    let mut buf = vec![0.0; grid.len()];
    for (dx, xi) in part.cells() {
        let c = dx * weight.value(xi);
        f.support_into(xi, grid, &mut buf)?;
        for (a, h) in acc.iter_mut().zip(&buf) {
            *a += c * h;
        }
    }
    ConvexBody::from_support(grid, acc)
}

/// Same sum as [`riemann_sum`], but every f(ξ_i) is evaluated as a point
/// cloud and embedded, bypassing any trajectory-level support shortcut.
pub fn riemann_sum_evaluated(
    f: &SetTrajectory,
    part: &Partition,
    weight: &Weight,
    grid: &Arc<DirectionGrid>,
) -> Result<ConvexBody> {
    let mut acc = vec![0.0; grid.len()];
    for (dx, xi) in part.cells() {
        let c = dx * weight.value(xi);
        let cloud = f.evaluate(xi)?;
        let body = ConvexBody::embed(&cloud, grid)?;
        for (a, h) in acc.iter_mut().zip(body.support()) {
            *a += c * h;
        }
    }
    ConvexBody::from_support(grid, acc)
}

/// The Riemann–Minkowski sum as a literal point cloud.
///
/// Planar partial sums are reduced to their hull vertices after every
/// step; in other dimensions the cloud grows multiplicatively and the call
/// fails once it passes 2^20 points.
pub fn riemann_sum_clouds(f: &SetTrajectory, part: &Partition, weight: &Weight) -> Result<PointCloud> {
    if part.len() > CLOUD_PATH_MAX_CELLS {
        return Err(Error::invalid(format!(
            "the point-cloud path is limited to {CLOUD_PATH_MAX_CELLS} cells"
        )));
    }
    let mut acc = PointCloud::origin(f.dim());
    for (dx, xi) in part.cells() {
        let c = dx * weight.value(xi);
        acc = minkowski_combine(1.0, &acc, c, &f.evaluate(xi)?)?;
        if acc.dim() == 2 {
            acc = convex_hull_2d(&acc)?;
        }
        if acc.len() > CLOUD_PATH_MAX_POINTS {
            return Err(Error::invalid("point-cloud Riemann sum grew past 2^20 points"));
        }
    }
    Ok(acc)
}

/// Result of dyadic refinement.
#[derive(Debug, Clone)]
pub struct IntegralResult {
    pub body: ConvexBody,
    /// Hausdorff distance between the last two iterates.
    pub achieved_tolerance: f64,
    /// Number of refinements performed after the first iterate.
    pub refinement_count: u32,
    /// (cells, distance to the previous iterate) for every refinement.
    pub log: Vec<(usize, f64)>,
}

impl IntegralResult {
    pub fn cells(&self) -> usize {
        self.log.last().map_or(1, |(n, _)| *n)
    }
}

/// Dyadic midpoint refinement until successive iterates are within `tol/2`.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tol: f64,
    /// Smallest partition whose successive distance may stop the refinement.
    pub min_cells: usize,
    pub max_level: u32,
}

impl Integrator {
    pub fn new(tol: f64) -> Self {
        Integrator {
            tol,
            min_cells: 1,
            max_level: MAX_LEVEL,
        }
    }

    pub fn min_cells(mut self, n: usize) -> Self {
        self.min_cells = n;
        self
    }

    pub fn integrate(
        &self,
        f: &SetTrajectory,
        weight: &Weight,
        grid: &Arc<DirectionGrid>,
    ) -> Result<IntegralResult> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("integration tolerance must be positive"));
        }
        let mut prev = riemann_sum(f, &Partition::uniform_midpoint(1)?, weight, grid)?;
        let mut log = Vec::new();
        for level in 1..=self.max_level {
            let cells = 1usize << level;
            let next = riemann_sum(f, &Partition::uniform_midpoint(cells)?, weight, grid)?;
            let d = prev.hausdorff(&next)?;
            log.push((cells, d));
            prev = next;
            if d <= 0.5 * self.tol && cells >= self.min_cells {
                return Ok(IntegralResult {
                    body: prev,
                    achieved_tolerance: d,
                    refinement_count: level,
                    log,
                });
            }
        }
        let (cells, distance) = *log.last().expect("at least one refinement");
        Err(Error::IntegrationNonconvergence {
            cells,
            distance,
            target: 0.5 * self.tol,
            best: prev.into_support(),
        })
    }
}

/// ∫₀¹ P(x) f(x) dx by dyadic refinement with default settings.
pub fn integrate(
    f: &SetTrajectory,
    weight: &Weight,
    tol: f64,
    grid: &Arc<DirectionGrid>,
) -> Result<IntegralResult> {
    Integrator::new(tol).integrate(f, weight, grid)
}

/// Worst violation of each integral identity or inequality, evaluated at
/// fixed midpoint partitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyReport {
    /// Negative width of ∫f, or its distance to the hull of the literal
    /// Minkowski sum when that path is feasible.
    pub convexity: f64,
    /// δ(∫co f, ∫f).
    pub hull: f64,
    /// δ(∫λf, λ∫f) over λ ∈ {2.5, −1}.
    pub homogeneity: f64,
    /// δ(∫(f+g), ∫f + ∫g).
    pub additivity: f64,
    /// δ(∫₀¹f, ∫₀^c f + ∫_c^1 f) with c = 3/8.
    pub interval_additivity: f64,
    /// max(0, δ(∫f, ∫g) − ∫δ(f, g)).
    pub distance_inequality: f64,
}

impl PropertyReport {
    pub fn worst(&self) -> f64 {
        [
            self.convexity,
            self.hull,
            self.homogeneity,
            self.additivity,
            self.interval_additivity,
            self.distance_inequality,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Cells of the fixed partition used by [`integral_property_suite`].
pub const SUITE_CELLS: usize = 256;
const SUITE_CLOUD_CELLS: usize = 16;
const SPLIT: f64 = 0.375;

/// Evaluates the listed integral properties for `f` and `g`.
pub fn integral_property_suite(
    f: &SetTrajectory,
    g: &SetTrajectory,
    weight: &Weight,
    grid: &Arc<DirectionGrid>,
) -> Result<PropertyReport> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    let part = Partition::uniform_midpoint(SUITE_CELLS)?;
    let int_f = riemann_sum(f, &part, weight, grid)?;
    let int_g = riemann_sum(g, &part, weight, grid)?;

    let mut convexity = (-int_f.min_width()).max(0.0);
    let small = Partition::uniform_midpoint(SUITE_CLOUD_CELLS)?;
    if let Ok(cloud) = riemann_sum_clouds(f, &small, weight) {
        let literal = ConvexBody::embed(&cloud, grid)?;
        let support_path = riemann_sum(f, &small, weight, grid)?;
        convexity = convexity.max(literal.hausdorff(&support_path)?);
    }

    let hull = if f.dim() == 2 {
        riemann_sum_evaluated(&f.clone().hull()?, &part, weight, grid)?.hausdorff(&int_f)?
    } else {
        0.0
    };

    let mut homogeneity: f64 = 0.0;
    for lambda in [2.5, -1.0] {
        let lhs = riemann_sum_evaluated(&f.clone().scaled(lambda), &part, weight, grid)?;
        homogeneity = homogeneity.max(lhs.hausdorff(&int_f.scaled(lambda))?);
    }

    let sum = SetTrajectory::sum(f.clone(), g.clone())?;
    let additivity = riemann_sum_evaluated(&sum, &part, weight, grid)?
        .hausdorff(&ConvexBody::combine(1.0, &int_f, 1.0, &int_g)?)?;

    let left_cells = (SPLIT * SUITE_CELLS as f64) as usize;
    let left = riemann_sum(f, &Partition::uniform_midpoint_on(0.0, SPLIT, left_cells)?, weight, grid)?;
    let right = riemann_sum(
        f,
        &Partition::uniform_midpoint_on(SPLIT, 1.0, SUITE_CELLS - left_cells)?,
        weight,
        grid,
    )?;
    let interval_additivity = int_f.hausdorff(&ConvexBody::combine(1.0, &left, 1.0, &right)?)?;

    let mut integrated_distance = 0.0;
    for (dx, xi) in part.cells() {
        integrated_distance += dx * weight.value(xi) * hausdorff(&f.evaluate(xi)?, &g.evaluate(xi)?)?;
    }
    let distance_inequality = (int_f.hausdorff(&int_g)? - integrated_distance).max(0.0);

    Ok(PropertyReport {
        convexity,
        hull,
        homogeneity,
        additivity,
        interval_additivity,
        distance_inequality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vector;

    fn grid() -> Arc<DirectionGrid> {
        DirectionGrid::planar(720).unwrap()
    }

    fn e1() -> Vector {
        Vector::new(vec![1.0, 0.0]).unwrap()
    }

    fn triangle() -> PointCloud {
        PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.2], vec![0.3, 0.9], vec![0.4, 0.3]]).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.1, 0.5, 0.7]).is_err());
        assert!(Partition::new(vec![0.0, 0.5, 1.0], vec![0.6, 0.7]).is_err());
        assert!(Partition::new(vec![0.0, 1.0], vec![]).is_err());
        let p = Partition::new(vec![0.0, 0.25, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(p.mesh(), 0.75);
        assert!(Partition::uniform_midpoint(0).is_err());
    }

    #[test]
    fn constant_trajectory_integrates_to_its_hull() {
        let g = grid();
        let f = SetTrajectory::constant(triangle());
        let expect = ConvexBody::embed(&triangle(), &g).unwrap();
        for n in [1, 3, 8] {
            let s = riemann_sum(&f, &Partition::uniform_midpoint(n).unwrap(), &Weight::ConstantOne, &g).unwrap();
            assert!(s.hausdorff(&expect).unwrap() < 1e-14);
        }
        let r = integrate(&f, &Weight::ConstantOne, 1e-9, &g).unwrap();
        assert_eq!(r.refinement_count, 1);
        assert!(r.achieved_tolerance < 1e-15);
    }

    #[test]
    fn midpoint_rule_is_exact_for_linear_profile() {
        let g = grid();
        let f = SetTrajectory::scalar_profile(Arc::new(|t| t), e1());
        let expect = ConvexBody::embed(&PointCloud::singleton(&[0.5, 0.0]).unwrap(), &g).unwrap();
        for n in [1, 7, 64] {
            let s = riemann_sum(&f, &Partition::uniform_midpoint(n).unwrap(), &Weight::ConstantOne, &g).unwrap();
            assert!(s.hausdorff(&expect).unwrap() < 1e-14);
        }
    }

    #[test]
    fn weighted_constant_scales_by_scalar_riemann_sum() {
        let g = grid();
        let f = SetTrajectory::constant(triangle());
        let w = Weight::polynomial(vec![0.0, 2.0]).unwrap();
        let n = 10;
        let part = Partition::uniform_midpoint(n).unwrap();
        let scalar: f64 = part.cells().map(|(dx, xi)| dx * 2.0 * xi).sum();
        let expect = ConvexBody::embed(&triangle(), &g).unwrap().scaled(scalar);
        let s = riemann_sum(&f, &part, &w, &g).unwrap();
        assert!(s.hausdorff(&expect).unwrap() < 1e-14);
        let r = integrate(&f, &w, 1e-10, &g).unwrap();
        let limit = ConvexBody::embed(&triangle(), &g).unwrap();
        assert!(r.body.hausdorff(&limit).unwrap() < 1e-9);
    }

    #[test]
    fn tent_profile_integrates_to_quarter() {
        let g = grid();
        let f = SetTrajectory::scalar_profile(Arc::new(|t: f64| t.min(1.0 - t)), e1());
        let r = integrate(&f, &Weight::ConstantOne, 1e-10, &g).unwrap();
        let expect = ConvexBody::embed(&PointCloud::singleton(&[0.25, 0.0]).unwrap(), &g).unwrap();
        assert!(r.body.hausdorff(&expect).unwrap() < 1e-10);
    }

    #[test]
    fn nonconvergence_carries_best_iterate() {
        let g = DirectionGrid::planar(8).unwrap();
        let f = SetTrajectory::scalar_profile(Arc::new(|t: f64| (t * 1e6).sin()), e1());
        let integrator = Integrator {
            tol: 1e-12,
            min_cells: 1,
            max_level: 4,
        };
        match integrator.integrate(&f, &Weight::ConstantOne, &g) {
            Err(Error::IntegrationNonconvergence { cells, best, .. }) => {
                assert_eq!(cells, 16);
                assert_eq!(best.len(), 8);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(integrate(&f, &Weight::ConstantOne, 0.0, &g).is_err());
    }

    #[test]
    fn cloud_path_matches_support_path() {
        let g = grid();
        let f = SetTrajectory::scaled_body(Arc::new(|t| 1.0 + t), triangle());
        let part = Partition::uniform_midpoint(8).unwrap();
        let w = Weight::polynomial(vec![1.0, 1.0]).unwrap();
        let cloud = riemann_sum_clouds(&f, &part, &w).unwrap();
        let a = ConvexBody::embed(&cloud, &g).unwrap();
        let b = riemann_sum(&f, &part, &w, &g).unwrap();
        assert!(a.hausdorff(&b).unwrap() < 1e-13);
        assert!(riemann_sum_clouds(&f, &Partition::uniform_midpoint(65).unwrap(), &w).is_err());
    }

    #[test]
    fn property_suite_identical_inputs() {
        let g = grid();
        let f = SetTrajectory::scaled_body(Arc::new(|t| 0.5 + t * t), triangle());
        let r = integral_property_suite(&f, &f, &Weight::ConstantOne, &g).unwrap();
        assert!(r.distance_inequality == 0.0);
        assert!(r.additivity < 1e-12, "{r:?}");
        assert!(r.worst() < 1e-12, "{r:?}");
    }

    #[test]
    fn negated_integral_matches_antipodal_support() {
        let g = grid();
        let f = SetTrajectory::scalar_profile(Arc::new(|t| t), e1());
        let part = Partition::uniform_midpoint(32).unwrap();
        let lhs = riemann_sum_evaluated(&f.clone().scaled(-1.0), &part, &Weight::ConstantOne, &g).unwrap();
        let rhs = riemann_sum(&f, &part, &Weight::ConstantOne, &g).unwrap().negate();
        assert!(lhs.hausdorff(&rhs).unwrap() < 1e-14);
    }
}
