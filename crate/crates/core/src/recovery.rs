//! Optimal recovery of ∫₀¹ P(x) f(x) dx from exact samples f(x_1), …, f(x_n)
//! over the class H^ω.
//!
//! The optimal method weights each sample by the P-mass of its nearest-knot
//! cell and convexifies once. Its worst-case error is ∫₀¹ P(x) ω(dist(x, x̄)) dx,
//! and the bound is attained by the pair ±ω(dist(·, x̄))·{a} for any unit a,
//! which vanishes at every knot.

use std::sync::Arc;

use crate::convexcal::{ConvexBody, DirectionGrid};
use crate::error::{Error, Result};
use crate::funcspace::{Modulus, SetTrajectory, Weight};
use crate::geometry::{PointCloud, Vector};
use crate::quadrature::Quadrature;
use crate::rmintegral::Integrator;

/// Tolerance on ‖a‖ − 1 for extremal directions.
pub const UNIT_TOL: f64 = 1e-12;

/// Integration tolerance used by [`sharpness_gap`].
pub const SHARPNESS_TOL: f64 = 1e-7;

/// Smallest partition allowed to stop the refinement in [`sharpness_gap`].
pub const SHARPNESS_MIN_CELLS: usize = 256;

pub(crate) fn scalar_quadrature() -> Quadrature {
    Quadrature {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_intervals: 20_000,
    }
}

/// Sorted distinct knots 0 ≤ x_1 < … < x_n ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet(Vec<f64>);

impl KnotSet {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::invalid("at least one knot is required"));
        }
        if knots.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::invalid("knots must lie in [0, 1]"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("knots must be strictly increasing"));
        }
        Ok(KnotSet(knots))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Interior cell boundaries (x_i + x_{i+1})/2.
    pub fn midpoints(&self) -> Vec<f64> {
        self.0.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Distance from `x` to the nearest knot.
    pub fn distance(&self, x: f64) -> f64 {
        let i = self.0.partition_point(|&k| k < x);
        let right = self.0.get(i).map_or(f64::INFINITY, |k| k - x);
        let left = if i > 0 { x - self.0[i - 1] } else { f64::INFINITY };
        left.min(right)
    }

    /// Adds `x` unless it is already a knot.
    pub fn with_inserted(&self, x: f64) -> Result<Self> {
        let mut v = self.0.clone();
        match v.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(_) => {}
            Err(i) => v.insert(i, x),
        }
        KnotSet::new(v)
    }
}

/// Nearest-knot cells Π_i and their P-masses c*_i.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDecomposition {
    /// Cell i is [bounds[i], bounds[i + 1]].
    pub bounds: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CellDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.bounds[i], self.bounds[i + 1])
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Cells {0, (x_i + x_{i+1})/2, 1} and masses c*_i = ∫_{Π_i} P.
pub fn decompose(knots: &KnotSet, weight: &Weight) -> Result<CellDecomposition> {
    let mut bounds = Vec::with_capacity(knots.len() + 1);
    bounds.push(0.0);
    bounds.extend(knots.midpoints());
    bounds.push(1.0);
    let kinks = weight.kinks();
    let quad = Quadrature::new(1e-12, 1e-12);
    let weights = bounds
        .windows(2)
        .map(|w| quad.integrate(|x| weight.value(x), w[0], w[1], &kinks).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellDecomposition { bounds, weights })
}

/// Φ*(A_1, …, A_n) = co(Σ c*_i A_i), in support space.
pub fn phi_star(
    samples: &[PointCloud],
    cells: &CellDecomposition,
    grid: &Arc<DirectionGrid>,
) -> Result<ConvexBody> {
    weighted_support_sum(samples.iter().zip(&cells.weights), samples.len(), cells.len(), grid)
}

pub(crate) fn weighted_support_sum<'a>(
    terms: impl Iterator<Item = (&'a PointCloud, &'a f64)>,
    found: usize,
    expected: usize,
    grid: &Arc<DirectionGrid>,
) -> Result<ConvexBody> {
    if found != expected {
        return Err(Error::CountMismatch {
            what: "samples",
            expected,
            found,
        });
    }
    let mut acc = vec![0.0; grid.len()];
    for (cloud, c) in terms {
        let body = ConvexBody::embed(cloud, grid)?;
        for (a, h) in acc.iter_mut().zip(body.support()) {
            *a += c * h;
        }
    }
    ConvexBody::from_support(grid, acc)
}

/// x ↦ ω(min_i |x − x_i|).
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    omega: Modulus,
    knots: KnotSet,
}

impl Envelope {
    pub fn new(omega: &Modulus, knots: &KnotSet) -> Self {
        Envelope {
            omega: omega.clone(),
            knots: knots.clone(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.omega.value(self.knots.distance(x))
    }

    pub fn knots(&self) -> &KnotSet {
        &self.knots
    }

    /// Knots, cell midpoints and shifted modulus kinks inside (0, 1), sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let kinks = self.omega.kinks();
        let mut pts: Vec<f64> = self.knots.as_slice().to_vec();
        pts.extend(self.knots.midpoints());
        for &x in self.knots.as_slice() {
            for &k in &kinks {
                pts.push(x - k);
                pts.push(x + k);
            }
        }
        pts.retain(|&x| x > 0.0 && x < 1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

pub fn envelope(omega: &Modulus, knots: &KnotSet) -> Envelope {
    Envelope::new(omega, knots)
}

/// ∫₀¹ P(x) ω(min_i |x − x_i|) dx.
pub fn worst_case_error(omega: &Modulus, weight: &Weight, knots: &KnotSet) -> Result<f64> {
    let env = Envelope::new(omega, knots);
    let mut breaks = env.breakpoints();
    breaks.extend(weight.kinks());
    scalar_quadrature()
        .integrate(|x| weight.value(x) * env.value(x), 0.0, 1.0, &breaks)
        .map(|r| r.value)
}

/// The trajectory x ↦ ω(min_i |x − x_i|)·{a}.
pub fn extremal_trajectory(omega: &Modulus, knots: &KnotSet, a: &Vector) -> Result<SetTrajectory> {
    if (a.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!(
            "extremal direction must be a unit vector, got norm {}",
            a.norm()
        )));
    }
    let env = Envelope::new(omega, knots);
    Ok(SetTrajectory::scalar_profile(Arc::new(move |x| env.value(x)), a.clone()))
}

/// Both sides of the sharpness certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sharpness {
    /// max over ± of δ(±∫P·f_a, Φ*({θ}, …, {θ})).
    pub lower_bound: f64,
    pub worst_case_error: f64,
    pub gap: f64,
}

/// Compares the error of Φ* on the extremal pair ±f_a with the closed form.
pub fn sharpness_gap(
    omega: &Modulus,
    weight: &Weight,
    knots: &KnotSet,
    a: &Vector,
    grid: &Arc<DirectionGrid>,
) -> Result<Sharpness> {
    let integrator = Integrator::new(SHARPNESS_TOL).min_cells(SHARPNESS_MIN_CELLS);
    sharpness_gap_with(omega, weight, knots, a, grid, &integrator)
}

pub fn sharpness_gap_with(
    omega: &Modulus,
    weight: &Weight,
    knots: &KnotSet,
    a: &Vector,
    grid: &Arc<DirectionGrid>,
    integrator: &Integrator,
) -> Result<Sharpness> {
    let f = extremal_trajectory(omega, knots, a)?;
    let cells = decompose(knots, weight)?;
    let zeros = vec![PointCloud::origin(a.dim()); knots.len()];
    let recovered = phi_star(&zeros, &cells, grid)?;
    let integral = integrator.integrate(&f, weight, grid)?.body;
    let lower_bound = integral
        .hausdorff(&recovered)?
        .max(integral.negate().hausdorff(&recovered)?);
    let wce = worst_case_error(omega, weight, knots)?;
    Ok(Sharpness {
        lower_bound,
        worst_case_error: wce,
        gap: (lower_bound - wce).abs(),
    })
}

/// δ(∫P·f, Φ*(f(x_1), …, f(x_n))) for a given trajectory.
pub fn method_error(
    f: &SetTrajectory,
    weight: &Weight,
    knots: &KnotSet,
    grid: &Arc<DirectionGrid>,
    integrator: &Integrator,
) -> Result<f64> {
    let cells = decompose(knots, weight)?;
    let samples = knots
        .as_slice()
        .iter()
        .map(|&x| f.evaluate(x))
        .collect::<Result<Vec<_>>>()?;
    let recovered = phi_star(&samples, &cells, grid)?;
    integrator.integrate(f, weight, grid)?.body.hausdorff(&recovered)
}
