//! Recovery from samples known only up to δ(f(x_k), A_k) ≤ ε_k.
//!
//! The error envelope is min_k(ε_k + ω(|x − x_k|)). A knot whose V-shape
//! never attains the minimum on a set of positive length is inactive and its
//! sample is ignored by the optimal method.

use std::sync::Arc;

use crate::convexcal::{ConvexBody, DirectionGrid};
use crate::error::{Error, Result};
use crate::funcspace::{Modulus, SetTrajectory, Weight};
use crate::geometry::{PointCloud, Vector};
use crate::recovery::{
    scalar_quadrature, weighted_support_sum, KnotSet, Sharpness, SHARPNESS_MIN_CELLS, SHARPNESS_TOL, UNIT_TOL,
};
use crate::rmintegral::Integrator;

/// Number of intervals of the dense argmin scan.
pub const SCAN_INTERVALS: usize = 1 << 14;

/// Cells no longer than this are absorbed by a neighbor.
pub const MIN_CELL_LENGTH: f64 = 1e-12;

/// Nonnegative per-knot sample errors ε_1, …, ε_n.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBudget(Vec<f64>);

impl ErrorBudget {
    pub fn new(epsilons: Vec<f64>) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::invalid("error budget is empty"));
        }
        if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::invalid(format!("sample errors must be finite and nonnegative, got {e}")));
        }
        Ok(ErrorBudget(epsilons))
    }

    pub fn uniform(n: usize, eps: f64) -> Result<Self> {
        ErrorBudget::new(vec![eps; n])
    }

    pub fn zeros(n: usize) -> Self {
        ErrorBudget(vec![0.0; n])
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
}

/// x ↦ min_k(ε_k + ω(|x − x_k|)), with its argmin pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyEnvelope {
    omega: Modulus,
    knots: KnotSet,
    eps: ErrorBudget,
    /// Maximal runs (lo, hi, k) on which knot k attains the minimum.
    pieces: Vec<(f64, f64, usize)>,
}

/// Builds the lower envelope and locates where its minimizing knot changes.
pub fn noisy_envelope(omega: &Modulus, knots: &KnotSet, eps: &ErrorBudget) -> Result<NoisyEnvelope> {
    omega.check_strictly_increasing()?;
    if eps.len() != knots.len() {
        return Err(Error::CountMismatch {
            what: "sample errors",
            expected: knots.len(),
            found: eps.len(),
        });
    }
    let mut env = NoisyEnvelope {
        omega: omega.clone(),
        knots: knots.clone(),
        eps: eps.clone(),
        pieces: Vec::new(),
    };
    env.pieces = env.scan();
    Ok(env)
}

impl NoisyEnvelope {
    pub fn value(&self, x: f64) -> f64 {
        self.term(self.argmin(x), x)
    }

    fn term(&self, k: usize, x: f64) -> f64 {
        self.eps.0[k] + self.omega.value((x - self.knots.as_slice()[k]).abs())
    }

    /// Index attaining the minimum at x, lowest on ties.
    pub fn argmin(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_value = self.term(0, x);
        for k in 1..self.knots.len() {
            let v = self.term(k, x);
            if v < best_value {
                best = k;
                best_value = v;
            }
        }
        best
    }

    pub fn knots(&self) -> &KnotSet {
        &self.knots
    }

    pub fn epsilons(&self) -> &ErrorBudget {
        &self.eps
    }

    /// Maximal intervals (lo, hi, k) on which knot k attains the minimum.
    pub fn pieces(&self) -> &[(f64, f64, usize)] {
        &self.pieces
    }

    /// Piece boundaries, knots and shifted modulus kinks inside (0, 1), sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let kinks = self.omega.kinks();
        let mut pts: Vec<f64> = self.pieces.iter().skip(1).map(|p| p.0).collect();
        for &x in self.knots.as_slice() {
            pts.push(x);
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

    fn scan(&self) -> Vec<(f64, f64, usize)> {
        let n = SCAN_INTERVALS;
        let mut switches: Vec<(f64, usize)> = Vec::new();
        let mut prev_x = 0.0;
        let mut prev_k = self.argmin(0.0);
        let first = prev_k;
        for j in 1..=n {
            let x = j as f64 / n as f64;
            let k = self.argmin(x);
            if k != prev_k {
                self.refine(prev_x, prev_k, x, k, &mut switches);
            }
            prev_x = x;
            prev_k = k;
        }
        let mut pieces = Vec::with_capacity(switches.len() + 1);
        let mut lo = 0.0;
        let mut k = first;
        for (b, next) in switches {
            pieces.push((lo, b, k));
            lo = b;
            k = next;
        }
        pieces.push((lo, 1.0, k));
        absorb_short(pieces)
    }

    /// Records each change of minimizer inside [a, b], including those of
    /// knots that win only strictly between a and b.
    /// Bisection runs down to adjacent doubles.
    fn refine(&self, a: f64, ka: usize, b: f64, kb: usize, out: &mut Vec<(f64, usize)>) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            out.push((b, kb));
            return;
        }
        let km = self.argmin(m);
        if km == ka {
            self.refine(m, km, b, kb, out);
        } else if km == kb {
            self.refine(a, ka, m, km, out);
        } else {
            self.refine(a, ka, m, km, out);
            self.refine(m, km, b, kb, out);
        }
    }
}

/// Merges pieces shorter than [`MIN_CELL_LENGTH`] into the preceding piece
/// (the following one at the left end), then joins equal neighbors.
fn absorb_short(pieces: Vec<(f64, f64, usize)>) -> Vec<(f64, f64, usize)> {
    let mut out: Vec<(f64, f64, usize)> = Vec::with_capacity(pieces.len());
    let mut carry: Option<f64> = None;
    for (lo, hi, k) in pieces {
        if hi - lo <= MIN_CELL_LENGTH {
            match out.last_mut() {
                Some(last) => last.1 = hi,
                None => carry = Some(carry.unwrap_or(lo)),
            }
            continue;
        }
        let lo = carry.take().unwrap_or(lo);
        match out.last_mut() {
            Some(last) if last.2 == k => last.1 = hi,
            _ => out.push((lo, hi, k)),
        }
    }
    if let Some(lo) = carry {
        // every piece was short: only possible for a degenerate scan
        out.push((lo, 1.0, 0));
    }
    out
}

/// Active knots, their cells as unions of intervals, and their P-masses.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveDecomposition {
    /// Number of knots, active or not.
    pub n: usize,
    /// Increasing indices k_1 < … < k_ν into the knot set.
    pub active_indices: Vec<usize>,
    /// Cell of each active index, as sorted disjoint intervals.
    pub cells: Vec<Vec<(f64, f64)>>,
    /// ∫ P over each cell.
    pub weights: Vec<f64>,
}

impl ActiveDecomposition {
    /// ν, the number of active knots.
    pub fn nu(&self) -> usize {
        self.active_indices.len()
    }

    pub fn is_active(&self, k: usize) -> bool {
        self.active_indices.binary_search(&k).is_ok()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Splits [0, 1] into the regions where each knot attains the envelope.
pub fn active_cells(
    omega: &Modulus,
    knots: &KnotSet,
    eps: &ErrorBudget,
    weight: &Weight,
) -> Result<ActiveDecomposition> {
    let env = noisy_envelope(omega, knots, eps)?;
    decompose_envelope(&env, weight)
}

pub fn decompose_envelope(env: &NoisyEnvelope, weight: &Weight) -> Result<ActiveDecomposition> {
    weight.validate()?;
    let mut active_indices: Vec<usize> = env.pieces.iter().map(|p| p.2).collect();
    active_indices.sort_unstable();
    active_indices.dedup();
    let quad = scalar_quadrature();
    let kinks = weight.kinks();
    let mut cells = vec![Vec::new(); active_indices.len()];
    let mut weights = vec![0.0; active_indices.len()];
    for &(lo, hi, k) in &env.pieces {
        let j = active_indices.binary_search(&k).expect("index collected above");
        cells[j].push((lo, hi));
        weights[j] += quad.integrate(|x| weight.value(x), lo, hi, &kinks)?.value;
    }
    Ok(ActiveDecomposition {
        n: env.knots.len(),
        active_indices,
        cells,
        weights,
    })
}

/// co(Σ_j ∫_{Π_{k_j}} P · A_{k_j}) over active indices, in support space.
pub fn phi_star_noisy(
    samples: &[PointCloud],
    decomp: &ActiveDecomposition,
    grid: &Arc<DirectionGrid>,
) -> Result<ConvexBody> {
    if samples.len() != decomp.n {
        return Err(Error::CountMismatch {
            what: "samples",
            expected: decomp.n,
            found: samples.len(),
        });
    }
    let terms = decomp.active_indices.iter().map(|&k| &samples[k]).zip(&decomp.weights);
    weighted_support_sum(terms, decomp.nu(), decomp.nu(), grid)
}

/// ∫₀¹ P(x)·min_k(ε_k + ω(|x − x_k|)) dx.
pub fn noisy_error_value(omega: &Modulus, knots: &KnotSet, eps: &ErrorBudget, weight: &Weight) -> Result<f64> {
    let env = noisy_envelope(omega, knots, eps)?;
    envelope_integral(&env, weight)
}

pub fn envelope_integral(env: &NoisyEnvelope, weight: &Weight) -> Result<f64> {
    let mut breaks = env.breakpoints();
    breaks.extend(weight.kinks());
    scalar_quadrature()
        .integrate(|x| weight.value(x) * env.value(x), 0.0, 1.0, &breaks)
        .map(|r| r.value)
}

/// The trajectory x ↦ min_k(ε_k + ω(|x − x_k|))·{a}.
pub fn noisy_extremal_trajectory(env: &NoisyEnvelope, a: &Vector) -> Result<SetTrajectory> {
    if (a.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!(
            "extremal direction must be a unit vector, got norm {}",
            a.norm()
        )));
    }
    let env = env.clone();
    Ok(SetTrajectory::scalar_profile(Arc::new(move |x| env.value(x)), a.clone()))
}

/// Compares the error of the pruned method on the extremal pair with the
/// closed-form value.
pub fn noisy_sharpness_gap(
    omega: &Modulus,
    knots: &KnotSet,
    eps: &ErrorBudget,
    weight: &Weight,
    a: &Vector,
    grid: &Arc<DirectionGrid>,
) -> Result<Sharpness> {
    let integrator = Integrator::new(SHARPNESS_TOL).min_cells(SHARPNESS_MIN_CELLS);
    let env = noisy_envelope(omega, knots, eps)?;
    let decomp = decompose_envelope(&env, weight)?;
    let f = noisy_extremal_trajectory(&env, a)?;
    let zeros = vec![PointCloud::origin(a.dim()); knots.len()];
    let recovered = phi_star_noisy(&zeros, &decomp, grid)?;
    let integral = integrator.integrate(&f, weight, grid)?.body;
    let lower_bound = integral
        .hausdorff(&recovered)?
        .max(integral.negate().hausdorff(&recovered)?);
    let value = envelope_integral(&env, weight)?;
    Ok(Sharpness {
        lower_bound,
        worst_case_error: value,
        gap: (lower_bound - value).abs(),
    })
}
