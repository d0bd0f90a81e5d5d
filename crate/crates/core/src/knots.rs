//! Knot placement: the uniform-weight optimum, the asymptotic constant
//! B(P, ω) with Ω(x) = ∫₀^x ω(t/2) dt, the power-law leading term, and a
//! local optimizer for general weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcspace::{Modulus, Weight};
use crate::quadrature::Quadrature;
use crate::recovery::{scalar_quadrature, worst_case_error, KnotSet};

/// x_i = (2i − 1)/(2n).
pub fn midpoint_knots(n: usize) -> Result<KnotSet> {
    if n == 0 {
        return Err(Error::invalid("number of knots must be positive"));
    }
    KnotSet::new((1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect())
}

/// 2n ∫₀^{1/2n} ω(t) dt.
pub fn uniform_optimal_error(omega: &Modulus, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("number of knots must be positive"));
    }
    Ok(2.0 * n as f64 * omega.integral(0.5 / n as f64))
}

/// Ω(x) = ∫₀^x ω(t/2) dt for x ∈ [0, 1].
pub fn omega_big(omega: &Modulus, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            value: x,
            domain: "[0, 1]".into(),
        });
    }
    omega_big_unchecked(omega, x)
}

fn omega_big_unchecked(omega: &Modulus, x: f64) -> Result<f64> {
    Ok(2.0 * omega.integral(0.5 * x))
}

/// Ω^{-1}(y) for y ∈ [0, Ω(1)], by bisection down to adjacent floats.
///
/// Where Ω is flat (ω vanishing near 0) the smallest preimage is returned.
pub fn omega_big_inv(omega: &Modulus, y: f64) -> Result<f64> {
    let top = omega_big_unchecked(omega, 1.0)?;
    if !(y >= 0.0 && y <= top * (1.0 + 1e-12)) {
        return Err(Error::OutOfDomain {
            value: y,
            domain: format!("[0, Ω(1) = {top}]"),
        });
    }
    if y >= top {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if omega_big_unchecked(omega, mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Per-n partial sums of B(P, ω) and the derived scale n·Ω(B/n).
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub n_values: Vec<usize>,
    /// Σ_k Ω^{-1}(P((2k − 1)/2n)·Ω(1/n)) for each n.
    pub b_estimates: Vec<f64>,
    /// The partial sum at the largest n, reported raw.
    pub b_extrapolated: f64,
    /// n·Ω(B/n) with B = `b_extrapolated`.
    pub scale: Vec<f64>,
    /// R_n/(n·Ω(B/n)), filled by [`AsymptoticReport::with_ratios`].
    pub ratios: Option<Vec<f64>>,
    /// (n, k) of terms whose argument exceeded Ω(1); they were clamped to 1.
    pub domain_violations: Vec<(usize, usize)>,
}

/// Partial sums of B(P, ω) for each n in `n_list`.
pub fn asymptotic_b(weight: &Weight, omega: &Modulus, n_list: &[usize]) -> Result<AsymptoticReport> {
    weight.check_positive_ae()?;
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("n values must be positive and strictly increasing"));
    }
    let top = omega_big(omega, 1.0)?;
    let mut b_estimates = Vec::with_capacity(n_list.len());
    let mut domain_violations = Vec::new();
    for &n in n_list {
        let base = omega_big(omega, 1.0 / n as f64)?;
        let mut sum = 0.0;
        for k in 1..=n {
            let y = weight.value((2 * k - 1) as f64 / (2 * n) as f64) * base;
            if y > top {
                domain_violations.push((n, k));
                sum += 1.0;
            } else {
                sum += omega_big_inv(omega, y)?;
            }
        }
        b_estimates.push(sum);
    }
    let b = *b_estimates.last().expect("n_list is nonempty");
    let scale = n_list
        .iter()
        .map(|&n| {
            let mut x = b / n as f64;
            if x > 1.0 && x <= 1.0 + 1e-12 {
                x = 1.0;
            }
            if x > 1.0 {
                Err(Error::OutOfDomain {
                    value: x,
                    domain: "[0, 1]".into(),
                })
            } else {
                omega_big(omega, x).map(|v| n as f64 * v)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticReport {
        n_values: n_list.to_vec(),
        b_estimates,
        b_extrapolated: b,
        scale,
        ratios: None,
        domain_violations,
    })
}

impl AsymptoticReport {
    /// Fills `ratios` with R_n/(n·Ω(B/n)), where R_n is the error of the
    /// optimized knots (midpoints when P ≡ 1).
    pub fn with_ratios(mut self, weight: &Weight, omega: &Modulus, opts: &OptimizeOptions) -> Result<Self> {
        let ratios = self
            .n_values
            .iter()
            .zip(&self.scale)
            .map(|(&n, &s)| {
                let r = if weight.is_constant_one() {
                    uniform_optimal_error(omega, n)?
                } else {
                    optimize_knots(weight, omega, n, opts)?.error
                };
                Ok(r / s)
            })
            .collect::<Result<Vec<_>>>()?;
        self.ratios = Some(ratios);
        Ok(self)
    }
}

/// (2n)^{−α}/(α + 1)·(∫₀¹ P^{1/(1+α)})^{α+1}, the leading term for ω(t) = t^α.
pub fn power_law_estimate(alpha: f64, weight: &Weight, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if n == 0 {
        return Err(Error::invalid("number of knots must be positive"));
    }
    let p = 1.0 / (1.0 + alpha);
    let integral = scalar_quadrature()
        .integrate(|x| weight.value(x).max(0.0).powf(p), 0.0, 1.0, &weight.kinks())?
        .value;
    Ok((2.0 * n as f64).powf(-alpha) / (alpha + 1.0) * integral.powf(alpha + 1.0))
}

/// Settings of [`optimize_knots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub starts: usize,
    pub max_sweeps: usize,
    /// Stop once a full sweep lowers the objective by less than this.
    pub min_decrease: f64,
    /// Golden-section bracket width at which a coordinate update stops.
    pub x_tol: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            starts: 3,
            max_sweeps: 200,
            min_decrease: 1e-10,
            x_tol: 1e-11,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedKnots {
    pub knots: KnotSet,
    pub error: f64,
    /// Final objective of each start, in start order.
    pub start_errors: Vec<f64>,
    pub sweeps: Vec<usize>,
}

/// Local minimization of ∫ P·ω(dist(·, x̄)) over n knots by cyclic
/// coordinate descent with golden-section line searches, from several starts.
pub fn optimize_knots(
    weight: &Weight,
    omega: &Modulus,
    n: usize,
    opts: &OptimizeOptions,
) -> Result<OptimizedKnots> {
    if n == 0 {
        return Err(Error::invalid("number of knots must be positive"));
    }
    weight.validate()?;
    let starts = initial_knots(weight, omega, n, opts)?;
    let mut results = Vec::with_capacity(starts.len());
    for start in starts {
        results.push(descend(weight, omega, start, opts)?);
    }
    let start_errors = results.iter().map(|r| r.1).collect();
    let sweeps = results.iter().map(|r| r.2).collect();
    let (knots, error, _) = results
        .into_iter()
        .min_by(|a, b| {
            a.1.total_cmp(&b.1).then_with(|| {
                a.0.iter()
                    .zip(&b.0)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .expect("at least one start");
    Ok(OptimizedKnots {
        knots: KnotSet::new(knots)?,
        error,
        start_errors,
        sweeps,
    })
}

fn initial_knots(weight: &Weight, omega: &Modulus, n: usize, opts: &OptimizeOptions) -> Result<Vec<Vec<f64>>> {
    let mid: Vec<f64> = midpoint_knots(n)?.as_slice().to_vec();
    let mut starts = vec![mid.clone()];
    if let Some(alpha) = omega.power_exponent() {
        starts.push(density_quantiles(weight, 1.0 / (1.0 + alpha), n)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let h = 1.0 / n as f64;
    while starts.len() < opts.starts.max(1) {
        let mut x: Vec<f64> = mid
            .iter()
            .map(|m| (m + rng.gen_range(-0.4..0.4) * h).clamp(0.0, 1.0))
            .collect();
        x.sort_by(f64::total_cmp);
        x.dedup();
        if x.len() == n {
            starts.push(x);
        }
    }
    starts.truncate(opts.starts.max(1));
    Ok(starts)
}

/// Midpoint quantiles (2k − 1)/(2n) of the density ∝ P^p.
fn density_quantiles(weight: &Weight, p: f64, n: usize) -> Result<Vec<f64>> {
    const CELLS: usize = 4096;
    let q = Quadrature::new(1e-14, 1e-12);
    let mut cdf = Vec::with_capacity(CELLS + 1);
    cdf.push(0.0);
    for i in 0..CELLS {
        let (a, b) = (i as f64 / CELLS as f64, (i + 1) as f64 / CELLS as f64);
        let r = q.integrate(|x| weight.value(x).max(0.0).powf(p), a, b, &[])?;
        cdf.push(cdf[i] + r.value);
    }
    let total = cdf[CELLS];
    if !(total > 0.0) {
        return Ok(midpoint_knots(n)?.as_slice().to_vec());
    }
    let mut knots = Vec::with_capacity(n);
    for k in 1..=n {
        let target = total * (2 * k - 1) as f64 / (2 * n) as f64;
        let i = cdf.partition_point(|&c| c < target).clamp(1, CELLS);
        let (c0, c1) = (cdf[i - 1], cdf[i]);
        let w = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        knots.push((i as f64 - 1.0 + w) / CELLS as f64);
    }
    for k in 1..n {
        if knots[k] <= knots[k - 1] {
            knots[k] = f64::min(1.0, knots[k - 1] + 1e-9);
        }
    }
    Ok(knots)
}

/// ∫_lo^hi P(t)·ω(distance to the nearest of left, x, right) dt, where
/// [lo, hi] spans from the left neighbor (or 0) to the right neighbor (or 1).
fn local_error(weight: &Weight, omega: &Modulus, left: Option<f64>, x: f64, right: Option<f64>) -> Result<f64> {
    let lo = left.unwrap_or(0.0);
    let hi = right.unwrap_or(1.0);
    let nearest = |t: f64| {
        let mut d = (t - x).abs();
        if let Some(l) = left {
            d = d.min(t - l);
        }
        if let Some(r) = right {
            d = d.min(r - t);
        }
        d
    };
    let mut breaks = vec![x];
    if let Some(l) = left {
        breaks.push(0.5 * (l + x));
    }
    if let Some(r) = right {
        breaks.push(0.5 * (x + r));
    }
    for k in omega.kinks() {
        for c in [Some(x), left, right].into_iter().flatten() {
            breaks.push(c - k);
            breaks.push(c + k);
        }
    }
    breaks.extend(weight.kinks());
    Ok(scalar_quadrature()
        .integrate(|t| weight.value(t) * omega.value(nearest(t)), lo, hi, &breaks)?
        .value)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn descend(weight: &Weight, omega: &Modulus, mut x: Vec<f64>, opts: &OptimizeOptions) -> Result<(Vec<f64>, f64, usize)> {
    let n = x.len();
    let mut objective = worst_case_error(omega, weight, &KnotSet::new(x.clone())?)?;
    let mut sweeps = 0;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        for i in 0..n {
            let left = (i > 0).then(|| x[i - 1]);
            let right = (i + 1 < n).then(|| x[i + 1]);
            let lo = left.map_or(0.0, |l| l + 1e-12);
            let hi = right.map_or(1.0, |r| r - 1e-12);
            if !(hi > lo) {
                continue;
            }
            let local = |t: f64| local_error(weight, omega, left, t, right);
            let current = local(x[i])?;
            let (cand, value) = golden_section(&local, lo, hi, opts.x_tol)?;
            if value < current {
                x[i] = cand;
            }
        }
        let next = worst_case_error(omega, weight, &KnotSet::new(x.clone())?)?;
        let decrease = objective - next;
        objective = next.min(objective);
        if decrease < opts.min_decrease {
            break;
        }
    }
    Ok((x, objective, sweeps))
}

fn golden_section<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Shape of x ↦ γ_c(x)/x near zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

impl Monotonicity {
    pub fn is_monotone(self) -> bool {
        self != Monotonicity::Mixed
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Monotonicity::Constant => "constant",
            Monotonicity::Increasing => "monotone_increasing",
            Monotonicity::Decreasing => "monotone_decreasing",
            Monotonicity::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaProbe {
    /// (x, γ_c(x)/x) in increasing x.
    pub samples: Vec<(f64, f64)>,
    pub class: Monotonicity,
}

/// Levels j of the probe grid x = 2^{−j}.
pub const GAMMA_LEVELS: std::ops::RangeInclusive<i32> = 4..=20;

/// Relative size below which successive ratio differences count as flat.
pub const GAMMA_FLAT_TOL: f64 = 1e-9;

/// Samples γ_c(x)/x with γ_c(x) = Ω^{-1}(c·Ω(x)) at x = 2^{−j}.
///
/// Points where c·Ω(x) leaves the range of Ω are skipped.
pub fn gamma_c_probe(omega: &Modulus, c: f64) -> Result<GammaProbe> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c must be positive"));
    }
    let top = omega_big(omega, 1.0)?;
    let mut samples = Vec::new();
    for j in GAMMA_LEVELS.rev() {
        let x = 0.5f64.powi(j);
        let y = c * omega_big(omega, x)?;
        if y > top {
            continue;
        }
        samples.push((x, omega_big_inv(omega, y)? / x));
    }
    let mut up = false;
    let mut down = false;
    for w in samples.windows(2) {
        let d = w[1].1 - w[0].1;
        let flat = GAMMA_FLAT_TOL * w[0].1.abs().max(w[1].1.abs());
        if d > flat {
            up = true;
        } else if d < -flat {
            down = true;
        }
    }
    let class = match (up, down) {
        (false, false) => Monotonicity::Constant,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (true, true) => Monotonicity::Mixed,
    };
    Ok(GammaProbe { samples, class })
}
