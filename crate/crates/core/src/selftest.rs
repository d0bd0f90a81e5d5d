//! Quick invariant battery behind the `selftest` command.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convexcal::{ConvexBody, DirectionGrid};
use crate::error::Result;
use crate::funcspace::{holder_check, Modulus, SetTrajectory, Weight};
use crate::geometry::{convex_hausdorff_2d, hausdorff, minkowski_combine, PointCloud, Vector};
use crate::knots::{asymptotic_b, midpoint_knots, uniform_optimal_error};
use crate::noisy::{active_cells, noisy_error_value, phi_star_noisy, ErrorBudget};
use crate::recovery::{method_error, worst_case_error, KnotSet};
use crate::rmintegral::{integral_property_suite, Integrator};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed violation, or the compared quantity.
    pub detail: String,
}

/// Cloud of `points` standard-normal points scaled by `scale`.
pub fn random_cloud<R: Rng>(rng: &mut R, dim: usize, points: usize, scale: f64) -> PointCloud {
    let data = (0..dim * points)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    PointCloud::from_flat(dim, data).expect("nonempty cloud")
}

fn random_shape<R: Rng>(rng: &mut R, dim: usize) -> PointCloud {
    let n = rng.gen_range(1..=8);
    random_cloud(rng, dim, n, 1.0)
}

fn check(name: &'static str, worst: f64, limit: f64) -> Check {
    Check {
        name,
        passed: worst <= limit,
        detail: format!("worst {worst:e} (limit {limit:e})"),
    }
}

/// Runs every check with randomness drawn from `seed`.
pub fn run(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut metric: f64 = 0.0;
    let mut homog: f64 = 0.0;
    let mut sum_ineq: f64 = 0.0;
    for i in 0..200 {
        let dim = 2 + i % 2;
        let (a, b, c, d) = (
            random_shape(&mut rng, dim),
            random_shape(&mut rng, dim),
            random_shape(&mut rng, dim),
            random_shape(&mut rng, dim),
        );
        let ab = hausdorff(&a, &b)?;
        metric = metric
            .max((ab - hausdorff(&b, &a)?).abs())
            .max(hausdorff(&a, &a)?)
            .max(ab - hausdorff(&a, &c)? - hausdorff(&c, &b)?);
        let lambda = rng.gen_range(-3.0..3.0);
        homog = homog.max((hausdorff(&a.scaled(lambda), &b.scaled(lambda))? - lambda.abs() * ab).abs() / (1.0 + ab));
        let lhs = hausdorff(&minkowski_combine(1.0, &a, 1.0, &b)?, &minkowski_combine(1.0, &c, 1.0, &d)?)?;
        sum_ineq = sum_ineq.max(lhs - hausdorff(&a, &c)? - hausdorff(&b, &d)? - 1e-12);
    }
    out.push(check("metric axioms", metric, 1e-12));
    out.push(check("homogeneity of the distance", homog, 1e-9));
    out.push(check("sum inequality", sum_ineq, 1e-9));

    let grid = DirectionGrid::planar(360)?;
    let mut contraction: f64 = 0.0;
    let mut linearity: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = (random_shape(&mut rng, 2), random_shape(&mut rng, 2));
        contraction = contraction.max(convex_hausdorff_2d(&a, &b)? - hausdorff(&a, &b)?);
        let (ea, eb) = (ConvexBody::embed(&a, &grid)?, ConvexBody::embed(&b, &grid)?);
        let joint = ConvexBody::embed(&minkowski_combine(1.5, &a, 0.5, &b)?, &grid)?;
        let split = ConvexBody::combine(1.5, &ea, 0.5, &eb)?;
        linearity = linearity.max(joint.hausdorff(&split)? / (1.0 + joint.radius()));
    }
    out.push(check("hull contraction", contraction, 1e-12));
    out.push(check("hull linearity", linearity, 1e-9));

    let moduli = [
        Modulus::lipschitz(),
        Modulus::power(2.0, 0.3)?,
        Modulus::capped_linear(2.0, 0.3)?,
        Modulus::tabulated(vec![0.0, 0.1, 0.5, 1.0], vec![0.0, 0.2, 0.5, 0.6])?,
    ];
    let sub = moduli.iter().all(|m| m.check_subadditive(400).is_ok());
    out.push(Check {
        name: "modulus subadditivity",
        passed: sub,
        detail: format!("{} moduli", moduli.len()),
    });

    let e1 = Vector::basis(2, 0);
    let profile = SetTrajectory::scalar_profile(Arc::new(|t: f64| 0.18 * (5.0 * t).sin()), e1.clone());
    let body = SetTrajectory::scaled_body(
        Arc::new(|t: f64| 0.5 * (t - 0.4).abs()),
        PointCloud::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]])?,
    );
    let lip_sqrt2 = Modulus::power(2f64.sqrt(), 1.0)?;
    let h1 = holder_check(&profile, &Modulus::lipschitz(), 2000)?;
    let h2 = holder_check(&body, &lip_sqrt2, 2000)?;
    out.push(check("hölder membership of generated trajectories", h1.worst_ratio.max(h2.worst_ratio), 1.0 + 1e-9));

    let knots = KnotSet::new(vec![0.15, 0.5, 0.8])?;
    let integrator = Integrator::new(1e-7).min_cells(256);
    let mut excess: f64 = 0.0;
    for (f, w) in [(&profile, &Modulus::lipschitz()), (&body, &lip_sqrt2)] {
        for p in [Weight::ConstantOne, Weight::polynomial(vec![1.0, 1.0])?] {
            let err = method_error(f, &p, &knots, &grid, &integrator)?;
            let bound = worst_case_error(w, &p, &knots)? + grid.grid_error(2.0) + 1e-6;
            excess = excess.max(err - bound);
        }
    }
    out.push(check("method error below the worst-case bound", excess, 0.0));

    let mut closed: f64 = 0.0;
    for n in [1, 2, 4, 8, 16, 64] {
        closed = closed.max((uniform_optimal_error(&Modulus::lipschitz(), n)? - 0.25 / n as f64).abs());
        let sqrt_form = (2.0 * n as f64).powf(-0.5) * 2.0 / 3.0;
        closed = closed.max((uniform_optimal_error(&Modulus::power(1.0, 0.5)?, n)? - sqrt_form).abs());
    }
    out.push(check("midpoint closed forms", closed, 1e-12));

    let b = asymptotic_b(&Weight::ConstantOne, &Modulus::power(1.0, 0.5)?, &[1, 7, 64])?;
    let unit = b.b_estimates.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    out.push(check("unit weight partial sums", unit, 1e-12));

    let mid = midpoint_knots(4)?;
    let mut mono: f64 = 0.0;
    let mut eps = vec![0.0; 4];
    let mut prev = noisy_error_value(&Modulus::lipschitz(), &mid, &ErrorBudget::new(eps.clone())?, &Weight::ConstantOne)?;
    for _ in 0..8 {
        let k = rng.gen_range(0..4);
        eps[k] += rng.gen_range(0.0..0.1);
        let v = noisy_error_value(&Modulus::lipschitz(), &mid, &ErrorBudget::new(eps.clone())?, &Weight::ConstantOne)?;
        mono = mono.max(prev - v);
        prev = v;
    }
    let cor = noisy_error_value(&Modulus::lipschitz(), &mid, &ErrorBudget::uniform(4, 0.05)?, &Weight::ConstantOne)?;
    out.push(check("noisy error monotone in the budget", mono, 1e-12));
    out.push(check("uniform budget adds epsilon", (cor - 0.1125).abs(), 1e-10));

    let pair = KnotSet::new(vec![0.5, 0.51])?;
    let decomp = active_cells(&Modulus::lipschitz(), &pair, &ErrorBudget::new(vec![0.0, 1.0])?, &Weight::ConstantOne)?;
    let a1 = random_cloud(&mut rng, 2, 5, 1.0);
    let base = phi_star_noisy(&[a1.clone(), PointCloud::origin(2)], &decomp, &grid)?;
    let mut pruning: f64 = 0.0;
    for _ in 0..10 {
        let other = random_cloud(&mut rng, 2, 4, 10.0);
        pruning = pruning.max(base.hausdorff(&phi_star_noisy(&[a1.clone(), other], &decomp, &grid)?)?);
    }
    out.push(Check {
        name: "inactive samples are ignored",
        passed: decomp.nu() == 1 && pruning <= 1e-12,
        detail: format!("nu {} worst {pruning:e}", decomp.nu()),
    });

    let report = integral_property_suite(&profile, &body, &Weight::polynomial(vec![1.0, 2.0])?, &grid)?;
    out.push(check("integral identities", report.worst(), 1e-9));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let checks = run(0).unwrap();
        assert!(checks.len() >= 14);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(run(3).unwrap(), run(3).unwrap());
    }
}
