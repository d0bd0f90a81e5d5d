//! Moduli of continuity, weights and set-valued trajectories, plus the
//! sampled membership test for the class H^ω of trajectories with
//! δ(f(t'), f(t'')) ≤ ω(|t' − t''|).

mod modulus;
mod trajectory;
mod weight;

pub use modulus::{Modulus, STRICTNESS_PAIRS, SUBADDITIVE_TOL};
pub use trajectory::{Evaluator, Profile, SetTrajectory};
pub use weight::{Weight, WEIGHT_CHECK_POINTS};

use crate::error::{Error, Result};
use crate::geometry::hausdorff;

/// Slack allowed on the Hölder ratio before a pair counts as a violation.
pub const HOLDER_SLACK: f64 = 1e-9;

/// Outcome of [`holder_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    pub ok: bool,
    /// Largest δ(f(t'), f(t''))/ω(|t' − t''|) seen; infinite when ω vanishes
    /// on a pair whose values differ.
    pub worst_ratio: f64,
    /// The pair attaining `worst_ratio`.
    pub witness: Option<(f64, f64)>,
}

// additive-recurrence constants of the R2 sequence (plastic number)
const R2_A: f64 = 0.754_877_666_246_692_7;
const R2_B: f64 = 0.569_840_290_998_053_3;
const GOLDEN_FRAC: f64 = 0.618_033_988_749_894_8;

/// Deterministic pair set: alternately a 2D low-discrepancy pair and a
/// close pair (t, t + 2^-k) for k = 1..=24.
fn holder_pairs(count: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..count).map(|i| {
        let k = (i / 2) as f64;
        if i % 2 == 0 {
            ((0.5 + k * R2_A).fract(), (0.5 + k * R2_B).fract())
        } else {
            let t = (k * GOLDEN_FRAC).fract();
            let h = 0.5f64.powi(1 + (i / 2 % 24) as i32);
            if t + h <= 1.0 {
                (t, t + h)
            } else {
                (t - h, t)
            }
        }
    })
}

/// Samples δ(f(t'), f(t''))/ω(|t' − t''|) over `pairs` deterministic pairs.
pub fn holder_check(f: &SetTrajectory, omega: &Modulus, pairs: usize) -> Result<HolderReport> {
    if pairs == 0 {
        return Err(Error::invalid("holder_check needs at least one pair"));
    }
    let mut worst = 0.0;
    let mut witness = None;
    for (s, t) in holder_pairs(pairs) {
        if s == t {
            continue;
        }
        let (fs, ft) = (f.evaluate(s)?, f.evaluate(t)?);
        // rounding in δ is absolute, proportional to the size of the sets
        let rounding = 16.0 * f64::EPSILON * (1.0 + fs.max_norm() + ft.max_norm());
        let d = (hausdorff(&fs, &ft)? - rounding).max(0.0);
        let w = omega.value((s - t).abs());
        let ratio = if w > 0.0 {
            d / w
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio > worst || witness.is_none() && ratio == worst {
            worst = ratio;
            witness = Some((s.min(t), s.max(t)));
        }
    }
    Ok(HolderReport {
        ok: worst <= 1.0 + HOLDER_SLACK,
        worst_ratio: worst,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PointCloud, Vector};
    use std::sync::Arc;

    fn e1() -> Vector {
        Vector::new(vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn constant_trajectory_has_zero_ratio() {
        let f = SetTrajectory::constant(PointCloud::new(vec![vec![0.0, 1.0], vec![2.0, 2.0]]).unwrap());
        let r = holder_check(&f, &Modulus::power(1.0, 0.5).unwrap(), 500).unwrap();
        assert!(r.ok);
        assert_eq!(r.worst_ratio, 0.0);
    }

    #[test]
    fn linear_profile_is_exactly_lipschitz() {
        let f = SetTrajectory::scalar_profile(Arc::new(|t| t), e1());
        let r = holder_check(&f, &Modulus::lipschitz(), 2000).unwrap();
        assert!(r.ok);
        assert!((r.worst_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sqrt_profile_is_not_lipschitz() {
        let f = SetTrajectory::scalar_profile(Arc::new(f64::sqrt), e1());
        let r = holder_check(&f, &Modulus::lipschitz(), 2000).unwrap();
        assert!(!r.ok);
        assert!(r.worst_ratio > 5.0);
        let (s, _) = r.witness.unwrap();
        assert!(s < 0.05);
        // but it is 1/2-Hölder with constant 1
        let r = holder_check(&f, &Modulus::power(1.0, 0.5).unwrap(), 2000).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn close_pairs_tolerate_rounding() {
        let m = Modulus::capped_linear(1.7855103564083727, 0.7781717632860782).unwrap();
        let a = Vector::new(vec![0.12932140875453854f64.cos(), 0.12932140875453854f64.sin()]).unwrap();
        let m2 = m.clone();
        let f = SetTrajectory::scalar_profile(Arc::new(move |t| m2.value((t - 0.284).abs())), a);
        assert!(holder_check(&f, &m, 500).unwrap().ok);
    }

    #[test]
    fn zero_modulus_guard() {
        let zero = Modulus::tabulated(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let f = SetTrajectory::scalar_profile(Arc::new(|t| t), e1());
        let r = holder_check(&f, &zero, 10).unwrap();
        assert!(!r.ok);
        assert!(r.worst_ratio.is_infinite());
        assert!(holder_check(&f, &zero, 0).is_err());
    }
}
