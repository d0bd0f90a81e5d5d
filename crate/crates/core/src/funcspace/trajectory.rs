use std::fmt;
use std::sync::Arc;

use crate::convexcal::DirectionGrid;
use crate::error::{Error, Result};
use crate::funcspace::Modulus;
use crate::geometry::{convex_hull_2d, dot, minkowski_combine, PointCloud, Vector};

/// A scalar profile t ↦ g(t) on [0, 1].
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Rule mapping t ∈ [0, 1] to a point cloud.
pub type Evaluator = Arc<dyn Fn(f64) -> PointCloud + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Constant(PointCloud),
    /// g(t)·{a}
    ScalarProfile { profile: Profile, direction: Vector },
    /// g(t)·B
    ScaledBody { profile: Profile, base: PointCloud },
    /// nearest stored sample
    Sampled { times: Vec<f64>, clouds: Vec<PointCloud> },
    Custom(Evaluator),
    Sum(Box<SetTrajectory>, Box<SetTrajectory>),
    Scaled(f64, Box<SetTrajectory>),
    Hull(Box<SetTrajectory>),
}

/// A set-valued function f: [0, 1] → K(R^m).
#[derive(Clone)]
pub struct SetTrajectory {
    dim: usize,
    kind: Kind,
}

impl fmt::Debug for SetTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::Constant(_) => "constant",
            Kind::ScalarProfile { .. } => "scalar_profile",
            Kind::ScaledBody { .. } => "scaled_body",
            Kind::Sampled { .. } => "user_sampled",
            Kind::Custom(_) => "custom",
            Kind::Sum(..) => "sum",
            Kind::Scaled(..) => "scaled",
            Kind::Hull(_) => "hull",
        };
        f.debug_struct("SetTrajectory")
            .field("dim", &self.dim)
            .field("kind", &kind)
            .finish()
    }
}

impl SetTrajectory {
    pub fn constant(a: PointCloud) -> Self {
        SetTrajectory {
            dim: a.dim(),
            kind: Kind::Constant(a),
        }
    }

    /// t ↦ g(t)·{a}.
    pub fn scalar_profile(profile: Profile, direction: Vector) -> Self {
        SetTrajectory {
            dim: direction.dim(),
            kind: Kind::ScalarProfile { profile, direction },
        }
    }

    /// t ↦ g(t)·B.
    pub fn scaled_body(profile: Profile, base: PointCloud) -> Self {
        SetTrajectory {
            dim: base.dim(),
            kind: Kind::ScaledBody { profile, base },
        }
    }

    /// Nearest-sample trajectory through `(times[i], clouds[i])`.
    ///
    /// Fails unless ω(step) ≤ `tol`, where step is the largest gap between
    /// consecutive sample times (gaps to 0 and 1 counted twice).
    pub fn sampled(
        times: Vec<f64>,
        clouds: Vec<PointCloud>,
        omega: &Modulus,
        tol: f64,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != clouds.len() {
            return Err(Error::CountMismatch {
                what: "trajectory samples",
                expected: times.len(),
                found: clouds.len(),
            });
        }
        if times.iter().any(|t| !(0.0..=1.0).contains(t)) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sample times must be strictly increasing in [0, 1]"));
        }
        let dim = clouds[0].dim();
        if let Some(c) = clouds.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.dim(),
            });
        }
        let step = times
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain([2.0 * times[0], 2.0 * (1.0 - times[times.len() - 1])])
            .fold(0.0, f64::max);
        if omega.value(step) > tol {
            return Err(Error::invalid(format!(
                "sampling step {step} is too coarse: ω(step) = {} exceeds tolerance {tol}",
                omega.value(step)
            )));
        }
        Ok(SetTrajectory {
            dim,
            kind: Kind::Sampled { times, clouds },
        })
    }

    /// Arbitrary evaluator; every returned cloud must have dimension `dim`.
    pub fn from_fn(dim: usize, f: Evaluator) -> Self {
        SetTrajectory {
            dim,
            kind: Kind::Custom(f),
        }
    }

    /// t ↦ segment from the origin to (cos πt, sin πt).
    pub fn rotating_segment() -> Self {
        SetTrajectory::from_fn(
            2,
            Arc::new(|t| {
                let (s, c) = (std::f64::consts::PI * t).sin_cos();
                PointCloud::from_flat(2, vec![0.0, 0.0, c, s]).expect("two planar points")
            }),
        )
    }

    /// t ↦ f(t) + g(t).
    pub fn sum(f: SetTrajectory, g: SetTrajectory) -> Result<Self> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch {
                expected: f.dim,
                found: g.dim,
            });
        }
        Ok(SetTrajectory {
            dim: f.dim,
            kind: Kind::Sum(Box::new(f), Box::new(g)),
        })
    }

    /// t ↦ λ·f(t).
    pub fn scaled(self, lambda: f64) -> Self {
        SetTrajectory {
            dim: self.dim,
            kind: Kind::Scaled(lambda, Box::new(self)),
        }
    }

    /// t ↦ co f(t) (planar trajectories only).
    pub fn hull(self) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        Ok(SetTrajectory {
            dim: 2,
            kind: Kind::Hull(Box::new(self)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// f(t) for t ∈ [0, 1].
    pub fn evaluate(&self, t: f64) -> Result<PointCloud> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfDomain {
                value: t,
                domain: "[0, 1]".into(),
            });
        }
        let cloud = self.eval_unchecked(t)?;
        if cloud.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: cloud.dim(),
            });
        }
        Ok(cloud)
    }

    fn eval_unchecked(&self, t: f64) -> Result<PointCloud> {
        Ok(match &self.kind {
            Kind::Constant(a) => a.clone(),
            Kind::ScalarProfile { profile, direction } => {
                let g = profile(t);
                PointCloud::singleton(&direction.as_slice().iter().map(|c| g * c).collect::<Vec<_>>())?
            }
            Kind::ScaledBody { profile, base } => base.scaled(profile(t)),
            Kind::Sampled { times, clouds } => clouds[nearest(times, t)].clone(),
            Kind::Custom(f) => f(t),
            Kind::Sum(f, g) => minkowski_combine(1.0, &f.eval_unchecked(t)?, 1.0, &g.eval_unchecked(t)?)?,
            Kind::Scaled(lambda, f) => f.eval_unchecked(t)?.scaled(*lambda),
            Kind::Hull(f) => convex_hull_2d(&f.eval_unchecked(t)?)?,
        })
    }

    /// Writes h_{co f(t)}(u_j) into `out` for every grid direction.
    pub fn support_into(&self, t: f64, grid: &DirectionGrid, out: &mut [f64]) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: self.dim,
            });
        }
        match &self.kind {
            Kind::ScalarProfile { profile, direction } => {
                let g = profile(t);
                for (o, u) in out.iter_mut().zip(grid.directions()) {
                    *o = g * dot(direction.as_slice(), u);
                }
            }
            Kind::ScaledBody { profile, base } => {
                let g = profile(t);
                if g >= 0.0 {
                    for (o, u) in out.iter_mut().zip(grid.directions()) {
                        *o = g * base.support(u);
                    }
                } else {
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = -g * base.support(grid.direction(grid.antipode(j)));
                    }
                }
            }
            Kind::Sum(f, g) => {
                f.support_into(t, grid, out)?;
                let mut tmp = vec![0.0; out.len()];
                g.support_into(t, grid, &mut tmp)?;
                for (o, v) in out.iter_mut().zip(&tmp) {
                    *o += v;
                }
            }
            Kind::Scaled(lambda, f) => {
                let mut tmp = vec![0.0; out.len()];
                f.support_into(t, grid, &mut tmp)?;
                if *lambda >= 0.0 {
                    for (o, v) in out.iter_mut().zip(&tmp) {
                        *o = lambda * v;
                    }
                } else {
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = -lambda * tmp[grid.antipode(j)];
                    }
                }
            }
            Kind::Hull(f) => f.support_into(t, grid, out)?,
            _ => {
                let cloud = self.eval_unchecked(t)?;
                if cloud.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: cloud.dim(),
                    });
                }
                for (o, u) in out.iter_mut().zip(grid.directions()) {
                    *o = cloud.support(u);
                }
            }
        }
        Ok(())
    }
}

fn nearest(times: &[f64], t: f64) -> usize {
    let i = times.partition_point(|&s| s < t);
    if i == 0 {
        0
    } else if i == times.len() {
        times.len() - 1
    } else if t - times[i - 1] <= times[i] - t {
        i - 1
    } else {
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Vector {
        Vector::new(vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn scalar_profile_evaluates_to_singleton() {
        let f = SetTrajectory::scalar_profile(Arc::new(|t| 2.0 * t), e1());
        let c = f.evaluate(0.25).unwrap();
        assert_eq!(c.to_vecs(), vec![vec![0.5, 0.0]]);
        assert!(f.evaluate(1.5).is_err());
    }

    #[test]
    fn fast_support_matches_embedding() {
        let grid = DirectionGrid::planar(16).unwrap();
        let base = PointCloud::new(vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![-1.0, -1.0]]).unwrap();
        let f = SetTrajectory::scaled_body(Arc::new(|t| 1.0 - 3.0 * t), base.clone());
        let g = SetTrajectory::scalar_profile(Arc::new(|t| t * t), e1());
        let h = SetTrajectory::sum(f.clone(), g).unwrap().scaled(-0.5);
        for traj in [&f, &h] {
            for t in [0.0, 0.2, 0.9] {
                let cloud = traj.evaluate(t).unwrap();
                let mut fast = vec![0.0; grid.len()];
                traj.support_into(t, &grid, &mut fast).unwrap();
                for (u, s) in grid.directions().zip(&fast) {
                    assert!((cloud.support(u) - s).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sampled_uses_nearest_and_checks_step() {
        let w = Modulus::lipschitz();
        let clouds: Vec<_> = (0..11)
            .map(|i| PointCloud::singleton(&[i as f64, 0.0]).unwrap())
            .collect();
        let times: Vec<_> = (0..11).map(|i| i as f64 / 10.0).collect();
        assert!(SetTrajectory::sampled(times.clone(), clouds.clone(), &w, 0.05).is_err());
        let f = SetTrajectory::sampled(times, clouds, &w, 0.1 + 1e-12).unwrap();
        assert_eq!(f.evaluate(0.26).unwrap().point(0)[0], 3.0);
        assert_eq!(f.evaluate(1.0).unwrap().point(0)[0], 10.0);
    }

    #[test]
    fn hull_needs_planar() {
        let f = SetTrajectory::constant(PointCloud::origin(3));
        assert!(f.hull().is_err());
    }
}
