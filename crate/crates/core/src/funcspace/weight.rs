use crate::error::{Error, Result};
use crate::funcspace::modulus::interpolate;

/// Grid size used to check weights on [0, 1].
pub const WEIGHT_CHECK_POINTS: usize = 10_000;

/// A continuous nonnegative weight P on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    ConstantOne,
    /// Σ c_k x^k, coefficients in ascending order.
    Polynomial(Vec<f64>),
    /// Piecewise-linear interpolation of samples (x_i, P_i).
    Tabulated { x: Vec<f64>, values: Vec<f64> },
}

impl Weight {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        let w = Weight::Polynomial(coeffs);
        w.validate()?;
        Ok(w)
    }

    pub fn tabulated(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let w = Weight::Tabulated { x, values };
        w.validate()?;
        Ok(w)
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Weight::ConstantOne => 1.0,
            Weight::Polynomial(c) => c.iter().rev().fold(0.0, |acc, ck| acc * x + ck),
            Weight::Tabulated { x: xs, values } => interpolate(xs, values, x),
        }
    }

    pub fn is_constant_one(&self) -> bool {
        match self {
            Weight::ConstantOne => true,
            Weight::Polynomial(c) => c.first() == Some(&1.0) && c[1..].iter().all(|ck| *ck == 0.0),
            Weight::Tabulated { values, .. } => values.iter().all(|v| *v == 1.0),
        }
    }

    /// Points inside (0, 1) where P is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Weight::Tabulated { x, .. } => x.iter().copied().filter(|&t| t > 0.0 && t < 1.0).collect(),
            _ => Vec::new(),
        }
    }

    fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..=WEIGHT_CHECK_POINTS).map(move |i| {
            let x = i as f64 / WEIGHT_CHECK_POINTS as f64;
            (x, self.value(x))
        })
    }

    /// Checks finiteness and nonnegativity on a uniform grid.
    pub fn validate(&self) -> Result<()> {
        match self {
            Weight::Polynomial(c) if c.is_empty() => {
                return Err(Error::invalid("polynomial weight needs at least one coefficient"))
            }
            Weight::Tabulated { x, values } => {
                if x.len() != values.len() || x.len() < 2 {
                    return Err(Error::invalid("tabulated weight needs at least two samples"));
                }
                if x[0] > 0.0 || x[x.len() - 1] < 1.0 {
                    return Err(Error::invalid("tabulated weight must cover [0, 1]"));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("tabulated abscissae must be strictly increasing"));
                }
            }
            _ => {}
        }
        for (x, p) in self.grid() {
            if !p.is_finite() {
                return Err(Error::invalid(format!("weight is not finite at x = {x}")));
            }
            if p < -1e-12 {
                return Err(Error::invalid(format!("weight is negative at x = {x}: {p}")));
            }
        }
        Ok(())
    }

    /// Checks that P vanishes at most at isolated grid points.
    pub fn check_positive_ae(&self) -> Result<()> {
        self.validate()?;
        let mut prev_zero = false;
        for (x, p) in self.grid() {
            let zero = p <= 0.0;
            if zero && prev_zero {
                return Err(Error::invalid(format!(
                    "weight vanishes on an interval near x = {x}"
                )));
            }
            prev_zero = zero;
        }
        Ok(())
    }

    pub fn max_value(&self) -> f64 {
        self.grid().map(|(_, p)| p).fold(0.0, f64::max)
    }
}
