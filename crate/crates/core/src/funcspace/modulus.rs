use crate::error::{Error, Result};

/// Tolerance of the sampled subadditivity check.
pub const SUBADDITIVE_TOL: f64 = 1e-10;

/// Ordered pairs sampled by [`Modulus::check_strictly_increasing`].
pub const STRICTNESS_PAIRS: usize = 1000;

/// A modulus of continuity ω on [0, 1]: ω(0) = 0, nondecreasing, subadditive.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulus {
    /// ω(t) = c·t^α with c > 0 and 0 < α ≤ 1.
    Power { c: f64, alpha: f64 },
    /// ω(t) = min(L·t, C).
    CappedLinear { slope: f64, cap: f64 },
    /// Piecewise-linear interpolation of samples (t_i, ω_i), t from 0 to 1.
    Tabulated { t: Vec<f64>, values: Vec<f64> },
}

impl Modulus {
    pub fn power(c: f64, alpha: f64) -> Result<Self> {
        let m = Modulus::Power { c, alpha };
        m.validate()?;
        Ok(m)
    }

    /// ω(t) = t.
    pub fn lipschitz() -> Self {
        Modulus::Power { c: 1.0, alpha: 1.0 }
    }

    pub fn capped_linear(slope: f64, cap: f64) -> Result<Self> {
        let m = Modulus::CappedLinear { slope, cap };
        m.validate()?;
        Ok(m)
    }

    pub fn tabulated(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let m = Modulus::Tabulated { t, values };
        m.validate()?;
        Ok(m)
    }

    /// Checks parameters, ω(0) = 0, monotonicity and sampled subadditivity.
    pub fn validate(&self) -> Result<()> {
        match self {
            Modulus::Power { c, alpha } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::invalid(format!("power modulus needs c > 0, got {c}")));
                }
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(Error::invalid(format!(
                        "power modulus needs 0 < alpha <= 1, got {alpha}"
                    )));
                }
            }
            Modulus::CappedLinear { slope, cap } => {
                if !(slope.is_finite() && *slope > 0.0 && cap.is_finite() && *cap > 0.0) {
                    return Err(Error::invalid(
                        "capped-linear modulus needs slope > 0 and cap > 0",
                    ));
                }
            }
            Modulus::Tabulated { t, values } => {
                if t.len() != values.len() || t.len() < 2 {
                    return Err(Error::invalid(
                        "tabulated modulus needs at least two (t, value) samples",
                    ));
                }
                if t[0] != 0.0 || values[0] != 0.0 {
                    return Err(Error::invalid("tabulated modulus must start at (0, 0)"));
                }
                if t[t.len() - 1] < 1.0 {
                    return Err(Error::invalid("tabulated modulus must cover [0, 1]"));
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("tabulated abscissae must be strictly increasing"));
                }
                if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::invalid("tabulated modulus must be nondecreasing"));
                }
                self.check_subadditive(200)?;
            }
        }
        Ok(())
    }

    /// ω(s + t) ≤ ω(s) + ω(t) on a k×k grid of pairs with s + t ≤ 1.
    pub fn check_subadditive(&self, k: usize) -> Result<()> {
        for i in 1..=k {
            for j in i..=k {
                let (s, t) = (i as f64 / k as f64, j as f64 / k as f64);
                if s + t > 1.0 {
                    break;
                }
                let lhs = self.value(s + t);
                let rhs = self.value(s) + self.value(t);
                if lhs > rhs + SUBADDITIVE_TOL {
                    return Err(Error::invalid(format!(
                        "modulus is not subadditive: ω({}) = {lhs} > ω({s}) + ω({t}) = {rhs}",
                        s + t
                    )));
                }
            }
        }
        Ok(())
    }

    /// ω(t) for t ≥ 0, without a domain check. Tabulated moduli are held
    /// constant beyond their last sample.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Modulus::Power { c, alpha } => {
                if *alpha == 1.0 {
                    c * t
                } else {
                    c * t.powf(*alpha)
                }
            }
            Modulus::CappedLinear { slope, cap } => (slope * t).min(*cap),
            Modulus::Tabulated { t: ts, values } => interpolate(ts, values, t),
        }
    }

    /// ω(t) for t ∈ [0, 1].
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfDomain {
                value: t,
                domain: "[0, 1]".into(),
            });
        }
        Ok(self.value(t))
    }

    /// ∫₀^x ω(t) dt for x ≥ 0, in closed form.
    pub fn integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Modulus::Power { c, alpha } => c * x.powf(alpha + 1.0) / (alpha + 1.0),
            Modulus::CappedLinear { slope, cap } => {
                let k = cap / slope;
                if x <= k {
                    0.5 * slope * x * x
                } else {
                    0.5 * cap * k + cap * (x - k)
                }
            }
            Modulus::Tabulated { t, values } => {
                let mut acc = 0.0;
                for i in 0..t.len() - 1 {
                    if x <= t[i] {
                        return acc;
                    }
                    let hi = x.min(t[i + 1]);
                    acc += 0.5 * (hi - t[i]) * (values[i] + self.value(hi));
                }
                let last = t.len() - 1;
                acc + values[last] * (x - t[last]).max(0.0)
            }
        }
    }

    /// Interior points of (0, 1] where ω is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Modulus::Power { .. } => Vec::new(),
            Modulus::CappedLinear { slope, cap } => {
                let k = cap / slope;
                if k < 1.0 {
                    vec![k]
                } else {
                    Vec::new()
                }
            }
            Modulus::Tabulated { t, .. } => t.iter().copied().filter(|&x| x > 0.0 && x < 1.0).collect(),
        }
    }

    /// Exponent α when ω is a power law.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            Modulus::Power { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    /// Rejects moduli that are constant on some sampled step of [0, 1].
    ///
    /// Compares ω at consecutive points of a uniform grid with
    /// [`STRICTNESS_PAIRS`] steps.
    pub fn check_strictly_increasing(&self) -> Result<()> {
        let n = STRICTNESS_PAIRS;
        for k in 0..n {
            let (lo, hi) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
            if !(self.value(hi) > self.value(lo)) {
                return Err(Error::NotStrictlyIncreasing { lo, hi });
            }
        }
        Ok(())
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.check_strictly_increasing().is_ok()
    }
}

pub(crate) fn interpolate(ts: &[f64], vs: &[f64], x: f64) -> f64 {
    if x <= ts[0] {
        return vs[0];
    }
    let last = ts.len() - 1;
    if x >= ts[last] {
        return vs[last];
    }
    let i = ts.partition_point(|&t| t <= x) - 1;
    let w = (x - ts[i]) / (ts[i + 1] - ts[i]);
    vs[i] + w * (vs[i + 1] - vs[i])
}
