//! Parametric families with quantiles, distribution functions, samplers and
//! closed-form GD_n / GC_n where they exist.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distortion::{DistortionFunction, GiniOrder};
use crate::error::{GiniError, Result};
use crate::numeric::harmonic;
use crate::quadrature::QuadratureOptions;
use crate::quantile::StepQuantile;
use crate::special::{
    beta_int_first, inv_reg_inc_beta, ln_beta, normal_cdf, normal_pdf, normal_quantile, reg_inc_beta,
};

/// Uniform draw on the open interval (0, 1) from 53 random bits.
#[inline]
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ParametricDistribution {
    /// P(X = 1) = p, P(X = 0) = 1 - p.
    Bernoulli { p: f64 },
    /// P(X = y) = p, P(X = x) = 1 - p, with x < y.
    #[serde(rename = "twopoint")]
    TwoPoint { x: f64, y: f64, p: f64 },
    Beta { a: f64, b: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
    /// Survival (x_m / x)^alpha on [x_m, ∞).
    Pareto { alpha: f64, xm: f64 },
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(GiniError::domain(msg))
    }
}

fn open_unit(p: f64) -> bool {
    p > 0.0 && p < 1.0
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl ParametricDistribution {
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::Bernoulli { p }.validated()
    }

    pub fn two_point(x: f64, y: f64, p: f64) -> Result<Self> {
        Self::TwoPoint { x, y, p }.validated()
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        Self::Beta { a, b }.validated()
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::LogNormal { mu, sigma }.validated()
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::Exponential { lambda }.validated()
    }

    pub fn pareto(alpha: f64, xm: f64) -> Result<Self> {
        Self::Pareto { alpha, xm }.validated()
    }

    /// Checks parameter ranges; values built through serde should pass through here.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Bernoulli { p } => require(open_unit(p), "Bernoulli p must lie in (0,1)")?,
            Self::TwoPoint { x, y, p } => {
                require(x.is_finite() && y.is_finite() && x < y, "two-point law needs finite x < y")?;
                require(open_unit(p), "two-point p must lie in (0,1)")?;
            }
            Self::Beta { a, b } => require(positive(a) && positive(b), "Beta shapes must be positive")?,
            Self::LogNormal { mu, sigma } => {
                require(mu.is_finite() && positive(sigma), "log-normal needs finite mu and sigma > 0")?
            }
            Self::Exponential { lambda } => require(positive(lambda), "exponential rate must be positive")?,
            Self::Pareto { alpha, xm } => require(positive(alpha) && positive(xm), "Pareto alpha and x_m must be positive")?,
        }
        Ok(self)
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::TwoPoint { .. } => "twopoint",
            Self::Beta { .. } => "beta",
            Self::LogNormal { .. } => "lognormal",
            Self::Exponential { .. } => "exponential",
            Self::Pareto { .. } => "pareto",
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::Bernoulli { .. } | Self::TwoPoint { .. })
    }

    /// Exact step quantile for the discrete families.
    pub fn to_step(&self) -> Option<StepQuantile> {
        let (x, y, p) = match *self {
            Self::Bernoulli { p } => (0.0, 1.0, p),
            Self::TwoPoint { x, y, p } => (x, y, p),
            _ => return None,
        };
        StepQuantile::new(vec![0.0, 1.0 - p, 1.0], vec![x, y]).ok()
    }

    /// Closure of the support, (lowest, highest).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Bernoulli { .. } => (0.0, 1.0),
            Self::TwoPoint { x, y, .. } => (x, y),
            Self::Beta { .. } => (0.0, 1.0),
            Self::LogNormal { .. } | Self::Exponential { .. } => (0.0, f64::INFINITY),
            Self::Pareto { xm, .. } => (xm, f64::INFINITY),
        }
    }

    /// Left quantile F⁻¹(t) for t in (0,1).
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !open_unit(t) {
            return Err(GiniError::domain(format!("quantile level {t} outside (0,1)")));
        }
        if let Self::Beta { a, b } = *self {
            return if t <= 0.5 {
                inv_reg_inc_beta(a, b, t)
            } else {
                Ok(1.0 - inv_reg_inc_beta(b, a, 1.0 - t)?)
            };
        }
        Ok(self.quantile_pair(t, 1.0 - t))
    }

    /// F⁻¹(t) given both `t` and `tc = 1 - t`; the smaller of the two drives
    /// the computation so either tail keeps full relative precision.
    /// Returns NaN if an inner iteration fails to converge.
    pub fn quantile_pair(&self, t: f64, tc: f64) -> f64 {
        match *self {
            Self::Bernoulli { p } => {
                if tc >= p {
                    0.0
                } else {
                    1.0
                }
            }
            Self::TwoPoint { x, y, p } => {
                if tc >= p {
                    x
                } else {
                    y
                }
            }
            Self::Exponential { lambda } => {
                if t < 0.5 {
                    -(-t).ln_1p() / lambda
                } else {
                    -tc.ln() / lambda
                }
            }
            Self::Pareto { alpha, xm } => {
                if t < 0.5 {
                    xm * (-(-t).ln_1p() / alpha).exp()
                } else {
                    xm * tc.powf(-1.0 / alpha)
                }
            }
            Self::LogNormal { mu, sigma } => {
                if t < 0.5 {
                    (mu + sigma * normal_quantile(t)).exp()
                } else {
                    (mu - sigma * normal_quantile(tc)).exp()
                }
            }
            Self::Beta { a, b } => {
                if t <= 0.5 {
                    inv_reg_inc_beta(a, b, t).unwrap_or(f64::NAN)
                } else {
                    inv_reg_inc_beta(b, a, tc).map(|v| 1.0 - v).unwrap_or(f64::NAN)
                }
            }
        }
    }

    /// (F(x), 1 - F(x)), each computed directly for accuracy in its tail.
    /// NaN if the incomplete Beta fails to converge.
    pub fn cdf_pair(&self, x: f64) -> (f64, f64) {
        let (lo, hi) = self.support();
        if x < lo {
            return (0.0, 1.0);
        }
        if x >= hi {
            return (1.0, 0.0);
        }
        match *self {
            Self::Bernoulli { p } => (1.0 - p, p),
            Self::TwoPoint { p, .. } => (1.0 - p, p),
            Self::Exponential { lambda } => {
                let s = (-lambda * x).exp();
                (-(-lambda * x).exp_m1(), s)
            }
            Self::Pareto { alpha, xm } => {
                let s = (xm / x).powf(alpha);
                (-(alpha * (xm / x).ln()).exp_m1(), s)
            }
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    return (0.0, 1.0);
                }
                let z = (x.ln() - mu) / sigma;
                (normal_cdf(z), normal_cdf(-z))
            }
            Self::Beta { a, b } => {
                if x <= 0.5 {
                    let f = reg_inc_beta(a, b, x).unwrap_or(f64::NAN);
                    (f, 1.0 - f)
                } else {
                    let s = reg_inc_beta(b, a, 1.0 - x).unwrap_or(f64::NAN);
                    (1.0 - s, s)
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        let (f, _) = self.cdf_pair(x);
        if f.is_nan() {
            return Err(GiniError::convergence("incomplete Beta evaluation failed"));
        }
        Ok(f)
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        let (_, s) = self.cdf_pair(x);
        if s.is_nan() {
            return Err(GiniError::convergence("incomplete Beta evaluation failed"));
        }
        Ok(s)
    }

    /// Density for the continuous families; None for the discrete ones.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.support();
        if self.is_discrete() {
            return None;
        }
        if x < lo || x > hi {
            return Some(0.0);
        }
        Some(match *self {
            Self::Exponential { lambda } => lambda * (-lambda * x).exp(),
            Self::Pareto { alpha, xm } => alpha * xm.powf(alpha) / x.powf(alpha + 1.0),
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    normal_pdf((x.ln() - mu) / sigma) / (x * sigma)
                }
            }
            Self::Beta { a, b } => {
                ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_beta(a, b)).exp()
            }
            _ => unreachable!(),
        })
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(match *self {
            Self::Bernoulli { p } => p,
            Self::TwoPoint { x, y, p } => (1.0 - p) * x + p * y,
            Self::Beta { a, b } => a / (a + b),
            Self::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Self::Exponential { lambda } => 1.0 / lambda,
            Self::Pareto { alpha, xm } => {
                if alpha <= 1.0 {
                    return Err(GiniError::domain(format!(
                        "Pareto with alpha = {alpha} <= 1 has an infinite mean"
                    )));
                }
                alpha * xm / (alpha - 1.0)
            }
        })
    }

    pub fn variance(&self) -> Result<f64> {
        Ok(match *self {
            Self::Bernoulli { p } => p * (1.0 - p),
            Self::TwoPoint { x, y, p } => p * (1.0 - p) * (y - x) * (y - x),
            Self::Beta { a, b } => a * b / ((a + b) * (a + b) * (a + b + 1.0)),
            Self::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                s2.exp_m1() * (2.0 * mu + s2).exp()
            }
            Self::Exponential { lambda } => 1.0 / (lambda * lambda),
            Self::Pareto { alpha, xm } => {
                if alpha <= 2.0 {
                    return Err(GiniError::domain(format!(
                        "Pareto with alpha = {alpha} <= 2 has an infinite variance"
                    )));
                }
                xm * xm * alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0))
            }
        })
    }

    /// Closed-form GD_n, or None for families without one (Beta, log-normal).
    pub fn closed_form_gd(&self, n: GiniOrder) -> Result<Option<f64>> {
        let h = DistortionFunction::canonical(n);
        Ok(match *self {
            Self::Bernoulli { p } => Some(h.eval(p)),
            Self::TwoPoint { x, y, p } => Some((y - x) * h.eval(p)),
            Self::Exponential { lambda } => Some(harmonic(n.get() - 1) / (n.as_f64() * lambda)),
            Self::Pareto { alpha, xm } => {
                self.mean()?;
                Some(xm * pareto_bracket(n, alpha))
            }
            Self::Beta { .. } | Self::LogNormal { .. } => None,
        })
    }

    /// Closed-form GC_n where one exists. The discrete families use GD_n / mean.
    pub fn closed_form_gc(&self, n: GiniOrder) -> Result<Option<f64>> {
        if self.support().0 < 0.0 {
            return Err(GiniError::domain("Gini coefficient needs a nonnegative distribution"));
        }
        let mean = self.mean()?;
        if !(mean > 0.0) {
            return Err(GiniError::domain("Gini coefficient needs a positive mean"));
        }
        Ok(match *self {
            Self::Exponential { .. } => Some(harmonic(n.get() - 1) / n.as_f64()),
            Self::Pareto { alpha, .. } => Some((alpha - 1.0) / alpha * pareto_bracket(n, alpha)),
            _ => self.closed_form_gd(n)?.map(|gd| gd / mean),
        })
    }

    /// (GD_n, GC_n) by quadrature of the quantile integral. GC_n is None when
    /// the distribution is not nonnegative with positive mean.
    pub fn gd_gc_quadrature(&self, n: GiniOrder) -> Result<(f64, Option<f64>)> {
        self.gd_gc_quadrature_with(n, &QuadratureOptions::default())
    }

    pub fn gd_gc_quadrature_with(&self, n: GiniOrder, opts: &QuadratureOptions) -> Result<(f64, Option<f64>)> {
        let gd = crate::gini::gd_quadrature(self, n, opts)?;
        let mean = self.mean()?;
        let gc = (self.support().0 >= 0.0 && mean > 0.0).then(|| gd / mean);
        Ok((gd, gc))
    }

    /// `count` inverse-transform draws; deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, count)
    }

    pub fn sample_with<R: RngCore + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count)
            .map(|_| {
                let u = open_uniform(rng);
                self.quantile_pair(u, 1.0 - u)
            })
            .collect()
    }
}

/// B(n, 1 - 1/α) - 1/(n - 1/α).
fn pareto_bracket(n: GiniOrder, alpha: f64) -> f64 {
    let b = 1.0 - 1.0 / alpha;
    beta_int_first(n.get(), b) - 1.0 / (n.as_f64() - 1.0 / alpha)
}

impl fmt::Display for ParametricDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            Self::TwoPoint { x, y, p } => write!(f, "twopoint:{x},{y},{p}"),
            Self::Beta { a, b } => write!(f, "beta:{a},{b}"),
            Self::LogNormal { mu, sigma } => write!(f, "lognormal:{mu},{sigma}"),
            Self::Exponential { lambda } => write!(f, "exponential:{lambda}"),
            Self::Pareto { alpha, xm } => write!(f, "pareto:{alpha},{xm}"),
        }
    }
}

/// Parses `family:p1[,p2[,p3]]`, e.g. `pareto:3,2` (alpha, x_m) or
/// `lognormal:0,1` (mu, sigma).
impl FromStr for ParametricDistribution {
    type Err = GiniError;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s
            .split_once(':')
            .ok_or_else(|| GiniError::domain(format!("distribution '{s}' is not of the form family:params")))?;
        let values: Vec<f64> = params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| GiniError::domain(format!("bad parameter '{p}' in '{s}'")))
            })
            .collect::<Result<_>>()?;
        let arity = |k: usize| -> Result<()> {
            if values.len() == k {
                Ok(())
            } else {
                Err(GiniError::domain(format!(
                    "{family} takes {k} parameter(s), got {}",
                    values.len()
                )))
            }
        };
        match family.trim().to_ascii_lowercase().as_str() {
            "bernoulli" => {
                arity(1)?;
                Self::bernoulli(values[0])
            }
            "twopoint" | "two-point" => {
                arity(3)?;
                Self::two_point(values[0], values[1], values[2])
            }
            "beta" => {
                arity(2)?;
                Self::beta(values[0], values[1])
            }
            "lognormal" | "log-normal" => {
                arity(2)?;
                Self::lognormal(values[0], values[1])
            }
            "exponential" | "exp" => {
                arity(1)?;
                Self::exponential(values[0])
            }
            "pareto" => {
                arity(2)?;
                Self::pareto(values[0], values[1])
            }
            other => Err(GiniError::domain(format!("unknown distribution family '{other}'"))),
        }
    }
}
