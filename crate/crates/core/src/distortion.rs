//! Distortion functions: the canonical concave weight
//! h_n(t) = (1 - t^n - (1-t)^n) / n and general polynomial distortions.

use serde::{Deserialize, Serialize};

use crate::error::{GiniError, Result};
use crate::numeric::{binomial, pow_unit};

/// Number of independent draws behind a higher-order Gini index; at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct GiniOrder(u32);

impl GiniOrder {
    pub const CLASSICAL: GiniOrder = GiniOrder(2);

    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(GiniError::domain(format!("Gini order must be at least 2, got {n}")));
        }
        Ok(GiniOrder(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl TryFrom<u32> for GiniOrder {
    type Error = GiniError;
    fn try_from(n: u32) -> Result<Self> {
        GiniOrder::new(n)
    }
}

impl From<GiniOrder> for u32 {
    fn from(n: GiniOrder) -> u32 {
        n.0
    }
}

impl std::fmt::Display for GiniOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 1 - (1 - small)^n, accurate when `small` is tiny.
#[inline]
fn one_minus_pow_complement(small: f64, n: u32) -> f64 {
    -(n as f64 * (-small).ln_1p()).exp_m1()
}

/// The weight t^(n-1) - (1-t)^(n-1) that h_n'(1-t) places on the quantile at `t`.
#[inline]
pub fn quantile_weight(n: GiniOrder, t: f64, tc: f64) -> f64 {
    let k = n.get() - 1;
    pow_unit(t, k) - pow_unit(tc, k)
}

/// Antiderivative of the quantile weight: Φ_n(t) = (t^n + (1-t)^n) / n.
#[inline]
pub fn phi_antiderivative(n: GiniOrder, t: f64) -> f64 {
    let k = n.get();
    (pow_unit(t, k) + pow_unit(1.0 - t, k)) / n.as_f64()
}

/// A distortion h: [0,1] → ℝ with h(0) = 0.
#[derive(Debug, Clone, PartialEq)]
pub enum DistortionFunction {
    /// h_n(t) = (1 - t^n - (1-t)^n) / n.
    Canonical(GiniOrder),
    /// h(t) = Σ_{i≥1} c_i t^i; `coefficients[0]` is c_1.
    Polynomial(Vec<f64>),
}

impl DistortionFunction {
    pub fn canonical(n: GiniOrder) -> Self {
        DistortionFunction::Canonical(n)
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(GiniError::domain("polynomial distortion needs at least one coefficient"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(GiniError::domain("polynomial distortion coefficients must be finite"));
        }
        Ok(DistortionFunction::Polynomial(coefficients))
    }

    /// Σ a_i h_i with GD_1 read as GD_2, as a single polynomial distortion.
    pub fn combination(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(GiniError::domain("empty combination weights"));
        }
        let degree = weights.len().max(2);
        let mut coeffs = vec![0.0; degree];
        for (i, &a) in weights.iter().enumerate() {
            let order = GiniOrder::new((i as u32 + 1).max(2))?;
            for (k, c) in DistortionFunction::Canonical(order).power_coefficients().iter().enumerate() {
                coeffs[k] += a * c;
            }
        }
        DistortionFunction::polynomial(coeffs)
    }

    /// Polynomial degree.
    pub fn degree(&self) -> usize {
        match self {
            DistortionFunction::Canonical(n) => n.get() as usize,
            DistortionFunction::Polynomial(c) => c.len(),
        }
    }

    /// h(t).
    pub fn eval(&self, t: f64) -> f64 {
        let tc = 1.0 - t;
        match self {
            DistortionFunction::Canonical(n) => {
                let small = t.min(tc);
                (one_minus_pow_complement(small, n.get()) - pow_unit(small, n.get())) / n.as_f64()
            }
            DistortionFunction::Polynomial(c) => {
                if t <= 0.5 {
                    t * horner(c, t)
                } else {
                    let a = self.complement_coefficients();
                    a[0] + tc * horner(&a[1..], tc)
                }
            }
        }
    }

    /// h'(t).
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            DistortionFunction::Canonical(n) => {
                let k = n.get() - 1;
                pow_unit(1.0 - t, k) - pow_unit(t, k)
            }
            DistortionFunction::Polynomial(c) => {
                let d: Vec<f64> = c.iter().enumerate().map(|(i, ci)| (i + 1) as f64 * ci).collect();
                horner(&d, t)
            }
        }
    }

    /// Coefficients c_1..c_d of h in powers of t (c_0 = 0 is implied).
    pub fn power_coefficients(&self) -> Vec<f64> {
        match self {
            DistortionFunction::Canonical(n) => {
                let n = n.get();
                let nf = n as f64;
                (1..=n)
                    .map(|k| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        let mut c = -binomial(n, k) * sign / nf;
                        if k == n {
                            c -= 1.0 / nf;
                        }
                        c
                    })
                    .collect()
            }
            DistortionFunction::Polynomial(c) => c.clone(),
        }
    }

    /// Coefficients a_0..a_d with h(t) = Σ a_i (1-t)^i.
    pub fn complement_coefficients(&self) -> Vec<f64> {
        let c = self.power_coefficients();
        let d = c.len();
        let mut a = vec![0.0; d + 1];
        // t^k = (1 - u)^k = Σ_j C(k,j) (-u)^j
        for (idx, ck) in c.iter().enumerate() {
            let k = idx as u32 + 1;
            for j in 0..=k {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                a[j as usize] += ck * binomial(k, j) * sign;
            }
        }
        a
    }

    /// Symmetric distortions satisfy h(t) = h(1-t); checked on a grid.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..=200).all(|i| {
            let t = i as f64 / 200.0;
            (self.eval(t) - self.eval(1.0 - t)).abs() <= tol
        })
    }

    /// Concavity on [0,1], checked via second differences on a grid.
    pub fn is_concave(&self, tol: f64) -> bool {
        let m = 400;
        let h = 1.0 / m as f64;
        (1..m).all(|i| {
            let t = i as f64 * h;
            self.eval(t - h) - 2.0 * self.eval(t) + self.eval(t + h) <= tol
        })
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}
