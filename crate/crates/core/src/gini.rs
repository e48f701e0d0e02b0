//! GD_n and GC_n over quantile functions, affine combinations, Lorenz curves,
//! and a covariance-based Monte Carlo oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distortion::{phi_antiderivative, quantile_weight, DistortionFunction, GiniOrder};
use crate::error::{GiniError, Result};
use crate::numeric::compensated_sum;
use crate::parametric::{open_uniform, ParametricDistribution};
use crate::quadrature::{integrate_graded_at_zero, integrate_unit, QuadratureOptions};
use crate::quantile::{QuantileFunction, StepQuantile};

/// h_n(t) with a domain check on t.
pub fn distortion_h(n: GiniOrder, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GiniError::domain(format!("distortion argument {t} outside [0,1]")));
    }
    Ok(DistortionFunction::canonical(n).eval(t))
}

/// Exact GD_n of a step quantile: Σ q_j (Φ_n(t_j) - Φ_n(t_{j-1})).
pub fn gd_step(q: &StepQuantile, n: GiniOrder) -> f64 {
    if q.is_constant() {
        return 0.0;
    }
    // Subtracting the smallest level removes the constant part exactly
    // (the increments of Φ_n sum to zero) and keeps the sum well conditioned.
    let base = q.min_level();
    let v = compensated_sum(
        q.cells()
            .map(|(a, b, l)| (l - base) * (phi_antiderivative(n, b) - phi_antiderivative(n, a))),
    );
    v.max(0.0)
}

/// Signed Choquet integral of a step quantile against any polynomial distortion:
/// Σ q_j (h(1 - t_{j-1}) - h(1 - t_j)).
pub fn choquet_step(q: &StepQuantile, h: &DistortionFunction) -> f64 {
    compensated_sum(q.cells().map(|(a, b, l)| l * (h.eval(1.0 - a) - h.eval(1.0 - b))))
}

/// ∫ q(t) h'(1-t) dt for a parametric quantile, by quadrature.
pub fn choquet_parametric(
    dist: &ParametricDistribution,
    h: &DistortionFunction,
    opts: &QuadratureOptions,
) -> Result<f64> {
    if let Some(step) = dist.to_step() {
        return Ok(choquet_step(&step, h));
    }
    integrate_unit(|t, tc| dist.quantile_pair(t, tc) * h.derivative(tc), opts)
}

/// GD_n(q). Step quantiles are integrated exactly; parametric ones use the
/// closed form when there is one and quadrature otherwise.
pub fn gd_n(q: &QuantileFunction, n: GiniOrder) -> Result<f64> {
    gd_n_with(q, n, &QuadratureOptions::default())
}

pub fn gd_n_with(q: &QuantileFunction, n: GiniOrder, opts: &QuadratureOptions) -> Result<f64> {
    match q {
        QuantileFunction::Step(s) => Ok(gd_step(s, n)),
        QuantileFunction::Parametric(d) => match d.closed_form_gd(n)? {
            Some(v) => Ok(v),
            None => gd_quadrature(d, n, opts),
        },
    }
}

/// GD_n of a parametric distribution by quadrature of the quantile integral,
/// regardless of whether a closed form exists.
pub fn gd_quadrature(dist: &ParametricDistribution, n: GiniOrder, opts: &QuadratureOptions) -> Result<f64> {
    if let Some(step) = dist.to_step() {
        return Ok(gd_step(&step, n));
    }
    dist.mean()?;
    let v = integrate_unit(|t, tc| dist.quantile_pair(t, tc) * quantile_weight(n, t, tc), opts)?;
    Ok(v.max(0.0))
}

fn check_gc_admissible(q: &QuantileFunction) -> Result<f64> {
    let (lowest, mean) = match q {
        QuantileFunction::Step(s) => (s.min_level(), s.mean()),
        QuantileFunction::Parametric(d) => (d.support().0, d.mean()?),
    };
    if lowest < 0.0 {
        return Err(GiniError::domain("Gini coefficient needs a nonnegative quantile"));
    }
    if !(mean > 0.0) {
        return Err(GiniError::domain("Gini coefficient needs a positive mean"));
    }
    Ok(mean)
}

/// GC_n(q) = GD_n(q) / mean.
pub fn gc_n(q: &QuantileFunction, n: GiniOrder) -> Result<f64> {
    gc_n_with(q, n, &QuadratureOptions::default())
}

pub fn gc_n_with(q: &QuantileFunction, n: GiniOrder, opts: &QuadratureOptions) -> Result<f64> {
    let mean = check_gc_admissible(q)?;
    if let QuantileFunction::Parametric(d) = q {
        if let Some(v) = d.closed_form_gc(n)? {
            return Ok(v);
        }
    }
    Ok(gd_n_with(q, n, opts)? / mean)
}

/// Weights a_1..a_k of Σ a_i GD_i, with GD_1 read as GD_2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiniCombination {
    weights: Vec<f64>,
    simplex: bool,
}

impl GiniCombination {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(GiniError::domain("empty combination weights"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(GiniError::domain("combination weights must be finite"));
        }
        Ok(Self { weights, simplex: false })
    }

    /// Weights on the standard simplex: nonnegative and summing to one.
    pub fn simplex(weights: Vec<f64>) -> Result<Self> {
        let c = Self::new(weights)?;
        let total: f64 = c.weights.iter().sum();
        if c.weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(GiniError::domain("simplex weights must be nonnegative and sum to 1"));
        }
        Ok(Self { simplex: true, ..c })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_simplex(&self) -> bool {
        self.simplex
    }

    /// The equivalent single polynomial distortion.
    pub fn distortion(&self) -> Result<DistortionFunction> {
        DistortionFunction::combination(&self.weights)
    }
}

/// Σ a_i GD_i(q).
pub fn gd_combination(q: &QuantileFunction, w: &GiniCombination) -> Result<f64> {
    let mut terms = Vec::with_capacity(w.weights.len());
    for (i, &a) in w.weights.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let order = GiniOrder::new((i as u32 + 1).max(2))?;
        terms.push(a * gd_n(q, order)?);
    }
    Ok(compensated_sum(terms))
}

/// Lorenz curve L(p) = ∫_0^p q / ∫_0^1 q.
pub fn lorenz(q: &QuantileFunction, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GiniError::domain(format!("Lorenz argument {p} outside [0,1]")));
    }
    let mean = check_gc_admissible(q)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let partial = match q {
        QuantileFunction::Step(s) => s.partial_integral(p),
        QuantileFunction::Parametric(d) => {
            let opts = QuadratureOptions::default();
            if let Some(s) = d.to_step() {
                s.partial_integral(p)
            } else if p <= 0.5 {
                integrate_graded_at_zero(|t| d.quantile_pair(t, 1.0 - t), p, &opts)?
            } else {
                mean - integrate_graded_at_zero(|s| d.quantile_pair(1.0 - s, s), 1.0 - p, &opts)?
            }
        }
    };
    Ok((partial / mean).clamp(0.0, 1.0))
}

/// GC_2 as twice the area between the diagonal and the Lorenz curve,
/// 1 - 2∫L, using ∫_0^1 L(p) dp = ∫_0^1 (1-t) q(t) dt / mean.
pub fn gc_via_lorenz_area(q: &QuantileFunction) -> Result<f64> {
    let mean = check_gc_admissible(q)?;
    let weighted = match q {
        QuantileFunction::Step(s) => compensated_sum(
            s.cells().map(|(a, b, l)| l * ((b - a) - 0.5 * (b * b - a * a))),
        ),
        QuantileFunction::Parametric(d) => match d.to_step() {
            Some(s) => return gc_via_lorenz_area(&QuantileFunction::Step(s)),
            None => integrate_unit(|t, tc| tc * d.quantile_pair(t, tc), &QuadratureOptions::default())?,
        },
    };
    Ok(1.0 - 2.0 * weighted / mean)
}

/// Monte Carlo estimate of Cov(X, U^(n-1) - (1-U)^(n-1)) with X = q(U).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

pub fn gd_n_cov_oracle(dist: &ParametricDistribution, n: GiniOrder, samples: usize, seed: u64) -> Result<f64> {
    Ok(cov_oracle_with_se(dist, n, samples, seed)?.value)
}

pub fn cov_oracle_with_se(
    dist: &ParametricDistribution,
    n: GiniOrder,
    samples: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    if samples < 1 {
        return Err(GiniError::domain("covariance oracle needs at least one sample"));
    }
    dist.mean()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(samples);
    let mut ws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let u = open_uniform(&mut rng);
        xs.push(dist.quantile_pair(u, 1.0 - u));
        ws.push(quantile_weight(n, u, 1.0 - u));
    }
    if samples == 1 {
        return Ok(OracleEstimate { value: 0.0, std_error: f64::INFINITY, samples });
    }
    let mx = crate::numeric::mean(&xs);
    let mw = crate::numeric::mean(&ws);
    let prods: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| (x - mx) * (w - mw)).collect();
    let m = samples as f64;
    let value = compensated_sum(prods.iter().copied()) / (m - 1.0);
    let sd = crate::numeric::sample_variance(&prods).sqrt();
    Ok(OracleEstimate {
        value,
        std_error: sd / m.sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(n: u32) -> GiniOrder {
        GiniOrder::new(n).unwrap()
    }

    fn two_level() -> QuantileFunction {
        StepQuantile::new(vec![0.0, 0.9, 1.0], vec![10.0, 100.0]).unwrap().into()
    }

    #[test]
    fn distortion_h_values() {
        assert_eq!(distortion_h(order(2), 0.0).unwrap(), 0.0);
        assert!((distortion_h(order(2), 0.5).unwrap() - 0.25).abs() < 1e-15);
        let a = distortion_h(order(4), 0.3).unwrap();
        let b = distortion_h(order(4), 0.7).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(distortion_h(order(2), 1.5).is_err());
    }

    #[test]
    fn two_level_step_values() {
        let q = two_level();
        assert!((gd_n(&q, order(2)).unwrap() - 8.1).abs() < 1e-12);
        // 90 (1 - 0.9^10 - 0.1^10) / 10, the n-draw range of a two-point law.
        let want10 = 90.0 * (1.0 - 0.9f64.powi(10) - 0.1f64.powi(10)) / 10.0;
        let gd10 = gd_n(&q, order(10)).unwrap();
        assert!((gd10 - want10).abs() < 1e-12);
        assert!((gd10 - 5.86190).abs() < 1e-5);
        assert!((gc_n(&q, order(2)).unwrap() - 8.1 / 19.0).abs() < 1e-12);
        assert!((gc_n(&q, order(10)).unwrap() - 0.308521).abs() < 1e-6);
    }

    #[test]
    fn constant_quantile_has_zero_dispersion() {
        let q: QuantileFunction = StepQuantile::constant(3.5).into();
        for n in 2..30 {
            assert_eq!(gd_n(&q, order(n)).unwrap(), 0.0);
            assert_eq!(gc_n(&q, order(n)).unwrap(), 0.0);
        }
    }

    #[test]
    fn gc_rejects_negative_or_zero_mean() {
        let neg: QuantileFunction = StepQuantile::new(vec![0.0, 0.5, 1.0], vec![-1.0, 2.0]).unwrap().into();
        assert!(gc_n(&neg, order(2)).is_err());
        let zero: QuantileFunction = StepQuantile::constant(0.0).into();
        assert!(gc_n(&zero, order(2)).is_err());
    }

    #[test]
    fn combinations() {
        let q = two_level();
        let single = GiniCombination::new(vec![0.0, 1.0]).unwrap();
        assert!((gd_combination(&q, &single).unwrap() - 8.1).abs() < 1e-12);
        // GD_1 reads as GD_2.
        let alias = GiniCombination::new(vec![1.0]).unwrap();
        assert!((gd_combination(&q, &alias).unwrap() - 8.1).abs() < 1e-12);
        let half = GiniCombination::simplex(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        let gd4 = gd_n(&q, order(4)).unwrap();
        assert!((gd_combination(&q, &half).unwrap() - (0.5 * 8.1 + 0.5 * gd4)).abs() < 1e-12);
        assert!(GiniCombination::new(vec![]).is_err());
        assert!(GiniCombination::simplex(vec![0.7, 0.7]).is_err());
    }

    #[test]
    fn combination_matches_its_distortion() {
        let s = StepQuantile::new(vec![0.0, 0.2, 0.5, 1.0], vec![1.0, 4.0, 9.0]).unwrap();
        let w = GiniCombination::new(vec![0.0, 2.0, 0.0, -1.0]).unwrap();
        let direct = gd_combination(&s.clone().into(), &w).unwrap();
        let via_h = choquet_step(&s, &w.distortion().unwrap());
        assert!((direct - via_h).abs() < 1e-12);
    }

    #[test]
    fn lorenz_curves() {
        let uniform = ParametricDistribution::beta(1.0, 1.0).unwrap();
        let q: QuantileFunction = uniform.into();
        assert!((lorenz(&q, 0.5).unwrap() - 0.25).abs() < 1e-10);
        assert!((lorenz(&q, 0.8).unwrap() - 0.64).abs() < 1e-10);
        assert!((gc_via_lorenz_area(&q).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        let flat: QuantileFunction = StepQuantile::constant(2.0).into();
        for p in [0.1, 0.33, 0.9] {
            assert!((lorenz(&flat, p).unwrap() - p).abs() < 1e-15);
        }
        let step = two_level();
        assert!((gc_via_lorenz_area(&step).unwrap() - 8.1 / 19.0).abs() < 1e-12);
        assert_eq!(lorenz(&step, 0.0).unwrap(), 0.0);
        assert_eq!(lorenz(&step, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn covariance_oracle_matches_closed_forms() {
        let exp = ParametricDistribution::exponential(1.0).unwrap();
        let v = gd_n_cov_oracle(&exp, order(2), 1_000_000, 7).unwrap();
        assert!((v - 0.5).abs() < 0.005, "{v}");
        let bern = ParametricDistribution::bernoulli(0.3).unwrap();
        let v = gd_n_cov_oracle(&bern, order(4), 1_000_000, 11).unwrap();
        assert!((v - 0.18795).abs() < 0.002, "{v}");
        let again = gd_n_cov_oracle(&bern, order(4), 1_000_000, 11).unwrap();
        assert_eq!(v, again);
        assert!(gd_n_cov_oracle(&exp, order(2), 0, 1).is_err());
    }
}
