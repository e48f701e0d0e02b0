//! Multi-observation score functions for GD_n and GC_n, empirical risk
//! minimization, and comparative backtests between two forecasts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distortion::{DistortionFunction, GiniOrder};
use crate::error::{GiniError, Result};
use crate::numeric::{compensated_sum, sample_variance};
use crate::parametric::ParametricDistribution;
use crate::special::normal_cdf;

/// n iid observations scored jointly; n >= 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationTuple(Vec<f64>);

impl ObservationTuple {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(GiniError::domain("an observation tuple needs at least 2 values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GiniError::domain("observation tuples must be finite"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .0
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }
}

/// Splits a stream into consecutive disjoint tuples of length `n`; a short
/// remainder is dropped.
pub fn chunk_tuples(stream: &[f64], n: usize) -> Result<Vec<ObservationTuple>> {
    stream.chunks_exact(n).map(|c| ObservationTuple::new(c.to_vec())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ScoreVariant {
    /// (n x - range)^2.
    GdM2 { n: GiniOrder },
    /// n x^2 - 2 x range.
    GdM1 { n: GiniOrder },
    /// x^2 y_1 - (2x/n) range.
    GcM1 { n: GiniOrder },
    /// (x + Σ a_i max(y_1..y_i))^2, one coefficient per observation.
    PolyDistortion { coefficients: Vec<f64> },
}

impl ScoreVariant {
    pub fn poly(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(GiniError::domain("polynomial score needs at least 2 coefficients"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(GiniError::domain("polynomial score coefficients must be finite"));
        }
        Ok(Self::PolyDistortion { coefficients })
    }

    /// Number of observations per tuple.
    pub fn arity(&self) -> usize {
        match self {
            Self::GdM2 { n } | Self::GdM1 { n } | Self::GcM1 { n } => n.get() as usize,
            Self::PolyDistortion { coefficients } => coefficients.len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::GdM2 { .. } => "gd-m2",
            Self::GdM1 { .. } => "gd-m1",
            Self::GcM1 { .. } => "gc-m1",
            Self::PolyDistortion { .. } => "poly",
        }
    }

    fn check(&self, obs: &ObservationTuple) -> Result<()> {
        if obs.len() != self.arity() {
            return Err(GiniError::Arity {
                expected: self.arity(),
                got: obs.len(),
            });
        }
        Ok(())
    }
}

fn poly_statistic(coefficients: &[f64], obs: &[f64]) -> f64 {
    let mut running = f64::NEG_INFINITY;
    compensated_sum(coefficients.iter().zip(obs).map(|(a, &y)| {
        running = running.max(y);
        a * running
    }))
}

/// S(x, y_1..y_n) for the chosen variant.
pub fn score(variant: &ScoreVariant, x: f64, obs: &ObservationTuple) -> Result<f64> {
    variant.check(obs)?;
    Ok(score_unchecked(variant, x, obs.values()))
}

fn score_unchecked(variant: &ScoreVariant, x: f64, y: &[f64]) -> f64 {
    let range = || {
        let (lo, hi) = y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    match variant {
        ScoreVariant::GdM2 { n } => {
            let d = n.as_f64() * x - range();
            d * d
        }
        ScoreVariant::GdM1 { n } => n.as_f64() * x * x - 2.0 * x * range(),
        ScoreVariant::GcM1 { n } => x * x * y[0] - 2.0 * x / n.as_f64() * range(),
        ScoreVariant::PolyDistortion { coefficients } => {
            let d = x + poly_statistic(coefficients, y);
            d * d
        }
    }
}

fn check_tuples(variant: &ScoreVariant, tuples: &[ObservationTuple]) -> Result<()> {
    if tuples.is_empty() {
        return Err(GiniError::domain("no observation tuples"));
    }
    tuples.iter().try_for_each(|t| variant.check(t))
}

/// Mean score of forecast `x` over the tuples.
pub fn empirical_risk(variant: &ScoreVariant, x: f64, tuples: &[ObservationTuple]) -> Result<f64> {
    check_tuples(variant, tuples)?;
    let scores: Vec<f64> = tuples.par_iter().map(|t| score_unchecked(variant, x, t.values())).collect();
    Ok(compensated_sum(scores) / tuples.len() as f64)
}

fn mean_of<F: Fn(&ObservationTuple) -> f64 + Sync + Send>(tuples: &[ObservationTuple], f: F) -> f64 {
    let v: Vec<f64> = tuples.par_iter().map(f).collect();
    compensated_sum(v) / tuples.len() as f64
}

/// Exact minimizer of the empirical risk.
pub fn erm_minimize(variant: &ScoreVariant, tuples: &[ObservationTuple]) -> Result<f64> {
    check_tuples(variant, tuples)?;
    Ok(match variant {
        ScoreVariant::GdM2 { n } | ScoreVariant::GdM1 { n } => mean_of(tuples, |t| t.range()) / n.as_f64(),
        ScoreVariant::GcM1 { n } => {
            let m1 = mean_of(tuples, |t| t.values()[0]);
            if !(m1 > 0.0) {
                return Err(GiniError::domain("GC score needs a positive mean of the first observation"));
            }
            mean_of(tuples, |t| t.range()) / n.as_f64() / m1
        }
        ScoreVariant::PolyDistortion { coefficients } => {
            -mean_of(tuples, |t| poly_statistic(coefficients, t.values()))
        }
    })
}

/// Per-tuple (A, B) with S(x) = A x^2 + B x + C; every variant is quadratic in x.
fn quadratic_coefficients(variant: &ScoreVariant, y: &[f64]) -> (f64, f64) {
    let range = || {
        let (lo, hi) = y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    match variant {
        ScoreVariant::GdM2 { n } => {
            let nf = n.as_f64();
            (nf * nf, -2.0 * nf * range())
        }
        ScoreVariant::GdM1 { n } => (n.as_f64(), -2.0 * range()),
        ScoreVariant::GcM1 { n } => (y[0], -2.0 / n.as_f64() * range()),
        ScoreVariant::PolyDistortion { coefficients } => (1.0, 2.0 * poly_statistic(coefficients, y)),
    }
}

/// Mean of S(c) - S(d), evaluated in factored form so it stays accurate
/// when c and d are close.
pub fn empirical_risk_difference(variant: &ScoreVariant, c: f64, d: f64, tuples: &[ObservationTuple]) -> Result<f64> {
    check_tuples(variant, tuples)?;
    let sum = c + d;
    let terms: Vec<f64> = tuples
        .par_iter()
        .map(|t| {
            let (a, b) = quadratic_coefficients(variant, t.values());
            a * sum + b
        })
        .collect();
    Ok((c - d) * compensated_sum(terms) / tuples.len() as f64)
}

/// Golden-section search for the empirical risk minimizer on a bracket wide
/// enough to contain it for every variant.
pub fn erm_golden_section(variant: &ScoreVariant, tuples: &[ObservationTuple], tol: f64) -> Result<f64> {
    check_tuples(variant, tuples)?;
    let range_max = tuples.iter().map(|t| t.range()).fold(0.0, f64::max);
    let spread = tuples
        .iter()
        .flat_map(|t| t.values().iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let weight = match variant {
        ScoreVariant::PolyDistortion { coefficients } => coefficients.iter().map(|c| c.abs()).sum(),
        _ => 1.0,
    };
    let mut pad = 1.0 + range_max + weight * spread;
    let lower = |c: f64, d: f64| empirical_risk_difference(variant, c, d, tuples).map(|v| v < 0.0);
    // Widen until the risk rises toward both ends.
    while lower(pad, 0.5 * pad)? || lower(-pad, -0.5 * pad)? {
        pad *= 2.0;
        if !pad.is_finite() {
            return Err(GiniError::convergence("empirical risk has no bounded minimizer"));
        }
    }
    let (mut a, mut b) = (-pad, pad);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while (b - a).abs() > tol * (1.0 + 0.5 * (a + b).abs()) {
        if lower(c, d)? {
            b = d;
            d = c;
            c = b - inv_phi * (b - a);
        } else {
            a = c;
            c = d;
            d = a + inv_phi * (b - a);
        }
    }
    Ok(0.5 * (a + b))
}

/// Monte Carlo standard error of the ERM minimizer.
pub fn erm_standard_error(variant: &ScoreVariant, tuples: &[ObservationTuple]) -> Result<f64> {
    check_tuples(variant, tuples)?;
    let m = tuples.len() as f64;
    let per_tuple: Vec<f64> = match variant {
        ScoreVariant::GdM2 { n } | ScoreVariant::GdM1 { n } => {
            tuples.iter().map(|t| t.range() / n.as_f64()).collect()
        }
        ScoreVariant::GcM1 { n } => {
            // Delta method for a ratio of means.
            let est = erm_minimize(variant, tuples)?;
            let m1 = mean_of(tuples, |t| t.values()[0]);
            tuples
                .iter()
                .map(|t| (t.range() / n.as_f64() - est * t.values()[0]) / m1)
                .collect()
        }
        ScoreVariant::PolyDistortion { coefficients } => tuples
            .iter()
            .map(|t| -poly_statistic(coefficients, t.values()))
            .collect(),
    };
    Ok((sample_variance(&per_tuple) / m).sqrt())
}

/// Coefficients of h_n in powers of (1 - t), without the constant term:
/// h_n(t) = Σ_{k=1}^{n} a_k (1-t)^k.
pub fn complement_expansion(n: GiniOrder) -> Vec<f64> {
    DistortionFunction::canonical(n).complement_coefficients()[1..].to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedOrderCheck {
    pub n: GiniOrder,
    /// Score coefficients a_1..a_{n-1}.
    pub coefficients: Vec<f64>,
    /// The (1-t)^n coefficient, zero for odd n.
    pub dropped_coefficient: f64,
    pub tuples: usize,
    pub minimizer: f64,
    pub std_error: f64,
    /// GD_n of the generating distribution.
    pub truth: f64,
}

/// Score coefficients of order n-1 that elicit GD_n for odd n.
pub fn reduced_order_coefficients(n: GiniOrder) -> Result<(Vec<f64>, f64)> {
    if n.get().is_multiple_of(2) || n.get() < 3 {
        return Err(GiniError::domain(format!(
            "the (n-1)-observation construction needs an odd order n >= 3, got {n}"
        )));
    }
    let mut a = complement_expansion(n);
    let dropped = a.pop().unwrap_or(0.0);
    if dropped.abs() > 1e-12 {
        return Err(GiniError::domain(format!(
            "top coefficient of h_{n} is {dropped}, expected zero"
        )));
    }
    Ok((a, dropped))
}

/// Builds the (n-1)-observation score for GD_n (n odd), fits it by ERM on
/// `tuple_count` tuples drawn from `dist`, and returns the fit with its truth.
pub fn check_n_minus_1_elicitability(
    n: GiniOrder,
    dist: &ParametricDistribution,
    tuple_count: usize,
    seed: u64,
) -> Result<ReducedOrderCheck> {
    let (coefficients, dropped) = reduced_order_coefficients(n)?;
    if tuple_count < 2 {
        return Err(GiniError::domain("need at least 2 tuples"));
    }
    let k = coefficients.len();
    let stream = dist.sample(tuple_count * k, seed);
    let tuples = chunk_tuples(&stream, k)?;
    let variant = ScoreVariant::poly(coefficients.clone())?;
    let minimizer = erm_minimize(&variant, &tuples)?;
    let std_error = erm_standard_error(&variant, &tuples)?;
    let truth = crate::gini::gd_n(&crate::quantile::QuantileFunction::Parametric(*dist), n)?;
    Ok(ReducedOrderCheck {
        n,
        coefficients,
        dropped_coefficient: dropped,
        tuples: tuples.len(),
        minimizer,
        std_error,
        truth,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub variant: String,
    pub n: usize,
    pub forecast_a: f64,
    pub forecast_b: f64,
    pub mean_score_a: f64,
    pub mean_score_b: f64,
    /// Mean of S(a) - S(b); negative favors forecast a.
    pub mean_diff: f64,
    /// None when every difference is identical (zero variance).
    pub t_statistic: Option<f64>,
    pub tuples: usize,
    pub degenerate: bool,
}

impl BacktestReport {
    /// Two-sided p-value from the normal approximation.
    pub fn p_value(&self) -> Option<f64> {
        self.t_statistic.map(|t| 2.0 * normal_cdf(-t.abs()))
    }
}

pub fn comparative_backtest(
    variant: &ScoreVariant,
    forecast_a: f64,
    forecast_b: f64,
    tuples: &[ObservationTuple],
) -> Result<BacktestReport> {
    check_tuples(variant, tuples)?;
    if tuples.len() < 2 {
        return Err(GiniError::domain("a backtest needs at least 2 tuples"));
    }
    let pairs: Vec<(f64, f64)> = tuples
        .par_iter()
        .map(|t| {
            (
                score_unchecked(variant, forecast_a, t.values()),
                score_unchecked(variant, forecast_b, t.values()),
            )
        })
        .collect();
    let m = pairs.len() as f64;
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let mean_diff = compensated_sum(diffs.iter().copied()) / m;
    let var = sample_variance(&diffs);
    let degenerate = !(var > 0.0);
    Ok(BacktestReport {
        variant: variant.name().to_string(),
        n: variant.arity(),
        forecast_a,
        forecast_b,
        mean_score_a: compensated_sum(pairs.iter().map(|p| p.0)) / m,
        mean_score_b: compensated_sum(pairs.iter().map(|p| p.1)) / m,
        mean_diff,
        t_statistic: (!degenerate).then(|| mean_diff / (var / m).sqrt()),
        tuples: pairs.len(),
        degenerate,
    })
}
