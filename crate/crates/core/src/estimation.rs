//! Sample estimators of GD_n / GC_n, their asymptotic variances, bootstrap
//! intervals, and a seeded Monte Carlo harness for sampling distributions.

use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distortion::{phi_antiderivative, quantile_weight, GiniOrder};
use crate::error::{GiniError, Result};
use crate::gini::{gc_n, gd_n};
use crate::numeric::{compensated_sum, pow_unit, sample_variance, sorted_quantile};
use crate::parametric::ParametricDistribution;
use crate::quadrature::GaussLegendre;
use crate::quantile::QuantileFunction;
use crate::special::{normal_cdf, normal_quantile};

/// Order statistics X_(1) <= ... <= X_(N), N >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Sorts the values; rejects non-finite entries and N < 2.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(GiniError::domain(format!("a sample needs at least 2 values, got {}", values.len())));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(GiniError::domain(format!("sample contains non-finite value {bad}")));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Reads newline-delimited decimal numbers; blank lines and `#` comments are skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let v: f64 = text.parse().map_err(|_| GiniError::Parse {
                line: i + 1,
                message: format!("'{text}' is not a decimal number"),
            })?;
            values.push(v);
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        crate::numeric::mean(&self.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    /// Rank i weighted by ((i/N)^(n-1) - (1 - i/N)^(n-1)) / N.
    #[default]
    Pointwise,
    /// Rank i weighted by Φ_n(i/N) - Φ_n((i-1)/N); the exact plug-in.
    ExactChoquet,
}

impl std::str::FromStr for WeightScheme {
    type Err = GiniError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "pointwise" => Ok(Self::Pointwise),
            "exact" | "exact-choquet" => Ok(Self::ExactChoquet),
            _ => Err(GiniError::domain(format!("unknown weight scheme '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Gd,
    Gc,
}

impl std::str::FromStr for Target {
    type Err = GiniError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gd" => Ok(Self::Gd),
            "gc" => Ok(Self::Gc),
            _ => Err(GiniError::domain(format!("unknown target '{s}', expected gd or gc"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InferenceMethod {
    PluginAsymptotic,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub target: Target,
    pub order: GiniOrder,
    pub sample_size: usize,
    pub point: f64,
    pub scheme: WeightScheme,
    pub std_error: f64,
    pub ci_level: f64,
    pub ci: (f64, f64),
    pub method: InferenceMethod,
    pub replications: Option<usize>,
}

/// Per-rank weights for a sample of size `size`.
pub fn rank_weights(size: usize, n: GiniOrder, scheme: WeightScheme) -> Vec<f64> {
    let nf = size as f64;
    match scheme {
        WeightScheme::Pointwise => (1..=size)
            .map(|i| {
                let t = i as f64 / nf;
                quantile_weight(n, t, 1.0 - t) / nf
            })
            .collect(),
        WeightScheme::ExactChoquet => (1..=size)
            .map(|i| phi_antiderivative(n, i as f64 / nf) - phi_antiderivative(n, (i - 1) as f64 / nf))
            .collect(),
    }
}

fn weighted(sorted: &[f64], weights: &[f64]) -> f64 {
    compensated_sum(sorted.iter().zip(weights).map(|(x, w)| x * w))
}

fn gd_sorted(sorted: &[f64], n: GiniOrder, scheme: WeightScheme) -> f64 {
    weighted(sorted, &rank_weights(sorted.len(), n, scheme))
}

fn check_gc_sample(sorted: &[f64]) -> Result<f64> {
    if sorted[0] < 0.0 {
        return Err(GiniError::domain("Gini coefficient estimate needs nonnegative values"));
    }
    let mean = crate::numeric::mean(sorted);
    if !(mean > 0.0) {
        return Err(GiniError::domain("Gini coefficient estimate needs a positive sample mean"));
    }
    Ok(mean)
}

pub fn estimate_gd(s: &Sample, n: GiniOrder, scheme: WeightScheme) -> f64 {
    gd_sorted(&s.values, n, scheme)
}

pub fn estimate_gc(s: &Sample, n: GiniOrder, scheme: WeightScheme) -> Result<f64> {
    let mean = check_gc_sample(&s.values)?;
    Ok(estimate_gd(s, n, scheme) / mean)
}

fn estimate_sorted(sorted: &[f64], n: GiniOrder, scheme: WeightScheme, target: Target) -> Result<f64> {
    match target {
        Target::Gd => Ok(gd_sorted(sorted, n, scheme)),
        Target::Gc => {
            let mean = check_gc_sample(sorted)?;
            Ok(gd_sorted(sorted, n, scheme) / mean)
        }
    }
}

pub fn estimate(s: &Sample, n: GiniOrder, scheme: WeightScheme, target: Target) -> Result<f64> {
    estimate_sorted(&s.values, n, scheme, target)
}

/// Plug-in asymptotic variance: the double integral evaluated on the
/// empirical quantile, whose increments are the spacings at t_i = i/N.
pub fn plugin_variance(s: &Sample, n: GiniOrder, target: Target) -> Result<f64> {
    let x = &s.values;
    let size = x.len() as f64;
    let (shift, scale) = match target {
        Target::Gd => (0.0, 1.0),
        Target::Gc => {
            let mean = check_gc_sample(x)?;
            (estimate_gd(s, n, WeightScheme::ExactChoquet) / mean, 1.0 / mean)
        }
    };
    // σ² = Σ_j a_j (1 - t_j) (2 Σ_{i<j} a_i t_i + a_j t_j), a_i = J(t_i) Δ_i.
    let mut prefix = 0.0;
    let mut terms = Vec::with_capacity(x.len());
    for i in 1..x.len() {
        let t = i as f64 / size;
        let a = (quantile_weight(n, t, 1.0 - t) - shift) * scale * (x[i] - x[i - 1]);
        terms.push(a * (1.0 - t) * (2.0 * prefix + a * t));
        prefix += a * t;
    }
    Ok(compensated_sum(terms).max(0.0))
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(GiniError::domain(format!("confidence level {level} outside (0,1)")));
    }
    Ok(())
}

/// Point estimate with a normal interval from the plug-in asymptotic variance.
pub fn plugin_asymptotic_ci(
    s: &Sample,
    n: GiniOrder,
    target: Target,
    scheme: WeightScheme,
    level: f64,
) -> Result<EstimateReport> {
    check_level(level)?;
    let point = estimate(s, n, scheme, target)?;
    let se = (plugin_variance(s, n, target)? / s.len() as f64).sqrt();
    let z = normal_quantile(0.5 + 0.5 * level);
    Ok(EstimateReport {
        target,
        order: n,
        sample_size: s.len(),
        point,
        scheme,
        std_error: se,
        ci_level: level,
        ci: (point - z * se, point + z * se),
        method: InferenceMethod::PluginAsymptotic,
        replications: None,
    })
}

/// Generator for replication `index` under `seed`: one ChaCha stream per replication.
pub fn replication_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Percentile bootstrap. Each replicate resamples N values with replacement;
/// the resample is assembled in sorted order from multiplicity counts.
#[allow(clippy::too_many_arguments)]
pub fn bootstrap_ci(
    s: &Sample,
    n: GiniOrder,
    target: Target,
    scheme: WeightScheme,
    level: f64,
    replications: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_level(level)?;
    if replications < 1 {
        return Err(GiniError::domain("bootstrap needs at least one replication"));
    }
    let point = estimate(s, n, scheme, target)?;
    let size = s.len();
    let weights = rank_weights(size, n, scheme);
    let mut estimates: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r);
            let mut counts = vec![0u32; size];
            for _ in 0..size {
                counts[rng.gen_range(0..size)] += 1;
            }
            let mut resample = Vec::with_capacity(size);
            for (v, &c) in s.values.iter().zip(&counts) {
                resample.extend(std::iter::repeat_n(*v, c as usize));
            }
            let gd = weighted(&resample, &weights);
            match target {
                Target::Gd => Ok(gd),
                Target::Gc => Ok(gd / check_gc_sample(&resample)?),
            }
        })
        .collect::<Result<_>>()?;
    let se = sample_variance(&estimates).sqrt();
    estimates.sort_unstable_by(f64::total_cmp);
    let lo = sorted_quantile(&estimates, 0.5 - 0.5 * level);
    let hi = sorted_quantile(&estimates, 0.5 + 0.5 * level);
    Ok(EstimateReport {
        target,
        order: n,
        sample_size: size,
        point,
        scheme,
        std_error: se,
        ci_level: level,
        ci: (lo, hi),
        method: InferenceMethod::Bootstrap,
        replications: Some(replications),
    })
}

/// Which variable the inner cumulative integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegrationOrder {
    /// 2 ∫ g S(y) [∫_{a}^{y} g F dx] dy.
    #[default]
    InnerLower,
    /// 2 ∫ g F(x) [∫_{x}^{b} g S dy] dx.
    InnerUpper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceOptions {
    pub delta_start: f64,
    pub delta_min: f64,
    /// Relative change between successive halvings that certifies convergence.
    pub rel_tol: f64,
    /// Equal x-space sub-panels per quantile-graded segment.
    pub subpanels: usize,
    pub order: IntegrationOrder,
}

impl Default for VarianceOptions {
    fn default() -> Self {
        Self {
            delta_start: 1e-6,
            delta_min: 1e-12,
            rel_tol: 1e-4,
            subpanels: 4,
            order: IntegrationOrder::InnerLower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceReport {
    pub value: f64,
    /// Truncation level at which the result was accepted.
    pub delta: f64,
    /// Relative change against the previous truncation level.
    pub rel_change: f64,
    pub halvings: u32,
    /// True when plain halving did not settle by `delta_min` and the value is
    /// the Aitken extrapolation of the halving sequence.
    pub extrapolated: bool,
}

fn check_variance_admissible(dist: &ParametricDistribution) -> Result<()> {
    if dist.is_discrete() {
        return Err(GiniError::AssumptionViolated(format!(
            "{} has no positive density on a convex support",
            dist.family()
        )));
    }
    if let ParametricDistribution::Pareto { alpha, .. } = *dist {
        if alpha <= 2.0 {
            return Err(GiniError::AssumptionViolated(format!(
                "Pareto with alpha = {alpha} <= 2 lacks the moments the central limit theorem needs"
            )));
        }
    }
    Ok(())
}

/// ∫∫ g(x) g(y) (F(x∧y) - F(x)F(y)) dx dy over [F⁻¹(δ), F⁻¹(1-δ)]², where
/// g(x) = weight(F(x), S(x)).
fn truncated_variance<W: Fn(f64, f64) -> f64>(
    dist: &ParametricDistribution,
    weight: &W,
    delta: f64,
    opts: &VarianceOptions,
) -> Result<f64> {
    // Knots graded geometrically in probability toward both ends.
    let mut knots: Vec<(f64, f64)> = Vec::new();
    let mut t = delta;
    while t < 0.5 {
        knots.push((t, 1.0 - t));
        t *= 2.0;
    }
    knots.push((0.5, 0.5));
    let upper_start = knots.len();
    let mut s = delta;
    while s < 0.5 {
        knots.push((1.0 - s, s));
        s *= 2.0;
    }
    knots[upper_start..].reverse();
    let xs: Vec<f64> = knots.iter().map(|&(t, tc)| dist.quantile_pair(t, tc)).collect();
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(GiniError::convergence("quantile evaluation failed inside the variance integral"));
    }
    let mut panels = Vec::new();
    for w in xs.windows(2) {
        let h = (w[1] - w[0]) / opts.subpanels as f64;
        for k in 0..opts.subpanels {
            panels.push((w[0] + h * k as f64, w[0] + h * (k + 1) as f64));
        }
    }
    let rule = GaussLegendre::standard();
    let eval = |x: f64| -> (f64, f64, f64) {
        let (f, s) = dist.cdf_pair(x);
        (weight(f, s), f, s)
    };
    // inner(x) is the integrand accumulated in the cumulative integral,
    // outer(x) multiplies it.
    type Term = fn(f64, f64, f64) -> f64;
    let (inner, outer): (Term, Term) = match opts.order {
        IntegrationOrder::InnerLower => (|g, f, _| g * f, |g, _, s| g * s),
        IntegrationOrder::InnerUpper => (|g, _, s| g * s, |g, f, _| g * f),
    };
    let ordered: Vec<(f64, f64)> = match opts.order {
        IntegrationOrder::InnerLower => panels,
        IntegrationOrder::InnerUpper => panels.into_iter().rev().map(|(a, b)| (b, a)).collect(),
    };
    let mut cumulative = 0.0;
    let mut total = Vec::with_capacity(ordered.len());
    for (start, end) in ordered {
        let mut panel = 0.0;
        for (node, w) in rule.nodes().iter().zip(rule.weights()) {
            let y = 0.5 * (start + end) + 0.5 * (end - start) * node;
            let (g, f, s) = eval(y);
            let partial = rule.apply(start, y, |x| {
                let (g, f, s) = eval(x);
                inner(g, f, s)
            });
            panel += w * outer(g, f, s) * (cumulative + partial);
        }
        // Signed panel width makes the reversed order come out positive too.
        total.push(panel * 0.5 * (end - start));
        cumulative += rule.apply(start, end, |x| {
            let (g, f, s) = eval(x);
            inner(g, f, s)
        });
    }
    let v = 2.0 * compensated_sum(total);
    if !v.is_finite() {
        return Err(GiniError::convergence("non-finite variance integrand"));
    }
    Ok(v)
}

fn halving_variance<W: Fn(f64, f64) -> f64>(
    dist: &ParametricDistribution,
    weight: W,
    opts: &VarianceOptions,
) -> Result<VarianceReport> {
    let mut delta = opts.delta_start;
    let mut history = vec![truncated_variance(dist, &weight, delta, opts)?];
    let mut extrapolated: Vec<f64> = Vec::new();
    let mut halvings = 0;
    loop {
        delta *= 0.5;
        halvings += 1;
        let cur = truncated_variance(dist, &weight, delta, opts)?;
        let prev = *history.last().unwrap();
        history.push(cur);
        let rel = relative_change(cur, prev);
        if rel < opts.rel_tol {
            return Ok(VarianceReport {
                value: cur.max(0.0),
                delta,
                rel_change: rel,
                halvings,
                extrapolated: false,
            });
        }
        if let [a, b, c] = history[history.len().saturating_sub(3)..] {
            // Power-law tails leave a geometric truncation error; Aitken's Δ²
            // removes it without knowing the exponent.
            let (d1, d2) = (b - a, c - b);
            if d1 != d2 && (d2 / d1) > 0.0 && (d2 / d1) < 1.0 {
                extrapolated.push(c - d2 * d2 / (d2 - d1));
            }
        }
        if delta <= opts.delta_min {
            if let [p, q] = extrapolated[extrapolated.len().saturating_sub(2)..] {
                let rel_x = relative_change(q, p);
                if rel_x < opts.rel_tol {
                    return Ok(VarianceReport {
                        value: q.max(0.0),
                        delta,
                        rel_change: rel_x,
                        halvings,
                        extrapolated: true,
                    });
                }
            }
            return Err(GiniError::convergence(format!(
                "asymptotic variance still moved by {rel:.3e} (relative) at truncation {delta:.3e}"
            )));
        }
    }
}

fn relative_change(cur: f64, prev: f64) -> f64 {
    if cur == 0.0 {
        (cur - prev).abs()
    } else {
        ((cur - prev) / cur).abs()
    }
}

pub fn asymptotic_variance_gd(dist: &ParametricDistribution, n: GiniOrder) -> Result<f64> {
    Ok(asymptotic_variance_gd_report(dist, n, &VarianceOptions::default())?.value)
}

pub fn asymptotic_variance_gd_report(
    dist: &ParametricDistribution,
    n: GiniOrder,
    opts: &VarianceOptions,
) -> Result<VarianceReport> {
    check_variance_admissible(dist)?;
    let k = n.get() - 1;
    halving_variance(dist, move |f, s| pow_unit(f, k) - pow_unit(s, k), opts)
}

pub fn asymptotic_variance_gc(dist: &ParametricDistribution, n: GiniOrder) -> Result<f64> {
    Ok(asymptotic_variance_gc_report(dist, n, &VarianceOptions::default())?.value)
}

pub fn asymptotic_variance_gc_report(
    dist: &ParametricDistribution,
    n: GiniOrder,
    opts: &VarianceOptions,
) -> Result<VarianceReport> {
    check_variance_admissible(dist)?;
    let q = QuantileFunction::Parametric(*dist);
    let gc = gc_n(&q, n)?;
    let mean = dist.mean()?;
    let k = n.get() - 1;
    halving_variance(dist, move |f, s| (pow_unit(f, k) - pow_unit(s, k) - gc) / mean, opts)
}

pub fn asymptotic_variance(dist: &ParametricDistribution, n: GiniOrder, target: Target) -> Result<f64> {
    match target {
        Target::Gd => asymptotic_variance_gd(dist, n),
        Target::Gc => asymptotic_variance_gc(dist, n),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub replications: usize,
    pub estimate_mean: f64,
    pub estimate_variance: f64,
    pub predicted_mean: f64,
    pub predicted_variance_over_n: f64,
    pub ks_distance: f64,
    pub target: Target,
    pub order: GiniOrder,
    pub sample_size: usize,
    pub scheme: WeightScheme,
}

impl SimulationSummary {
    /// JSON object with the documented key names.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "replications": self.replications,
            "estimate_mean": self.estimate_mean,
            "estimate_variance": self.estimate_variance,
            "predicted_mean": self.predicted_mean,
            "predicted_variance_over_N": self.predicted_variance_over_n,
            "ks_distance": self.ks_distance,
            "target": self.target,
            "order": self.order,
            "sample_size": self.sample_size,
            "scheme": self.scheme,
        })
    }
}

/// One estimate per replication, each from its own stream; output order and
/// values do not depend on the thread count.
pub fn simulate_estimates(
    dist: &ParametricDistribution,
    n: GiniOrder,
    sample_size: usize,
    replications: usize,
    seed: u64,
    target: Target,
    scheme: WeightScheme,
) -> Result<Vec<f64>> {
    if sample_size < 2 {
        return Err(GiniError::domain("simulation sample size must be at least 2"));
    }
    if replications < 1 {
        return Err(GiniError::domain("simulation needs at least one replication"));
    }
    let weights = rank_weights(sample_size, n, scheme);
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r);
            let mut draws = dist.sample_with(&mut rng, sample_size);
            draws.sort_unstable_by(f64::total_cmp);
            let gd = weighted(&draws, &weights);
            match target {
                Target::Gd => Ok(gd),
                Target::Gc => Ok(gd / check_gc_sample(&draws)?),
            }
        })
        .collect()
}

/// Kolmogorov-Smirnov distance between the empirical law of `values` and N(0,1).
pub fn ks_distance_standard_normal(values: &[f64]) -> f64 {
    let mut z = values.to_vec();
    z.sort_unstable_by(f64::total_cmp);
    let m = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = normal_cdf(v);
            ((i + 1) as f64 / m - c).max(c - i as f64 / m)
        })
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

/// Simulated sampling distribution of the estimator against its predicted
/// normal approximation N(value, σ²/N).
pub fn simulate_sampling_distribution(
    dist: &ParametricDistribution,
    n: GiniOrder,
    sample_size: usize,
    replications: usize,
    seed: u64,
    target: Target,
    scheme: WeightScheme,
) -> Result<SimulationSummary> {
    let q = QuantileFunction::Parametric(*dist);
    let predicted_mean = match target {
        Target::Gd => gd_n(&q, n)?,
        Target::Gc => gc_n(&q, n)?,
    };
    let predicted_var = asymptotic_variance(dist, n, target)? / sample_size as f64;
    let estimates = simulate_estimates(dist, n, sample_size, replications, seed, target, scheme)?;
    let sd = predicted_var.sqrt();
    let z: Vec<f64> = estimates.iter().map(|e| (e - predicted_mean) / sd).collect();
    Ok(SimulationSummary {
        replications,
        estimate_mean: crate::numeric::mean(&estimates),
        estimate_variance: sample_variance(&estimates),
        predicted_mean,
        predicted_variance_over_n: predicted_var,
        ks_distance: ks_distance_standard_normal(&z),
        target,
        order: n,
        sample_size,
        scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::StepQuantile;

    fn order(n: u32) -> GiniOrder {
        GiniOrder::new(n).unwrap()
    }

    fn s123() -> Sample {
        Sample::new(vec![3.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn small_sample_estimates() {
        let s = s123();
        assert!((estimate_gd(&s, order(2), WeightScheme::Pointwise) - 10.0 / 9.0).abs() < 1e-15);
        assert!((estimate_gd(&s, order(2), WeightScheme::ExactChoquet) - 4.0 / 9.0).abs() < 1e-15);
        assert!((estimate_gc(&s, order(2), WeightScheme::ExactChoquet).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        let scaled = Sample::new(vec![7.0, 14.0, 21.0]).unwrap();
        for scheme in [WeightScheme::Pointwise, WeightScheme::ExactChoquet] {
            let a = estimate_gc(&s, order(3), scheme).unwrap();
            let b = estimate_gc(&scaled, order(3), scheme).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn sample_validation() {
        assert!(Sample::new(vec![1.0]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        let neg = Sample::new(vec![-1.0, 2.0]).unwrap();
        assert!(estimate_gc(&neg, order(2), WeightScheme::Pointwise).is_err());
        let text = "1.5\n\n# note\n2.5\n0.5\n";
        let s = Sample::from_reader(text.as_bytes()).unwrap();
        assert_eq!(s.values(), &[0.5, 1.5, 2.5]);
        let err = Sample::from_reader("1\nabc\n".as_bytes()).unwrap_err();
        assert_eq!(err, GiniError::Parse { line: 2, message: "'abc' is not a decimal number".into() });
    }

    #[test]
    fn constant_sample() {
        let s = Sample::new(vec![4.0; 1000]).unwrap();
        for n in [2, 5, 10] {
            assert!(estimate_gd(&s, order(n), WeightScheme::ExactChoquet).abs() < 1e-12);
            let pointwise = estimate_gd(&s, order(n), WeightScheme::Pointwise);
            assert!(pointwise.abs() <= 2.0 * 4.0 * n as f64 / 1000.0);
        }
    }

    #[test]
    fn exact_scheme_weights_sum_to_zero_and_match_step() {
        let w = rank_weights(37, order(6), WeightScheme::ExactChoquet);
        assert!(compensated_sum(w).abs() < 1e-15);
        let s = Sample::new(vec![0.3, 1.2, 1.2, 4.0, 9.5, 2.2]).unwrap();
        let q = StepQuantile::from_sorted_sample(s.values()).unwrap();
        for n in 2..8 {
            let a = estimate_gd(&s, order(n), WeightScheme::ExactChoquet);
            let b = crate::gini::gd_step(&q, order(n));
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn plugin_variance_matches_brute_force() {
        let s = Sample::new(vec![0.5, 1.0, 1.7, 3.0, 4.2, 8.0]).unwrap();
        let x = s.values();
        let size = x.len() as f64;
        for target in [Target::Gd, Target::Gc] {
            let n = order(4);
            let (shift, scale) = match target {
                Target::Gd => (0.0, 1.0),
                Target::Gc => {
                    let m = s.mean();
                    (estimate_gd(&s, n, WeightScheme::ExactChoquet) / m, 1.0 / m)
                }
            };
            let mut brute = 0.0;
            for i in 1..x.len() {
                for j in 1..x.len() {
                    let (ti, tj) = (i as f64 / size, j as f64 / size);
                    let ji = (quantile_weight(n, ti, 1.0 - ti) - shift) * scale;
                    let jj = (quantile_weight(n, tj, 1.0 - tj) - shift) * scale;
                    brute += ji * jj * (ti.min(tj) - ti * tj) * (x[i] - x[i - 1]) * (x[j] - x[j - 1]);
                }
            }
            assert!((plugin_variance(&s, n, target).unwrap() - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn bootstrap_properties() {
        let flat = Sample::new(vec![2.0; 50]).unwrap();
        let r = bootstrap_ci(&flat, order(2), Target::Gd, WeightScheme::ExactChoquet, 0.9, 200, 1).unwrap();
        assert_eq!(r.ci, (0.0, 0.0));
        let e = ParametricDistribution::exponential(1.0).unwrap();
        let s = Sample::new(e.sample(500, 4)).unwrap();
        let one = bootstrap_ci(&s, order(3), Target::Gc, WeightScheme::Pointwise, 0.95, 1, 8).unwrap();
        assert_eq!(one.ci.0, one.ci.1);
        let a = bootstrap_ci(&s, order(3), Target::Gd, WeightScheme::Pointwise, 0.95, 300, 8).unwrap();
        let b = bootstrap_ci(&s, order(3), Target::Gd, WeightScheme::Pointwise, 0.95, 300, 8).unwrap();
        assert_eq!(a, b);
        assert!(a.ci.0 < a.ci.1);
        assert!(bootstrap_ci(&s, order(3), Target::Gd, WeightScheme::Pointwise, 1.0, 10, 8).is_err());
    }

    #[test]
    fn variance_rejects_inadmissible_families() {
        let b = ParametricDistribution::bernoulli(0.3).unwrap();
        assert!(matches!(asymptotic_variance_gd(&b, order(2)), Err(GiniError::AssumptionViolated(_))));
        let p = ParametricDistribution::pareto(2.0, 1.0).unwrap();
        assert!(matches!(asymptotic_variance_gd(&p, order(2)), Err(GiniError::AssumptionViolated(_))));
    }

    #[test]
    fn quadrature_variance_matches_large_sample_plugin() {
        let e = ParametricDistribution::exponential(1.0).unwrap();
        let v = asymptotic_variance_gd(&e, order(2)).unwrap();
        let s = Sample::new(e.sample(400_000, 12)).unwrap();
        let plug = plugin_variance(&s, order(2), Target::Gd).unwrap();
        assert!((v - plug).abs() / v < 0.03, "{v} vs {plug}");
    }

    #[test]
    fn integration_order_swap_agrees() {
        let d = ParametricDistribution::lognormal(0.0, 1.0).unwrap();
        let lower = asymptotic_variance_gd_report(&d, order(5), &VarianceOptions::default()).unwrap();
        let upper = asymptotic_variance_gd_report(
            &d,
            order(5),
            &VarianceOptions { order: IntegrationOrder::InnerUpper, ..VarianceOptions::default() },
        )
        .unwrap();
        assert!((lower.value - upper.value).abs() <= 1e-8 * lower.value.max(1.0));
    }

    #[test]
    fn ks_distance_bounds() {
        assert!(ks_distance_standard_normal(&[0.0]) <= 0.5 + 1e-15);
        let far = ks_distance_standard_normal(&[50.0, 60.0]);
        assert!((far - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simulation_is_deterministic() {
        let e = ParametricDistribution::exponential(1.0).unwrap();
        let a = simulate_estimates(&e, order(3), 200, 64, 5, Target::Gd, WeightScheme::Pointwise).unwrap();
        let b = simulate_estimates(&e, order(3), 200, 64, 5, Target::Gd, WeightScheme::Pointwise).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| {
            simulate_estimates(&e, order(3), 200, 64, 5, Target::Gd, WeightScheme::Pointwise).unwrap()
        });
        assert_eq!(a, c);
    }
}
