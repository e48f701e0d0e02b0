//! Small numeric helpers shared across modules.

/// `t^k` for `t` in [0, 1], computed as `exp(k ln t)` with exact endpoints.
///
/// Stays accurate and underflows gracefully for orders in the hundreds.
#[inline]
pub fn pow_unit(t: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    if k <= 16 {
        t.powi(k as i32)
    } else {
        (k as f64 * t.ln()).exp()
    }
}

/// Neumaier-compensated sum. Order-independent to within a few ulps, which is
/// what the parallel aggregation paths rely on.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Unbiased sample variance (divides by `len - 1`); zero for fewer than two values.
pub fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    compensated_sum(values.iter().map(|v| (v - m) * (v - m))) / (values.len() - 1) as f64
}

/// Harmonic number H_k = 1 + 1/2 + ... + 1/k.
pub fn harmonic(k: u32) -> f64 {
    compensated_sum((1..=k).map(|i| 1.0 / i as f64))
}

/// Binomial coefficient as f64 (exact for the small arguments used here).
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Linear-interpolation empirical quantile of already sorted data, `p` in [0, 1].
pub fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
