//! Sharp bounds: GD_n against the standard deviation, GD_n / GD_m ratios,
//! ratio bounds between polynomial distortions, and monotonicity in n.

use serde::Serialize;

use crate::distortion::{phi_antiderivative, DistortionFunction, GiniOrder};
use crate::error::{GiniError, Result};
use crate::gini::{gc_n, gd_n, gd_step};
use crate::parametric::ParametricDistribution;
use crate::quantile::{QuantileFunction, StepQuantile};
use crate::special::ln_gamma;

/// Largest n for which the exact rational route is used.
const EXACT_SD_MAX: u32 = 20;

/// sup GD_n / SD over nonconstant distributions:
/// sqrt(2/(2n-1) - 2((n-1)!)^2/(2n-1)!).
pub fn sd_ratio_upper_bound(n: GiniOrder) -> f64 {
    match sd_ratio_bound_squared_exact(n) {
        Some((num, den)) => (num as f64 / den as f64).sqrt(),
        None => sd_ratio_bound_squared_lgamma(n).sqrt(),
    }
}

/// The squared bound via log-gamma; valid for every n.
pub fn sd_ratio_bound_squared_lgamma(n: GiniOrder) -> f64 {
    let nf = n.as_f64();
    let ratio = (2.0 * ln_gamma(nf) - ln_gamma(2.0 * nf) + std::f64::consts::LN_2).exp();
    2.0 / (2.0 * nf - 1.0) - ratio
}

/// The squared bound as an exact fraction 2(C-1) / ((2n-1) C) with
/// C = binom(2n-2, n-1); None above n = 20.
pub fn sd_ratio_bound_squared_exact(n: GiniOrder) -> Option<(u128, u128)> {
    let n = n.get();
    if n > EXACT_SD_MAX {
        return None;
    }
    let k = (n - 1) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (2 * k - i) / (i + 1);
    }
    let num = 2 * (c - 1);
    let den = (2 * n as u128 - 1) * c;
    let g = gcd(num, den);
    Some((num / g, den / g))
}

fn sd_ratio_bound_squared_exact_or_lgamma(n: GiniOrder) -> f64 {
    match sd_ratio_bound_squared_exact(n) {
        Some((num, den)) => num as f64 / den as f64,
        None => sd_ratio_bound_squared_lgamma(n),
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// A distribution (or limit) at which a bound is reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub description: String,
    pub distribution: Option<ParametricDistribution>,
    /// False when the bound is only approached in a limit.
    pub attained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioBound {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: Witness,
    pub upper_witness: Witness,
}

/// Bounds on GD_n / GD_m over nonconstant distributions, 2 <= m <= n.
pub fn gd_ratio_bounds(m: GiniOrder, n: GiniOrder) -> Result<RatioBound> {
    if m > n {
        return Err(GiniError::domain(format!("ratio bounds need m <= n, got m = {m}, n = {n}")));
    }
    let (mf, nf) = (m.as_f64(), n.as_f64());
    let lower = mf * (1.0 - 2f64.powf(1.0 - nf)) / (nf * (1.0 - 2f64.powf(1.0 - mf)));
    // The formula is exactly 1 for m = n and for (m, n) = (2, 3); keep that exact.
    let lower = if (lower - 1.0).abs() < 1e-15 { 1.0 } else { lower };
    let constant = lower == 1.0;
    let half = ParametricDistribution::two_point(0.0, 1.0, 0.5)?;
    Ok(RatioBound {
        lower,
        upper: 1.0,
        lower_witness: Witness {
            description: "two-point law with p = 0.5".into(),
            distribution: Some(half),
            attained: true,
        },
        upper_witness: if constant {
            Witness {
                description: "every nonconstant distribution (the ratio is identically 1)".into(),
                distribution: Some(half),
                attained: true,
            }
        } else {
            Witness {
                description: "two-point law with p -> 0 (supremum, not attained)".into(),
                distribution: None,
                attained: false,
            }
        },
    })
}

/// First nonzero coefficient ratio, the limit of h/g at the expansion point.
fn leading_ratio(h: &[f64], g: &[f64]) -> f64 {
    let scale = h.iter().chain(g).fold(0.0f64, |a, c| a.max(c.abs())).max(f64::MIN_POSITIVE);
    let tiny = 1e-12 * scale;
    for i in 0..h.len().max(g.len()) {
        let hi = h.get(i).copied().unwrap_or(0.0);
        let gi = g.get(i).copied().unwrap_or(0.0);
        if gi.abs() > tiny {
            return if hi.abs() > tiny { hi / gi } else { 0.0 };
        }
        if hi.abs() > tiny {
            return f64::INFINITY;
        }
    }
    1.0
}

fn golden_extremum<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, maximize: bool) -> (f64, f64) {
    let sign = if maximize { -1.0 } else { 1.0 };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sign * f(c), sign * f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sign * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sign * f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Bounds on the ratio of two signed Choquet integrals, inf and sup of
/// h(t) / g(t) on (0,1).
pub fn choquet_ratio_bounds(h: &DistortionFunction, g: &DistortionFunction, grid_size: usize) -> Result<RatioBound> {
    if grid_size < 3 {
        return Err(GiniError::domain("choquet ratio grid needs at least 3 points"));
    }
    for (name, f) in [("h", h), ("g", g)] {
        let scale = f.power_coefficients().iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if f.eval(0.0).abs() > 1e-12 * scale || f.eval(1.0).abs() > 1e-12 * scale {
            return Err(GiniError::domain(format!("{name} must vanish at 0 and 1")));
        }
    }
    let mut grid: Vec<f64> = (1..=grid_size).map(|i| i as f64 / (grid_size + 1) as f64).collect();
    for k in 4..=36 {
        let t = 10f64.powf(-(k as f64) / 4.0);
        grid.push(t);
        grid.push(1.0 - t);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut ratios = Vec::with_capacity(grid.len());
    for &t in &grid {
        let (hv, gv) = (h.eval(t), g.eval(t));
        if !(hv > 0.0) || !(gv > 0.0) {
            return Err(GiniError::domain(format!(
                "distortions must be positive on (0,1); h({t}) = {hv}, g({t}) = {gv}"
            )));
        }
        ratios.push(hv / gv);
    }
    let ratio = |t: f64| h.eval(t) / g.eval(t);
    let refine = |idx: usize, maximize: bool| {
        let a = grid[idx.saturating_sub(1)];
        let b = grid[(idx + 1).min(grid.len() - 1)];
        let (t, v) = golden_extremum(ratio, a, b, maximize);
        let grid_v = ratios[idx];
        if (maximize && grid_v > v) || (!maximize && grid_v < v) {
            (grid[idx], grid_v)
        } else {
            (t, v)
        }
    };
    let imin = (0..ratios.len()).min_by(|&a, &b| ratios[a].total_cmp(&ratios[b])).unwrap();
    let imax = (0..ratios.len()).max_by(|&a, &b| ratios[a].total_cmp(&ratios[b])).unwrap();
    let (tmin, vmin) = refine(imin, false);
    let (tmax, vmax) = refine(imax, true);

    let at_zero = leading_ratio(&h.power_coefficients(), &g.power_coefficients());
    let at_one = leading_ratio(&h.complement_coefficients()[1..], &g.complement_coefficients()[1..]);

    let mut lower = (vmin, format!("interior point t = {tmin:.6}"), true);
    let mut upper = (vmax, format!("interior point t = {tmax:.6}"), true);
    for (limit, label) in [(at_zero, "limit t -> 0"), (at_one, "limit t -> 1")] {
        if limit < lower.0 {
            lower = (limit, label.to_string(), false);
        }
        if limit > upper.0 {
            upper = (limit, label.to_string(), false);
        }
    }
    // A constant ratio is attained everywhere.
    let constant = (upper.0 - lower.0).abs() <= 1e-12 * upper.0.abs().max(1.0);
    if constant {
        upper.0 = lower.0;
    }
    Ok(RatioBound {
        lower: lower.0,
        upper: upper.0,
        lower_witness: Witness {
            description: lower.1,
            distribution: None,
            attained: lower.2 || constant,
        },
        upper_witness: Witness {
            description: upper.1,
            distribution: None,
            attained: upper.2 || constant,
        },
    })
}

/// Step discretization of the extremal quantile t ↦ h_n'(1-t) / ||h_n'||_2:
/// each cell carries the average of the weight over the cell.
pub fn sd_bound_witness(n: GiniOrder, grid_size: usize) -> Result<StepQuantile> {
    if grid_size < 2 {
        return Err(GiniError::domain("witness grid needs at least 2 cells"));
    }
    let norm = sd_ratio_bound_squared_exact_or_lgamma(n).sqrt();
    let m = grid_size as f64;
    let breakpoints: Vec<f64> = (0..=grid_size).map(|i| i as f64 / m).collect();
    let levels: Vec<f64> = breakpoints
        .windows(2)
        .map(|w| (phi_antiderivative(n, w[1]) - phi_antiderivative(n, w[0])) * m / norm)
        .collect();
    // Rounding can make the middle cells jitter by an ulp; the weight is
    // increasing, so restore exact monotonicity.
    let mut levels = levels;
    for i in 1..levels.len() {
        if levels[i] < levels[i - 1] {
            levels[i] = levels[i - 1];
        }
    }
    StepQuantile::new(breakpoints, levels)
}

/// GD_n / SD of a step quantile.
pub fn sd_ratio(q: &StepQuantile, n: GiniOrder) -> Result<f64> {
    let sd = q.std_dev();
    if !(sd > 0.0) {
        return Err(GiniError::domain("standard deviation is zero"));
    }
    Ok(gd_step(q, n) / sd)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// GD_2..GD_{n_max}.
    pub gd: Vec<f64>,
    /// GC_2..GC_{n_max} when the distribution is nonnegative with positive mean.
    pub gc: Option<Vec<f64>>,
    pub gd_nonincreasing: bool,
    pub gc_nonincreasing: Option<bool>,
    /// GD_{n_max} < GD_2.
    pub tail_below_start: bool,
}

/// Nonincreasing up to a relative slack that absorbs quadrature noise.
fn nonincreasing(values: &[f64]) -> bool {
    values
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-10 * w[0].abs().max(f64::MIN_POSITIVE))
}

/// GD_n (and GC_n when defined) for n = 2..=n_max, with monotonicity flags.
pub fn gini_profile(q: &QuantileFunction, n_max: u32) -> Result<MonotonicityReport> {
    if n_max < 3 {
        return Err(GiniError::domain("monotonicity check needs n_max >= 3"));
    }
    let orders: Vec<GiniOrder> = (2..=n_max).map(GiniOrder::new).collect::<Result<_>>()?;
    let gd: Vec<f64> = orders.iter().map(|&n| gd_n(q, n)).collect::<Result<_>>()?;
    let gc = match gc_n(q, orders[0]) {
        Ok(_) => Some(orders.iter().map(|&n| gc_n(q, n)).collect::<Result<Vec<f64>>>()?),
        Err(GiniError::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MonotonicityReport {
        gd_nonincreasing: nonincreasing(&gd),
        gc_nonincreasing: gc.as_deref().map(nonincreasing),
        tail_below_start: gd.last() < gd.first(),
        gd,
        gc,
    })
}

pub fn monotonicity_check(dist: &ParametricDistribution, n_max: u32) -> Result<MonotonicityReport> {
    gini_profile(&QuantileFunction::Parametric(*dist), n_max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub gc_a: Vec<f64>,
    pub gc_b: Vec<f64>,
    /// Sign of GC_2(a) - GC_2(b).
    pub initial_sign: i8,
    /// Smallest n at which the sign of GC_n(a) - GC_n(b) differs from the one at n = 2.
    pub first_reversal: Option<u32>,
}

/// Looks for an order n <= n_max at which the GC ordering of a and b flips.
pub fn gc_crossing(a: &ParametricDistribution, b: &ParametricDistribution, n_max: u32) -> Result<CrossingReport> {
    let pa = monotonicity_check(a, n_max)?;
    let pb = monotonicity_check(b, n_max)?;
    let (gc_a, gc_b) = match (pa.gc, pb.gc) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(GiniError::domain("crossing detection needs nonnegative distributions")),
    };
    let sign = |d: f64| if d > 0.0 { 1 } else if d < 0.0 { -1 } else { 0 };
    let initial_sign = sign(gc_a[0] - gc_b[0]);
    let first_reversal = gc_a
        .iter()
        .zip(&gc_b)
        .position(|(x, y)| initial_sign != 0 && sign(x - y) == -initial_sign)
        .map(|i| i as u32 + 2);
    Ok(CrossingReport {
        gc_a,
        gc_b,
        initial_sign,
        first_reversal,
    })
}
