//! Quantile functions: exact step quantiles (empirical or grouped data) and
//! parametric quantiles.

use crate::error::{GiniError, Result};
use crate::parametric::ParametricDistribution;

/// Left-continuous step quantile: `levels[j]` on `(breakpoints[j], breakpoints[j+1]]`.
///
/// Breakpoints run strictly increasing from 0 to 1; levels are nondecreasing
/// and adjacent equal levels are merged on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StepQuantile {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl StepQuantile {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || breakpoints.len() != levels.len() + 1 {
            return Err(GiniError::domain(format!(
                "step quantile needs k levels and k+1 breakpoints, got {} and {}",
                levels.len(),
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(GiniError::domain("step quantile breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GiniError::domain("step quantile breakpoints must be strictly increasing"));
        }
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(GiniError::domain("step quantile levels must be finite"));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(GiniError::Monotonicity(
                "step quantile levels must be nondecreasing".into(),
            ));
        }
        Ok(Self::merged(breakpoints, levels))
    }

    fn merged(breakpoints: Vec<f64>, levels: Vec<f64>) -> Self {
        let mut bp = vec![0.0];
        let mut lv: Vec<f64> = Vec::with_capacity(levels.len());
        for (j, &l) in levels.iter().enumerate() {
            if lv.last() == Some(&l) {
                *bp.last_mut().unwrap() = breakpoints[j + 1];
            } else {
                lv.push(l);
                bp.push(breakpoints[j + 1]);
            }
        }
        StepQuantile {
            breakpoints: bp,
            levels: lv,
        }
    }

    /// Builds the quantile of a discrete distribution given `(value, mass)` atoms.
    /// Masses are normalized; atoms may come in any order.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        atoms.retain(|&(_, m)| m > 0.0);
        if atoms.is_empty() {
            return Err(GiniError::domain("no atoms with positive mass"));
        }
        if atoms.iter().any(|(v, m)| !v.is_finite() || !m.is_finite()) {
            return Err(GiniError::domain("atoms must be finite"));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mut bp = Vec::with_capacity(atoms.len() + 1);
        let mut lv = Vec::with_capacity(atoms.len());
        bp.push(0.0);
        let mut cum = 0.0;
        for (v, m) in atoms {
            cum += m;
            let edge = (cum / total).min(1.0);
            if lv.last() == Some(&v) {
                *bp.last_mut().unwrap() = edge;
            } else {
                lv.push(v);
                bp.push(edge);
            }
        }
        *bp.last_mut().unwrap() = 1.0;
        // Rounding can collapse a tiny mass; drop such degenerate cells.
        let mut out_bp = vec![0.0];
        let mut out_lv = Vec::with_capacity(lv.len());
        for (j, l) in lv.into_iter().enumerate() {
            if bp[j + 1] > *out_bp.last().unwrap() {
                out_bp.push(bp[j + 1]);
                out_lv.push(l);
            }
        }
        Ok(StepQuantile {
            breakpoints: out_bp,
            levels: out_lv,
        })
    }

    /// Empirical quantile of a sorted sample: level X_(i) on ((i-1)/N, i/N].
    pub fn from_sorted_sample(sorted: &[f64]) -> Result<Self> {
        if sorted.is_empty() {
            return Err(GiniError::domain("empty sample"));
        }
        let n = sorted.len() as f64;
        let bp: Vec<f64> = (0..=sorted.len()).map(|i| i as f64 / n).collect();
        StepQuantile::new(bp, sorted.to_vec())
    }

    pub fn constant(c: f64) -> Self {
        StepQuantile {
            breakpoints: vec![0.0, 1.0],
            levels: vec![c],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Probability mass of each level.
    pub fn masses(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    /// Cells as `(t_lo, t_hi, level)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.levels)
            .map(|(w, &l)| (w[0], w[1], l))
    }

    /// q(t) with the left-continuous convention.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.breakpoints[1..].partition_point(|&b| b < t);
        self.levels[idx.min(self.levels.len() - 1)]
    }

    pub fn mean(&self) -> f64 {
        crate::numeric::compensated_sum(self.cells().map(|(a, b, l)| (b - a) * l))
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        crate::numeric::compensated_sum(self.cells().map(|(a, b, l)| (b - a) * (l - m) * (l - m)))
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn is_constant(&self) -> bool {
        self.levels.len() == 1
    }

    pub fn min_level(&self) -> f64 {
        self.levels[0]
    }

    pub fn max_level(&self) -> f64 {
        *self.levels.last().unwrap()
    }

    /// Quantile of X + c.
    pub fn shifted(&self, c: f64) -> Self {
        Self::merged(
            self.breakpoints.clone(),
            self.levels.iter().map(|l| l + c).collect(),
        )
    }

    /// Quantile of λX for λ ≥ 0.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(GiniError::domain("scale factor must be finite and nonnegative"));
        }
        Ok(Self::merged(
            self.breakpoints.clone(),
            self.levels.iter().map(|l| l * lambda).collect(),
        ))
    }

    /// Quantile of -X.
    pub fn reflected(&self) -> Self {
        let bp: Vec<f64> = self.breakpoints.iter().rev().map(|b| 1.0 - b).collect();
        let lv: Vec<f64> = self.levels.iter().rev().map(|l| -l).collect();
        StepQuantile {
            breakpoints: bp,
            levels: lv,
        }
    }

    /// Quantile of X + Y for comonotonic X, Y sharing the same breakpoint grid.
    pub fn comonotonic_sum(&self, other: &StepQuantile) -> Result<Self> {
        if self.breakpoints != other.breakpoints {
            return Err(GiniError::domain(
                "comonotonic sum needs step quantiles on a shared breakpoint grid",
            ));
        }
        Ok(Self::merged(
            self.breakpoints.clone(),
            self.levels.iter().zip(&other.levels).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Population mixture `weight·F_self + (1-weight)·F_other`.
    pub fn mixture(&self, other: &StepQuantile, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(GiniError::domain("mixture weight must lie in (0,1)"));
        }
        let atoms = self
            .cells()
            .map(|(a, b, l)| (l, weight * (b - a)))
            .chain(other.cells().map(|(a, b, l)| (l, (1.0 - weight) * (b - a))))
            .collect();
        StepQuantile::from_atoms(atoms)
    }

    /// ∫_0^p q(t) dt, exact.
    pub fn partial_integral(&self, p: f64) -> f64 {
        crate::numeric::compensated_sum(self.cells().map(|(a, b, l)| {
            if p <= a {
                0.0
            } else {
                (p.min(b) - a) * l
            }
        }))
    }
}

/// Any quantile function the Gini machinery can integrate.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantileFunction {
    Step(StepQuantile),
    Parametric(ParametricDistribution),
}

impl QuantileFunction {
    /// q(t) for t in (0,1).
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            QuantileFunction::Step(s) => s.eval(t),
            QuantileFunction::Parametric(d) => d.quantile_pair(t, 1.0 - t),
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match self {
            QuantileFunction::Step(s) => Ok(s.mean()),
            QuantileFunction::Parametric(d) => d.mean(),
        }
    }
}

impl From<StepQuantile> for QuantileFunction {
    fn from(s: StepQuantile) -> Self {
        QuantileFunction::Step(s)
    }
}

impl From<ParametricDistribution> for QuantileFunction {
    fn from(d: ParametricDistribution) -> Self {
        QuantileFunction::Parametric(d)
    }
}
