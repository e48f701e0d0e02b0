#![allow(dead_code)]

use ginin::{GiniOrder, StepQuantile};
use proptest::prelude::*;
use rand::Rng;

pub fn order(n: u32) -> GiniOrder {
    GiniOrder::new(n).unwrap()
}

/// Breakpoints from positive cell weights; the last one is exactly 1.
pub fn grid_from_weights(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut bp = vec![0.0];
    let mut cum = 0.0;
    for w in weights {
        cum += w;
        bp.push(cum / total);
    }
    *bp.last_mut().unwrap() = 1.0;
    bp
}

/// Strictly increasing levels from a start and positive increments.
pub fn levels_from_steps(start: f64, steps: &[f64]) -> Vec<f64> {
    let mut out = vec![start];
    for s in steps {
        out.push(out.last().unwrap() + s);
    }
    out
}

/// Step quantile with 1..=max_k cells and distinct increasing levels.
pub fn step_quantile(max_k: usize) -> impl Strategy<Value = StepQuantile> {
    (1..=max_k).prop_flat_map(|k| {
        (
            prop::collection::vec(0.05f64..1.0, k),
            -20.0f64..20.0,
            prop::collection::vec(0.01f64..10.0, k - 1),
        )
            .prop_map(|(w, start, steps)| {
                StepQuantile::new(grid_from_weights(&w), levels_from_steps(start, &steps)).unwrap()
            })
    })
}

/// Same as [`step_quantile`] but with nonnegative levels and a positive mean.
pub fn positive_step_quantile(max_k: usize) -> impl Strategy<Value = StepQuantile> {
    (1..=max_k).prop_flat_map(|k| {
        (
            prop::collection::vec(0.05f64..1.0, k),
            0.0f64..20.0,
            prop::collection::vec(0.01f64..10.0, k - 1),
        )
            .prop_map(|(w, start, steps)| {
                let lv = levels_from_steps(start, &steps);
                let lv = if lv.iter().all(|&l| l == 0.0) { vec![1.0] } else { lv };
                let w = if lv.len() == w.len() { w } else { vec![1.0] };
                StepQuantile::new(grid_from_weights(&w), lv).unwrap()
            })
    })
}

/// Seeded corpus member with 1..=max_k cells and levels in [-scale, scale].
pub fn random_step<R: Rng>(rng: &mut R, max_k: usize, scale: f64) -> StepQuantile {
    let k = rng.gen_range(1..=max_k);
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    let mut lv: Vec<f64> = (0..k).map(|_| rng.gen_range(-scale..scale)).collect();
    lv.sort_by(f64::total_cmp);
    StepQuantile::new(grid_from_weights(&w), lv).unwrap()
}

/// (1/n) E[max - min] of n iid draws by enumerating all k^n level tuples.
pub fn brute_force_gd(q: &StepQuantile, n: u32) -> f64 {
    let cells: Vec<(f64, f64)> = q.cells().map(|(a, b, l)| (l, b - a)).collect();
    let k = cells.len();
    let total = k.pow(n);
    let mut acc = 0.0;
    for code in 0..total {
        let mut c = code;
        let (mut p, mut lo, mut hi) = (1.0, f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..n {
            let (l, m) = cells[c % k];
            c /= k;
            p *= m;
            lo = lo.min(l);
            hi = hi.max(l);
        }
        acc += p * (hi - lo);
    }
    acc / n as f64
}

pub fn scale_of(q: &StepQuantile) -> f64 {
    q.levels().iter().fold(1.0f64, |a, l| a.max(l.abs()))
}
