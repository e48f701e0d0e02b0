mod common;

use common::*;
use ginin::gini::{choquet_step, gd_step};
use ginin::{gc_n, gd_n, DistortionFunction, QuantileFunction, StepQuantile};
use proptest::prelude::*;

fn gd(q: &StepQuantile, n: u32) -> f64 {
    gd_n(&QuantileFunction::Step(q.clone()), order(n)).unwrap()
}

fn gc(q: &StepQuantile, n: u32) -> f64 {
    gc_n(&QuantileFunction::Step(q.clone()), order(n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symmetry(q in step_quantile(8), n in 2u32..=20) {
        let tol = 1e-12 * scale_of(&q);
        prop_assert!((gd(&q.reflected(), n) - gd(&q, n)).abs() <= tol);
    }

    #[test]
    fn location_invariance(q in step_quantile(8), n in 2u32..=20, c in -100.0f64..100.0) {
        let tol = 1e-12 * scale_of(&q).max(c.abs());
        prop_assert!((gd(&q.shifted(c), n) - gd(&q, n)).abs() <= tol);
    }

    #[test]
    fn positive_homogeneity(q in step_quantile(8), n in 2u32..=20, lambda in 0.01f64..100.0) {
        let lhs = gd(&q.scaled(lambda).unwrap(), n);
        let rhs = lambda * gd(&q, n);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale_of(&q) * lambda.max(1.0));
    }

    #[test]
    fn comonotonic_additivity(
        w in prop::collection::vec(0.05f64..1.0, 1..8),
        s1 in -10.0f64..10.0,
        s2 in -10.0f64..10.0,
        seed_steps in prop::collection::vec((0.01f64..5.0, 0.01f64..5.0), 7),
        n in 2u32..=12,
    ) {
        let k = w.len();
        let grid = grid_from_weights(&w);
        let a: Vec<f64> = seed_steps[..k - 1].iter().map(|p| p.0).collect();
        let b: Vec<f64> = seed_steps[..k - 1].iter().map(|p| p.1).collect();
        let q1 = StepQuantile::new(grid.clone(), levels_from_steps(s1, &a)).unwrap();
        let q2 = StepQuantile::new(grid, levels_from_steps(s2, &b)).unwrap();
        let sum = q1.comonotonic_sum(&q2).unwrap();
        let tol = 1e-12 * (scale_of(&q1) + scale_of(&q2));
        prop_assert!((gd(&sum, n) - gd(&q1, n) - gd(&q2, n)).abs() <= tol);
    }

    #[test]
    fn gd2_equals_gd3(q in step_quantile(8)) {
        prop_assert!((gd(&q, 2) - gd(&q, 3)).abs() <= 1e-12 * scale_of(&q));
    }

    #[test]
    fn nonnegative_and_zero_iff_constant(q in step_quantile(8), n in 2u32..=20) {
        let v = gd(&q, n);
        prop_assert!(v >= 0.0);
        if q.is_constant() {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!(v > 0.0);
        }
    }

    #[test]
    fn constant_has_zero_deviation(c in -1e6f64..1e6, n in 2u32..=50) {
        prop_assert_eq!(gd(&StepQuantile::constant(c), n), 0.0);
    }

    #[test]
    fn gc_scale_invariance(q in positive_step_quantile(8), n in 2u32..=20, lambda in 0.001f64..1000.0) {
        let a = gc(&q, n);
        let b = gc(&q.scaled(lambda).unwrap(), n);
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn gc_in_unit_interval(q in positive_step_quantile(8), n in 2u32..=30) {
        let v = gc(&q, n);
        prop_assert!((0.0..1.0).contains(&v), "gc = {}", v);
    }

    #[test]
    fn mean_preserving_spread_never_decreases(
        q in step_quantile(6),
        cell in 0usize..6,
        d in 0.0f64..20.0,
        n in 2u32..=12,
    ) {
        let cells: Vec<(f64, f64, f64)> = q.cells().collect();
        let j = cell % cells.len();
        let mut atoms = Vec::new();
        for (i, &(a, b, l)) in cells.iter().enumerate() {
            if i == j {
                atoms.push((l - d, (b - a) / 2.0));
                atoms.push((l + d, (b - a) / 2.0));
            } else {
                atoms.push((l, b - a));
            }
        }
        let spread = StepQuantile::from_atoms(atoms).unwrap();
        prop_assert!(gd(&spread, n) >= gd(&q, n) - 1e-12 * scale_of(&spread));
    }

    #[test]
    fn brute_force_enumeration(q in step_quantile(5), n in 2u32..=5) {
        let oracle = brute_force_gd(&q, n);
        prop_assert!((gd(&q, n) - oracle).abs() <= 1e-12 * scale_of(&q), "{} vs {}", gd(&q, n), oracle);
    }

    #[test]
    fn canonical_choquet_matches_gd(q in step_quantile(8), n in 2u32..=15) {
        let h = DistortionFunction::canonical(order(n));
        let p = DistortionFunction::polynomial(h.power_coefficients()).unwrap();
        prop_assert!((choquet_step(&q, &p) - gd_step(&q, order(n))).abs() <= 1e-10 * scale_of(&q));
    }
}
