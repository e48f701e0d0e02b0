mod common;

use common::order;
use ginin::bounds::gini_profile;
use ginin::ingest::*;
use ginin::{gc_n, QuantileFunction};

const TWO_BRACKET: &str = include_str!("../fixtures/two_bracket.csv");
const TWO_COUNTRY: &str = include_str!("../fixtures/two_country.csv");

fn load(text: &str) -> Vec<GroupedDistribution> {
    parse_percentile_csv(text.as_bytes(), ParseOptions::default()).unwrap()
}

fn gc(q: &ginin::StepQuantile, n: u32) -> f64 {
    gc_n(&QuantileFunction::Step(q.clone()), order(n)).unwrap()
}

#[test]
fn two_bracket_values() {
    let g = load(TWO_BRACKET);
    assert_eq!(g.len(), 1);
    let q = g[0].to_step_quantile().unwrap();
    // GD_2 = 0.9 * 0.1 * (100 - 10) = 8.1 on a mean of 19.
    assert!((gc(&q, 2) - 8.1 / 19.0).abs() < 1e-15);
    assert!((top_share(&g[0], 0.1).unwrap() - 10.0 / 19.0).abs() < 1e-15);
}

#[test]
fn gini_profiles_are_nonincreasing_for_every_row() {
    for g in load(TWO_BRACKET).iter().chain(&load(TWO_COUNTRY)) {
        let p = gini_profile(&QuantileFunction::Step(g.to_step_quantile().unwrap()), 20).unwrap();
        assert!(p.gd_nonincreasing, "{} {}", g.entity, g.year);
        assert_eq!(p.gc_nonincreasing, Some(true), "{} {}", g.entity, g.year);
    }
}

#[test]
fn higher_orders_separate_the_two_countries() {
    let g = load(TWO_COUNTRY);
    let t = gini_panel(&g, &[order(2), order(10)], &[]);
    for year in 2020..=2022 {
        let row = |e: &str| t.rows.iter().find(|r| r.entity == e && r.year == year).unwrap();
        let (a, b) = (row("A"), row("B"));
        assert!((a.gc[0] - b.gc[0]).abs() < 0.01, "{year}: {:?} {:?}", a.gc, b.gc);
        assert!(a.gc[1] - b.gc[1] > 0.03, "{year}: {:?} {:?}", a.gc, b.gc);
    }
}

#[test]
fn mixtures_are_quasi_concave() {
    let g = load(TWO_COUNTRY);
    for i in 0..g.len() {
        for j in (i + 1)..g.len() {
            for w in [0.1, 0.5, 0.9] {
                let mix = g[i].mixture(&g[j], w).unwrap();
                for n in [2, 5, 10, 20] {
                    let lo = gc(&g[i].to_step_quantile().unwrap(), n).min(gc(&g[j].to_step_quantile().unwrap(), n));
                    assert!(gc(&mix, n) >= lo - 1e-12, "rows {i},{j} w={w} n={n}");
                }
            }
        }
    }
}

#[test]
fn top_shares_are_ordered() {
    for g in load(TWO_COUNTRY) {
        assert!(top_share(&g, 0.1).unwrap() >= top_share(&g, 0.01).unwrap());
    }
}

#[test]
fn currency_rescaling_changes_nothing() {
    let g = load(TWO_COUNTRY);
    let rescaled: Vec<GroupedDistribution> = g
        .iter()
        .map(|d| {
            let b = d.brackets().iter().map(|b| Bracket { avg: b.avg * 0.0137, ..*b }).collect();
            GroupedDistribution::new(d.entity.clone(), d.year, b, false).unwrap()
        })
        .collect();
    let orders: Vec<_> = [2, 5, 10, 20].map(order).to_vec();
    let a = gini_panel(&g, &orders, &[0.01, 0.1]);
    let b = gini_panel(&rescaled, &orders, &[0.01, 0.1]);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        for (u, v) in x.gc.iter().chain(&x.top).zip(y.gc.iter().chain(&y.top)) {
            assert!((u - v).abs() <= 1e-12, "{u} vs {v}");
        }
    }
}

#[test]
fn row_order_does_not_matter() {
    let mut lines: Vec<&str> = TWO_COUNTRY.lines().collect();
    let header = lines.remove(0);
    lines.reverse();
    let shuffled = std::iter::once(header).chain(lines).collect::<Vec<_>>().join("\n");
    let orders = [order(2), order(10)];
    let a = gini_panel(&load(TWO_COUNTRY), &orders, &[0.1]);
    let b = gini_panel(&load(&shuffled), &orders, &[0.1]);
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn panel_json_round_trips() {
    let t = gini_panel(&load(TWO_COUNTRY), &[order(2), order(5)], &[0.01, 0.1]);
    let text = serde_json::to_string(&t.to_json()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert_eq!(v[0]["gc_2"].as_f64().unwrap(), t.rows[0].gc[0]);
}
