//! Grouped percentile-bracket data: parsing, step quantiles, top shares and
//! GC_n panels.
//!
//! Input CSV header is exactly `entity,year,p_lo,p_hi,avg`. Within a bracket
//! the distribution is taken as degenerate at the bracket average.

use std::collections::BTreeMap;
use std::io::Read;

use rayon::prelude::*;
use serde::Serialize;

use crate::distortion::GiniOrder;
use crate::error::{GiniError, Result};
use crate::gini::{gc_n, lorenz};
use crate::quantile::{QuantileFunction, StepQuantile};

const HEADER: [&str; 5] = ["entity", "year", "p_lo", "p_hi", "avg"];
const EDGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub p_lo: f64,
    pub p_hi: f64,
    pub avg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedDistribution {
    pub entity: String,
    pub year: i32,
    brackets: Vec<Bracket>,
    /// Averages were not monotone and have been accepted for sorting.
    nonmonotone: bool,
}

impl GroupedDistribution {
    /// Validates that the brackets partition [0,1] and, unless
    /// `allow_nonmonotone`, that averages are nondecreasing.
    pub fn new(entity: impl Into<String>, year: i32, mut brackets: Vec<Bracket>, allow_nonmonotone: bool) -> Result<Self> {
        let entity = entity.into();
        let key = format!("({entity}, {year})");
        if brackets.is_empty() {
            return Err(GiniError::Partition(format!("{key} has no brackets")));
        }
        brackets.sort_by(|a, b| a.p_lo.total_cmp(&b.p_lo));
        for b in &brackets {
            if !(b.p_lo >= 0.0 && b.p_hi <= 1.0 && b.p_lo < b.p_hi) {
                return Err(GiniError::Partition(format!(
                    "{key}: bracket [{}, {}] is not a nonempty subinterval of [0,1]",
                    b.p_lo, b.p_hi
                )));
            }
            if !b.avg.is_finite() {
                return Err(GiniError::domain(format!("{key}: non-finite bracket average")));
            }
        }
        if brackets[0].p_lo.abs() > EDGE_TOL {
            return Err(GiniError::Partition(format!(
                "{key}: gap between 0 and {}",
                brackets[0].p_lo
            )));
        }
        let last = brackets.last().unwrap().p_hi;
        if (last - 1.0).abs() > EDGE_TOL {
            return Err(GiniError::Partition(format!("{key}: gap between {last} and 1")));
        }
        for w in brackets.windows(2) {
            let (hi, lo) = (w[0].p_hi, w[1].p_lo);
            if lo > hi + EDGE_TOL {
                return Err(GiniError::Partition(format!("{key}: gap between {hi} and {lo}")));
            }
            if lo < hi - EDGE_TOL {
                return Err(GiniError::Partition(format!(
                    "{key}: overlap between brackets ending at {hi} and starting at {lo}"
                )));
            }
        }
        let nonmonotone = brackets.windows(2).any(|w| w[1].avg < w[0].avg);
        if nonmonotone && !allow_nonmonotone {
            return Err(GiniError::Monotonicity(format!(
                "{key}: bracket averages decrease; pass allow-nonmonotone to sort them"
            )));
        }
        Ok(Self {
            entity,
            year,
            brackets,
            nonmonotone,
        })
    }

    pub fn brackets(&self) -> &[Bracket] {
        &self.brackets
    }

    pub fn is_nonmonotone(&self) -> bool {
        self.nonmonotone
    }

    pub fn mean(&self) -> f64 {
        crate::numeric::compensated_sum(self.brackets.iter().map(|b| (b.p_hi - b.p_lo) * b.avg))
    }

    /// Step quantile with levels at the bracket averages. Non-monotone rows
    /// (accepted at construction) have their levels sorted.
    pub fn to_step_quantile(&self) -> Result<StepQuantile> {
        if self.nonmonotone {
            return StepQuantile::from_atoms(self.brackets.iter().map(|b| (b.avg, b.p_hi - b.p_lo)).collect());
        }
        let mut bp: Vec<f64> = self.brackets.iter().map(|b| b.p_lo).collect();
        bp[0] = 0.0;
        bp.push(1.0);
        StepQuantile::new(bp, self.brackets.iter().map(|b| b.avg).collect())
    }

    /// Population mixture `weight·self + (1-weight)·other` as a step quantile.
    pub fn mixture(&self, other: &GroupedDistribution, weight: f64) -> Result<StepQuantile> {
        self.to_step_quantile()?.mixture(&other.to_step_quantile()?, weight)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub allow_nonmonotone: bool,
}

/// Parses grouped data and returns one distribution per (entity, year),
/// ordered by entity then year.
pub fn parse_percentile_csv<R: Read>(source: R, opts: ParseOptions) -> Result<Vec<GroupedDistribution>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut records = reader.records();
    match records.next() {
        None => return Err(GiniError::Parse { line: 1, message: "missing header".into() }),
        Some(r) => {
            let r = r.map_err(|e| GiniError::Parse { line: 1, message: e.to_string() })?;
            let fields: Vec<&str> = r.iter().collect();
            if fields != HEADER {
                return Err(GiniError::Parse {
                    line: 1,
                    message: format!("header must be exactly '{}', got '{}'", HEADER.join(","), fields.join(",")),
                });
            }
        }
    }
    let mut groups: BTreeMap<(String, i32), Vec<Bracket>> = BTreeMap::new();
    for rec in records {
        let rec = rec.map_err(|e| GiniError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 5 {
            return Err(GiniError::Parse { line, message: format!("expected 5 fields, got {}", rec.len()) });
        }
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| GiniError::Parse {
                line,
                message: format!("field {} '{}' is not a finite decimal number", HEADER[i], &rec[i]),
            })
        };
        let year: i32 = rec[1].parse().map_err(|_| GiniError::Parse {
            line,
            message: format!("year '{}' is not an integer", &rec[1]),
        })?;
        if rec[0].is_empty() {
            return Err(GiniError::Parse { line, message: "empty entity".into() });
        }
        let bracket = Bracket {
            p_lo: num(2)?,
            p_hi: num(3)?,
            avg: num(4)?,
        };
        groups.entry((rec[0].to_string(), year)).or_default().push(bracket);
    }
    groups
        .into_iter()
        .map(|((entity, year), brackets)| GroupedDistribution::new(entity, year, brackets, opts.allow_nonmonotone))
        .collect()
}

/// Share of the total held by the top `alpha` fraction: 1 - L(1 - alpha).
pub fn top_share(g: &GroupedDistribution, alpha: f64) -> Result<f64> {
    top_share_step(&g.to_step_quantile()?, alpha)
}

pub fn top_share_step(q: &StepQuantile, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GiniError::domain(format!("top-share fraction {alpha} outside (0,1)")));
    }
    Ok(1.0 - lorenz(&QuantileFunction::Step(q.clone()), 1.0 - alpha)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelRow {
    pub entity: String,
    pub year: i32,
    pub gc: Vec<f64>,
    pub top: Vec<f64>,
    pub nonmonotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub entity: String,
    pub year: i32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelTable {
    pub orders: Vec<GiniOrder>,
    pub shares: Vec<f64>,
    pub rows: Vec<PanelRow>,
    pub errors: Vec<RowError>,
}

/// Column name for a top share, e.g. 0.01 -> `top_1`, 0.001 -> `top_0.1`.
pub fn share_column(alpha: f64) -> String {
    let pct = alpha * 100.0;
    let rounded = (pct * 1e9).round() / 1e9;
    format!("top_{rounded}")
}

/// Formats with `digits` significant digits, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding may bump the exponent (e.g. 9.9999999996 -> 10.00000000).
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

impl PanelTable {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["entity".to_string(), "year".to_string()];
        h.extend(self.orders.iter().map(|n| format!("gc_{n}")));
        h.extend(self.shares.iter().map(|&a| share_column(a)));
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        for r in &self.rows {
            let mut fields = vec![csv_field(&r.entity), r.year.to_string()];
            fields.extend(r.gc.iter().chain(&r.top).map(|v| format_significant(*v, 9)));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of row objects keyed by the CSV column names.
    pub fn to_json(&self) -> serde_json::Value {
        let header = self.header();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert(header[0].clone(), r.entity.clone().into());
                obj.insert(header[1].clone(), r.year.into());
                for (k, v) in header[2..].iter().zip(r.gc.iter().chain(&r.top)) {
                    obj.insert(k.clone(), (*v).into());
                }
                if r.nonmonotone {
                    obj.insert("nonmonotone".into(), true.into());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// GC_n for each order and top shares for each alpha, one row per
/// distribution in input order. Rows that fail are reported in `errors`.
pub fn gini_panel(data: &[GroupedDistribution], orders: &[GiniOrder], shares: &[f64]) -> PanelTable {
    let results: Vec<std::result::Result<PanelRow, RowError>> = data
        .par_iter()
        .map(|g| {
            let row = || -> Result<PanelRow> {
                let q = g.to_step_quantile()?;
                let qf = QuantileFunction::Step(q.clone());
                let gc = orders.iter().map(|&n| gc_n(&qf, n)).collect::<Result<_>>()?;
                let top = shares.iter().map(|&a| top_share_step(&q, a)).collect::<Result<_>>()?;
                Ok(PanelRow {
                    entity: g.entity.clone(),
                    year: g.year,
                    gc,
                    top,
                    nonmonotone: g.nonmonotone,
                })
            };
            row().map_err(|e| RowError {
                entity: g.entity.clone(),
                year: g.year,
                message: e.to_string(),
            })
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => errors.push(e),
        }
    }
    PanelTable {
        orders: orders.to_vec(),
        shares: shares.to_vec(),
        rows,
        errors,
    }
}
