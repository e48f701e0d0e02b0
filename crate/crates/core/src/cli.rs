//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 numerical
//! non-convergence.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bounds::{choquet_ratio_bounds, gd_ratio_bounds, sd_bound_witness, sd_ratio, sd_ratio_bound_squared_exact,
                    sd_ratio_upper_bound, RatioBound};
use crate::distortion::{DistortionFunction, GiniOrder};
use crate::elicitability::{chunk_tuples, comparative_backtest, ScoreVariant};
use crate::error::{GiniError, Result};
use crate::estimation::{bootstrap_ci, plugin_asymptotic_ci, simulate_sampling_distribution, EstimateReport, Sample,
                        Target, WeightScheme};
use crate::gini::{gc_n_with, gd_n_with, gd_quadrature};
use crate::ingest::{csv_field, format_significant, gini_panel, parse_percentile_csv, ParseOptions};
use crate::parametric::ParametricDistribution;
use crate::quadrature::QuadratureOptions;
use crate::quantile::QuantileFunction;

#[derive(Debug, Parser)]
#[command(name = "ginin", version, about = "Higher-order Gini deviations and coefficients")]
pub struct Cli {
    /// Output format (default: csv, except json for simulate and backtest).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for simulation and bootstrap.
    #[arg(long, global = true, env = "GININ_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Relative tolerance for adaptive quadrature.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// GD_n and GC_n of a parametric distribution.
    Compute(ComputeArgs),
    /// Point estimate and confidence interval from a sample file.
    Estimate(EstimateArgs),
    /// Monte Carlo sampling distribution of the estimator.
    Simulate(SimulateArgs),
    /// Sharp bounds and their witnesses.
    Bounds(BoundsArgs),
    /// Comparative backtest of two forecasts under a consistent score.
    Backtest(BacktestArgs),
    /// GC_n and top-share panel from grouped percentile data.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Distribution as family:p1[,p2[,p3]], e.g. pareto:3,2.
    #[arg(long)]
    pub dist: ParametricDistribution,
    #[arg(long, value_delimiter = ',', required = true)]
    pub order: Vec<u32>,
    /// Skip closed forms and integrate the quantile numerically.
    #[arg(long)]
    pub quadrature: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Newline-delimited sample, or - for standard input.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub order: u32,
    /// pointwise or exact.
    #[arg(long, default_value = "pointwise")]
    pub scheme: WeightScheme,
    #[arg(long, default_value = "gc")]
    pub target: Target,
    /// Bootstrap replications; the plug-in asymptotic interval is used when absent.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub dist: ParametricDistribution,
    #[arg(long)]
    pub order: u32,
    #[arg(long)]
    pub sample_size: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, default_value = "gc")]
    pub target: Target,
    /// pointwise or exact.
    #[arg(long, default_value = "pointwise")]
    pub scheme: WeightScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Sd,
    Ratio,
    Choquet,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Grid size for the choquet search and the sd witness.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    /// Power-basis coefficients of the numerator distortion (choquet only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Option<Vec<f64>>,
    /// Power-basis coefficients of the denominator distortion (choquet only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub g: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    GdM2,
    GdM1,
    GcM1,
    Poly,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    #[arg(long)]
    pub order: Option<u32>,
    /// Score coefficients a_1..a_n for the poly variant.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Observations separated by whitespace or commas, read in consecutive
    /// groups of n; or - for standard input.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "2,5,10,20")]
    pub orders: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1")]
    pub shares: Vec<f64>,
    /// Sort non-monotone bracket averages instead of rejecting the row.
    #[arg(long)]
    pub allow_nonmonotone: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => {
                // The writers need not be Send; buffer inside the pool.
                let (mut o, mut e) = (Vec::new(), Vec::new());
                let r = pool.install(|| dispatch(&cli, &mut o, &mut e));
                let _ = out.write_all(&o);
                let _ = err.write_all(&e);
                r
            }
            Err(e) => Err(GiniError::domain(format!("cannot start {t} threads: {e}"))),
        },
        None => dispatch(&cli, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &GiniError) -> i32 {
    if e.is_convergence() {
        2
    } else {
        1
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut quad = QuadratureOptions::default();
    if let Some(t) = cli.rel_tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(GiniError::domain(format!("--rel-tol {t} outside (0,1)")));
        }
        quad.rel_tol = t;
    }
    let csv_default = cli.format.unwrap_or(Format::Csv);
    let json_default = cli.format.unwrap_or(Format::Json);
    match &cli.command {
        Command::Compute(a) => compute(a, &quad, csv_default, out),
        Command::Estimate(a) => estimate(a, cli.seed, csv_default, out),
        Command::Simulate(a) => {
            let s = simulate_sampling_distribution(
                &a.dist,
                order(a.order)?,
                a.sample_size,
                a.reps,
                cli.seed,
                a.target,
                a.scheme,
            )?;
            emit(json_default, &[s.to_json()], out)?;
            Ok(0)
        }
        Command::Bounds(a) => bounds(a, csv_default, out),
        Command::Backtest(a) => backtest(a, json_default, out, err),
        Command::Analyze(a) => analyze(a, csv_default, out, err),
    }
}

fn order(n: u32) -> Result<GiniOrder> {
    GiniOrder::new(n)
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| GiniError::Io(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(f)))
}

fn compute(a: &ComputeArgs, quad: &QuadratureOptions, format: Format, out: &mut dyn Write) -> Result<i32> {
    let q = QuantileFunction::Parametric(a.dist);
    let mut rows = Vec::with_capacity(a.order.len());
    for &n in &a.order {
        let n = order(n)?;
        let (gd, gc, method) = if a.quadrature {
            let gd = gd_quadrature(&a.dist, n, quad)?;
            let gc = match a.dist.mean() {
                Ok(m) if m > 0.0 && a.dist.support().0 >= 0.0 => Some(gd / m),
                _ => None,
            };
            (gd, gc, "quadrature")
        } else {
            let method = if a.dist.closed_form_gd(n)?.is_some() { "closed-form" } else { "quadrature" };
            let gc = match gc_n_with(&q, n, quad) {
                Ok(v) => Some(v),
                Err(GiniError::Domain(_)) => None,
                Err(e) => return Err(e),
            };
            (gd_n_with(&q, n, quad)?, gc, method)
        };
        rows.push(json!({
            "dist": a.dist.to_string(),
            "order": n.get(),
            "gd": gd,
            "gc": gc,
            "method": method,
        }));
    }
    emit_table(format, &rows, out)?;
    Ok(0)
}

fn estimate_json(r: &EstimateReport) -> Value {
    json!({
        "target": r.target,
        "order": r.order.get(),
        "sample_size": r.sample_size,
        "point": r.point,
        "scheme": r.scheme,
        "std_error": r.std_error,
        "ci_level": r.ci_level,
        "ci_lower": r.ci.0,
        "ci_upper": r.ci.1,
        "method": r.method,
        "replications": r.replications,
    })
}

fn estimate(a: &EstimateArgs, seed: u64, format: Format, out: &mut dyn Write) -> Result<i32> {
    let sample = Sample::from_reader(open_input(&a.input)?)?;
    let n = order(a.order)?;
    let report = match a.bootstrap {
        Some(reps) => bootstrap_ci(&sample, n, a.target, a.scheme, a.level, reps, seed)?,
        None => plugin_asymptotic_ci(&sample, n, a.target, a.scheme, a.level)?,
    };
    emit(format, &[estimate_json(&report)], out)?;
    Ok(0)
}

fn ratio_json(kind: &str, m: GiniOrder, n: GiniOrder, b: &RatioBound) -> Value {
    json!({
        "kind": kind,
        "m": m.get(),
        "n": n.get(),
        "lower": b.lower,
        "upper": b.upper,
        "lower_witness": b.lower_witness.description,
        "lower_attained": b.lower_witness.attained,
        "upper_witness": b.upper_witness.description,
        "upper_attained": b.upper_witness.attained,
    })
}

fn bounds(a: &BoundsArgs, format: Format, out: &mut dyn Write) -> Result<i32> {
    let need = |v: Option<u32>, flag: &str| {
        v.ok_or_else(|| GiniError::domain(format!("bounds --kind {:?} needs --{flag}", a.kind).to_lowercase()))
            .and_then(order)
    };
    let row = match a.kind {
        BoundKind::Sd => {
            let n = need(a.n, "n")?;
            let witness = sd_bound_witness(n, a.grid)?;
            json!({
                "kind": "sd",
                "n": n.get(),
                "upper": sd_ratio_upper_bound(n),
                "upper_squared_exact": sd_ratio_bound_squared_exact(n).map(|(p, q)| format!("{p}/{q}")),
                "witness": format!("step discretization of the extremal quantile on {} cells", a.grid),
                "witness_ratio": sd_ratio(&witness, n)?,
            })
        }
        BoundKind::Ratio => {
            let (m, n) = (need(a.m, "m")?, need(a.n, "n")?);
            ratio_json("ratio", m, n, &gd_ratio_bounds(m, n)?)
        }
        BoundKind::Choquet => {
            let h = match &a.h {
                Some(c) => DistortionFunction::polynomial(c.clone())?,
                None => DistortionFunction::canonical(need(a.n, "n")?),
            };
            let g = match &a.g {
                Some(c) => DistortionFunction::polynomial(c.clone())?,
                None => DistortionFunction::canonical(need(a.m, "m")?),
            };
            let b = choquet_ratio_bounds(&h, &g, a.grid)?;
            json!({
                "kind": "choquet",
                "h_degree": h.degree(),
                "g_degree": g.degree(),
                "grid": a.grid,
                "lower": b.lower,
                "upper": b.upper,
                "lower_witness": b.lower_witness.description,
                "lower_attained": b.lower_witness.attained,
                "upper_witness": b.upper_witness.description,
                "upper_attained": b.upper_witness.attained,
            })
        }
    };
    emit(format, &[row], out)?;
    Ok(0)
}

fn read_numbers(mut r: impl Read) -> Result<Vec<f64>> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(|e| GiniError::Io(e.to_string()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v: f64 = tok.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| GiniError::Parse {
                line: i + 1,
                message: format!("'{tok}' is not a finite decimal number"),
            })?;
            values.push(v);
        }
    }
    Ok(values)
}

fn backtest(a: &BacktestArgs, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let need_order = || {
        a.order
            .ok_or_else(|| GiniError::domain("this variant needs --order"))
            .and_then(order)
    };
    let variant = match a.variant {
        VariantArg::GdM2 => ScoreVariant::GdM2 { n: need_order()? },
        VariantArg::GdM1 => ScoreVariant::GdM1 { n: need_order()? },
        VariantArg::GcM1 => ScoreVariant::GcM1 { n: need_order()? },
        VariantArg::Poly => {
            let c = a.coeffs.clone().ok_or_else(|| GiniError::domain("the poly variant needs --coeffs"))?;
            let v = ScoreVariant::poly(c)?;
            if let Some(n) = a.order {
                if n as usize != v.arity() {
                    return Err(GiniError::Arity { expected: n as usize, got: v.arity() });
                }
            }
            v
        }
    };
    let values = read_numbers(open_input(&a.input)?)?;
    let arity = variant.arity();
    let leftover = values.len() % arity;
    if leftover != 0 {
        let _ = writeln!(err, "warning: ignoring {leftover} trailing observations that do not fill a tuple of {arity}");
    }
    let tuples = chunk_tuples(&values, arity)?;
    let r = comparative_backtest(&variant, a.a, a.b, &tuples)?;
    let row = json!({
        "variant": r.variant,
        "n": r.n,
        "forecast_a": r.forecast_a,
        "forecast_b": r.forecast_b,
        "mean_score_a": r.mean_score_a,
        "mean_score_b": r.mean_score_b,
        "mean_diff": r.mean_diff,
        "t_statistic": r.t_statistic,
        "p_value": r.p_value(),
        "tuples": r.tuples,
        "degenerate": r.degenerate,
    });
    emit(format, &[row], out)?;
    Ok(0)
}

fn analyze(a: &AnalyzeArgs, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let orders: Vec<GiniOrder> = a.orders.iter().map(|&n| order(n)).collect::<Result<_>>()?;
    let data = parse_percentile_csv(
        open_input(&a.input)?,
        ParseOptions {
            allow_nonmonotone: a.allow_nonmonotone,
        },
    )?;
    let table = gini_panel(&data, &orders, &a.shares);
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => pretty(&table.to_json())?,
    };
    write_out(out, &text)?;
    for e in &table.errors {
        let _ = writeln!(err, "error: {} {}: {}", e.entity, e.year, e.message);
    }
    for r in table.rows.iter().filter(|r| r.nonmonotone) {
        let _ = writeln!(err, "warning: {} {}: bracket averages were sorted", r.entity, r.year);
    }
    Ok(if table.errors.is_empty() { 0 } else { 1 })
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| GiniError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| GiniError::Io(e.to_string()))
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(x) => match (x.as_i64(), x.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => format_significant(x.as_f64().unwrap_or(f64::NAN), 9),
        },
        Value::String(s) => csv_field(s),
        other => csv_field(&other.to_string()),
    }
}

fn rows_to_csv(rows: &[Value]) -> String {
    let Some(Value::Object(first)) = rows.first() else {
        return String::new();
    };
    let header: Vec<&String> = first.keys().collect();
    let mut s = header.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    s.push('\n');
    let empty = Map::new();
    for row in rows {
        let obj = row.as_object().unwrap_or(&empty);
        let line: Vec<String> = header.iter().map(|k| obj.get(*k).map_or(String::new(), csv_value)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// One record: a header and one row in CSV, an object in JSON.
fn emit(format: Format, rows: &[Value], out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => write_out(out, &rows_to_csv(rows)),
        Format::Json => write_out(out, &pretty(&rows[0])?),
    }
}

/// Several records: CSV table or JSON array.
fn emit_table(format: Format, rows: &[Value], out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => write_out(out, &rows_to_csv(rows)),
        Format::Json => write_out(out, &pretty(&Value::Array(rows.to_vec()))?),
    }
}
