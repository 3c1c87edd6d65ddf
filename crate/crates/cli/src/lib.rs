//! Table runner behind the `wwrcva` binary.
//!
//! A run reads a TOML configuration, evaluates the requested methods over a
//! correlation grid and renders one row per `(ρ, method)` pair.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use wwrcva::analytic::independence_cva;
use wwrcva::corr_expansion::{g1, CorrelationExpansion};
use wwrcva::drift_adjustment::cva_drift_adjust;
use wwrcva::montecarlo::{mc_sweep, McTarget};
use wwrcva::vol_expansion::VolatilityExpansion;
use wwrcva::{CvaError, Method, RunConfig};

/// Correlations of the published comparison tables.
pub const TABLE_RHOS: [f64; 10] = [-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9];

/// Output layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = CvaError;

    fn from_str(s: &str) -> Result<Self, CvaError> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(CvaError::Config(format!("unknown format '{s}' (expected csv or markdown)"))),
        }
    }
}

/// What each row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantity {
    #[default]
    Cva,
    /// Defaultable call price.
    Price,
}

/// Parses `a,b,c` or an inclusive range `start:stop:step`.
pub fn parse_rho_grid(text: &str) -> Result<Vec<f64>, CvaError> {
    let bad = |what: &str| CvaError::Config(format!("invalid rho grid '{text}': {what}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("ranges are start:stop:step"));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Round so that 0.1-style steps print cleanly.
        (0..n)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        text.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err(bad("empty"));
    }
    if let Some(r) = grid.iter().find(|r| !(r.abs() <= 1.0)) {
        return Err(bad(&format!("{r} lies outside [-1, 1]")));
    }
    Ok(grid)
}

/// Parses a comma-separated method list; `all` selects every method.
pub fn parse_methods(text: &str) -> Result<Vec<Method>, CvaError> {
    if text.trim() == "all" {
        return Ok(Method::ALL.to_vec());
    }
    let mut methods = Vec::new();
    for m in text.split(',').filter(|s| !s.trim().is_empty()) {
        let m: Method = m.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(CvaError::Config("no methods selected".into()));
    }
    Ok(methods)
}

/// A table run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub config: RunConfig,
    pub methods: Vec<Method>,
    pub rho_grid: Vec<f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub quantity: Quantity,
    /// Fill the runtime column. Off by default so output is reproducible.
    pub timings: bool,
}

impl RunSpec {
    pub fn new(config: RunConfig) -> Self {
        Self {
            config,
            methods: Method::ALL.to_vec(),
            rho_grid: TABLE_RHOS.to_vec(),
            output: None,
            format: Format::Csv,
            quantity: Quantity::Cva,
            timings: false,
        }
    }
}

/// One `(ρ, method)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub rho: f64,
    pub method: Method,
    /// `Err` carries the failure message.
    pub value: Result<f64, String>,
    pub ci95_halfwidth: Option<f64>,
    /// `MC − value`.
    pub err_vs_mc: Option<f64>,
    /// Seconds for the method's whole sweep.
    pub runtime_s: f64,
}

/// Rows in `(ρ, method)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: Vec<Row>,
    pub methods: Vec<Method>,
    pub timings: bool,
}

impl Table {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.value.is_err())
    }

    pub fn value(&self, rho: f64, method: Method) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.rho == rho && r.method == method)
            .and_then(|r| r.value.as_ref().ok().copied())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => self.to_markdown(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,method,value,ci95_halfwidth,err_vs_mc,runtime_s\n");
        for r in &self.rows {
            let value = match &r.value {
                Ok(v) => format!("{v:.10}"),
                Err(_) => "error".to_string(),
            };
            let opt = |v: Option<f64>| v.map(|v| format!("{v:.10}")).unwrap_or_default();
            let runtime = if self.timings { format!("{:.6}", r.runtime_s) } else { String::new() };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.rho,
                r.method,
                value,
                opt(r.ci95_halfwidth),
                opt(r.err_vs_mc),
                runtime
            );
        }
        out
    }

    /// One row per `ρ`, `value (MC − value)` per method; the MC cell shows
    /// the 95% half-width instead.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| rho |");
        for m in &self.methods {
            let _ = write!(out, " {m} |");
        }
        out.push_str("\n|---:|");
        out.push_str(&"---:|".repeat(self.methods.len()));
        out.push('\n');
        let mut rhos: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !rhos.contains(&r.rho) {
                rhos.push(r.rho);
            }
        }
        for rho in rhos {
            let _ = write!(out, "| {rho} |");
            for m in &self.methods {
                let cell = self.rows.iter().find(|r| r.rho == rho && r.method == *m);
                let text = match cell {
                    Some(Row { value: Ok(v), ci95_halfwidth: Some(ci), .. }) => format!("{v:.5} ({ci:.5})"),
                    Some(Row { value: Ok(v), err_vs_mc: Some(e), .. }) => format!("{v:.5} ({e:.5})"),
                    Some(Row { value: Ok(v), .. }) => format!("{v:.5}"),
                    Some(Row { value: Err(_), .. }) => "error".to_string(),
                    None => String::new(),
                };
                let _ = write!(out, " {text} |");
            }
            out.push('\n');
        }
        if self.timings {
            out.push_str("\n| method | sweep runtime (s) |\n|---|---:|\n");
            for m in &self.methods {
                if let Some(r) = self.rows.iter().find(|r| r.method == *m) {
                    let _ = writeln!(out, "| {m} | {:.4} |", r.runtime_s);
                }
            }
        }
        out
    }
}

type Column = (Vec<Result<f64, String>>, Vec<Option<f64>>, f64);

fn column(spec: &RunSpec, method: Method) -> Column {
    let cfg = &spec.config;
    let params = cfg.params();
    let contract = &cfg.contract;
    let numerics = &cfg.numerics;
    let rhos = &spec.rho_grid;
    let lgd = contract.loss_given_default();
    let start = Instant::now();
    let n = rhos.len();
    let fail = |e: CvaError| (vec![Err(e.to_string()); n], vec![None; n]);

    // Defaultable price recovered from a CVA: u = c_BS − CVA/(1 − R).
    let call = wwrcva::analytic::bs_call(
        params.equity.log_spot(),
        0.0,
        contract.maturity,
        params.equity.sigma,
        params.rate.r,
        contract.strike,
    );
    let to_quantity = |cva: f64| -> Result<f64, String> {
        match spec.quantity {
            Quantity::Cva => Ok(cva),
            Quantity::Price => call.clone().map(|c| c - cva / lgd).map_err(|e| e.to_string()),
        }
    };

    let (values, cis) = match method {
        Method::Independence => match independence_cva(&params, contract) {
            Ok(v) => (vec![to_quantity(v); n], vec![None; n]),
            Err(e) => fail(e),
        },
        Method::CorrExp => match CorrelationExpansion::new(&params, contract, numerics) {
            Ok(e) => (rhos.iter().map(|&r| to_quantity(e.cva(r))).collect(), vec![None; n]),
            Err(e) => fail(e),
        },
        Method::VolExp => match VolatilityExpansion::new(&params, contract, numerics) {
            Ok(e) => (rhos.iter().map(|&r| to_quantity(e.cva(r))).collect(), vec![None; n]),
            Err(e) => fail(e),
        },
        Method::DriftAdj => (
            rhos.iter()
                .map(|&r| {
                    cva_drift_adjust(&params, contract, r, numerics)
                        .map_err(|e| e.to_string())
                        .and_then(|res| to_quantity(res.value))
                })
                .collect(),
            vec![None; n],
        ),
        Method::MonteCarlo => {
            let targets: Vec<_> = rhos
                .iter()
                .map(|&rho| match spec.quantity {
                    Quantity::Cva => McTarget::Cva { rho },
                    Quantity::Price => McTarget::Price { rho },
                })
                .collect();
            match mc_sweep(&params, contract, &targets, &cfg.mc) {
                Ok(est) => (
                    est.iter().map(|e| Ok(e.value)).collect(),
                    est.iter().map(|e| Some(e.ci95_halfwidth)).collect(),
                ),
                Err(e) => fail(e),
            }
        }
    };
    (values, cis, start.elapsed().as_secs_f64())
}

/// Evaluates every method over the grid. Method failures are recorded in
/// their rows; only configuration problems abort the run.
pub fn run_table(spec: &RunSpec) -> Result<Table, CvaError> {
    spec.config.validate()?;
    if spec.rho_grid.is_empty() {
        return Err(CvaError::Config("rho grid is empty".into()));
    }
    if let Some(r) = spec.rho_grid.iter().find(|r| !(r.abs() <= 1.0)) {
        return Err(CvaError::Config(format!("rho {r} lies outside [-1, 1]")));
    }
    let columns: Vec<(Method, Column)> = spec.methods.iter().map(|&m| (m, column(spec, m))).collect();
    let mc = columns.iter().find(|(m, _)| *m == Method::MonteCarlo).map(|(_, c)| &c.0);
    let mut rows = Vec::new();
    for (i, &rho) in spec.rho_grid.iter().enumerate() {
        for (method, (values, cis, runtime)) in &columns {
            let err_vs_mc = match (mc, &values[i]) {
                (Some(mc), Ok(v)) if *method != Method::MonteCarlo => mc[i].as_ref().ok().map(|m| m - v),
                _ => None,
            };
            rows.push(Row {
                rho,
                method: *method,
                value: values[i].clone(),
                ci95_halfwidth: cis[i],
                err_vs_mc,
                runtime_s: *runtime,
            });
        }
    }
    Ok(Table {
        rows,
        methods: spec.methods.clone(),
        timings: spec.timings,
    })
}

/// `g1` of the configured contract for each intensity volatility.
#[derive(Debug, Clone, PartialEq)]
pub struct G1Row {
    pub eta: f64,
    pub g1: Result<f64, String>,
    pub runtime_s: f64,
}

pub const TABLE_ETAS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

pub fn run_g1_table(config: &RunConfig, etas: &[f64]) -> Result<Vec<G1Row>, CvaError> {
    config.validate()?;
    if let Some(e) = etas.iter().find(|e| !(**e > 0.0)) {
        return Err(CvaError::Config(format!("eta {e} must be positive")));
    }
    let base = config.params();
    let c = &config.contract;
    Ok(etas
        .iter()
        .map(|&eta| {
            let start = Instant::now();
            let p = base.with_eta(eta);
            let g1 = g1(
                p.equity.log_spot(),
                p.cir.lambda0,
                0.0,
                c.maturity,
                &p,
                c.strike,
                &config.numerics,
            )
            .map(|b| b.g1)
            .map_err(|e| e.to_string());
            G1Row {
                eta,
                g1,
                runtime_s: start.elapsed().as_secs_f64(),
            }
        })
        .collect())
}

pub fn render_g1(rows: &[G1Row], format: Format, timings: bool) -> String {
    let mut out = String::new();
    let fmt = |r: &G1Row| match &r.g1 {
        Ok(v) => (format!("{v:.10}"), format!("{:.10}", v.abs())),
        Err(_) => ("error".to_string(), "error".to_string()),
    };
    match format {
        Format::Csv => {
            out.push_str("eta,g1,abs_g1,runtime_s\n");
            for r in rows {
                let (g, a) = fmt(r);
                let t = if timings { format!("{:.6}", r.runtime_s) } else { String::new() };
                let _ = writeln!(out, "{},{g},{a},{t}", r.eta);
            }
        }
        Format::Markdown => {
            out.push_str("| eta | abs(g1) |\n|---:|---:|\n");
            for r in rows {
                let a = match &r.g1 {
                    Ok(v) => format!("{:.4}", v.abs()),
                    Err(_) => "error".into(),
                };
                let _ = writeln!(out, "| {} | {a} |", r.eta);
            }
        }
    }
    out
}
