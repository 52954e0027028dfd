//! Rendering of fit, comparison and experiment reports as aligned text,
//! CSV or JSON. Machine formats carry 17 significant digits, text tables 5.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use vbcomp_core::sim::ExperimentResult;
use vbcomp_core::vb::VbPosterior;
use vbcomp_core::{Criterion, CriterionReport};

pub const SCHEMA_ID: &str = "report-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(usize),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

/// Five significant digits, fixed notation where it stays readable.
pub fn sig5(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..10).contains(&e) {
        format!("{:.*}", (4 - e).max(0) as usize, v)
    } else {
        format!("{v:.4e}")
    }
}

/// Seventeen significant digits; parses back to the same `f64`.
pub fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Self {
            title: title.to_owned(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    fn cells(&self, num: fn(f64) -> String) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Text(s) => s.clone(),
                        Cell::Num(v) => num(*v),
                        Cell::Int(v) => v.to_string(),
                        Cell::Empty => String::new(),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let body = self.cells(sig5);
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &body {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let numeric: Vec<bool> = (0..width.len())
            .map(|j| {
                self.rows
                    .iter()
                    .any(|r| matches!(r.get(j), Some(Cell::Num(_) | Cell::Int(_))))
            })
            .collect();
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "{}", self.title);
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(width.iter().zip(&numeric))
                .map(|(c, (w, right))| {
                    if *right {
                        format!("{c:>w$}")
                    } else {
                        format!("{c:<w$}")
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_owned()
        };
        let _ = writeln!(out, "{}", line(&self.headers));
        for row in &body {
            let _ = writeln!(out, "{}", line(row));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in self.cells(sig17) {
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

/// Text joins tables with their titles; CSV separates them by blank lines.
pub fn render_tables(tables: &[Table], format: Format) -> String {
    let parts: Vec<String> = tables
        .iter()
        .map(|t| match format {
            Format::Csv => t.to_csv(),
            _ => t.to_text(),
        })
        .collect();
    parts.join("\n")
}

pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn meta(command: &str, settings: Value) -> Value {
    json!({
        "tool": "vbcomp",
        "version": env!("CARGO_PKG_VERSION"),
        "schema": SCHEMA_ID,
        "command": command,
        "settings": settings,
    })
}

pub fn to_json(meta: Value, key: &str, body: Value) -> String {
    let mut top = Map::new();
    top.insert("meta".into(), meta);
    top.insert(key.into(), body);
    let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
    s.push('\n');
    s
}

/// A fitted posterior with the labels needed for reporting.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub model_id: String,
    pub names: Vec<String>,
    pub n: usize,
    pub posterior: VbPosterior,
}

impl FitReport {
    fn coefficient_rows(&self) -> Vec<(String, f64, f64)> {
        let (mu, cov) = match &self.posterior {
            VbPosterior::Linear(p) => (&p.mu_beta, &p.v_beta),
            VbPosterior::Probit(p) => (&p.mu_beta, &p.sigma_beta),
        };
        self.names
            .iter()
            .enumerate()
            .map(|(j, name)| (name.clone(), mu[j], cov[(j, j)]))
            .collect()
    }

    fn summary(&self) -> Vec<(&'static str, Cell)> {
        let mut rows = vec![
            ("model", Cell::from(self.model_id.as_str())),
            ("kind", Cell::from(self.posterior.kind().name())),
            ("n", Cell::Int(self.n)),
            ("elbo", Cell::Num(self.posterior.elbo())),
            ("iterations", Cell::Int(self.posterior.iterations())),
        ];
        if let VbPosterior::Linear(p) = &self.posterior {
            rows.push(("a_h", Cell::Num(p.a_h)));
            rows.push(("b_h", Cell::Num(p.b_h)));
            rows.push(("h_mean", Cell::Num(p.mean_precision())));
        }
        rows
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut summary = Table::new("Variational posterior", &["quantity", "value"]);
        for (k, v) in self.summary() {
            summary.push(vec![k.into(), v]);
        }
        let mut coef = Table::new("Coefficients q(β)", &["parameter", "mean", "variance"]);
        for (name, m, v) in self.coefficient_rows() {
            coef.push(vec![name.into(), m.into(), v.into()]);
        }
        vec![summary, coef]
    }

    pub fn json(&self) -> Value {
        let coefficients: Vec<Value> = self
            .coefficient_rows()
            .into_iter()
            .map(|(name, m, v)| json!({"parameter": name, "mean": num(m), "variance": num(v)}))
            .collect();
        let mut body = json!({
            "model": self.model_id,
            "kind": self.posterior.kind().name(),
            "n": self.n,
            "elbo": num(self.posterior.elbo()),
            "iterations": self.posterior.iterations(),
            "coefficients": coefficients,
        });
        if let VbPosterior::Linear(p) = &self.posterior {
            body["precision"] = json!({"a_h": num(p.a_h), "b_h": num(p.b_h), "mean": num(p.mean_precision())});
        }
        body
    }
}

/// Outcome of `compare`: rows for every successful candidate and criterion.
#[derive(Debug, Clone, Default)]
pub struct CompareReport {
    pub rows: Vec<CriterionReport>,
    pub winners: BTreeMap<Criterion, String>,
    /// `(model id, error message)` for candidates that could not be fitted.
    pub failed: Vec<(String, String)>,
    pub criteria: Vec<Criterion>,
}

impl CompareReport {
    pub fn tables(&self) -> Vec<Table> {
        let mut main = Table::new("Criteria", &["model", "criterion", "fit", "penalty", "value"]);
        for c in &self.criteria {
            for r in self.rows.iter().filter(|r| r.criterion == *c) {
                main.push(vec![
                    r.meta.model_id.as_str().into(),
                    c.label().into(),
                    r.fit_term.into(),
                    r.penalty.into(),
                    r.value.into(),
                ]);
            }
        }
        let mut winners = Table::new("Winners", &["criterion", "winner"]);
        for (c, w) in &self.winners {
            winners.push(vec![c.label().into(), w.as_str().into()]);
        }
        let mut tables = vec![main, winners];
        if !self.failed.is_empty() {
            let mut failed = Table::new("Failed candidates", &["model", "error"]);
            for (m, e) in &self.failed {
                failed.push(vec![m.as_str().into(), e.as_str().into()]);
            }
            tables.push(failed);
        }
        tables
    }

    pub fn json(&self) -> Value {
        let rows: Vec<Value> = self
            .criteria
            .iter()
            .flat_map(|c| self.rows.iter().filter(move |r| r.criterion == *c))
            .map(|r| {
                json!({
                    "model": r.meta.model_id,
                    "criterion": r.criterion.label(),
                    "fit": num(r.fit_term),
                    "penalty": num(r.penalty),
                    "value": num(r.value),
                })
            })
            .collect();
        let winners: Map<String, Value> = self
            .winners
            .iter()
            .map(|(c, w)| (c.label().to_owned(), Value::from(w.as_str())))
            .collect();
        let failed: Vec<Value> = self
            .failed
            .iter()
            .map(|(m, e)| json!({"model": m, "error": e}))
            .collect();
        json!({"rows": rows, "winners": winners, "failed": failed})
    }
}

pub fn experiment_tables(res: &ExperimentResult) -> Vec<Table> {
    let mut headers = vec!["criterion".to_owned()];
    headers.extend(res.candidates.iter().cloned());
    let mut freq = Table {
        title: "Selection frequency".into(),
        headers,
        rows: Vec::new(),
    };
    for (c, hist) in &res.freq {
        let mut row = vec![Cell::from(c.label())];
        row.extend(hist.iter().map(|v| Cell::Int(*v)));
        freq.push(row);
    }
    let mut avg = Table::new("Average selected index", &["criterion", "avg_k"]);
    for (c, k) in &res.avg_k {
        avg.push(vec![c.label().into(), (*k).into()]);
    }
    let mut risk = Table::new("Estimated risk", &["label", "raw", "scaled", "se"]);
    for (l, r) in &res.risks {
        risk.push(vec![l.label().into(), r.raw.into(), r.scaled.into(), r.se.into()]);
    }
    let mut status = Table::new("Replications", &["quantity", "value"]);
    status.push(vec!["completed".into(), res.per_rep.len().into()]);
    status.push(vec!["failed".into(), res.failures.len().into()]);
    status.push(vec!["candidate_failures".into(), res.candidate_failures.into()]);
    vec![freq, avg, risk, status]
}

pub fn experiment_json(res: &ExperimentResult) -> Value {
    let by_crit = |m: &BTreeMap<Criterion, Vec<usize>>| -> Map<String, Value> {
        m.iter().map(|(c, v)| (c.label().to_owned(), json!(v))).collect()
    };
    let avg_k: Map<String, Value> = res
        .avg_k
        .iter()
        .map(|(c, k)| (c.label().to_owned(), num(*k)))
        .collect();
    let risks: Map<String, Value> = res
        .risks
        .iter()
        .map(|(l, r)| {
            (
                l.label().to_owned(),
                json!({"raw": num(r.raw), "scaled": num(r.scaled), "se": num(r.se), "reps": r.reps}),
            )
        })
        .collect();
    let per_rep: Vec<Value> = res
        .per_rep
        .iter()
        .map(|r| {
            let selected: Map<String, Value> = r
                .selected
                .iter()
                .map(|(c, k)| (c.label().to_owned(), json!(k)))
                .collect();
            let values: Map<String, Value> = r
                .values
                .iter()
                .map(|(c, v)| {
                    let v: Vec<Value> = v.iter().map(|x| x.map_or(Value::Null, num)).collect();
                    (c.label().to_owned(), Value::Array(v))
                })
                .collect();
            json!({
                "rep": r.rep,
                "seed": r.seed,
                "selected": selected,
                "values": values,
                "failed_candidates": r.failed_candidates,
            })
        })
        .collect();
    let failures: Vec<Value> = res
        .failures
        .iter()
        .map(|f| json!({"rep": f.rep, "seed": f.seed, "error": f.error.to_string()}))
        .collect();
    json!({
        "candidates": res.candidates,
        "covariate_law": res.covariate_law,
        "freq": by_crit(&res.freq),
        "avg_k": avg_k,
        "risks": risks,
        "failures": failures,
        "candidate_failures": res.candidate_failures,
        "per_rep": per_rep,
    })
}
