//! Per-scenario metric tables: CSV, JSON summary and tidy plot data.

use serde::Serialize;

use crate::CliError;

pub const CSV_HEADER: &str = "scenario,n,delta,metric,value,se,target,pass";
pub const PLOT_HEADER: &str = "scenario,n,metric,value,se,target";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub n: usize,
    pub delta: f64,
    pub metric: String,
    pub value: f64,
    pub se: Option<f64>,
    pub target: Option<f64>,
    /// `None` for diagnostics that carry no verdict.
    pub pass: Option<bool>,
}

impl Row {
    pub fn new(n: usize, delta: f64, metric: impl Into<String>, value: f64) -> Self {
        Self { n, delta, metric: metric.into(), value, se: None, target: None, pass: None }
    }
    pub fn se(mut self, se: f64) -> Self {
        self.se = Some(se);
        self
    }
    pub fn target(mut self, t: f64) -> Self {
        self.target = Some(t);
        self
    }
    pub fn pass(mut self, p: bool) -> Self {
        self.pass = Some(p);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub kind: String,
    pub rows: Vec<Row>,
}

#[derive(Serialize)]
struct Summary<'a> {
    schema: u32,
    scenario: &'a str,
    kind: &'a str,
    pass: bool,
    checks: usize,
    failed: Vec<&'a str>,
    rows: &'a [Row],
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failed_metrics(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| r.pass == Some(false)).map(|r| r.metric.as_str()).collect()
    }

    pub fn find(&self, metric: &str) -> Option<&Row> {
        self.rows.iter().rev().find(|r| r.metric == metric)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let pass = match r.pass {
                Some(true) => "true",
                Some(false) => "false",
                None => "na",
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.scenario,
                r.n,
                r.delta,
                r.metric,
                r.value,
                opt(r.se),
                opt(r.target),
                pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let s = Summary {
            schema: 1,
            scenario: &self.scenario,
            kind: &self.kind,
            pass: self.passed(),
            checks: self.rows.iter().filter(|r| r.pass.is_some()).count(),
            failed: self.failed_metrics(),
            rows: &self.rows,
        };
        serde_json::to_string_pretty(&s).expect("report serializes")
    }
}

/// Tidy `(scenario, n, metric, value, se, target)` rows, optionally
/// restricted to one metric.
pub fn emit_plotdata(report: &Report, which: Option<&str>) -> Result<String, CliError> {
    if let Some(m) = which {
        if !report.rows.iter().any(|r| r.metric == m) {
            return Err(CliError::Usage(format!("unknown metric '{m}' in scenario {}", report.scenario)));
        }
    }
    let mut out = String::from(PLOT_HEADER);
    out.push('\n');
    for r in report.rows.iter().filter(|r| which.is_none_or(|m| r.metric == m)) {
        out.push_str(&format!("{},{},{},{},{},{}\n", report.scenario, r.n, r.metric, r.value, opt(r.se), opt(r.target)));
    }
    Ok(out)
}

/// A parsed plot-data line.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotRow {
    pub scenario: String,
    pub n: usize,
    pub metric: String,
    pub value: f64,
    pub se: Option<f64>,
    pub target: Option<f64>,
}

pub fn parse_plotdata(text: &str) -> Result<Vec<PlotRow>, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some(PLOT_HEADER) {
        return Err(CliError::Usage("plot data header missing".into()));
    }
    let num = |s: &str| -> Result<Option<f64>, CliError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| CliError::Usage(format!("bad number '{s}'")))
        }
    };
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(CliError::Usage(format!("bad plot data line '{l}'")));
            }
            Ok(PlotRow {
                scenario: f[0].to_string(),
                n: f[1].parse().map_err(|_| CliError::Usage(format!("bad n '{}'", f[1])))?,
                metric: f[2].to_string(),
                value: num(f[3])?.ok_or_else(|| CliError::Usage("missing value".into()))?,
                se: num(f[4])?,
                target: num(f[5])?,
            })
        })
        .collect()
}
