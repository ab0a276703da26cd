//! Report layout and its JSON / CSV serializations.

use expfam::{Measure, MeasureResult, OracleEstimate};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cli::OutputFormat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleJson {
    pub value: f64,
    pub error_bound: f64,
    pub method: String,
}

impl From<&OracleEstimate> for OracleJson {
    fn from(e: &OracleEstimate) -> Self {
        OracleJson { value: e.value, error_bound: e.error_bound, method: e.method.as_str().to_owned() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub measure: String,
    pub alpha: Option<f64>,
    pub value: f64,
    pub branch: String,
    pub oracle: Option<OracleJson>,
    pub pass: Option<bool>,
    /// Set on `verify` rows, which span several distributions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params2: Option<Value>,
}

impl Row {
    pub fn new(measure: Measure, alpha: Option<f64>, r: &MeasureResult) -> Self {
        Row {
            measure: measure.name().to_owned(),
            alpha,
            value: r.value,
            branch: r.branch.as_str().to_owned(),
            oracle: None,
            pass: None,
            family: None,
            params: None,
            params2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    /// `data` or `data2`.
    pub sample: String,
    pub n: usize,
    pub params: Value,
    /// Natural parameter coordinates: vector part, then the row-major matrix part.
    pub theta: Vec<f64>,
    pub mean_sufficient_stat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub request: Value,
    pub results: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimates: Option<Vec<EstimateRow>>,
}

/// Shortest decimal that reads back as the same binary64.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("f64 serializes")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn to_csv(report: &Report) -> csv::Result<Vec<u8>> {
    let mut out = Vec::new();
    if let Some(estimates) = &report.estimates {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["sample", "n", "params", "theta", "mean_sufficient_stat"])?;
        let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
        for e in estimates {
            w.write_record([
                e.sample.clone(),
                e.n.to_string(),
                e.params.to_string(),
                join(&e.theta),
                join(&e.mean_sufficient_stat),
            ])?;
        }
        w.flush()?;
        drop(w);
        if report.results.is_empty() {
            return Ok(out);
        }
        out.push(b'\n');
    }
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record([
        "measure",
        "alpha",
        "value",
        "branch",
        "oracle_value",
        "oracle_error_bound",
        "oracle_method",
        "pass",
        "family",
        "params",
        "params2",
    ])?;
    for r in &report.results {
        let o = r.oracle.as_ref();
        w.write_record([
            r.measure.clone(),
            opt(r.alpha),
            num(r.value),
            r.branch.clone(),
            opt(o.map(|o| o.value)),
            opt(o.map(|o| o.error_bound)),
            o.map(|o| o.method.clone()).unwrap_or_default(),
            r.pass.map(|p| p.to_string()).unwrap_or_default(),
            r.family.clone().unwrap_or_default(),
            r.params.as_ref().map(Value::to_string).unwrap_or_default(),
            r.params2.as_ref().map(Value::to_string).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    drop(w);
    Ok(out)
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let buf = to_csv(report).expect("writing to memory succeeds");
            String::from_utf8(buf).expect("CSV output is UTF-8")
        }
    }
}
