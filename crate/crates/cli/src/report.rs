use std::fmt::Write as _;

use qtcorr_core::fock::ZetaSeries;
use qtcorr_core::verify::{CheckResult, Status};
use qtcorr_core::VSeries;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Serialize)]
pub struct Entry {
    pub name: String,
    pub status: Status,
    pub deviation: Value,
    pub details: Value,
}

/// Coefficients of a named series as `(v power, ζ power, coefficient)`.
#[derive(Debug)]
pub struct SeriesDump {
    pub name: String,
    pub terms: Vec<(usize, i64, String)>,
    pub pretty: String,
}

impl SeriesDump {
    pub fn from_v(name: &str, s: &VSeries) -> Self {
        let terms = s.coeffs().iter().enumerate().map(|(d, c)| (d, 0, c.to_string())).collect();
        SeriesDump { name: name.into(), terms, pretty: s.to_string() }
    }

    pub fn from_zeta(name: &str, s: &ZetaSeries) -> Self {
        let terms: Vec<_> = s.terms().into_iter().map(|(d, e, c)| (d, e, c.to_string())).collect();
        let pretty = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.iter().map(|(d, e, c)| format!("({c})·v^{d}·ζ^{e}")).collect::<Vec<_>>().join(" + ")
        };
        SeriesDump { name: name.into(), terms, pretty }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Vec<Entry>,
    #[serde(skip)]
    pub series: Vec<SeriesDump>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report { command: command.into(), config, results: Vec::new(), series: Vec::new() }
    }

    pub fn push(&mut self, name: &str, ok: bool, deviation: Value, details: Value) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.results.push(Entry { name: name.into(), status, deviation, details });
    }

    pub fn push_check(&mut self, r: CheckResult) {
        let mut details = r.details;
        if let Value::Object(map) = &mut details {
            map.insert("criterion".into(), r.criterion.into());
            map.insert("informational".into(), r.informational.into());
        } else {
            details = serde_json::json!({ "criterion": r.criterion, "informational": r.informational, "data": details });
        }
        self.results.push(Entry { name: r.name, status: r.status, deviation: r.deviation, details });
    }

    /// Attaches a series: its coefficients go into the JSON `details` of
    /// the named entry and into CSV output.
    pub fn attach(&mut self, s: SeriesDump) {
        self.series.push(s);
    }

    fn is_informational(e: &Entry) -> bool {
        e.details.get("informational").and_then(Value::as_bool).unwrap_or(false)
    }

    pub fn passed(&self) -> bool {
        self.results.iter().filter(|e| !Self::is_informational(e)).all(|e| e.status == Status::Pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut v = serde_json::to_value(self).expect("reports are plain data");
                if !self.series.is_empty() {
                    let series: serde_json::Map<String, Value> = self
                        .series
                        .iter()
                        .map(|s| {
                            let terms: Vec<Value> =
                                s.terms.iter().map(|(d, e, c)| serde_json::json!([d, e, c])).collect();
                            (s.name.clone(), Value::Array(terms))
                        })
                        .collect();
                    v["series"] = Value::Object(series);
                }
                let mut out = serde_json::to_string_pretty(&v).expect("reports are plain data");
                out.push('\n');
                out
            }
            Format::Csv => {
                let mut out = String::new();
                if self.series.is_empty() {
                    out.push_str("name,status,deviation\n");
                    for e in &self.results {
                        let _ = writeln!(out, "{},{},{}", e.name.replace(',', ";"), status_str(e.status), value_str(&e.deviation));
                    }
                } else {
                    out.push_str("series,v_power,zeta_power,coefficient\n");
                    for s in &self.series {
                        for (d, e, c) in &s.terms {
                            let _ = writeln!(out, "{},{d},{e},{c}", s.name);
                        }
                    }
                }
                out
            }
            Format::Plain => {
                let mut out = String::new();
                let _ = writeln!(out, "{}", self.command);
                for e in &self.results {
                    let tag = if Self::is_informational(e) { " (info)" } else { "" };
                    let _ = writeln!(out, "  {} {}{} deviation={}", status_str(e.status).to_uppercase(), e.name, tag, value_str(&e.deviation));
                }
                for s in &self.series {
                    let _ = writeln!(out, "  {} = {}", s.name, s.pretty);
                }
                out
            }
        }
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
    }
}

fn value_str(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "n/a".into(),
        other => other.to_string(),
    }
}
