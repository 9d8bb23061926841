use serde_json::{json, Map, Value};

use crate::args::Format;

/// What a subcommand produces, before formatting.
pub enum Output {
    /// Named fields and an optional trailing verdict.
    Record { fields: Vec<(String, Value)>, verdict: Option<String> },
    /// A CSV body and its JSON counterpart.
    Table { csv: String, json: Value, notes: Vec<String> },
    /// One item per line.
    Lines { json: Vec<Value>, csv: Option<String> },
}

impl Output {
    pub fn record(fields: Vec<(&str, Value)>, verdict: Option<&str>) -> Self {
        Output::Record {
            fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            verdict: verdict.map(str::to_string),
        }
    }

    pub fn render(&self, format: Option<Format>, config: &Value) -> String {
        match self {
            Output::Record { fields, verdict } => match format.unwrap_or(Format::Text) {
                Format::Text => {
                    let mut parts: Vec<String> = fields
                        .iter()
                        .map(|(k, v)| format!("{k}={}", plain(v)))
                        .collect();
                    parts.extend(verdict.iter().cloned());
                    parts.join(" ") + "\n"
                }
                Format::Csv => {
                    let mut out = header(config, &[]);
                    let mut names: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
                    let mut cells: Vec<String> = fields.iter().map(|(_, v)| csv_cell(&plain(v))).collect();
                    if let Some(v) = verdict {
                        names.push("verdict");
                        cells.push(v.clone());
                    }
                    out.push_str(&names.join(","));
                    out.push('\n');
                    out.push_str(&cells.join(","));
                    out.push('\n');
                    out
                }
                Format::Json => {
                    let mut m = Map::new();
                    for (k, v) in fields {
                        m.insert(k.clone(), v.clone());
                    }
                    if let Some(v) = verdict {
                        m.insert("verdict".into(), json!(v));
                    }
                    envelope(config, Value::Object(m))
                }
            },
            Output::Table { csv, json, notes } => match format.unwrap_or(Format::Csv) {
                Format::Csv | Format::Text => header(config, notes) + csv,
                Format::Json => envelope(config, json.clone()),
            },
            Output::Lines { json, csv } => match (format, csv) {
                (Some(Format::Csv), Some(body)) => header(config, &[]) + body,
                _ => json.iter().map(|v| v.to_string() + "\n").collect(),
            },
        }
    }
}

fn header(config: &Value, notes: &[String]) -> String {
    let mut out = format!("# gwforge {}\n# config {}\n", env!("CARGO_PKG_VERSION"), config);
    for n in notes {
        out.push_str(&format!("# {n}\n"));
    }
    out
}

fn envelope(config: &Value, result: Value) -> String {
    let v = json!({ "config": config, "result": result });
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
