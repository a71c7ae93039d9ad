//! Reports and their CSV, JSON and plain renderings.

use germlab_core::multiplicity::{Codim, ExtendedNat};
use serde::Serialize;
use serde_json::{json, Value};

/// Output format selected by `--format`; `Text` when the flag is absent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Key {
    Int(i64),
    Text(String),
}

impl std::fmt::Display for Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Key::Int(n) => write!(f, "{n}"),
            Key::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Row {
    Mu {
        key: Key,
        codim: Codim,
    },
    Check {
        condition: String,
        left: String,
        right: String,
        holds: bool,
    },
    Components {
        key: String,
        components: Vec<String>,
    },
    Condition {
        index: usize,
        condition: String,
    },
}

/// The result of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub cap: u32,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
    /// `Some` for verdict-style commands.
    pub verdict: Option<bool>,
    /// Header name for the key column of `Mu` rows.
    pub key_name: &'static str,
}

fn mu_value(v: &ExtendedNat) -> Value {
    match v {
        ExtendedNat::Finite(n) => json!(n),
        ExtendedNat::AtLeast(cap) => json!(format!(">={cap}")),
    }
}

impl Report {
    pub fn new(command: &str, cap: u32) -> Self {
        Report {
            command: command.to_string(),
            cap,
            rows: Vec::new(),
            notes: Vec::new(),
            verdict: None,
            key_name: "key",
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    pub fn to_json(&self) -> String {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|r| match r {
                Row::Mu { key, codim } => json!({
                    "key": key,
                    "mu": mu_value(&codim.value),
                    "certificate_order": codim.certificate_order,
                }),
                Row::Check {
                    condition,
                    left,
                    right,
                    holds,
                } => json!({
                    "key": format!("{condition}({left},{right})"),
                    "condition": condition,
                    "left": left,
                    "right": right,
                    "holds": holds,
                }),
                Row::Components { key, components } => {
                    json!({ "key": key, "components": components })
                }
                Row::Condition { index, condition } => {
                    json!({ "key": index, "condition": condition })
                }
            })
            .collect();
        let mut notes = self.notes.clone();
        if let Some(v) = self.verdict {
            notes.insert(0, format!("verdict: {}", if v { "pass" } else { "fail" }));
        }
        let doc = json!({
            "command": self.command,
            "cap": self.cap,
            "results": results,
            "notes": notes,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    fn csv_header(&self) -> Vec<&'static str> {
        match self.command.as_str() {
            "commute" => vec!["condition", "left", "right", "holds"],
            "exceptional" => vec!["index", "condition"],
            "bracket" | "flow" | "qp" => vec!["key", "index", "component"],
            _ => vec![self.key_name, "mu", "certificate_order"],
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.csv_header()).expect("in-memory write");
        for r in &self.rows {
            let records: Vec<Vec<String>> = match r {
                Row::Mu { key, codim } => vec![vec![
                    key.to_string(),
                    codim.value.to_string(),
                    codim
                        .certificate_order
                        .map(|m| m.to_string())
                        .unwrap_or_default(),
                ]],
                Row::Check {
                    condition,
                    left,
                    right,
                    holds,
                } => vec![vec![
                    condition.clone(),
                    left.clone(),
                    right.clone(),
                    holds.to_string(),
                ]],
                Row::Components { key, components } => components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| vec![key.clone(), i.to_string(), c.clone()])
                    .collect(),
                Row::Condition { index, condition } => {
                    vec![vec![index.to_string(), condition.clone()]]
                }
            };
            for rec in records {
                w.write_record(&rec).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Plain output: a bare value for single multiplicities, CSV for tables.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(v) = self.verdict {
            out.push_str(if v { "pass\n" } else { "fail\n" });
            for r in &self.rows {
                if let Row::Check {
                    condition,
                    left,
                    right,
                    holds: false,
                } = r
                {
                    out.push_str(&format!("{condition} {left} {right}\n"));
                }
            }
            return out;
        }
        match self.rows.as_slice() {
            [Row::Mu { codim, .. }] if self.key_name == "key" => {
                out.push_str(&format!("{}\n", codim.value));
                return out;
            }
            rows if rows.iter().all(|r| matches!(r, Row::Mu { .. })) && !rows.is_empty() => {
                return self.to_csv()
            }
            _ => {}
        }
        for r in &self.rows {
            match r {
                Row::Components { key, components } => {
                    out.push_str(&format!("{key} = ({})\n", components.join(", ")))
                }
                Row::Condition { condition, .. } => out.push_str(&format!("{condition}\n")),
                Row::Mu { key, codim } => out.push_str(&format!("{key}: {}\n", codim.value)),
                Row::Check { .. } => {}
            }
        }
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        out
    }
}
