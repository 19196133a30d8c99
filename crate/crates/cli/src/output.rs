use serde_json::{json, Map, Value};

use lgl_core::io::LSubsetFile;
use lgl_core::{Error, LPoint, LSubset};

use crate::Global;

pub const SCHEMA: u32 = lgl_core::verify::SCHEMA;

/// `{"group", "lattice", "values": {element: value}}` over every element.
pub fn lsubset(mu: &LSubset) -> Value {
    let values: Map<String, Value> = mu
        .describe()
        .into_iter()
        .map(|(x, a)| (x, Value::String(a)))
        .collect();
    json!({ "group": mu.group().name(), "lattice": mu.lattice().name(), "values": values })
}

/// Non-default values in element order, then the default.
pub fn lsubset_text(mu: &LSubset) -> String {
    let file = LSubsetFile::from_lsubset(mu, "", "");
    let l = mu.lattice();
    let parts: Vec<String> = mu
        .group()
        .elements()
        .filter(|&x| l.label(mu.value(x)) != file.default)
        .map(|x| format!("{}: {}", mu.group().display(x), l.label(mu.value(x))))
        .collect();
    if parts.is_empty() {
        format!("{{else: {}}}", file.default)
    } else {
        format!("{{{}; else: {}}}", parts.join(", "), file.default)
    }
}

pub fn points_text(mu: &LSubset, points: &[LPoint]) -> String {
    points
        .iter()
        .map(|p| {
            format!(
                "{}@{}",
                mu.lattice().label(p.value),
                mu.group().display(p.at)
            )
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Prints `text`, or `body` as a JSON report tagged with the schema and command.
pub fn emit(global: &Global, command: &str, text: &str, body: Value) {
    if global.json {
        let mut report = Map::new();
        report.insert("schema".into(), json!(SCHEMA));
        report.insert("command".into(), json!(command));
        if let Value::Object(fields) = body {
            report.extend(fields);
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&Value::Object(report)).expect("serializable")
        );
    } else {
        println!("{text}");
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::UnknownSuite(_) => "unknown_suite",
        Error::Input(_) => "input",
        Error::UnknownElement(_) => "unknown_element",
        Error::CarrierMismatch | Error::LatticeMismatch(_) => "carrier_mismatch",
        Error::NotAnLSubgroup(_) | Error::NotContained => "precondition",
        _ => "invalid",
    }
}

pub fn error(global: &Global, e: &Error) {
    if global.json {
        let report = json!({ "schema": SCHEMA, "error": error_kind(e), "message": e.to_string() });
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    }
    eprintln!("error: {e}");
}
