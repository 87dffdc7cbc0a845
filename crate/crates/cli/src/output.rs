use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde_json::Value;

use crate::commands::Outcome;
use crate::Format;

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_text(outcome: &Outcome) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &outcome.csv {
        Some((header, rows)) => {
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
        }
        None => {
            // keys come out sorted, nested values as compact JSON
            let obj = outcome
                .report
                .as_object()
                .context("report is not an object")?;
            w.write_record(obj.keys())?;
            w.write_record(obj.values().map(scalar))?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn render(outcome: &Outcome, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Table => outcome.human.clone(),
        Format::Json => serde_json::to_string_pretty(&outcome.report)? + "\n",
        Format::Csv => csv_text(outcome)?,
    })
}

pub fn emit(outcome: &Outcome, format: Format, path: Option<&Path>) -> anyhow::Result<()> {
    let text = render(outcome, format)?;
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
