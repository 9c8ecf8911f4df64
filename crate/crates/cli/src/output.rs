//! Output files: JSON envelopes or CSV tables, both carrying the full run
//! document so that any output can be replayed with `run --spec`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use utm_heat::Defaults;

use crate::error::CliError;
use crate::run::Report;
use crate::spec::{Format, ProblemSpecDocument};

const SPEC_PREFIX: &str = "# spec: ";

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    spec: &'a ProblemSpecDocument,
    defaults: Defaults,
    result: &'a Value,
}

fn to_json<T: Serialize>(v: &T, pretty: bool) -> Result<String, CliError> {
    let s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) };
    s.map_err(|e| CliError::validation("Serialization", e.to_string()))
}

pub fn render(doc: &ProblemSpecDocument, report: &Report) -> Result<Vec<u8>, CliError> {
    match doc.output.format {
        Format::Json => {
            let env = Envelope {
                tool: "utm-heat",
                version: env!("CARGO_PKG_VERSION"),
                spec: doc,
                defaults: Defaults::default(),
                result: &report.result,
            };
            let mut text = to_json(&env, true)?;
            text.push('\n');
            Ok(text.into_bytes())
        }
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# tool: utm-heat {}", env!("CARGO_PKG_VERSION"))?;
            writeln!(out, "{SPEC_PREFIX}{}", to_json(doc, false)?)?;
            writeln!(out, "# defaults: {}", to_json(&Defaults::default(), false)?)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&report.table.columns)?;
            for row in &report.table.rows {
                w.write_record(row)?;
            }
            w.into_inner().map_err(|e| CliError::validation("Io", e.to_string()))
        }
    }
}

pub fn emit(doc: &ProblemSpecDocument, report: &Report) -> Result<(), CliError> {
    let bytes = render(doc, report)?;
    match &doc.output.path {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

/// Reads a run document, or the document embedded in a previous output.
pub fn load_document(path: &Path) -> Result<ProblemSpecDocument, CliError> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('#') {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix(SPEC_PREFIX))
            .ok_or_else(|| CliError::validation("SpecDocument", format!("{} has no `{SPEC_PREFIX}` header", path.display())))?;
        return ProblemSpecDocument::from_json(line);
    }
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::validation("SpecDocument", e.to_string()))?;
    match value {
        Value::Object(mut map) if map.contains_key("spec") && map.contains_key("result") => {
            let spec = map.remove("spec").expect("checked");
            serde_json::from_value(spec).map_err(|e| CliError::validation("SpecDocument", e.to_string()))
        }
        _ => ProblemSpecDocument::from_json(&text),
    }
}
