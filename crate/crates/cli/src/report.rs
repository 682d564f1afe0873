use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::{Common, Failure, Format};

/// Header echoed at the top of every report.
pub fn config(c: &Common, command: &str, inputs: &[&Path], extra: Value) -> Value {
    json!({
        "command": command,
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "seed": c.seed,
        "samples": c.samples,
        "tol": c.tol,
        "fp_tol": c.fp_tol,
        "format": match c.format { Format::Json => "json", Format::Csv => "csv" },
        "norm_override": c.norm.map(|n| n.name()),
        "tie_break": match c.tie_break { crate::TieBreak::Lexicographic => "lexicographic", crate::TieBreak::Error => "error" },
        "parameters": extra,
    })
}

/// CSV header lines carrying the same provenance as the JSON header.
fn csv_header(config: &Value) -> String {
    let mut out = String::new();
    for key in ["command", "seed", "samples", "tol", "fp_tol", "tie_break"] {
        out.push_str(&format!("# {key}={}\n", config[key]));
    }
    out.push_str(&format!("# parameters={}\n", config["parameters"]));
    out
}

/// Writes the report in the requested format to `--out` or stdout.
pub fn emit(c: &Common, config: Value, result: Value, csv_body: impl FnOnce() -> String) -> Result<(), Failure> {
    let text = match c.format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&json!({ "config": config, "result": result })).map_err(Failure::input)?;
            s.push('\n');
            s
        }
        Format::Csv => csv_header(&config) + &csv_body(),
    };
    match &c.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Failure::input)
        }
    }
}
