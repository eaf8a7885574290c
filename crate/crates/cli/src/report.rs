use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use spherekern::SCHEMA;

use crate::{Failure, Format};

/// Top-level JSON document of every command.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    config: &'a Map<String, Value>,
    result: &'a T,
}

pub struct Report<T: Serialize> {
    pub command: &'static str,
    pub config: Map<String, Value>,
    pub result: T,
    /// CSV rendering, when the command has one.
    pub csv: Option<String>,
    /// Exit with code 1 after writing the report.
    pub failed: bool,
}

pub fn render<T: Serialize>(report: &Report<T>, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let env =
                Envelope { schema: SCHEMA, command: report.command, config: &report.config, result: &report.result };
            let mut text = serde_json::to_string_pretty(&env).map_err(|e| Failure::Input(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| Failure::Input(format!("`{}` has no CSV output; use --format json", report.command))),
    }
}

pub fn write_output(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}
