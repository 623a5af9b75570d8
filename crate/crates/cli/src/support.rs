//! Shared plumbing for the subcommands: config loading, output writing,
//! CSV formatting, and the exit-code mapping.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use stimvco_core::Error;

/// Failure classes the process exit code distinguishes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable semantics, or out-of-range config values (exit 2).
    Config(String),
    /// The requested computation has no answer for these inputs (exit 3).
    Domain(String),
    /// Filesystem or stream failure (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Domain(m) | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match &e {
            Error::Validation { .. } => CliError::Config(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Output encoding selected by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parses a JSON config file into a strict config struct.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

/// Writes the finished output to `--out`, or stdout when no path was given.
pub fn write_output(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Pretty JSON plus a trailing newline. Output structs contain no map with
/// non-string keys, so serialization cannot fail.
pub fn json_output<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    text
}

/// Shortest decimal that round-trips the value; NaN cells print as `NaN`.
pub fn fmt_f(v: f64) -> String {
    format!("{v}")
}

/// One CSV line from pre-rendered fields.
pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// Grid as CSV: the corner cell names the two axes, the first row carries
/// the column axis values, and each body row starts with its row axis value.
pub fn matrix_csv(corner: &str, rows: &[f64], cols: &[f64], cells: &[Vec<f64>]) -> String {
    let mut out = String::with_capacity((rows.len() + 1) * (cols.len() + 1) * 12);
    out.push_str(corner);
    for c in cols {
        out.push(',');
        out.push_str(&fmt_f(*c));
    }
    out.push('\n');
    for (r, row) in rows.iter().zip(cells) {
        out.push_str(&fmt_f(*r));
        for v in row {
            out.push(',');
            out.push_str(&fmt_f(*v));
        }
        out.push('\n');
    }
    out
}
