use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::CliError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A row of tabular output: CSV cells in header order, or a JSON object.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

#[derive(Serialize)]
struct JsonTable<'a, C: Serialize, R: Serialize, F: Serialize> {
    command: &'a str,
    config: &'a C,
    rows: &'a [R],
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<&'a F>,
}

fn open(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_err(out: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: out.map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string()),
        source,
    }
}

fn csv_err(out: Option<&Path>) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| io_err(out)(e.into())
}

/// Writes `rows` as CSV or as a JSON object echoing `config`. In CSV the
/// summary, if any, becomes a trailing `# {json}` line.
pub fn write_table<C, R, F>(
    command: &str,
    config: &C,
    rows: &[R],
    summary: Option<&F>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError>
where
    C: Serialize,
    R: Record,
    F: Serialize,
{
    let mut sink = open(out)?;
    match format {
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut sink);
            writer.write_record(R::HEADER).map_err(csv_err(out))?;
            for row in rows {
                writer.write_record(row.cells()).map_err(csv_err(out))?;
            }
            writer.flush().map_err(io_err(out))?;
            drop(writer);
            if let Some(summary) = summary {
                let line = serde_json::to_string(summary).map_err(|e| io_err(out)(e.into()))?;
                writeln!(sink, "# {line}").map_err(io_err(out))?;
            }
        }
        Format::Json => {
            let table = JsonTable {
                command,
                config,
                rows,
                summary,
            };
            serde_json::to_writer_pretty(&mut sink, &table).map_err(|e| io_err(out)(e.into()))?;
            writeln!(sink).map_err(io_err(out))?;
        }
    }
    sink.flush().map_err(io_err(out))
}

/// Writes a single pretty-printed JSON object.
pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut sink = open(out)?;
    serde_json::to_writer_pretty(&mut sink, value).map_err(|e| io_err(out)(e.into()))?;
    writeln!(sink).map_err(io_err(out))?;
    sink.flush().map_err(io_err(out))
}
