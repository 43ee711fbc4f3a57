//! CSV, JSON and plot-script writers.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::Settings;
use crate::engine::Row;
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column set of every data CSV, in order.
pub const COLUMNS: [&str; 10] = [
    "h", "N", "tau", "chi_g", "chi_r", "eta", "entropy", "method", "delta", "status",
];

/// Prefix of the one header line that changes between otherwise identical
/// runs.
pub const TIMESTAMP_PREFIX: &str = "# generated ";

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.14e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Metadata lines: tool and version, config echo, notes, timestamp.
pub fn header_lines(settings: &Settings, notes: &[String], generated: &str) -> Vec<String> {
    let mut lines = vec![format!("# lmgfs {VERSION} {}", settings.command.as_str())];
    for (k, v) in &settings.echo {
        lines.push(format!("# {k}={v}"));
    }
    for note in notes {
        lines.push(format!("# note: {note}"));
    }
    lines.push(format!("{TIMESTAMP_PREFIX}{generated}"));
    lines
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Write `#` metadata lines followed by an RFC 4180 table.
pub fn write_table(path: &Path, header: &[String], columns: &[&str], records: &[Vec<String>]) -> CliResult<()> {
    let mut file = create(path)?;
    let io = |e: std::io::Error| CliError::io(path, e);
    for line in header {
        writeln!(file, "{line}").map_err(io)?;
    }
    let mut writer = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| CliError::io(path, e.into());
    writer.write_record(columns).map_err(csv_err)?;
    for record in records {
        writer.write_record(record).map_err(csv_err)?;
    }
    writer.flush().map_err(io)?;
    Ok(())
}

pub fn row_record(row: &Row) -> Vec<String> {
    let v = row.values();
    vec![
        fmt_float(row.h),
        row.n.to_string(),
        fmt_float(row.tau),
        fmt_opt(v.chi_g),
        fmt_opt(v.chi_r),
        fmt_opt(v.eta),
        fmt_opt(v.entropy),
        row.method.to_string(),
        fmt_opt(v.delta),
        row.status().to_string(),
    ]
}

pub fn write_rows_csv(path: &Path, header: &[String], rows: &[Row]) -> CliResult<()> {
    let records: Vec<Vec<String>> = rows.iter().map(row_record).collect();
    write_table(path, header, &COLUMNS, &records)
}

/// Envelope shared by every JSON output.
#[derive(Serialize)]
pub struct Document<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub generated: &'a str,
    pub input: &'a BTreeMap<String, String>,
    pub notes: &'a [String],
    pub warnings: &'a [String],
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, value).map_err(|e| CliError::io(path, e.into()))?;
    writeln!(file).and_then(|_| file.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// A gnuplot curve: a row filter expression and a legend title.
pub struct Curve {
    pub filter: String,
    pub title: String,
}

/// Gnuplot script plotting column `y` against column `x` of a data CSV
/// (1-based column numbers), one line per curve.
pub fn plot_script(data_file: &str, x: (usize, &str), y: (usize, &str), title: &str, curves: &[Curve]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str(&format!("set xlabel '{}'\n", x.1));
    s.push_str(&format!("set ylabel '{}'\n", y.1));
    s.push_str("set key top left\n");
    let lines: Vec<String> = curves
        .iter()
        .map(|c| {
            format!(
                "'{data_file}' using (({}) ? ${} : 1/0):{} with linespoints title '{}'",
                c.filter, x.0, y.0, c.title
            )
        })
        .collect();
    if lines.is_empty() {
        s.push_str("# no data\n");
    } else {
        s.push_str(&format!("plot {}\n", lines.join(", \\\n     ")));
    }
    s
}

/// One curve per distinct (N, method) among successful rows, plus any
/// extra key the caller adds to the filter.
pub fn curves_by<K: PartialEq + Clone>(
    rows: &[Row],
    key: impl Fn(&Row) -> K,
    make: impl Fn(&Row) -> Curve,
) -> Vec<Curve> {
    let mut seen: Vec<K> = Vec::new();
    let mut out = Vec::new();
    for row in rows.iter().filter(|r| r.status() == "ok") {
        let k = key(row);
        if !seen.contains(&k) {
            seen.push(k);
            out.push(make(row));
        }
    }
    out
}

pub fn out_path(settings: &Settings, name: &str) -> PathBuf {
    settings.out.join(name)
}
