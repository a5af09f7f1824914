//! Rendering shared by the subcommands: one report, three formats.

use clap::ValueEnum;
use fibpart::report::IdentityReport;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable text
    Table,
    /// Comma-separated rows
    Csv,
    /// Pretty-printed JSON
    Json,
}

pub fn json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// An integer grid: aligned columns, bare CSV rows, or a JSON object.
pub fn int_grid(rows: &[Vec<i64>], format: Format, kind: &str) -> String {
    match format {
        Format::Table => {
            let width = rows
                .iter()
                .flatten()
                .map(|v| v.to_string().len())
                .max()
                .unwrap_or(1);
            let mut out = String::new();
            for row in rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
            out
        }
        Format::Csv => {
            let mut out = String::new();
            for row in rows {
                let cells: Vec<String> = row.iter().map(i64::to_string).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            out
        }
        Format::Json => json_pretty(&serde_json::json!({
            "kind": kind,
            "rows": rows.len(),
            "cols": rows.first().map_or(0, Vec::len),
            "values": rows,
        })),
    }
}

/// A two-column listing of (index, value) rows.
pub fn index_value_rows(
    rows: &[(i128, i128)],
    format: Format,
    kind: &str,
    columns: (&str, &str),
) -> String {
    match format {
        Format::Table => {
            let mut out = format!("{:>8}  {}\n", columns.0, columns.1);
            for &(n, v) in rows {
                let _ = writeln!(out, "{n:>8}  {v}");
            }
            out
        }
        Format::Csv => {
            let mut out = format!("{},{}\n", columns.0, columns.1);
            for &(n, v) in rows {
                let _ = writeln!(out, "{n},{v}");
            }
            out
        }
        Format::Json => json_pretty(&serde_json::json!({
            "kind": kind,
            "columns": [columns.0, columns.1],
            "rows": rows.iter().map(|&(n, v)| [n, v]).collect::<Vec<_>>(),
        })),
    }
}

pub fn identity_report(report: &IdentityReport, format: Format) -> String {
    match format {
        Format::Table => {
            let mut out = format!("checked: n = 1..={}\n", report.checked_range);
            for o in &report.identities {
                if o.is_pass() {
                    let _ = writeln!(out, "pass  {} ({} checked)", o.name, o.passed);
                } else {
                    let w = &o.failures[0];
                    let _ = writeln!(
                        out,
                        "FAIL  {} at n = {}: {} ({} failing)",
                        o.name, w.input, w.detail, o.failure_count
                    );
                }
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("claim,checked,failures,first_failure\n");
            for o in &report.identities {
                let first = o
                    .failures
                    .first()
                    .map(|w| format!("n = {}: {}", w.input, w.detail))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    csv_field(&o.name),
                    o.passed,
                    o.failure_count,
                    csv_field(&first)
                );
            }
            out
        }
        Format::Json => json_pretty(report),
    }
}
