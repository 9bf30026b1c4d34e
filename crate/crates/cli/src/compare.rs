//! Field-by-field comparison of two run directories.

use crate::csv::{parse_f64, parse_table};
use crate::manifest::verify;
use crate::CliError;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Diff {
    pub file: String,
    /// 1-based data row; 0 for structural or summary differences.
    pub row: usize,
    pub column: String,
    pub a: String,
    pub b: String,
    /// Relative difference for numeric cells, infinite otherwise.
    pub rel: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiffReport {
    pub tolerance: f64,
    /// Entries beyond tolerance.
    pub diffs: Vec<Diff>,
    /// Largest relative difference seen per `file:column`, within
    /// tolerance or not.
    pub max_rel: BTreeMap<String, f64>,
}

impl DiffReport {
    pub fn is_clean(&self) -> bool {
        self.diffs.is_empty()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.diffs {
            writeln!(
                f,
                "{}:{}:{}: {} vs {} (rel {:e})",
                d.file, d.row, d.column, d.a, d.b, d.rel
            )?;
        }
        Ok(())
    }
}

/// `|a−b| / max(|a|,|b|)`; `None` when either cell is not a number.
pub fn rel_diff(a: &str, b: &str) -> Option<f64> {
    let x = parse_f64(a).ok()?;
    let y = parse_f64(b).ok()?;
    if (x.is_nan() && y.is_nan()) || x == y {
        return Some(0.0);
    }
    if !x.is_finite() || !y.is_finite() {
        return Some(f64::INFINITY);
    }
    Some((x - y).abs() / x.abs().max(y.abs()))
}

impl DiffReport {
    fn cell(&mut self, file: &str, row: usize, column: &str, a: &str, b: &str) {
        let rel = match rel_diff(a, b) {
            Some(r) => r,
            None if a == b => 0.0,
            None => f64::INFINITY,
        };
        let key = format!("{file}:{column}");
        let slot = self.max_rel.entry(key).or_insert(0.0);
        *slot = slot.max(rel);
        if rel > self.tolerance {
            self.diffs.push(Diff {
                file: file.into(),
                row,
                column: column.into(),
                a: a.into(),
                b: b.into(),
                rel,
            });
        }
    }

    fn structural(&mut self, file: &str, what: &str, a: String, b: String) {
        self.diffs.push(Diff {
            file: file.into(),
            row: 0,
            column: what.into(),
            a,
            b,
            rel: f64::INFINITY,
        });
    }
}

fn compare_tables(report: &mut DiffReport, file: &str, a: &str, b: &str) -> Result<(), CliError> {
    let ta = parse_table(a)?;
    let tb = parse_table(b)?;
    if ta.header != tb.header {
        report.structural(file, "header", ta.header.join(","), tb.header.join(","));
        return Ok(());
    }
    if ta.rows.len() != tb.rows.len() {
        report.structural(
            file,
            "rows",
            ta.rows.len().to_string(),
            tb.rows.len().to_string(),
        );
    }
    for (i, (ra, rb)) in ta.rows.iter().zip(&tb.rows).enumerate() {
        for (c, name) in ta.header.iter().enumerate() {
            report.cell(file, i + 1, name, &ra[c], &rb[c]);
        }
    }
    Ok(())
}

/// Both directories must verify against their manifests and come from the
/// same mode.
pub fn compare_runs(a: &Path, b: &Path, tolerance: f64) -> Result<DiffReport, CliError> {
    let ma = verify(a)?;
    let mb = verify(b)?;
    if ma.config.mode != mb.config.mode {
        return Err(CliError::Config(format!(
            "manifest mismatch: mode {} vs {}",
            ma.config.mode.name(),
            mb.config.mode.name()
        )));
    }
    let mut report = DiffReport {
        tolerance,
        ..Default::default()
    };
    for fa in &ma.files {
        if !fa.path.ends_with(".csv") {
            continue;
        }
        if mb.file(&fa.path).is_none() {
            report.structural(&fa.path, "file", "present".into(), "missing".into());
            continue;
        }
        let read = |dir: &Path| {
            let p = dir.join(&fa.path);
            std::fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))
        };
        compare_tables(&mut report, &fa.path, &read(a)?, &read(b)?)?;
    }
    for fb in &mb.files {
        if fb.path.ends_with(".csv") && ma.file(&fb.path).is_none() {
            report.structural(&fb.path, "file", "missing".into(), "present".into());
        }
    }
    for (key, va) in &ma.summary {
        match mb.summary.get(key) {
            Some(vb) => report.cell("summary", 0, key, &va.to_string(), &vb.to_string()),
            None => report.structural("summary", key, va.to_string(), "missing".into()),
        }
    }
    for key in mb.summary.keys().filter(|k| !ma.summary.contains_key(*k)) {
        report.structural(
            "summary",
            key,
            "missing".into(),
            mb.summary[key].to_string(),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_differences() {
        assert_eq!(rel_diff("1.0", "1.0"), Some(0.0));
        assert_eq!(rel_diff("", ""), Some(0.0));
        assert_eq!(rel_diff("inf", "inf"), Some(0.0));
        assert_eq!(rel_diff("1", ""), Some(f64::INFINITY));
        assert!((rel_diff("1.0", "1.1").unwrap() - 0.1 / 1.1).abs() < 1e-15);
        assert_eq!(rel_diff("S", "1"), None);
    }

    #[test]
    fn table_diffs_respect_tolerance() {
        let mut r = DiffReport {
            tolerance: 1e-6,
            ..Default::default()
        };
        compare_tables(&mut r, "x.csv", "a,b\nS,1.0\n", "a,b\nS,1.0000000001\n").unwrap();
        assert!(r.is_clean());
        compare_tables(&mut r, "x.csv", "a,b\nS,1.0\n", "a,b\nT,1.0\n").unwrap();
        assert_eq!(r.diffs.len(), 1);
        compare_tables(&mut r, "x.csv", "a,b\n", "a,c\n").unwrap();
        assert_eq!(r.diffs.len(), 2);
    }
}
