// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::io::Write;

use super::scan::ScanStats;
use crate::model::CohortRow;
use crate::query::{OutputColumn, OutputKind};

/// Result rows of a cohort query plus the select-list projection.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutput {
    pub columns: Vec<OutputColumn>,
    /// Sorted by cohort key, then age.
    pub rows: Vec<CohortRow>,
    pub stats: ScanStats,
}

impl QueryOutput {
    pub fn new(columns: Vec<OutputColumn>, rows: Vec<CohortRow>, stats: ScanStats) -> Self {
        QueryOutput { columns, rows, stats }
    }

    pub fn header(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    /// The selected fields of one row, rendered as text.
    pub fn record(&self, row: &CohortRow) -> Vec<String> {
        self.columns
            .iter()
            .map(|c| match c.kind {
                OutputKind::Cohort(i) => row.key[i].to_string(),
                OutputKind::CohortSize => row.size.to_string(),
                OutputKind::Age => row.age.to_string(),
                OutputKind::Agg(i) => row.measures[i].to_string(),
            })
            .collect()
    }

    /// RFC 4180 CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            w.write_record(self.record(row))?;
        }
        w.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Column-aligned text table.
    pub fn to_table(&self) -> String {
        let header = self.header();
        let records: Vec<Vec<String>> = self.rows.iter().map(|r| self.record(r)).collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for rec in &records {
            for (w, f) in widths.iter_mut().zip(rec) {
                *w = (*w).max(f.chars().count());
            }
        }
        let line = |fields: &[String]| -> String {
            let cells: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect();
            cells.join("  ").trim_end().to_string()
        };
        let mut out = line(&header);
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for rec in &records {
            out.push_str(&line(rec));
            out.push('\n');
        }
        out
    }
}
