//! Experiment reports: named checks, notes and CSV tables.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::fmt::fmt_f64;
use crate::harness::config::ExperimentId;
use crate::rng::RngStream;

/// One pass/fail assertion with the number it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value <= bound,
            value,
            bound,
            detail: detail.into(),
        }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value >= bound,
            value,
            bound,
            detail: detail.into(),
        }
    }
}

/// A CSV table held in memory until the report is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: String,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &str) -> Self {
        Self {
            file: file.into(),
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> usize {
        self.header.split(',').count()
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header)?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentId,
    pub version: u32,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub summary: serde_json::Value,
    pub files: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub documents: Vec<(String, serde_json::Value)>,
}

impl ExperimentReport {
    pub fn new(experiment: ExperimentId, seed: u64) -> Self {
        Self {
            experiment,
            version: super::config::CONFIG_VERSION,
            seed,
            checks: Vec::new(),
            notes: Vec::new(),
            warnings: Vec::new(),
            summary: serde_json::Value::Null,
            files: Vec::new(),
            tables: Vec::new(),
            documents: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }

    pub fn add_table(&mut self, table: Table) {
        self.files.push(table.file.clone());
        self.tables.push(table);
    }

    pub fn add_document(&mut self, file: impl Into<String>, value: serde_json::Value) {
        let file = file.into();
        self.files.push(file.clone());
        self.documents.push((file, value));
    }

    /// Writes every table and document plus `report.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            t.write(io::BufWriter::new(fs::File::create(dir.join(&t.file))?))?;
        }
        for (file, value) in &self.documents {
            let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
            fs::write(dir.join(file), text + "\n")?;
        }
        let json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join("report.json"), json + "\n")
    }
}

/// Base seed for the `tag`-th independent sub-run of an experiment.
pub fn sub_seed(seed: u64, tag: u64) -> u64 {
    RngStream::output(seed, tag.wrapping_add(0x5eed_0000_0000), 0)
}
