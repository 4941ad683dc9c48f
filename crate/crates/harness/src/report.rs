//! Experiment reports and the files they point to.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use fraclog::{Record64, Snapshot};

use crate::config::ExperimentConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Diagnostic,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub id: String,
    /// The estimate this assertion exercises.
    pub basis: String,
    pub verdict: Verdict,
    pub measured: f64,
    pub limit: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: ExperimentConfig,
    pub measured: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        ExperimentReport {
            name: config.name.clone(),
            config: config.clone(),
            measured: BTreeMap::new(),
            assertions: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn record(&mut self, key: impl Into<String>, value: f64) {
        self.measured.insert(key.into(), value);
    }

    /// Adds a pass/fail assertion and returns its outcome.
    pub fn check(
        &mut self,
        id: &str,
        basis: &str,
        ok: bool,
        measured: f64,
        limit: Option<f64>,
        detail: impl Into<String>,
    ) -> bool {
        self.assertions.push(Assertion {
            id: id.to_string(),
            basis: basis.to_string(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            measured,
            limit,
            detail: detail.into(),
        });
        ok
    }

    pub fn diagnostic(&mut self, id: &str, basis: &str, measured: f64, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            id: id.to_string(),
            basis: basis.to_string(),
            verdict: Verdict::Diagnostic,
            measured,
            limit: None,
            detail: detail.into(),
        });
    }

    pub fn assertion(&self, id: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.id == id)
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| a.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Writes artifacts into one directory and remembers their names.
pub struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub fn series(&mut self, name: &str, dim: usize, records: &[Record64]) -> Result<()> {
        let path = self.path(&format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(Record64::csv_header(dim))?;
        for r in records {
            w.write_record(r.csv_row())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.path(&format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn snapshot(&mut self, name: &str, snap: &Snapshot) -> Result<()> {
        let path = self.path(&format!("{name}.bin"));
        let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        snap.write_to(BufWriter::new(file))?;
        Ok(())
    }

    /// Attaches the artifact list to `report` and writes `<name>.json`.
    pub fn finish(mut self, mut report: ExperimentReport) -> Result<ExperimentReport> {
        let name = format!("{}.json", report.name);
        self.written.push(name.clone());
        report.artifacts = std::mem::take(&mut self.written);
        let path = self.dir.join(name);
        fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
        Ok(report)
    }
}
