//! CSV artifacts, the PASS/FAIL summary and the run manifest.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

/// Shortest representation that round-trips the `f64` exactly (at most 17
/// significant digits).
pub fn real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// One `PASS|FAIL,criterion,measured,threshold` line.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub verdict: Verdict,
    pub criterion: String,
    pub measured: f64,
    pub threshold: f64,
}

impl SummaryRow {
    /// Passes when `measured <= threshold`.
    pub fn at_most(criterion: &str, measured: f64, threshold: f64) -> Self {
        Self::new(criterion, measured, threshold, measured <= threshold)
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(criterion: &str, measured: f64, threshold: f64) -> Self {
        Self::new(criterion, measured, threshold, measured >= threshold)
    }

    /// Passes when `measured` is finite; the threshold column reads `inf`.
    pub fn finite(criterion: &str, measured: f64) -> Self {
        Self::new(criterion, measured, f64::INFINITY, measured.is_finite())
    }

    fn new(criterion: &str, measured: f64, threshold: f64, ok: bool) -> Self {
        SummaryRow {
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            criterion: criterion.into(),
            measured,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for SummaryRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.verdict,
            self.criterion,
            real(self.measured),
            real(self.threshold)
        )
    }
}

/// A CSV table held in memory until the run has finished.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything a subcommand produced.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Vec<SummaryRow>,
    /// Files the subcommand already streamed into the output directory.
    pub files: Vec<String>,
}

impl Report {
    pub fn extend(&mut self, other: Report) {
        self.tables.extend(other.tables);
        self.summary.extend(other.summary);
        self.files.extend(other.files);
    }

    pub fn passed(&self) -> bool {
        self.summary.iter().all(SummaryRow::passed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_table(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every table, `summary.csv`, a copy of the configuration and
/// `manifest.txt`. Returns the artifact paths.
pub fn write_outputs(out: &Path, subcommand: &str, config_text: &str, seed: u64, report: &Report) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut artifacts = Vec::new();
    fs::write(out.join("config.toml"), config_text)?;
    artifacts.push("config.toml".to_string());
    artifacts.extend(report.files.iter().cloned());
    for table in &report.tables {
        let name = format!("{}.csv", table.name);
        write_table(&out.join(&name), table)?;
        artifacts.push(name);
    }
    let mut summary = csv::Writer::from_path(out.join("summary.csv"))?;
    summary.write_record(["verdict", "criterion", "measured", "threshold"])?;
    for row in &report.summary {
        summary.write_record([
            row.verdict.to_string(),
            row.criterion.clone(),
            real(row.measured),
            real(row.threshold),
        ])?;
    }
    summary.flush()?;
    artifacts.push("summary.csv".to_string());

    let mut manifest = format!(
        "see-deriv {}\nsubcommand={subcommand}\nconfig_sha256={}\nseed={seed}\n",
        env!("CARGO_PKG_VERSION"),
        sha256_hex(config_text.as_bytes())
    );
    for a in &artifacts {
        manifest.push_str(&format!("artifact={a}\n"));
    }
    manifest.push_str(&format!("replay=see-deriv {subcommand} --config config.toml --seed {seed}\n"));
    fs::write(out.join("manifest.txt"), manifest)?;
    artifacts.push("manifest.txt".to_string());
    Ok(artifacts.into_iter().map(|a| out.join(a)).collect())
}
