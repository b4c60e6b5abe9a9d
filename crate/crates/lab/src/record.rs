//! Run records: config snapshot, tables, verdicts, reproducibility.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const RECORD_SCHEMA: &str = "radial-lab-record/v1";
pub const CONFIG_SCHEMA: &str = "radial-lab-config/v1";

/// One tested inequality with its tolerance and outcome. `anchor` is a
/// stable machine-readable name of the bound being checked.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Verdict {
    pub anchor: String,
    pub inequality: String,
    pub tolerance: f64,
    pub observed: f64,
    pub threshold: f64,
    pub pass: bool,
    /// informational verdicts are reported but do not affect the exit code
    #[serde(default)]
    pub informational: bool,
}

impl Verdict {
    pub fn lower_bound(anchor: &str, observed: f64, bound: f64, tolerance: f64) -> Verdict {
        Verdict {
            anchor: anchor.to_string(),
            inequality: format!("{observed:.6} >= {bound:.6} - {tolerance}"),
            tolerance,
            observed,
            threshold: bound - tolerance,
            pass: observed >= bound - tolerance,
            informational: false,
        }
    }

    pub fn upper_bound(anchor: &str, observed: f64, bound: f64, tolerance: f64) -> Verdict {
        Verdict {
            anchor: anchor.to_string(),
            inequality: format!("{observed:.6} <= {bound:.6} + {tolerance}"),
            tolerance,
            observed,
            threshold: bound + tolerance,
            pass: observed <= bound + tolerance,
            informational: false,
        }
    }

    pub fn informational(mut self) -> Verdict {
        self.informational = true;
        self
    }
}

/// Numeric table destined for one CSV file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything one experiment run produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub library_version: String,
    /// excluded from the canonical bytes; never compare across runs
    pub wall_clock_seconds: f64,
    pub tables: BTreeMap<String, Table>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl RunRecord {
    pub fn new<C: Serialize>(experiment: &str, config: &C, seed: u64) -> Result<RunRecord> {
        Ok(RunRecord {
            schema: RECORD_SCHEMA.to_string(),
            experiment: experiment.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: 0.0,
            tables: BTreeMap::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
        })
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass || v.informational)
    }

    /// Deterministic serialisation of everything reproducible: the record
    /// with the wall clock zeroed. Identical config + seed must reproduce
    /// these bytes exactly.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut clone = self.clone();
        clone.wall_clock_seconds = 0.0;
        serde_json::to_vec_pretty(&clone).expect("record serialises")
    }

    /// Write record.json plus one CSV per table into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output dir {}", dir.display()))?;
        std::fs::write(dir.join("record.json"), serde_json::to_vec_pretty(self)?)?;
        for (name, table) in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(format!("{name}.csv")))?;
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|v| format!("{v}")))?;
            }
            w.flush()?;
        }
        Ok(())
    }

    /// One line per verdict, for terminal use.
    pub fn print_verdicts(&self) {
        for v in &self.verdicts {
            let status = if v.pass {
                "PASS"
            } else if v.informational {
                "info"
            } else {
                "FAIL"
            };
            println!("[{status}] {}: {}", v.anchor, v.inequality);
        }
    }
}
