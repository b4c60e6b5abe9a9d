//! Identity experiment: both quadrature routes of the weighted-projection
//! identity, refined over quadrature levels, with the independent Fubini
//! double sum pinning the p = 1 case.

use std::time::Instant;

use anyhow::{bail, Result};
use radial_core::smooth::{bundled_bump_pair, fubini_p1_reference, verify_projection_identity};
use serde::{Deserialize, Serialize};

use crate::record::{RunRecord, Table, Verdict};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityConfig {
    pub schema: String,
    pub p_values: Vec<f64>,
    /// ascending quadrature levels; the last is the verdict level
    pub levels: Vec<u32>,
    pub tolerance: f64,
    /// errors below this are treated as converged: ordering within the
    /// quadrature floor carries no information
    pub floor: f64,
    pub fubini_level: u32,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig {
            schema: crate::record::CONFIG_SCHEMA.to_string(),
            p_values: vec![1.0, 1.5, 2.0],
            levels: vec![7, 8, 9],
            tolerance: 0.02,
            floor: 1e-5,
            fubini_level: 8,
        }
    }
}

pub fn run(config: &IdentityConfig, seed: u64) -> Result<RunRecord> {
    let start = Instant::now();
    crate::experiments::check_schema(&config.schema)?;
    let mut record = RunRecord::new("identity", config, seed)?;
    if config.levels.len() < 2 || config.levels.windows(2).any(|w| w[1] <= w[0]) {
        bail!("need at least two strictly ascending quadrature levels");
    }
    let (mu, nu) = bundled_bump_pair();
    let mut table = Table::new(&["p", "level", "bins", "lhs", "rhs", "relative_error"]);
    let fubini = fubini_p1_reference(&mu, &nu, config.fubini_level)?;
    record.notes.push(format!("fubini p=1 reference: {fubini}"));

    for &p in &config.p_values {
        let mut errors = Vec::new();
        let mut last = None;
        for &level in &config.levels {
            let check = verify_projection_identity(&mu, &nu, p, level)?;
            table.push(vec![
                p,
                level as f64,
                check.direction_bins as f64,
                check.lhs,
                check.rhs,
                check.relative_error,
            ]);
            errors.push(check.relative_error);
            last = Some(check);
        }
        let last = last.expect("at least one level");
        record.verdicts.push(Verdict::upper_bound(
            &format!("identity-relative-error-p{p}"),
            last.relative_error,
            0.0,
            config.tolerance,
        ));
        // refinement must strictly reduce the error until both sides sit in
        // the quadrature floor, where ordering is noise
        let mut decreasing = true;
        for w in errors.windows(2) {
            if !(w[1] < w[0] || (w[0] <= config.floor && w[1] <= config.floor)) {
                decreasing = false;
            }
        }
        record.verdicts.push(Verdict::upper_bound(
            &format!("identity-error-decreasing-p{p}"),
            if decreasing { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
        if p == 1.0 {
            record.verdicts.push(Verdict::upper_bound(
                "identity-p1-lhs-vs-fubini",
                (last.lhs - fubini).abs() / fubini,
                0.0,
                config.tolerance,
            ));
            record.verdicts.push(Verdict::upper_bound(
                "identity-p1-rhs-vs-fubini",
                (last.rhs - fubini).abs() / fubini,
                0.0,
                config.tolerance,
            ));
        }
    }
    record.tables.insert("refinement".to_string(), table);
    record.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(record)
}
