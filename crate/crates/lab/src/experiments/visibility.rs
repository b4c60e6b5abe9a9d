//! Visibility experiment: for disjoint K and E with E non-collinear, some
//! viewpoint in E sees a radial projection of K of dimension at least
//! (dim K)/2.

use std::time::Instant;

use anyhow::{bail, Result};
use radial_core::geom::Point;
use radial_core::scale::{box_dimension_angles, box_dimension_support, is_collinear};
use serde::{Deserialize, Serialize};

use super::{projection_angles, sample_support, support_gap, ScheduleConfig};
use crate::record::{RunRecord, Table, Verdict};
use crate::spec::MeasureSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisibilityConfig {
    pub schema: String,
    pub k: MeasureSpec,
    pub e: MeasureSpec,
    pub viewpoints: usize,
    pub schedule: ScheduleConfig,
    pub tolerance: f64,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        VisibilityConfig {
            schema: crate::record::CONFIG_SCHEMA.to_string(),
            k: MeasureSpec::Restrict {
                base: Box::new(MeasureSpec::FourCornerCantor { depth: 6 }),
                x0: 0.0,
                x1: 0.3,
                y0: 0.0,
                y1: 1.0,
                normalize: true,
            },
            e: MeasureSpec::Restrict {
                base: Box::new(MeasureSpec::FourCornerCantor { depth: 6 }),
                x0: 0.7,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
                normalize: true,
            },
            viewpoints: 64,
            schedule: ScheduleConfig::dimension_default(),
            tolerance: 0.1,
        }
    }
}

pub fn run(config: &VisibilityConfig, seed: u64) -> Result<RunRecord> {
    let start = Instant::now();
    super::check_schema(&config.schema)?;
    let mut record = RunRecord::new("visibility", config, seed)?;
    let k = crate::spec::build_measure(&config.k)?;
    let e = crate::spec::build_measure(&config.e)?;
    let schedule = config.schedule.build()?;

    let e_points: Vec<_> = e.centers().map(|(p, _)| p.as_vec2()).collect();
    if is_collinear(&e_points) {
        bail!("viewpoint set E lies on a single line; the bound excludes collinear E");
    }
    let gap = support_gap(&k, &e);
    if gap <= 2.0 * k.cell_diameter() {
        bail!("K and E supports are not separated (gap {gap})");
    }

    let k_dim = box_dimension_support(&k, &schedule)?;
    let sample = sample_support(&e, config.viewpoints, seed);

    let mut per_view = Table::new(&["x", "y", "projection_dim", "residual", "distinct_angles"]);
    let mut best: f64 = 0.0;
    let mut tested = 0usize;
    for x in &sample {
        if k.min_dist_to(Point::xy(x.x, x.y)) <= 2.0 * k.cell_diameter() {
            continue;
        }
        let mut angles = projection_angles(&k, *x);
        angles.sort_by(|a, b| a.total_cmp(b));
        angles.dedup();
        let est = box_dimension_angles(&angles, &schedule)?;
        per_view.push(vec![x.x, x.y, est.slope, est.residual, angles.len() as f64]);
        best = best.max(est.slope);
        tested += 1;
    }
    if tested == 0 {
        bail!("no viewpoint in the E sample clears the K support");
    }
    record.tables.insert("per_viewpoint".to_string(), per_view);
    let mut summary = Table::new(&["k_dim", "best_projection_dim", "viewpoints_tested", "gap"]);
    summary.push(vec![k_dim.slope, best, tested as f64, gap]);
    record.tables.insert("summary".to_string(), summary);

    // some viewpoint of E attains dim >= dim K / 2
    record.verdicts.push(Verdict::lower_bound(
        "radial-projection-half-dimension-bound",
        best,
        k_dim.slope / 2.0,
        config.tolerance,
    ));
    record.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(record)
}
