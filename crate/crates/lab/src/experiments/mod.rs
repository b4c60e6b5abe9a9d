//! Config-driven experiments tying the library to the dimension bounds it
//! is meant to probe. Each runner consumes a serialisable config plus a
//! seed and emits a [`RunRecord`](crate::record::RunRecord); identical
//! config and seed reproduce the record bytes exactly.

pub mod direction;
pub mod exceptional;
pub mod identity;
pub mod level;
pub mod visibility;

use anyhow::{Context, Result};
use radial_core::geom::{Point, Vec2};
use radial_core::scale::ScaleSchedule;
use radial_core::GridMeasure;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Configs are versioned; reject anything from a different schema.
pub fn check_schema(schema: &str) -> Result<()> {
    if schema != crate::record::CONFIG_SCHEMA {
        anyhow::bail!(
            "config schema `{schema}` not supported (expected `{}`)",
            crate::record::CONFIG_SCHEMA
        );
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ScheduleConfig {
    pub epsilon: f64,
    pub k0: u32,
    pub kmax: u32,
}

impl ScheduleConfig {
    /// Exponent window ~5.05..8.14: past the coarse +1-box bias, short of
    /// cell-size saturation for supports at level >= 9.
    pub fn dimension_default() -> ScheduleConfig {
        ScheduleConfig {
            epsilon: 0.1,
            k0: 17,
            kmax: 22,
        }
    }

    pub fn build(&self) -> Result<ScaleSchedule> {
        ScaleSchedule::new(self.epsilon, self.k0, self.kmax).context("building scale schedule")
    }
}

/// Deterministic seeded subsample of the support cell centres (all of them
/// when the support is small enough).
pub fn sample_support(measure: &GridMeasure, max_points: usize, seed: u64) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = measure.centers().map(|(p, _)| p.as_vec2()).collect();
    if pts.len() > max_points {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        pts.shuffle(&mut rng);
        pts.truncate(max_points);
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    }
    pts
}

/// Projective angles of the support cell centres seen from `x`.
pub fn projection_angles(measure: &GridMeasure, x: Vec2) -> Vec<f64> {
    measure
        .centers()
        .map(|(p, _)| Vec2::new(p.x - x.x, p.y - x.y).projective_angle())
        .collect()
}

/// Minimum distance between the support centre sets of two measures.
pub fn support_gap(a: &GridMeasure, b: &GridMeasure) -> f64 {
    let mut best = f64::INFINITY;
    for (p, _) in a.centers() {
        let d = b.min_dist_to(Point::xy(p.x, p.y));
        if d < best {
            best = d;
        }
    }
    best
}
