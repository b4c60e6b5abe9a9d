//! Direction-bin histograms on the half sphere, and 1-D projected histograms.
//!
//! Antipodal directions are identified throughout: for d = 2 the bins are B
//! equal arcs of the upper half circle [0, pi), for d = 3 an equal-area
//! partition of the upper hemisphere into z-rings and azimuth sectors.
//!
//! A histogram is either in *measure* mode (bin values sum to the pushed
//! mass) or in *density* mode (values are per-bin mass divided by the bin
//! measure). L^p norms only make sense in density mode.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::Error;
use crate::geom::Vec2;
use crate::math;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DensityMode {
    Measure,
    Density,
}

/// Bin index of a planar direction among `bins` arcs of [0, pi).
///
/// The two quadrants of the half circle are resolved by sign tests before
/// any trigonometry, and both branches call `atan2` on a first-quadrant
/// argument pair. An exact quarter turn of the input therefore maps each
/// direction to the atan2 call of the other branch with bit-identical
/// arguments, which shifts the bin index by exactly `bins / 2`: rotation
/// equivariance holds exactly, not just within rounding. Requires `bins`
/// even.
pub fn direction_bin_2d(dir: Vec2, bins: usize) -> usize {
    debug_assert!(bins >= 2 && bins % 2 == 0);
    let c = dir.canonical_direction();
    let half = bins / 2;
    let scale = bins as f64 / PI;
    if c.x > 0.0 {
        // angle in [0, pi/2)
        let phi = math::atan2(c.y, c.x);
        let b = math::floor(phi * scale) as usize;
        b.min(half - 1)
    } else {
        // angle in [pi/2, pi)
        let phi = math::atan2(-c.x, c.y);
        let b = math::floor(phi * scale) as usize;
        half + b.min(half - 1)
    }
}

/// Equal-area hemisphere partition used for d = 3: `rings` z-slices (equal
/// area by the Archimedes projection), each split into `sectors` azimuth
/// sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HemisphereBins {
    pub rings: usize,
    pub sectors: usize,
}

impl HemisphereBins {
    /// Split `bins` into rings x sectors with rings ~ sqrt(bins). Falls back
    /// to a single ring when nothing divides.
    pub fn for_count(bins: usize) -> HemisphereBins {
        let mut rings = math::floor(math::sqrt(bins as f64)) as usize;
        while rings > 1 && bins % rings != 0 {
            rings -= 1;
        }
        HemisphereBins {
            rings: rings.max(1),
            sectors: bins / rings.max(1),
        }
    }

    pub fn count(&self) -> usize {
        self.rings * self.sectors
    }

    /// Bin of a canonical (z >= 0) direction.
    pub fn bin_of(&self, x: f64, y: f64, z: f64) -> usize {
        let ring = ((z * self.rings as f64) as usize).min(self.rings - 1);
        let mut az = math::atan2(y, x);
        if az < 0.0 {
            az += 2.0 * PI;
        }
        let sector =
            (math::floor(az / (2.0 * PI) * self.sectors as f64) as usize).min(self.sectors - 1);
        ring * self.sectors + sector
    }
}

/// Histogram over direction bins of the half sphere.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AngularDensity {
    dim: usize,
    values: Vec<f64>,
    mode: DensityMode,
    hemi: Option<HemisphereBins>,
}

impl AngularDensity {
    /// Empty measure-mode histogram. For d = 2 `bins` must be even (the
    /// half-circle arcs pair up under quarter turns); for d = 3 the count is
    /// adjusted to the nearest rings x sectors factorisation.
    pub fn zeros(dim: usize, bins: usize) -> Result<AngularDensity> {
        match dim {
            2 => {
                if bins < 2 || bins % 2 != 0 {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "direction bin count must be even and >= 2, got {bins}"
                    )));
                }
                Ok(AngularDensity {
                    dim,
                    values: vec![0.0; bins],
                    mode: DensityMode::Measure,
                    hemi: None,
                })
            }
            3 => {
                let hemi = HemisphereBins::for_count(bins);
                Ok(AngularDensity {
                    dim,
                    values: vec![0.0; hemi.count()],
                    mode: DensityMode::Measure,
                    hemi: Some(hemi),
                })
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bins(&self) -> usize {
        self.values.len()
    }

    pub fn mode(&self) -> DensityMode {
        self.mode
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Measure of one bin: arc length pi/B for d = 2, area 2 pi/B for d = 3.
    pub fn bin_measure(&self) -> f64 {
        match self.dim {
            2 => PI / self.bins() as f64,
            _ => 2.0 * PI / self.bins() as f64,
        }
    }

    /// Midpoint angle of a d = 2 bin.
    pub fn bin_midpoint(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) * PI / self.bins() as f64
    }

    pub(crate) fn add_dir2(&mut self, dir: Vec2, mass: f64) {
        let b = direction_bin_2d(dir, self.bins());
        self.values[b] += mass;
    }

    pub(crate) fn add_dir3(&mut self, x: f64, y: f64, z: f64, mass: f64) {
        let hemi = self.hemi.expect("3-d histogram");
        // canonicalise: positive last nonzero coordinate
        let (x, y, z) = if z < 0.0 || (z == 0.0 && (y < 0.0 || (y == 0.0 && x < 0.0))) {
            (-x, -y, -z)
        } else {
            (x, y, z)
        };
        self.values[hemi.bin_of(x, y, z)] += mass;
    }

    pub fn total(&self) -> f64 {
        crate::sum::tree_sum(&self.values)
    }

    /// Convert a measure-mode histogram into density mode.
    pub fn into_density(mut self) -> AngularDensity {
        if self.mode == DensityMode::Measure {
            let w = self.bin_measure();
            for v in &mut self.values {
                *v /= w;
            }
            self.mode = DensityMode::Density;
        }
        self
    }

    pub fn occupied_bins(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Midpoint angles of the occupied bins (d = 2).
    pub fn occupied_angles(&self) -> Vec<f64> {
        self.occupied_bins()
            .iter()
            .map(|&b| self.bin_midpoint(b))
            .collect()
    }
}

/// Histogram of an orthogonal projection over an interval of the projection
/// axis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineDensity {
    pub direction: Vec2,
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    mode: DensityMode,
}

impl LineDensity {
    pub fn zeros(direction: Vec2, lo: f64, hi: f64, bins: usize) -> LineDensity {
        debug_assert!(hi > lo && bins > 0);
        LineDensity {
            direction,
            lo,
            hi,
            values: vec![0.0; bins],
            mode: DensityMode::Measure,
        }
    }

    pub fn bins(&self) -> usize {
        self.values.len()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn mode(&self) -> DensityMode {
        self.mode
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bin containing coordinate w; the right endpoint folds into the last
    /// bin.
    pub fn bin_of(&self, w: f64) -> usize {
        let t = (w - self.lo) / (self.hi - self.lo) * self.bins() as f64;
        (math::floor(t) as usize).min(self.bins() - 1)
    }

    pub(crate) fn add(&mut self, w: f64, mass: f64) {
        let b = self.bin_of(w);
        self.values[b] += mass;
    }

    pub fn total(&self) -> f64 {
        crate::sum::tree_sum(&self.values)
    }

    pub fn into_density(mut self) -> LineDensity {
        if self.mode == DensityMode::Measure {
            let w = self.bin_width();
            for v in &mut self.values {
                *v /= w;
            }
            self.mode = DensityMode::Density;
        }
        self
    }
}

/// L^p norm of a density-mode histogram: (sum |f_b|^p * |bin|)^(1/p).
///
/// Measure-mode inputs are rejected; their values carry mass units, and the
/// result would silently depend on the bin count.
pub fn lp_norm_angular(density: &AngularDensity, p: f64) -> Result<f64> {
    if density.mode != DensityMode::Density {
        return Err(Error::UnitsMismatch);
    }
    if p < 1.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "p must be >= 1, got {p}"
        )));
    }
    Ok(lp_from_parts(&density.values, density.bin_measure(), p))
}

/// L^p norm of a 1-D density-mode histogram.
pub fn lp_norm_line(density: &LineDensity, p: f64) -> Result<f64> {
    if density.mode != DensityMode::Density {
        return Err(Error::UnitsMismatch);
    }
    if p < 1.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "p must be >= 1, got {p}"
        )));
    }
    Ok(lp_from_parts(&density.values, density.bin_width(), p))
}

fn lp_from_parts(values: &[f64], bin_measure: f64, p: f64) -> f64 {
    let sum = crate::sum::tree_sum_iter(values.iter().map(|&v| math::powf(v, p) * bin_measure));
    math::powf(sum, 1.0 / p)
}
