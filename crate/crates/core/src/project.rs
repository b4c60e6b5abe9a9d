//! Radial and orthogonal pushforwards of grid measures.
//!
//! Radial projections from a centre x assign each support cell's mass to the
//! direction bin of (centre - x), antipodally identified. The weighted
//! variant multiplies each mass by the translated Riesz kernel |x - y|^(1-d)
//! (constant c_d = 1 under the pooled-ray convention; see
//! [`crate::smooth::verify_projection_identity`] for the test pinning it)
//! and returns a density per unit of direction measure.
//!
//! Cell-centre evaluation keeps every operation a single pass over the
//! support; the discretisation error is controlled by the resolution and is
//! the caller's to budget.

use crate::angular::{AngularDensity, LineDensity};
use crate::error::Error;
use crate::geom::{Point, Vec2};
use crate::measure::GridMeasure;
use crate::Result;

/// Required clearance between a projection centre and the support: two cell
/// diameters.
pub fn centre_clearance(measure: &GridMeasure) -> f64 {
    2.0 * measure.cell_diameter()
}

fn check_centre(measure: &GridMeasure, x: Point) -> Result<()> {
    if measure.is_empty() {
        return Err(Error::EmptySet);
    }
    if measure.min_dist_to(x) <= centre_clearance(measure) {
        return Err(Error::CentreInsideSupport);
    }
    Ok(())
}

/// Pushforward of the measure under the radial projection from `x`
/// (measure mode: bins sum to the total mass).
///
/// Errors with [`Error::CentreInsideSupport`] when `x` comes within two cell
/// diameters of the support, where the projection degenerates.
pub fn radial_pushforward(measure: &GridMeasure, x: Point, bins: usize) -> Result<AngularDensity> {
    check_centre(measure, x)?;
    let mut hist = AngularDensity::zeros(measure.dim(), bins)?;
    if measure.dim() == 2 {
        for (c, m) in measure.centers() {
            hist.add_dir2(Vec2::new(c.x - x.x, c.y - x.y), m);
        }
    } else {
        for (c, m) in measure.centers() {
            hist.add_dir3(c.x - x.x, c.y - x.y, c.z - x.z, m);
        }
    }
    Ok(hist)
}

/// Density of the weighted radial pushforward: each cell mass is multiplied
/// by |x - c|^(1-d) before binning, and the result is divided by the bin
/// measure.
///
/// With antipodal pooling, the bin value converges (in resolution and bin
/// count) to the line integral of the density of the measure along the full
/// line through `x` in the bin direction.
pub fn weighted_radial_density(
    measure: &GridMeasure,
    x: Point,
    bins: usize,
) -> Result<AngularDensity> {
    check_centre(measure, x)?;
    let mut hist = AngularDensity::zeros(measure.dim(), bins)?;
    if measure.dim() == 2 {
        for (c, m) in measure.centers() {
            let d = Vec2::new(c.x - x.x, c.y - x.y);
            hist.add_dir2(d, m / d.norm());
        }
    } else {
        for (c, m) in measure.centers() {
            let (dx, dy, dz) = (c.x - x.x, c.y - x.y, c.z - x.z);
            let r2 = dx * dx + dy * dy + dz * dz;
            hist.add_dir3(dx, dy, dz, m / r2);
        }
    }
    Ok(hist.into_density())
}

/// Orthogonal projection onto the axis perpendicular to `e` (d = 2). The
/// bins partition the projection of the whole unit square, so lattice-
/// aligned measures land in exact bins. Measure mode; mass preserved.
pub fn orthogonal_pushforward(measure: &GridMeasure, e: Vec2, bins: usize) -> Result<LineDensity> {
    if measure.dim() != 2 {
        return Err(Error::UnsupportedDimension(measure.dim()));
    }
    if measure.is_empty() {
        return Err(Error::EmptySet);
    }
    let e = e.normalized().canonical_direction();
    // coordinate on e^perp; clockwise perp keeps "project along vertical e"
    // at the x coordinate
    let axis = Vec2::new(e.y, -e.x);
    let corners = [
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(1.0, 1.0),
    ];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in corners {
        let w = c.dot(axis);
        lo = lo.min(w);
        hi = hi.max(w);
    }
    let mut hist = LineDensity::zeros(e, lo, hi, bins);
    for (c, m) in measure.centers() {
        hist.add(Vec2::new(c.x, c.y).dot(axis), m);
    }
    Ok(hist)
}
