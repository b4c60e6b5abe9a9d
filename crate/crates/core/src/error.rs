//! Crate-wide error type.

use alloc::string::String;

/// Errors produced by constructors and queries.
///
/// Variants mirror the failure modes of the individual operations; see the
/// doc comment of each operation for which variants it can produce.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// IFS weights do not sum to 1 within 1e-9, or a map is expansive.
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    /// Line does not intersect the unit cube.
    #[error("line misses the unit cube")]
    LineMissesCube,
    /// Projection centre too close to (or inside) the support.
    #[error("projection centre lies within 2 cell diameters of the support")]
    CentreInsideSupport,
    /// Smooth test measures must have disjoint supports.
    #[error("smooth measure supports overlap")]
    SupportOverlap,
    /// Scale schedule reaches exponents beyond the representable floor.
    #[error("scale schedule underflows the 2^-1000 exponent floor")]
    ScheduleUnderflow,
    /// Box counting of an empty set.
    #[error("empty set has no covering counts")]
    EmptySet,
    /// Tube narrower than half a cell diameter at the measure resolution.
    #[error("tube half-width {width} is below resolution (min {min})")]
    SubResolutionTube { width: f64, min: f64 },
    /// A flower viewpoint carries a witness of insufficient mass.
    #[error("witness mass {mass} does not exceed the threshold {threshold}")]
    WitnessTooSmall { mass: f64, threshold: f64 },
    /// Tube parameters violate the admissibility inequalities.
    #[error("tube parameters violated: {0}")]
    ParamsViolation(String),
    /// Venetian blind step with the viewpoint inside a live tube.
    #[error("viewpoint lies inside a current tube")]
    ViewpointInsideTube,
    /// Venetian blind construction exceeding the raster budget.
    #[error("construction exceeds the resolution budget: {0}")]
    ResolutionExceeded(String),
    /// Density passed in measure mode where a density was required.
    #[error("expected a density-mode histogram, got measure mode")]
    UnitsMismatch,
    /// Operation defined for a different ambient dimension.
    #[error("operation not supported in dimension {0}")]
    UnsupportedDimension(usize),
}
