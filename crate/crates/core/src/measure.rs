//! Sparse dyadic-grid measures on the unit cube, d in {2, 3}.
//!
//! A [`GridMeasure`] stores nonnegative masses on cells of side `2^-m`. Cells
//! are kept sorted by index, every reduction has a fixed shape, and the
//! structure is immutable after construction, so all queries are pure and
//! reproducible bit for bit.
//!
//! Membership conventions (documented once, used everywhere): a cell belongs
//! to a ball or tube iff its *centre* does; balls are closed, tubes open.
//! The error of any estimator built on this convention is bounded by one
//! cell diameter per boundary.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::geom::{Line, Point};
use crate::math;
use crate::Result;

/// Highest supported resolution level. Keeps cell-centre coordinates and the
/// integer arithmetic of direction deduplication exact in f64.
pub const MAX_LEVEL: u32 = 26;

/// Index of a dyadic cell; the third coordinate is 0 when d = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell(pub [u32; 3]);

/// Contracting similarity `y -> ratio * y + offset` with a selection weight.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Similarity {
    pub ratio: f64,
    pub offset: Point,
    pub weight: f64,
}

/// Sparse probability (or restricted sub-probability) measure on the dyadic
/// grid of the unit cube.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridMeasure {
    dim: usize,
    level: u32,
    cells: Vec<(Cell, f64)>,
    total_mass: f64,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn check_level(level: u32) -> Result<()> {
    if level <= MAX_LEVEL {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!(
            "resolution level {level} exceeds the supported maximum {MAX_LEVEL}"
        )))
    }
}

impl GridMeasure {
    /// Build from unsorted (cell, mass) pairs; duplicate cells accumulate.
    pub fn from_cell_masses<I>(dim: usize, level: u32, iter: I) -> Result<GridMeasure>
    where
        I: IntoIterator<Item = (Cell, f64)>,
    {
        check_dim(dim)?;
        check_level(level)?;
        let n = 1u32 << level;
        let mut map: BTreeMap<Cell, f64> = BTreeMap::new();
        for (cell, mass) in iter {
            if mass < 0.0 {
                return Err(Error::InvalidArgument(String::from("negative cell mass")));
            }
            if mass == 0.0 {
                continue;
            }
            let idx = cell.0;
            if idx[0] >= n || idx[1] >= n || (dim == 3 && idx[2] >= n) || (dim == 2 && idx[2] != 0)
            {
                return Err(Error::InvalidArgument(alloc::format!(
                    "cell index {idx:?} out of range at level {level}"
                )));
            }
            *map.entry(cell).or_insert(0.0) += mass;
        }
        let cells: Vec<(Cell, f64)> = map.into_iter().collect();
        let total_mass = tree_sum_masses(&cells);
        Ok(GridMeasure {
            dim,
            level,
            cells,
            total_mass,
        })
    }

    /// Uniform probability measure on the full grid at the given level.
    pub fn uniform(dim: usize, level: u32) -> Result<GridMeasure> {
        check_dim(dim)?;
        check_level(level)?;
        if dim == 2 && level > 13 {
            return Err(Error::InvalidArgument(String::from(
                "uniform square above level 13 would exceed the dense-cell budget",
            )));
        }
        if dim == 3 && level > 8 {
            return Err(Error::InvalidArgument(String::from(
                "uniform cube above level 8 would exceed the dense-cell budget",
            )));
        }
        let n = 1u32 << level;
        let count = (n as u64).pow(dim as u32);
        let mass = 1.0 / count as f64;
        let mut cells = Vec::with_capacity(count as usize);
        if dim == 2 {
            for i in 0..n {
                for j in 0..n {
                    cells.push((Cell([i, j, 0]), mass));
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        cells.push((Cell([i, j, k]), mass));
                    }
                }
            }
        }
        let total_mass = tree_sum_masses(&cells);
        Ok(GridMeasure {
            dim,
            level,
            cells,
            total_mass,
        })
    }

    /// Unit point mass on the cell containing `p`.
    pub fn point_mass(dim: usize, level: u32, p: Point) -> Result<GridMeasure> {
        check_dim(dim)?;
        check_level(level)?;
        let cell = cell_of_point(p, level, dim)
            .ok_or_else(|| Error::InvalidArgument(String::from("point outside the unit cube")))?;
        Ok(GridMeasure {
            dim,
            level,
            cells: alloc::vec![(cell, 1.0)],
            total_mass: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Side length of one cell, `2^-m`.
    pub fn cell_side(&self) -> f64 {
        math::exp2(-(self.level as f64))
    }

    /// Diameter of one cell, `sqrt(d) * 2^-m`.
    pub fn cell_diameter(&self) -> f64 {
        math::sqrt(self.dim as f64) * self.cell_side()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in sorted index order.
    pub fn cells(&self) -> &[(Cell, f64)] {
        &self.cells
    }

    pub fn cell_center(&self, cell: Cell) -> Point {
        let h = self.cell_side();
        Point {
            x: (cell.0[0] as f64 + 0.5) * h,
            y: (cell.0[1] as f64 + 0.5) * h,
            z: if self.dim == 3 {
                (cell.0[2] as f64 + 0.5) * h
            } else {
                0.0
            },
        }
    }

    /// Support cell centres in sorted cell order.
    pub fn centers(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.cells
            .iter()
            .map(move |&(c, m)| (self.cell_center(c), m))
    }

    pub fn mass_of(&self, cell: Cell) -> f64 {
        match self.cells.binary_search_by(|(c, _)| c.cmp(&cell)) {
            Ok(i) => self.cells[i].1,
            Err(_) => 0.0,
        }
    }

    /// Rescale to total mass 1.
    pub fn normalized(&self) -> Result<GridMeasure> {
        if self.total_mass <= 0.0 {
            return Err(Error::EmptySet);
        }
        let scale = 1.0 / self.total_mass;
        let cells: Vec<(Cell, f64)> = self.cells.iter().map(|&(c, m)| (c, m * scale)).collect();
        let total_mass = tree_sum_masses(&cells);
        debug_assert!(math::abs(total_mass - 1.0) <= 1e-12);
        Ok(GridMeasure {
            dim: self.dim,
            level: self.level,
            cells,
            total_mass,
        })
    }

    /// Sub-measure of the cells whose centre satisfies the predicate. The
    /// result is *not* renormalised.
    pub fn restrict<F: FnMut(Point) -> bool>(&self, mut keep: F) -> GridMeasure {
        let cells: Vec<(Cell, f64)> = self
            .cells
            .iter()
            .filter(|&&(c, _)| keep(self.cell_center(c)))
            .copied()
            .collect();
        let total_mass = tree_sum_masses(&cells);
        GridMeasure {
            dim: self.dim,
            level: self.level,
            cells,
            total_mass,
        }
    }

    /// Total mass of cells with centre inside the open ball B(center, r).
    ///
    /// Like tubes, balls are open: strict inequality keeps lattice-boundary
    /// coincidences (neighbours at distance exactly r) out, which is what
    /// makes the dyadic Frostman search track the continuum area bounds.
    pub fn mass_in_ball(&self, center: Point, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::InvalidArgument(String::from(
                "ball radius must be positive",
            )));
        }
        let r2 = r * r;
        let mut acc = 0.0;
        self.for_cells_in_box(center, r, |c, m| {
            let p = self.cell_center(c);
            let dx = p.x - center.x;
            let dy = p.y - center.y;
            let dz = p.z - center.z;
            if dx * dx + dy * dy + dz * dz < r2 {
                acc += m;
            }
        });
        Ok(acc)
    }

    /// Distance from `p` to the nearest support cell centre; infinity for an
    /// empty measure.
    pub fn min_dist_to(&self, p: Point) -> f64 {
        let mut best = f64::INFINITY;
        for (c, _) in &self.cells {
            let d = self.cell_center(*c).dist(&p);
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Diameter of the support cell-centre set (0 for <= 1 cell).
    pub fn support_diameter(&self) -> f64 {
        // bounding-box diagonal is within sqrt(d) of the true diameter and
        // monotone; exact diameter is not needed by any caller
        if self.cells.is_empty() {
            return 0.0;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for (c, _) in &self.cells {
            let p = self.cell_center(*c);
            for (a, v) in [p.x, p.y, p.z].iter().enumerate() {
                lo[a] = lo[a].min(*v);
                hi[a] = hi[a].max(*v);
            }
        }
        let mut s = 0.0;
        for a in 0..3 {
            let d = hi[a] - lo[a];
            s += d * d;
        }
        math::sqrt(s)
    }

    /// Visit cells whose centre may lie within `r` of `center` (box filter;
    /// the caller applies the exact test).
    fn for_cells_in_box<F: FnMut(Cell, f64)>(&self, center: Point, r: f64, mut f: F) {
        let n = 1u64 << self.level;
        let h = self.cell_side();
        let clamp = |x: f64| -> u32 {
            if x < 0.0 {
                0
            } else if x >= n as f64 {
                (n - 1) as u32
            } else {
                x as u32
            }
        };
        let i_lo = clamp(math::floor((center.x - r) / h - 0.5));
        let i_hi = clamp(math::ceil((center.x + r) / h));
        let j_lo = clamp(math::floor((center.y - r) / h - 0.5));
        let j_hi = clamp(math::ceil((center.y + r) / h));
        for i in i_lo..=i_hi {
            let row_start = self.cells.partition_point(|(c, _)| c.0 < [i, j_lo, 0]);
            for idx in row_start..self.cells.len() {
                let (c, m) = self.cells[idx];
                if c.0[0] != i || c.0[1] > j_hi {
                    break;
                }
                f(c, m);
            }
        }
    }

    /// Coarsen to a lower level by summing child cells.
    pub fn coarsen(&self, to_level: u32) -> Result<GridMeasure> {
        if to_level > self.level {
            return Err(Error::InvalidArgument(String::from(
                "coarsen target level above current level",
            )));
        }
        let shift = self.level - to_level;
        GridMeasure::from_cell_masses(
            self.dim,
            to_level,
            self.cells
                .iter()
                .map(|&(c, m)| (Cell([c.0[0] >> shift, c.0[1] >> shift, c.0[2] >> shift]), m)),
        )
    }

    /// Dilate by 1/2 about a point on the level-m lattice. The image lives
    /// exactly on the level-(m+1) lattice, so the operation is float-exact.
    pub fn halve_about(&self, p: Point) -> Result<GridMeasure> {
        check_level(self.level + 1)?;
        let n = 1u64 << self.level;
        let to_lattice = |x: f64| -> Result<i64> {
            let t = x * n as f64;
            if t != math::floor(t) {
                return Err(Error::InvalidArgument(String::from(
                    "dilation centre must lie on the cell lattice",
                )));
            }
            Ok(t as i64)
        };
        let px = to_lattice(p.x)?;
        let py = to_lattice(p.y)?;
        let pz = if self.dim == 3 { to_lattice(p.z)? } else { 0 };
        let remap = |i: u32, q: i64| -> Result<u32> {
            // centre (i+1/2)*2^-m maps to index i + q at level m+1
            let v = i as i64 + q;
            if v < 0 || v >= 2 * n as i64 {
                return Err(Error::InvalidArgument(String::from(
                    "dilated support leaves the unit cube",
                )));
            }
            Ok(v as u32)
        };
        let mut cells = Vec::with_capacity(self.cells.len());
        for &(c, m) in &self.cells {
            cells.push((
                Cell([remap(c.0[0], px)?, remap(c.0[1], py)?, remap(c.0[2], pz)?]),
                m,
            ));
        }
        GridMeasure::from_cell_masses(self.dim, self.level + 1, cells)
    }

    /// Quarter-turn rotation about the cube centre (d = 2): exact on cell
    /// indices.
    pub fn rotate90(&self) -> Result<GridMeasure> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        let n = (1u32 << self.level) - 1;
        GridMeasure::from_cell_masses(
            self.dim,
            self.level,
            self.cells
                .iter()
                .map(|&(c, m)| (Cell([n - c.0[1], c.0[0], 0]), m)),
        )
    }

    /// Translate by whole cells; rejects supports that would leave the cube.
    pub fn translate_cells(&self, delta: [i64; 3]) -> Result<GridMeasure> {
        let n = 1i64 << self.level;
        let mut cells = Vec::with_capacity(self.cells.len());
        for &(c, m) in &self.cells {
            let mut idx = [0u32; 3];
            for a in 0..3 {
                let v = c.0[a] as i64 + if self.dim == 2 && a == 2 { 0 } else { delta[a] };
                if v < 0 || v >= n {
                    return Err(Error::InvalidArgument(String::from(
                        "translated support leaves the unit cube",
                    )));
                }
                idx[a] = v as u32;
            }
            cells.push((Cell(idx), m));
        }
        GridMeasure::from_cell_masses(self.dim, self.level, cells)
    }
}

fn tree_sum_masses(cells: &[(Cell, f64)]) -> f64 {
    crate::sum::tree_sum_iter(cells.iter().map(|&(_, m)| m))
}

/// Cell containing `p`; the closed upper faces of the cube fold into the
/// last cell along each axis.
pub fn cell_of_point(p: Point, level: u32, dim: usize) -> Option<Cell> {
    let n = 1u64 << level;
    let one = |x: f64| -> Option<u32> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        Some(((x * n as f64) as u64).min(n - 1) as u32)
    };
    Some(Cell([
        one(p.x)?,
        one(p.y)?,
        if dim == 3 { one(p.z)? } else { 0 },
    ]))
}

/// Rasterised `depth`-fold iterate of an iterated function system.
///
/// The resolution is the smallest level with `2^-m <= (min ratio)^depth`;
/// each depth-`depth` cylinder cube deposits its weight on the cell holding
/// the cube centre. Coarsening such a raster by one generation reproduces
/// the previous generation whenever the cylinder cubes are lattice-aligned
/// (the four-corner family), which the refinement-consistency tests rely on.
pub fn build_ifs_measure(dim: usize, maps: &[Similarity], depth: u32) -> Result<GridMeasure> {
    check_dim(dim)?;
    if maps.is_empty() || depth < 1 {
        return Err(Error::InvalidIfs(String::from(
            "need at least one map and depth >= 1",
        )));
    }
    let weight_sum = crate::sum::tree_sum_iter(maps.iter().map(|m| m.weight));
    if math::abs(weight_sum - 1.0) > 1e-9 {
        return Err(Error::InvalidIfs(alloc::format!(
            "weights sum to {weight_sum}, expected 1"
        )));
    }
    let mut min_ratio = f64::INFINITY;
    for map in maps {
        if !(map.ratio > 0.0 && map.ratio <= 1.0) {
            return Err(Error::InvalidIfs(alloc::format!(
                "contraction ratio {} outside (0, 1]",
                map.ratio
            )));
        }
        if map.weight < 0.0 {
            return Err(Error::InvalidIfs(String::from("negative weight")));
        }
        for a in 0..dim {
            let b = map.offset.coord(a);
            if b < 0.0 || map.ratio + b > 1.0 + 1e-12 {
                return Err(Error::InvalidIfs(String::from(
                    "map does not send the unit cube into itself",
                )));
            }
        }
        min_ratio = min_ratio.min(map.ratio);
    }
    let level = if min_ratio >= 1.0 {
        0
    } else {
        math::ceil(depth as f64 * -math::log2(min_ratio) - 1e-9) as u32
    };
    check_level(level)?;
    let branch_count = math::powi(maps.len() as f64, depth as i32);
    if branch_count > 2e7 {
        return Err(Error::InvalidIfs(String::from(
            "IFS iterate has too many branches",
        )));
    }

    let mut acc: BTreeMap<Cell, f64> = BTreeMap::new();
    // iterative composition stack: (remaining depth, scale, translation, weight)
    let mut stack: Vec<(u32, f64, Point, f64)> =
        alloc::vec![(depth, 1.0, Point::xyz(0.0, 0.0, 0.0), 1.0)];
    while let Some((d, scale, t, w)) = stack.pop() {
        if d == 0 {
            let half = scale * 0.5;
            let center = Point {
                x: t.x + half,
                y: t.y + half,
                z: if dim == 3 { t.z + half } else { 0.0 },
            };
            let cell =
                cell_of_point(center, level, dim).expect("cylinder centre inside the unit cube");
            *acc.entry(cell).or_insert(0.0) += w;
            continue;
        }
        // push in reverse so the lowest-index branch is processed first
        for map in maps.iter().rev() {
            let ns = scale * map.ratio;
            let nt = Point {
                x: map.ratio * t.x + map.offset.x,
                y: map.ratio * t.y + map.offset.y,
                z: if dim == 3 {
                    map.ratio * t.z + map.offset.z
                } else {
                    0.0
                },
            };
            stack.push((d - 1, ns, nt, w * map.weight));
        }
    }
    let measure = GridMeasure::from_cell_masses(dim, level, acc)?;
    measure.normalized()
}

/// Unit mass spread uniformly over the cells met by `line` inside the unit
/// square (half-open cell convention, top faces folding inward).
pub fn line_measure(line: &Line, depth: u32) -> Result<GridMeasure> {
    check_level(depth)?;
    let (t0, t1) = clip_line_to_cube(line).ok_or(Error::LineMissesCube)?;
    let n = 1u64 << depth;
    let h = 1.0 / n as f64;
    // boundary-crossing parameters along the segment, then cell of each
    // interval midpoint; robust against axis-aligned and corner cases
    let mut ts: Vec<f64> = alloc::vec![t0, t1];
    let dir = line.direction();
    for (axis, d) in [(0usize, dir.x), (1usize, dir.y)] {
        if d == 0.0 {
            continue;
        }
        let p0 = line.point_at(t0);
        let start = if axis == 0 { p0.x } else { p0.y };
        // solve start + (t - t0) * d = k * h
        let k_min = math::ceil((start.min(start + (t1 - t0) * d)) / h);
        let k_max = math::floor((start.max(start + (t1 - t0) * d)) / h);
        let mut k = k_min;
        while k <= k_max {
            let t = t0 + (k * h - start) / d;
            if t > t0 && t < t1 {
                ts.push(t);
            }
            k += 1.0;
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite clip parameters"));
    let mut cells: BTreeMap<Cell, f64> = BTreeMap::new();
    for w in ts.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let mid = line.point_at(0.5 * (w[0] + w[1]));
        if let Some(cell) = cell_of_point(Point::xy(mid.x, mid.y), depth, 2) {
            cells.insert(cell, 1.0);
        }
    }
    if cells.is_empty() {
        // degenerate tangency: the clipped segment is a single point
        let p = line.point_at(t0);
        if let Some(cell) = cell_of_point(Point::xy(p.x, p.y), depth, 2) {
            cells.insert(cell, 1.0);
        } else {
            return Err(Error::LineMissesCube);
        }
    }
    let count = cells.len() as f64;
    GridMeasure::from_cell_masses(2, depth, cells.into_keys().map(|c| (c, 1.0 / count)))
}

/// Clip a line to the closed unit square; returns the parameter interval or
/// None when the line misses the square.
fn clip_line_to_cube(line: &Line) -> Option<(f64, f64)> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    let o = line.point_at(0.0);
    let d = line.direction();
    for (start, step) in [(o.x, d.x), (o.y, d.y)] {
        if step == 0.0 {
            if !(0.0..=1.0).contains(&start) {
                return None;
            }
        } else {
            let (a, b) = ((0.0 - start) / step, (1.0 - start) / step);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            t_lo = t_lo.max(a);
            t_hi = t_hi.min(b);
        }
    }
    if t_lo > t_hi {
        None
    } else {
        Some((t_lo, t_hi))
    }
}

/// Frostman certificate over the dyadic ball family.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrostmanCertificate {
    /// max over the searched balls of mu(B(x, r)) / r^kappa
    pub constant: f64,
    pub witness_center: Point,
    pub witness_radius: f64,
}

/// Best Frostman constant over the grid-restricted ball family: centres at
/// support cell centres, radii `2^-j` for `0 <= j <= m`.
///
/// This is a certificate for the searched family only; by the doubling
/// property it is within a factor 4 of the continuum supremum. Replaying
/// `mass_in_ball` at the witness reproduces `constant` exactly.
pub fn frostman_certificate(measure: &GridMeasure, kappa: f64) -> Result<FrostmanCertificate> {
    if !(kappa > 0.0 && kappa <= measure.dim() as f64) {
        return Err(Error::InvalidArgument(alloc::format!(
            "kappa must lie in (0, d], got {kappa}"
        )));
    }
    if measure.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = FrostmanCertificate {
        constant: f64::NEG_INFINITY,
        witness_center: Point::xy(0.0, 0.0),
        witness_radius: 1.0,
    };
    for j in 0..=measure.level() {
        let r = math::exp2(-(j as f64));
        let denom = math::powf(r, kappa);
        for (center, _) in measure.centers() {
            let q = measure.mass_in_ball(center, r).expect("r > 0") / denom;
            if q > best.constant {
                best = FrostmanCertificate {
                    constant: q,
                    witness_center: center,
                    witness_radius: r,
                };
            }
        }
    }
    Ok(best)
}

/// Canned generators used by experiments and tests.
pub mod builders {
    use super::*;

    /// Four maps of ratio 1/4 in the square corners; the depth-k iterate has
    /// exactly 4^k cells at level 2k.
    pub fn four_corner_cantor(depth: u32) -> Result<GridMeasure> {
        let maps = [
            Similarity {
                ratio: 0.25,
                offset: Point::xy(0.0, 0.0),
                weight: 0.25,
            },
            Similarity {
                ratio: 0.25,
                offset: Point::xy(0.75, 0.0),
                weight: 0.25,
            },
            Similarity {
                ratio: 0.25,
                offset: Point::xy(0.0, 0.75),
                weight: 0.25,
            },
            Similarity {
                ratio: 0.25,
                offset: Point::xy(0.75, 0.75),
                weight: 0.25,
            },
        ];
        build_ifs_measure(2, &maps, depth)
    }

    /// Product of two middle-thirds Cantor sets; similarity dimension
    /// log 4 / log 3.
    pub fn middle_thirds_product(depth: u32) -> Result<GridMeasure> {
        let r = 1.0 / 3.0;
        let maps = [
            Similarity {
                ratio: r,
                offset: Point::xy(0.0, 0.0),
                weight: 0.25,
            },
            Similarity {
                ratio: r,
                offset: Point::xy(2.0 / 3.0, 0.0),
                weight: 0.25,
            },
            Similarity {
                ratio: r,
                offset: Point::xy(0.0, 2.0 / 3.0),
                weight: 0.25,
            },
            Similarity {
                ratio: r,
                offset: Point::xy(2.0 / 3.0, 2.0 / 3.0),
                weight: 0.25,
            },
        ];
        build_ifs_measure(2, &maps, depth)
    }

    /// Three of the four half-scale quadrants; similarity dimension
    /// log 3 / log 2 (~1.585), used as the s = 1.5 scan target.
    pub fn three_branch_carpet(depth: u32) -> Result<GridMeasure> {
        let w = 1.0 / 3.0;
        let maps = [
            Similarity {
                ratio: 0.5,
                offset: Point::xy(0.0, 0.0),
                weight: w,
            },
            Similarity {
                ratio: 0.5,
                offset: Point::xy(0.5, 0.0),
                weight: w,
            },
            Similarity {
                ratio: 0.5,
                offset: Point::xy(0.0, 0.5),
                weight: 1.0 - 2.0 * w,
            },
        ];
        build_ifs_measure(2, &maps, depth)
    }
}
