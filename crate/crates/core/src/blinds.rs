//! Venetian-blind constructions: iteratively replace tube contents by
//! fanned thinner sub-tubes so that prescribed viewpoints see radial
//! projections of small epsilon-dimensional content.
//!
//! Every generation keeps an explicit arc cover of the projection to each
//! registered viewpoint, so the recorded content bounds are certified, not
//! estimated. Bounds are monotone by construction: an old cover of a set
//! still covers every refinement of the set, so the recorded value is the
//! minimum of the fresh bound and the previous one.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::Error;
use crate::geom::{Line, Point, Vec2};
use crate::math;
use crate::measure::{cell_of_point, GridMeasure};
use crate::Result;

/// One live tube: an axis segment (parameter range along the line), a
/// half-width, and the mass it carries. Tubes created by a splitting step
/// remember the viewpoint their axis was fanned through: from that apex the
/// subtended arc has an exact closed form, free of the cancellation noise
/// of corner reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlindTube {
    pub line: Line,
    pub half_width: f64,
    pub t_range: (f64, f64),
    pub mass: f64,
    pub apex: Option<Vec2>,
}

impl BlindTube {
    /// The four corners of the chunk (segment fattened by the half-width).
    fn corners(&self) -> [Vec2; 4] {
        let n = self.line.normal();
        let a = self.line.point_at(self.t_range.0);
        let b = self.line.point_at(self.t_range.1);
        [
            a.add(n.scale(self.half_width)),
            a.sub(n.scale(self.half_width)),
            b.add(n.scale(self.half_width)),
            b.sub(n.scale(self.half_width)),
        ]
    }

    /// Length of an arc certified to cover the radial projection of the
    /// chunk from `v` (capped at pi, the whole projective circle).
    fn arc_from(&self, v: Vec2) -> f64 {
        if let Some(apex) = self.apex {
            if apex.x == v.x && apex.y == v.y {
                // the axis passes through v: every chunk point lies within
                // angle atan(w / t) of the axis direction, t the on-axis
                // distance from v
                let ta = self.line.project_t(v);
                let d0 = math::abs(self.t_range.0 - ta);
                let d1 = math::abs(self.t_range.1 - ta);
                let t_min = d0.min(d1);
                if t_min > self.half_width {
                    return 2.0 * math::atan2(self.half_width, t_min);
                }
                return PI;
            }
        }
        let corners = self.corners();
        let reference = corners[0].sub(v);
        if reference.norm() == 0.0 {
            return PI;
        }
        let mut lo: f64 = 0.0;
        let mut hi: f64 = 0.0;
        for c in &corners[1..] {
            let d = c.sub(v);
            if d.norm() == 0.0 {
                return PI;
            }
            // signed projective offset from the reference direction
            let off = math::atan2(reference.cross(d), reference.dot(d));
            let off = if off > PI / 2.0 {
                off - PI
            } else if off < -PI / 2.0 {
                off + PI
            } else {
                off
            };
            lo = lo.min(off);
            hi = hi.max(off);
        }
        // convexity of the chunk keeps the projection inside the corner span
        // as long as v subtends it by less than a half turn
        (hi - lo).min(PI)
    }
}

/// State of the construction after some number of generations.
#[derive(Debug, Clone)]
pub struct BlindState {
    generation: u32,
    tubes: Vec<BlindTube>,
    content_eps: f64,
    viewpoints: Vec<Vec2>,
    /// recorded[v] has one entry per completed generation (monotone
    /// nonincreasing)
    recorded: Vec<Vec<f64>>,
}

impl BlindState {
    /// Single-tube seed of unit mass. Registered viewpoints get a content
    /// bound entry at every generation.
    pub fn seed(
        line: Line,
        half_width: f64,
        t_range: (f64, f64),
        content_eps: f64,
        viewpoints: &[Vec2],
    ) -> Result<BlindState> {
        if !(half_width > 0.0 && t_range.1 > t_range.0) {
            return Err(Error::InvalidArgument(String::from("degenerate seed tube")));
        }
        if !(content_eps > 0.0 && content_eps <= 1.0) {
            return Err(Error::InvalidArgument(String::from(
                "content epsilon outside (0,1]",
            )));
        }
        let tubes = alloc::vec![BlindTube {
            line,
            half_width,
            t_range,
            mass: 1.0,
            apex: None
        }];
        let mut state = BlindState {
            generation: 0,
            tubes,
            content_eps,
            viewpoints: viewpoints.to_vec(),
            recorded: alloc::vec![Vec::new(); viewpoints.len()],
        };
        state.record_generation();
        Ok(state)
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    pub fn tubes(&self) -> &[BlindTube] {
        &self.tubes
    }

    pub fn content_eps(&self) -> f64 {
        self.content_eps
    }

    pub fn viewpoints(&self) -> &[Vec2] {
        &self.viewpoints
    }

    pub fn total_mass(&self) -> f64 {
        crate::sum::tree_sum_iter(self.tubes.iter().map(|t| t.mass))
    }

    /// Certified fresh content bound: sum over live tubes of (arc length)^eps
    /// of the explicit corner-arc cover.
    pub fn fresh_content(&self, v: Vec2) -> f64 {
        crate::sum::tree_sum_iter(
            self.tubes
                .iter()
                .map(|t| math::powf(t.arc_from(v), self.content_eps)),
        )
    }

    /// Recorded per-generation bounds of a registered viewpoint.
    pub fn recorded_bounds(&self, viewpoint_index: usize) -> &[f64] {
        &self.recorded[viewpoint_index]
    }

    fn record_generation(&mut self) {
        for (i, v) in self.viewpoints.iter().enumerate() {
            let fresh = self.fresh_content(*v);
            let bound = match self.recorded[i].last() {
                Some(&prev) => prev.min(fresh),
                None => fresh,
            };
            self.recorded[i].push(bound);
        }
    }

    fn register(&mut self, v: Vec2) -> usize {
        if let Some(i) = self
            .viewpoints
            .iter()
            .position(|q| q.x == v.x && q.y == v.y)
        {
            return i;
        }
        self.viewpoints.push(v);
        // backfill past generations with the trivial whole-circle bound;
        // earlier sets were larger, so fresher covers do not apply to them
        let trivial = math::powf(PI, self.content_eps);
        self.recorded
            .push(alloc::vec![trivial; self.generation as usize]);
        self.viewpoints.len() - 1
    }

    /// One construction step against one viewpoint.
    ///
    /// Each live tube's contents move into `split_factor` sub-tubes whose
    /// axes pass through the viewpoint at equally spaced angles inside the
    /// cone the parent chunk subtends there. Sub-tube chunks are clipped
    /// with a margin so the fattened child region stays inside the parent
    /// region (refinement). Widths shrink by 1/(16 * split^(1/eps)): the
    /// split-factor contributions cancel in the trained viewpoint's content
    /// bound, which then drops by the factor 16^(-eps) per step.
    pub fn step(&self, viewpoint: Vec2, split_factor: u32) -> Result<BlindState> {
        if split_factor < 2 {
            return Err(Error::InvalidArgument(String::from(
                "split factor must be >= 2",
            )));
        }
        // the viewpoint must sit outside every live chunk region (distance
        // to the chunk segment at least the half-width): inside, the fan
        // apex degenerates. A viewpoint on the axis line but beyond the
        // segment is fine; re-training a viewpoint whose old fan lines pass
        // through it is fine too.
        for t in &self.tubes {
            let a = t.line.point_at(t.t_range.0);
            let b = t.line.point_at(t.t_range.1);
            if segment_dist(a, b, viewpoint) < t.half_width {
                return Err(Error::ViewpointInsideTube);
            }
        }
        let shrink =
            (1.0 / (16.0 * math::powf(split_factor as f64, 1.0 / self.content_eps))).min(0.25);
        let mut tubes = Vec::new();
        for parent in &self.tubes {
            let w_child = parent.half_width * shrink;
            // cone subtended by the parent chunk at the viewpoint
            let corners = parent.corners();
            let reference = corners[0].sub(viewpoint);
            let mut lo: f64 = 0.0;
            let mut hi: f64 = 0.0;
            for c in &corners {
                let d = c.sub(viewpoint);
                let off = math::atan2(reference.cross(d), reference.dot(d));
                lo = lo.min(off);
                hi = hi.max(off);
            }
            let base = math::atan2(reference.y, reference.x);
            let mut children = Vec::new();
            for j in 0..split_factor {
                let theta = base + lo + (j as f64 + 0.5) * (hi - lo) / split_factor as f64;
                let axis = Line::through_point(viewpoint, Vec2::from_angle(theta));
                if let Some(t_range) = clip_to_parent(&axis, parent, w_child) {
                    children.push(BlindTube {
                        line: axis,
                        half_width: w_child,
                        t_range,
                        mass: 0.0,
                        apex: Some(viewpoint),
                    });
                }
            }
            if children.is_empty() {
                // nothing of the fan meets the parent chunk: keep the parent
                tubes.push(*parent);
            } else {
                let share = parent.mass / children.len() as f64;
                for mut c in children {
                    c.mass = share;
                    tubes.push(c);
                }
            }
        }
        let mut next = BlindState {
            generation: self.generation + 1,
            tubes,
            content_eps: self.content_eps,
            viewpoints: self.viewpoints.clone(),
            recorded: self.recorded.clone(),
        };
        next.register(viewpoint);
        next.record_generation();
        Ok(next)
    }

    /// Rasterise: each tube's mass spreads uniformly over the cells whose
    /// centre lies within half-width + half a cell diagonal of its chunk
    /// segment (the fixed inflation keeps refinement exact at a common
    /// level).
    pub fn rasterize(&self, level: u32) -> Result<GridMeasure> {
        let h = math::exp2(-(level as f64));
        let inflate = math::sqrt(2.0) * h / 2.0;
        let mut acc: BTreeMap<crate::measure::Cell, f64> = BTreeMap::new();
        for t in &self.tubes {
            let radius = t.half_width + inflate;
            let a = t.line.point_at(t.t_range.0);
            let b = t.line.point_at(t.t_range.1);
            let lo_x = (a.x.min(b.x) - radius).max(0.0);
            let hi_x = (a.x.max(b.x) + radius).min(1.0);
            let lo_y = (a.y.min(b.y) - radius).max(0.0);
            let hi_y = (a.y.max(b.y) + radius).min(1.0);
            let mut cells = Vec::new();
            let i0 = math::floor(lo_x / h) as i64;
            let i1 = math::ceil(hi_x / h) as i64;
            let j0 = math::floor(lo_y / h) as i64;
            let j1 = math::ceil(hi_y / h) as i64;
            for i in i0..=i1 {
                for j in j0..=j1 {
                    let p = Vec2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                    if segment_dist(a, b, p) < radius {
                        if let Some(cell) = cell_of_point(Point::xy(p.x, p.y), level, 2) {
                            cells.push(cell);
                        }
                    }
                }
            }
            if cells.is_empty() {
                return Err(Error::ResolutionExceeded(alloc::format!(
                    "tube at generation {} rasterises to no cells at level {level}",
                    self.generation
                )));
            }
            let share = t.mass / cells.len() as f64;
            for c in cells {
                *acc.entry(c).or_insert(0.0) += share;
            }
        }
        GridMeasure::from_cell_masses(2, level, acc)
    }
}

/// Chunk of `axis` inside the parent region with margin `w_child` on every
/// boundary, so the fattened child stays inside the parent.
fn clip_to_parent(axis: &Line, parent: &BlindTube, w_child: f64) -> Option<(f64, f64)> {
    let margin_w = parent.half_width - w_child;
    if margin_w <= 0.0 {
        return None;
    }
    // distance to the parent axis is affine in the child parameter
    let p0 = axis.point_at(0.0);
    let p1 = axis.point_at(1.0);
    let d0 = parent.line.signed_dist(p0);
    let d1 = parent.line.signed_dist(p1);
    let slope_d = d1 - d0;
    let (mut t_lo, mut t_hi) = affine_in_band(d0, slope_d, -margin_w, margin_w)?;
    // longitudinal coordinate along the parent is affine as well
    let c0 = parent.line.project_t(p0);
    let c1 = parent.line.project_t(p1);
    let (lo_c, hi_c) = (parent.t_range.0 + w_child, parent.t_range.1 - w_child);
    if hi_c <= lo_c {
        return None;
    }
    let (a, b) = affine_in_band(c0, c1 - c0, lo_c, hi_c)?;
    t_lo = t_lo.max(a);
    t_hi = t_hi.min(b);
    if t_hi <= t_lo {
        None
    } else {
        Some((t_lo, t_hi))
    }
}

/// Parameter interval where v0 + slope * t lies in [lo, hi].
fn affine_in_band(v0: f64, slope: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if slope == 0.0 {
        if v0 >= lo && v0 <= hi {
            Some((f64::NEG_INFINITY, f64::INFINITY))
        } else {
            None
        }
    } else {
        let a = (lo - v0) / slope;
        let b = (hi - v0) / slope;
        Some(if a <= b { (a, b) } else { (b, a) })
    }
}

fn segment_dist(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

/// Content-report row: bound for one viewpoint after one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentRow {
    pub generation: u32,
    pub viewpoint: usize,
    pub eps: f64,
    pub bound: f64,
}

/// Run `generations` steps cycling through the viewpoints, then rasterise.
///
/// The raster level must accommodate the splitting: generations *
/// log2(split_factor) may not exceed it.
pub fn blind_construct(
    viewpoints: &[Vec2],
    generations: u32,
    split_factor: u32,
    content_eps: f64,
    level: u32,
) -> Result<(BlindState, GridMeasure, Vec<ContentRow>)> {
    if viewpoints.is_empty() {
        return Err(Error::InvalidArgument(String::from(
            "need at least one viewpoint",
        )));
    }
    for (i, a) in viewpoints.iter().enumerate() {
        for b in viewpoints.iter().skip(i + 1) {
            if a.x == b.x && a.y == b.y {
                return Err(Error::InvalidArgument(String::from("duplicate viewpoints")));
            }
        }
    }
    let budget = generations as f64 * math::log2(split_factor as f64);
    if budget > level as f64 {
        return Err(Error::ResolutionExceeded(alloc::format!(
            "generations * log2(split) = {budget} exceeds level {level}"
        )));
    }
    let mut state = BlindState::seed(
        Line::horizontal(0.5),
        math::exp2(-4.0),
        (0.0, 1.0),
        content_eps,
        viewpoints,
    )?;
    for g in 0..generations {
        let v = viewpoints[(g as usize) % viewpoints.len()];
        state = state.step(v, split_factor)?;
    }
    let measure = state.rasterize(level)?;
    let mut report = Vec::new();
    for (vi, rows) in state.recorded.iter().enumerate() {
        for (g, &bound) in rows.iter().enumerate() {
            report.push(ContentRow {
                generation: g as u32,
                viewpoint: vi,
                eps: content_eps,
                bound,
            });
        }
    }
    Ok((state, measure, report))
}
