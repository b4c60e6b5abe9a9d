//! Declarative measure specifications for configs and the CLI.

use std::path::Path;

use anyhow::{bail, Context, Result};
use radial_core::blinds;
use radial_core::geom::{Line, Point, Vec2};
use radial_core::measure::{build_ifs_measure, builders, line_measure, Similarity};
use radial_core::GridMeasure;
use serde::{Deserialize, Serialize};

/// A buildable measure. The `restrict` / `translate` wrappers compose.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MeasureSpec {
    UniformSquare {
        level: u32,
    },
    FourCornerCantor {
        depth: u32,
    },
    MiddleThirdsProduct {
        depth: u32,
    },
    ThreeBranchCarpet {
        depth: u32,
    },
    PointMass {
        x: f64,
        y: f64,
        level: u32,
    },
    HorizontalLine {
        y: f64,
        depth: u32,
    },
    LineThrough {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        depth: u32,
    },
    Ifs {
        maps: Vec<IfsMap>,
        depth: u32,
    },
    Blinds {
        viewpoints: Vec<[f64; 2]>,
        generations: u32,
        split: u32,
        eps: f64,
        level: u32,
    },
    File {
        path: String,
    },
    /// Keep only cells with centre in [x0,x1) x [y0,y1); optionally rescale
    /// to a probability measure.
    Restrict {
        base: Box<MeasureSpec>,
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        normalize: bool,
    },
    /// Shift by whole cells at the base resolution.
    Translate {
        base: Box<MeasureSpec>,
        di: i64,
        dj: i64,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct IfsMap {
    pub ratio: f64,
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

pub fn build_measure(spec: &MeasureSpec) -> Result<GridMeasure> {
    let m = match spec {
        MeasureSpec::UniformSquare { level } => GridMeasure::uniform(2, *level)?,
        MeasureSpec::FourCornerCantor { depth } => builders::four_corner_cantor(*depth)?,
        MeasureSpec::MiddleThirdsProduct { depth } => builders::middle_thirds_product(*depth)?,
        MeasureSpec::ThreeBranchCarpet { depth } => builders::three_branch_carpet(*depth)?,
        MeasureSpec::PointMass { x, y, level } => {
            GridMeasure::point_mass(2, *level, Point::xy(*x, *y))?
        }
        MeasureSpec::HorizontalLine { y, depth } => line_measure(&Line::horizontal(*y), *depth)?,
        MeasureSpec::LineThrough {
            x0,
            y0,
            x1,
            y1,
            depth,
        } => {
            let line = Line::through_points(Vec2::new(*x0, *y0), Vec2::new(*x1, *y1));
            line_measure(&line, *depth)?
        }
        MeasureSpec::Ifs { maps, depth } => {
            let sims: Vec<Similarity> = maps
                .iter()
                .map(|m| Similarity {
                    ratio: m.ratio,
                    offset: Point::xy(m.x, m.y),
                    weight: m.weight,
                })
                .collect();
            build_ifs_measure(2, &sims, *depth)?
        }
        MeasureSpec::Blinds {
            viewpoints,
            generations,
            split,
            eps,
            level,
        } => {
            let vps: Vec<Vec2> = viewpoints.iter().map(|v| Vec2::new(v[0], v[1])).collect();
            let (_, measure, _) =
                blinds::blind_construct(&vps, *generations, *split, *eps, *level)?;
            measure.normalized()?
        }
        MeasureSpec::File { path } => crate::format::load_measure(Path::new(path))?,
        MeasureSpec::Restrict {
            base,
            x0,
            x1,
            y0,
            y1,
            normalize,
        } => {
            let base = build_measure(base)?;
            let cut = base.restrict(|p| p.x >= *x0 && p.x < *x1 && p.y >= *y0 && p.y < *y1);
            if cut.is_empty() {
                bail!("restriction leaves an empty measure");
            }
            if *normalize {
                cut.normalized()?
            } else {
                cut
            }
        }
        MeasureSpec::Translate { base, di, dj } => {
            build_measure(base)?.translate_cells([*di, *dj, 0])?
        }
    };
    Ok(m)
}

/// Parse a `--measure` argument: inline JSON when it starts with '{', a
/// path to a JSON spec when it ends in .json, otherwise a measure file.
pub fn measure_from_arg(arg: &str) -> Result<GridMeasure> {
    if arg.trim_start().starts_with('{') {
        let spec: MeasureSpec = serde_json::from_str(arg).context("parsing inline measure spec")?;
        build_measure(&spec)
    } else if arg.ends_with(".json") {
        let text =
            std::fs::read_to_string(arg).with_context(|| format!("reading measure spec {arg}"))?;
        let spec: MeasureSpec = serde_json::from_str(&text)?;
        build_measure(&spec)
    } else {
        crate::format::load_measure(Path::new(arg))
    }
}
