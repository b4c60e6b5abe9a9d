//! Plain-text measure files.
//!
//! Versioned format, one line of header then one line per cell in sorted
//! index order:
//!
//! ```text
//! gridmeasure v1 d=<d> m=<m>
//! <i> <j> [<k>] <mass>
//! ```
//!
//! Masses print in shortest round-trip form, so save/load reproduces every
//! value bit for bit. The loader validates the invariants: strictly
//! ascending cell order (no duplicates), nonnegative finite masses, indices
//! inside the grid.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use radial_core::measure::Cell;
use radial_core::GridMeasure;

pub fn write_measure<W: Write>(mut w: W, measure: &GridMeasure) -> Result<()> {
    writeln!(
        w,
        "gridmeasure v1 d={} m={}",
        measure.dim(),
        measure.level()
    )?;
    for &(c, mass) in measure.cells() {
        if measure.dim() == 2 {
            writeln!(w, "{} {} {}", c.0[0], c.0[1], mass)?;
        } else {
            writeln!(w, "{} {} {} {}", c.0[0], c.0[1], c.0[2], mass)?;
        }
    }
    Ok(())
}

pub fn save_measure(path: &Path, measure: &GridMeasure) -> Result<()> {
    let file = std::fs::File::create(path)
        .with_context(|| format!("creating measure file {}", path.display()))?;
    write_measure(std::io::BufWriter::new(file), measure)
}

pub fn read_measure<R: BufRead>(r: R) -> Result<GridMeasure> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("empty measure file"))??;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("gridmeasure") || parts.next() != Some("v1") {
        bail!("bad header: expected `gridmeasure v1 ...`, got `{header}`");
    }
    let dim: usize = parts
        .next()
        .and_then(|t| t.strip_prefix("d="))
        .ok_or_else(|| anyhow!("missing d= field"))?
        .parse()?;
    let level: u32 = parts
        .next()
        .and_then(|t| t.strip_prefix("m="))
        .ok_or_else(|| anyhow!("missing m= field"))?
        .parse()?;
    if dim != 2 && dim != 3 {
        bail!("unsupported dimension {dim}");
    }
    let mut cells: Vec<(Cell, f64)> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let expected = dim + 1;
        if tokens.len() != expected {
            bail!(
                "line {}: expected {expected} fields, got {}",
                lineno + 2,
                tokens.len()
            );
        }
        let mut idx = [0u32; 3];
        for a in 0..dim {
            idx[a] = tokens[a]
                .parse()
                .with_context(|| format!("line {}: bad index", lineno + 2))?;
        }
        let mass: f64 = tokens[dim]
            .parse()
            .with_context(|| format!("line {}: bad mass", lineno + 2))?;
        if !mass.is_finite() || mass < 0.0 {
            bail!(
                "line {}: mass {mass} is not a finite nonnegative number",
                lineno + 2
            );
        }
        let cell = Cell(idx);
        if let Some(&(prev, _)) = cells.last() {
            if prev >= cell {
                bail!("line {}: cells out of order or duplicated", lineno + 2);
            }
        }
        cells.push((cell, mass));
    }
    GridMeasure::from_cell_masses(dim, level, cells).map_err(|e| anyhow!("invalid measure: {e}"))
}

pub fn load_measure(path: &Path) -> Result<GridMeasure> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("opening measure file {}", path.display()))?;
    read_measure(BufReader::new(file))
}
