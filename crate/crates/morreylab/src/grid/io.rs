//! CSV node-table serialization for grids and fields.
//!
//! Column order: `x, y, flag, value`, one row per lattice node in index
//! order (row-major, `j * nx + i`). `flag` is 0 interior, 1 boundary,
//! 2 exterior.

use super::{Grid, NodeFlag, ScalarField};
use crate::{Error, Result};
use std::io::{BufRead, Write};
use std::sync::Arc;

pub fn write_field_csv(f: &ScalarField, mut w: impl Write) -> Result<()> {
    writeln!(w, "x,y,flag,value")?;
    let grid = f.grid();
    for idx in 0..grid.node_count() {
        let p = grid.position(idx);
        writeln!(
            w,
            "{:.12e},{:.12e},{},{:.17e}",
            p[0],
            p[1],
            grid.flag(idx).code(),
            f.get(idx)
        )?;
    }
    Ok(())
}

/// Read a node table back onto a freshly built grid. The grid must have the
/// same layout the table was written from; positions and flags are checked.
pub fn read_field_csv(grid: &Arc<Grid>, r: impl BufRead) -> Result<ScalarField> {
    let mut values = Vec::with_capacity(grid.node_count());
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty field CSV".into()))?
        .map_err(Error::Io)?;
    if header.trim() != "x,y,flag,value" {
        return Err(Error::Parse(format!(
            "unexpected field CSV header: {header}"
        )));
    }
    for (row, line) in lines.enumerate() {
        let line = line.map_err(Error::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |what: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("row {row}: missing {what}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {row}: {what}: {e}")))
        };
        let x = next("x")?;
        let y = next("y")?;
        let flag = next("flag")? as u8;
        let value = next("value")?;
        let idx = values.len();
        if idx >= grid.node_count() {
            return Err(Error::Parse("field CSV has more rows than grid nodes".into()));
        }
        let p = grid.position(idx);
        if (p[0] - x).abs() > 1e-9 || (p[1] - y).abs() > 1e-9 {
            return Err(Error::GridMismatch(format!(
                "row {row}: node position ({x}, {y}) does not match grid ({}, {})",
                p[0], p[1]
            )));
        }
        if NodeFlag::from_code(flag)? != grid.flag(idx) {
            return Err(Error::GridMismatch(format!(
                "row {row}: node flag {flag} does not match grid"
            )));
        }
        values.push(value);
    }
    if values.len() != grid.node_count() {
        return Err(Error::Parse(format!(
            "field CSV has {} rows, grid has {} nodes",
            values.len(),
            grid.node_count()
        )));
    }
    ScalarField::from_values(grid, values)
}
