//! Text dumps and SVG drawings of patches.

use std::fmt::Write;

use num_bigint::BigInt;
use thiserror::Error;

use crate::mfs::MatrixFunctionSystem;
use crate::patch::Patch;

/// Unit length in SVG user units.
const CELL: i64 = 16;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#ad494a",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("SVG unsupported for d={0}")]
    Dimension(usize),
    #[error("patch coordinates too large to draw")]
    Extent,
}

/// Fill color of a color index; cycles through a fixed palette.
pub fn palette(color: usize) -> &'static str {
    PALETTE[color % PALETTE.len()]
}

/// One line per point, `x1 ... xd name`, in lexicographic point order.
pub fn dump(sys: &MatrixFunctionSystem, patch: &Patch) -> String {
    let mut out = String::new();
    for (p, c) in patch.iter() {
        for x in p.coords() {
            write!(out, "{x} ").unwrap();
        }
        writeln!(out, "{}", sys.color_name(c)).unwrap();
    }
    out
}

fn small(x: &BigInt) -> Result<i64, RenderError> {
    i64::try_from(x)
        .ok()
        .filter(|v| v.abs() < 1 << 40)
        .ok_or(RenderError::Extent)
}

/// SVG 1.1 drawing: unit segments for `d = 1`, unit squares for `d = 2`
/// with the second axis pointing up.
pub fn svg(sys: &MatrixFunctionSystem, patch: &Patch) -> Result<String, RenderError> {
    let d = patch.dim();
    if d > 2 {
        return Err(RenderError::Dimension(d));
    }
    let mut cells = Vec::with_capacity(patch.len());
    for (p, c) in patch.iter() {
        let x = small(&p.coords()[0])?;
        let y = if d == 2 { small(&p.coords()[1])? } else { 0 };
        cells.push((x, y, c));
    }
    let (x0, x1) = bounds(cells.iter().map(|c| c.0));
    let (y0, y1) = bounds(cells.iter().map(|c| c.1));
    let width = (x1 - x0 + 1) * CELL;
    let height = (y1 - y0 + 1) * CELL;

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    for i in 0..sys.color_count() {
        writeln!(out, "<!-- {} {} -->", sys.color_name(i), palette(i)).unwrap();
    }
    for (x, y, c) in cells {
        let px = (x - x0) * CELL;
        if d == 1 {
            let py = CELL / 2;
            writeln!(
                out,
                r#"<line x1="{px}" y1="{py}" x2="{}" y2="{py}" stroke="{}" stroke-width="{}"/>"#,
                px + CELL,
                palette(c),
                CELL / 2
            )
            .unwrap();
        } else {
            let py = (y1 - y) * CELL;
            writeln!(
                out,
                r#"<rect x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{}" stroke="black" stroke-width="0.5"/>"#,
                palette(c)
            )
            .unwrap();
        }
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

fn bounds(values: impl Iterator<Item = i64>) -> (i64, i64) {
    values
        .fold(None, |acc: Option<(i64, i64)>, v| {
            Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v))))
        })
        .unwrap_or((0, 0))
}
