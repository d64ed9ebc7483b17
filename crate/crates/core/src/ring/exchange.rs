//! Matrix exchange file.
//!
//! Line 1 is a JSON header; the rest is headerless CSV. With
//! `"format": "blocks"` the body holds the generating blocks `G_0..G_{B-1}`,
//! four rows of four values each. With `"format": "dense"` (or a file with
//! no JSON line at all) it holds the full `4B x 4B` matrix row by row; the
//! format is also recognised from the column count.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stiffness::{Block, RingStiffness, Storage};
use crate::error::{Error, Result};
use crate::geometry::Ring;

/// Symmetry and circulance tolerance applied on import.
const IMPORT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixHeader {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<Ring>,
    #[serde(rename = "B")]
    pub ball_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<usize>,
    #[serde(default = "dof_layout")]
    pub dof_layout: Vec<String>,
    #[serde(default = "units")]
    pub units: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

fn dof_layout() -> Vec<String> {
    ["R_first", "z_first", "R_second", "z_second"].map(String::from).to_vec()
}

fn units() -> String {
    "N/mm".into()
}

/// Writes `k`; numbers are printed in shortest round-trip form.
pub fn export_matrix(k: &RingStiffness<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (format, bandwidth) = match &k.storage {
        Storage::Circulant { bandwidth, .. } => ("blocks", Some(*bandwidth)),
        Storage::Dense { .. } => ("dense", None),
    };
    let header = MatrixHeader {
        ring: k.ring,
        ball_count: k.ball_count,
        bandwidth,
        dof_layout: dof_layout(),
        units: units(),
        format: Some(format.into()),
    };
    let mut out = serde_json::to_string(&header).expect("header serialises");
    out.push('\n');
    let mut row = |vals: &[f64]| {
        let line: Vec<String> = vals.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    };
    match &k.storage {
        Storage::Circulant { blocks, .. } => {
            for blk in blocks {
                for r in blk {
                    row(r);
                }
            }
        }
        Storage::Dense { values } => {
            let n = k.dimension();
            for r in 0..n {
                row(&values[r * n..(r + 1) * n]);
            }
        }
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads a matrix file, validating symmetry, layout and (optionally) the
/// ball count expected by the run.
pub fn import_matrix(path: impl AsRef<Path>, expected_ball_count: Option<usize>) -> Result<RingStiffness<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let header: Option<MatrixHeader> = match lines.peek() {
        Some(first) if first.trim_start().starts_with('{') => {
            let h = serde_json::from_str(first).map_err(|e| Error::parse(path, format!("header: {e}")))?;
            lines.next();
            Some(h)
        }
        _ => None,
    };
    if let Some(h) = &header {
        if h.units != "N/mm" {
            return Err(Error::parse(path, format!("units must be N/mm, got {}", h.units)));
        }
        if h.dof_layout != dof_layout() {
            return Err(Error::parse(path, format!("unsupported dof_layout {:?}", h.dof_layout)));
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::parse(path, format!("body row {}: {e}", i + 1)))?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::parse(path, format!("body row {}: non-finite value", i + 1)));
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::parse(path, "body rows must be non-empty and of equal length"));
    }

    let blocks_format = match header.as_ref().and_then(|h| h.format.as_deref()) {
        Some("blocks") => true,
        Some("dense") => false,
        Some(other) => return Err(Error::parse(path, format!("unknown format {other}"))),
        None => cols == 4 && rows.len() != 4,
    };

    let k = if blocks_format {
        if cols != 4 || rows.len() % 4 != 0 {
            return Err(Error::parse(path, "block body needs 4 columns and 4 rows per block"));
        }
        let b = rows.len() / 4;
        check_ball_count(path, header.as_ref(), expected_ball_count, b)?;
        let blocks: Vec<Block<f64>> = rows
            .chunks(4)
            .map(|c| std::array::from_fn(|i| std::array::from_fn(|j| c[i][j])))
            .collect();
        let bandwidth = header.as_ref().and_then(|h| h.bandwidth).unwrap_or(b / 2);
        RingStiffness::circulant(header.as_ref().and_then(|h| h.ring), blocks, bandwidth)?
    } else {
        if cols % 4 != 0 || rows.len() != cols {
            return Err(Error::parse(path, format!("dense body must be square 4B x 4B, got {} x {cols}", rows.len())));
        }
        let b = cols / 4;
        check_ball_count(path, header.as_ref(), expected_ball_count, b)?;
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        RingStiffness::from_dense(header.as_ref().and_then(|h| h.ring), b, values, IMPORT_TOLERANCE)?
    };
    let asym = k.asymmetry();
    if asym > IMPORT_TOLERANCE {
        return Err(Error::Matrix(format!(
            "{}: asymmetry {asym:e} exceeds {IMPORT_TOLERANCE:e} relative",
            path.display()
        )));
    }
    Ok(k)
}

fn check_ball_count(path: &Path, header: Option<&MatrixHeader>, expected: Option<usize>, found: usize) -> Result<()> {
    if let Some(h) = header {
        if h.ball_count != found {
            return Err(Error::parse(path, format!("header says B = {}, body holds {found} balls", h.ball_count)));
        }
    }
    if let Some(e) = expected {
        if e != found {
            return Err(Error::Matrix(format!(
                "{}: matrix is for B = {found}, run has B = {e}",
                path.display()
            )));
        }
    }
    if found < 3 {
        return Err(Error::parse(path, format!("need at least 3 balls, got {found}")));
    }
    Ok(())
}
