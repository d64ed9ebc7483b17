//! Report files. Numbers in CSV files use a fixed exponent format so that
//! re-running a configuration reproduces them byte for byte.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{CurvePoint, Solution};

use super::sweep::Band;

pub const BALLS_HEADER: [&str; 8] = [
    "ball",
    "phi_rad",
    "diag",
    "delta_tot_mm",
    "delta_i_mm",
    "delta_i2_mm",
    "Q_N",
    "alpha_rad",
];

pub const CURVE_HEADER: [&str; 4] = ["delta_a_mm", "F_a_N", "K_a_N_per_mm", "converged"];

pub const BANDS_HEADER: [&str; 10] = [
    "preload_mm",
    "metric",
    "samples",
    "min",
    "p05",
    "p50",
    "mean",
    "p95",
    "max",
    "width",
];

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))
}

fn finish(path: &Path, mut w: csv::Writer<std::fs::File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<S: Serialize + ?Sized>(path: impl AsRef<Path>, value: &S) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::parse(path, e))?;
    text.push('\n');
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// One row per ball and diagonal: polar load distribution.
pub fn write_balls_csv(path: impl AsRef<Path>, sol: &Solution) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(BALLS_HEADER).map_err(|e| Error::parse(path, e))?;
    for b in &sol.balls {
        for d in &b.diagonals {
            w.write_record([
                b.ball.to_string(),
                num(b.azimuth),
                d.diagonal.to_string(),
                num(d.delta_total),
                num(d.delta[0]),
                num(d.delta[1]),
                num(d.force),
                num(d.contact_angle),
            ])
            .map_err(|e| Error::parse(path, e))?;
        }
    }
    finish(path, w)
}

pub fn write_curve_csv(path: impl AsRef<Path>, points: &[CurvePoint]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(CURVE_HEADER).map_err(|e| Error::parse(path, e))?;
    for p in points {
        w.write_record([
            num(p.axial_displacement),
            num(p.axial_force),
            num(p.stiffness),
            p.converged.to_string(),
        ])
        .map_err(|e| Error::parse(path, e))?;
    }
    finish(path, w)
}

pub fn write_bands_csv(path: impl AsRef<Path>, bands: &[Band]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(BANDS_HEADER).map_err(|e| Error::parse(path, e))?;
    for b in bands {
        w.write_record([
            num(b.preload),
            b.metric.as_str().to_string(),
            b.samples.to_string(),
            num(b.min),
            num(b.p05),
            num(b.p50),
            num(b.mean),
            num(b.p95),
            num(b.max),
            num(b.max - b.min),
        ])
        .map_err(|e| Error::parse(path, e))?;
    }
    finish(path, w)
}
