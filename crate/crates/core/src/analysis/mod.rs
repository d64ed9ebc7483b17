//! Run orchestration: configuration, synthetic deviations, solves, curves,
//! Monte Carlo bands and the files they produce.

mod config;
mod generator;
mod output;
mod sweep;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::{
    CurveSpec, ErrorSource, NamedLoadCase, RingMode, RingSource, RingsConfig, RunConfig, SweepSpec, CONFIG_VERSION,
    RUN_CONFIG_SCHEMA,
};
pub use generator::{
    generate_errors, generate_errors_with, BallDiameterSpec, CenterProfile, Component, ErrorGeneratorSpec, Harmonic,
};
pub use output::{
    write_balls_csv, write_bands_csv, write_curve_csv, write_json, BALLS_HEADER, BANDS_HEADER, CURVE_HEADER,
};
pub use sweep::{band_stats, percentile, Band, Metric, SampleMetrics};

use crate::energy::BearingModel;
use crate::error::{Error, Result};
use crate::geometry::{ErrorMap, Ring};
use crate::ring::{import_matrix, RingModel, RingSection, RingStiffness};
use crate::solver::{self, CurvePoint, Equilibrium, Solution};

/// A validated run configuration and the operations it drives.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub config: RunConfig,
}

/// Outcome of one solve as recorded in the run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub name: String,
    pub mode: RingMode,
    pub phase: String,
    pub converged: bool,
    pub iterations: usize,
    pub active_balls: usize,
    pub mean_delta_tot: f64,
    pub max_delta_tot: f64,
    pub max_force: f64,
    pub equilibrium: Option<Equilibrium>,
    pub warnings: Vec<solver::Warning>,
    /// Directory holding `solution.json` and `balls.csv`.
    pub output: Option<PathBuf>,
}

impl SolveRecord {
    pub fn new(name: &str, mode: RingMode, sol: &Solution) -> Self {
        let deltas: Vec<f64> = sol.interferences().collect();
        Self {
            name: name.to_string(),
            mode,
            phase: sol.phase.as_str().to_string(),
            converged: sol.converged,
            iterations: sol.iterations,
            active_balls: sol.active_balls(),
            mean_delta_tot: mean(&deltas),
            max_delta_tot: deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            max_force: sol.max_force(),
            equilibrium: sol.equilibrium,
            warnings: sol.warnings.clone(),
            output: None,
        }
    }

    /// Converged and, for loaded solves, in equilibrium.
    pub fn ok(&self) -> bool {
        self.converged && self.equilibrium.map_or(true, |e| e.satisfied)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub mode: RingMode,
    pub points: usize,
    pub converged: bool,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub mode: RingMode,
    pub preloads: usize,
    pub samples: usize,
    pub failed_samples: usize,
    pub output: Option<PathBuf>,
}

/// Everything one invocation ran; written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub version: u32,
    pub solves: Vec<SolveRecord>,
    pub curves: Vec<CurveRecord>,
    pub sweeps: Vec<SweepRecord>,
    /// No solve failed to converge or violated equilibrium.
    pub ok: bool,
}

impl RunSummary {
    pub fn new() -> Self {
        Self {
            version: CONFIG_VERSION,
            ok: true,
            ..Default::default()
        }
    }

    fn refresh(&mut self) {
        self.ok = self.solves.iter().all(SolveRecord::ok)
            && self.curves.iter().all(|c| c.converged)
            && self.sweeps.iter().all(|s| s.failed_samples == 0);
    }

    pub fn write(&mut self, path: impl AsRef<Path>) -> Result<()> {
        self.refresh();
        write_json(path, self)
    }
}

/// Which solves `solve` performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveKind {
    Idle,
    /// Idle followed by every configured load case.
    Load,
}

impl Analysis {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(RunConfig::load(path)?)
    }

    pub fn output_dir(&self) -> &Path {
        &self.config.output_dir
    }

    /// Deviations of the run (zero when none are configured), with the preload.
    pub fn errors(&self) -> Result<ErrorMap<f64>> {
        let cfg = &self.config;
        let b = cfg.bearing.ball_count;
        let map = match &cfg.errors {
            None => ErrorMap::zero(b).with_preload(cfg.preload),
            Some(ErrorSource::File { centers, balls }) => ErrorMap::read_csv(centers, balls, b, cfg.preload)?,
            Some(ErrorSource::Generator(spec)) => generate_errors(spec, &cfg.bearing).with_preload(cfg.preload),
        };
        map.validate(&cfg.bearing)?;
        Ok(map)
    }

    /// Condensed stiffness of one ring.
    pub fn ring_matrix(&self, ring: Ring) -> Result<RingStiffness<f64>> {
        let cfg = &self.config;
        let b = cfg.bearing.ball_count;
        let source = match ring {
            Ring::Outer => &cfg.rings.outer,
            Ring::Inner => &cfg.rings.inner,
        };
        match source {
            Some(RingSource::Matrix(path)) => {
                let k = import_matrix(path, Some(b))?;
                if k.ring.is_some_and(|r| r != ring) {
                    return Err(Error::Config(format!(
                        "{} holds a {} ring matrix, expected {}",
                        path.display(),
                        k.ring.map_or("", Ring::as_str),
                        ring.as_str()
                    )));
                }
                Ok(k)
            }
            Some(RingSource::Section(s)) => condensed(s, ring, b, cfg.rings.band_tolerance),
            None => condensed(
                &RingSection::default_for(&cfg.bearing, ring),
                ring,
                b,
                cfg.rings.band_tolerance,
            ),
        }
    }

    pub fn ring_matrices(&self) -> Result<(RingStiffness<f64>, RingStiffness<f64>)> {
        Ok((self.ring_matrix(Ring::Outer)?, self.ring_matrix(Ring::Inner)?))
    }

    pub fn model(&self, mode: RingMode, errors: ErrorMap<f64>) -> Result<BearingModel<f64>> {
        let rings = match mode {
            RingMode::Rigid => None,
            RingMode::Flexible => Some(self.ring_matrices()?),
        };
        self.model_with(errors, rings.as_ref())
    }

    /// Model on already condensed rings; rigid when `rings` is `None`.
    pub fn model_with(
        &self,
        errors: ErrorMap<f64>,
        rings: Option<&(RingStiffness<f64>, RingStiffness<f64>)>,
    ) -> Result<BearingModel<f64>> {
        let cfg = &self.config;
        match rings {
            None => BearingModel::rigid(cfg.bearing.clone(), errors, cfg.kinematics),
            Some((outer, inner)) => {
                BearingModel::flexible(cfg.bearing.clone(), errors, cfg.kinematics, outer.clone(), inner.clone())
            }
        }
    }

    /// Idle solve, then the load cases when asked. Stops after the first
    /// failed solve unless `keep_going`.
    pub fn solve(&self, mode: RingMode, kind: SolveKind, keep_going: bool) -> Result<Vec<(String, Solution)>> {
        let model = self.model(mode, self.errors()?)?;
        let cfg = &self.config;
        let idle = solver::solve_idle(&model, &cfg.solver)?;
        let idle_ok = idle.converged;
        let mut out = vec![("idle".to_string(), idle)];
        if kind == SolveKind::Idle {
            return Ok(out);
        }
        if !idle_ok {
            log::error!("{} idling solve did not converge; load cases skipped", mode.as_str());
            return Ok(out);
        }
        for lc in &cfg.load_cases {
            let sol = solver::solve_loaded(&model, &out[0].1, &lc.load(), &cfg.solver)?;
            let failed = !SolveRecord::new(&lc.name, mode, &sol).ok();
            out.push((lc.name.clone(), sol));
            if failed && !keep_going {
                break;
            }
        }
        Ok(out)
    }

    /// Axial force-displacement curve over the configured grid.
    pub fn stiffness_curve(&self, mode: RingMode) -> Result<Vec<CurvePoint>> {
        let spec = self
            .config
            .stiffness_curve
            .as_ref()
            .ok_or_else(|| Error::Config("no stiffness_curve section in the configuration".into()))?;
        let model = self.model(mode, self.errors()?)?;
        let idle = solver::solve_idle(&model, &self.config.solver)?;
        if !idle.converged {
            return Err(Error::Solver("idling solve did not converge".into()));
        }
        solver::axial_stiffness_curve(&model, &idle, &spec.axial_displacements, &self.config.solver)
    }

    /// Monte Carlo bands over the preload grid.
    pub fn sweep(&self, mode: RingMode) -> Result<(Vec<Band>, usize)> {
        let spec = self
            .config
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("no sweep section in the configuration".into()))?;
        sweep::run(self, mode, spec)
    }

    pub fn run_solve(
        &self,
        mode: RingMode,
        kind: SolveKind,
        keep_going: bool,
        summary: &mut RunSummary,
    ) -> Result<()> {
        for (name, sol) in self.solve(mode, kind, keep_going)? {
            let dir = self.output_dir().join(mode.as_str()).join(&name);
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            write_json(dir.join("solution.json"), &sol)?;
            write_balls_csv(dir.join("balls.csv"), &sol)?;
            let mut rec = SolveRecord::new(&name, mode, &sol);
            rec.output = Some(dir);
            summary.solves.push(rec);
        }
        Ok(())
    }

    pub fn run_curve(&self, mode: RingMode, summary: &mut RunSummary) -> Result<()> {
        let points = self.stiffness_curve(mode)?;
        let dir = self.output_dir().join(mode.as_str());
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join("curve.csv");
        write_curve_csv(&path, &points)?;
        summary.curves.push(CurveRecord {
            mode,
            points: points.len(),
            converged: points.iter().all(|p| p.converged),
            output: Some(path),
        });
        Ok(())
    }

    pub fn run_sweep(&self, mode: RingMode, summary: &mut RunSummary) -> Result<()> {
        let (bands, failed) = self.sweep(mode)?;
        let spec = self.config.sweep.as_ref().expect("checked by sweep");
        let dir = self.output_dir().join(mode.as_str());
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join("bands.csv");
        write_bands_csv(&path, &bands)?;
        summary.sweeps.push(SweepRecord {
            mode,
            preloads: spec.preloads.len(),
            samples: spec.samples,
            failed_samples: failed,
            output: Some(path),
        });
        Ok(())
    }
}

fn condensed(section: &RingSection<f64>, ring: Ring, ball_count: usize, tol: f64) -> Result<RingStiffness<f64>> {
    let full = RingModel::new(section.clone(), ball_count)?.condense_cyclic(Some(ring))?;
    if tol == 0.0 {
        return Ok(full);
    }
    let w = full.default_bandwidth(tol);
    Ok(full.truncated(w))
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}
