//! Run configuration (JSON, versioned).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BearingGeometry, Kinematics};
use crate::ring::RingSection;
use crate::solver::SolverConfig;

use super::generator::ErrorGeneratorSpec;

/// Configuration schema version understood by this build.
pub const CONFIG_VERSION: u32 = 1;

/// JSON Schema of [`RunConfig`].
pub const RUN_CONFIG_SCHEMA: &str = include_str!("../../schema/run-config.v1.json");

/// Ring model used by a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingMode {
    #[default]
    Rigid,
    Flexible,
}

impl RingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RingMode::Rigid => "rigid",
            RingMode::Flexible => "flexible",
        }
    }
}

/// Where the manufacturing deviations come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ErrorSource {
    /// Measured tables, see [`crate::geometry::ErrorMap::read_csv`].
    File { centers: PathBuf, balls: PathBuf },
    Generator(ErrorGeneratorSpec),
}

/// Stiffness of one ring: a section to condense or a matrix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RingSource {
    Section(RingSection<f64>),
    Matrix(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingsConfig {
    /// Defaults to the proportional section of [`RingSection::default_for`].
    #[serde(default)]
    pub outer: Option<RingSource>,
    #[serde(default)]
    pub inner: Option<RingSource>,
    /// Band tolerance for condensed matrices; `0` keeps the full coupling.
    #[serde(default = "default_band_tolerance")]
    pub band_tolerance: f64,
}

fn default_band_tolerance() -> f64 {
    crate::ring::DEFAULT_BAND_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedLoadCase {
    pub name: String,
    #[serde(default)]
    pub axial_force: f64,
    #[serde(default)]
    pub radial_force: f64,
    #[serde(default)]
    pub tilting_moment: f64,
    #[serde(default)]
    pub load_direction: f64,
}

impl NamedLoadCase {
    pub fn load(&self) -> crate::energy::LoadCase<f64> {
        crate::energy::LoadCase {
            axial_force: self.axial_force,
            radial_force: self.radial_force,
            tilting_moment: self.tilting_moment,
            load_direction: self.load_direction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    /// Strictly increasing imposed axial displacements, mm.
    pub axial_displacements: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Preload grid, mm.
    pub preloads: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Deviations sampled per Monte Carlo draw; defaults to the run's
    /// generator, or none.
    #[serde(default)]
    pub generator: Option<ErrorGeneratorSpec>,
    /// Half-width of the central difference giving the axial stiffness, mm.
    #[serde(default = "default_stiffness_step")]
    pub stiffness_step: f64,
}

fn default_stiffness_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub bearing: BearingGeometry<f64>,
    #[serde(default)]
    pub errors: Option<ErrorSource>,
    /// Ball oversize, mm.
    #[serde(default)]
    pub preload: f64,
    #[serde(default)]
    pub mode: RingMode,
    #[serde(default)]
    pub kinematics: Kinematics,
    #[serde(default)]
    pub rings: RingsConfig,
    #[serde(default)]
    pub load_cases: Vec<NamedLoadCase>,
    #[serde(default)]
    pub stiffness_curve: Option<CurveSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Minimal configuration: a bearing and defaults for everything else.
    pub fn new(bearing: BearingGeometry<f64>) -> Self {
        Self {
            version: CONFIG_VERSION,
            bearing,
            errors: None,
            preload: 0.0,
            mode: RingMode::default(),
            kinematics: Kinematics::default(),
            rings: RingsConfig {
                band_tolerance: default_band_tolerance(),
                ..Default::default()
            },
            load_cases: Vec::new(),
            stiffness_curve: None,
            sweep: None,
            solver: SolverConfig::default(),
            output_dir: default_output_dir(),
        }
    }

    /// Reads a configuration; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(ErrorSource::File { centers, balls }) = &mut self.errors {
            fix(centers);
            fix(balls);
        }
        for src in [&mut self.rings.outer, &mut self.rings.inner].into_iter().flatten() {
            if let RingSource::Matrix(p) = src {
                fix(p);
            }
        }
        fix(&mut self.output_dir);
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.version != CONFIG_VERSION {
            return bad(format!("config version {} not supported (expected {CONFIG_VERSION})", self.version));
        }
        self.bearing.validate()?;
        if !self.preload.is_finite() {
            return bad("preload must be finite".into());
        }
        match &self.errors {
            Some(ErrorSource::File { centers, balls }) => {
                for p in [centers, balls] {
                    if !p.is_file() {
                        return bad(format!("error table {} not found", p.display()));
                    }
                }
            }
            Some(ErrorSource::Generator(g)) => g.validate()?,
            None => {}
        }
        for src in [&self.rings.outer, &self.rings.inner].into_iter().flatten() {
            match src {
                RingSource::Section(s) => s.validate()?,
                RingSource::Matrix(p) if !p.is_file() => {
                    return bad(format!("ring matrix {} not found", p.display()));
                }
                RingSource::Matrix(_) => {}
            }
        }
        if !(self.rings.band_tolerance >= 0.0 && self.rings.band_tolerance.is_finite()) {
            return bad("band_tolerance must be a non-negative number".into());
        }
        let mut names = std::collections::HashSet::new();
        for lc in &self.load_cases {
            if lc.name.is_empty() || lc.name.contains(['/', '\\']) || lc.name == "idle" {
                return bad(format!("load case name `{}` is not usable as a directory name", lc.name));
            }
            if !names.insert(&lc.name) {
                return bad(format!("duplicate load case `{}`", lc.name));
            }
            let vals = [lc.axial_force, lc.radial_force, lc.tilting_moment, lc.load_direction];
            if vals.iter().any(|v| !v.is_finite()) {
                return bad(format!("load case `{}` has non-finite values", lc.name));
            }
        }
        if let Some(c) = &self.stiffness_curve {
            let g = &c.axial_displacements;
            if g.is_empty() || g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| !(w[1] > w[0])) {
                return bad("stiffness_curve.axial_displacements must be finite and strictly increasing".into());
            }
        }
        if let Some(s) = &self.sweep {
            if s.preloads.is_empty() || s.preloads.iter().any(|v| !v.is_finite()) {
                return bad("sweep.preloads must be a non-empty list of numbers".into());
            }
            if s.samples == 0 {
                return bad("sweep.samples must be at least 1".into());
            }
            if !(s.stiffness_step > 0.0) {
                return bad("sweep.stiffness_step must be positive".into());
            }
            if let Some(g) = &s.generator {
                g.validate()?;
            }
        }
        self.solver.validate()
    }
}
