//! Monte Carlo bands over a preload grid.
//!
//! Sample `s` draws its ball diameters from ChaCha stream `s` of the sweep
//! seed, so every preload sees the same population of bearings and the
//! result does not depend on how the work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::ErrorMap;
use crate::ring::RingStiffness;
use crate::solver;

use super::config::{ErrorSource, RingMode, SweepSpec};
use super::generator::generate_errors_with;
use super::Analysis;

type Rings = (RingStiffness<f64>, RingStiffness<f64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanDeltaTot,
    MaxDeltaTot,
    MaxForce,
    AxialStiffness,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::MeanDeltaTot,
        Metric::MaxDeltaTot,
        Metric::MaxForce,
        Metric::AxialStiffness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::MeanDeltaTot => "mean_delta_tot_mm",
            Metric::MaxDeltaTot => "max_delta_tot_mm",
            Metric::MaxForce => "max_Q_N",
            Metric::AxialStiffness => "axial_stiffness_N_per_mm",
        }
    }
}

/// Idling metrics of one sampled bearing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMetrics {
    pub mean_delta_tot: f64,
    pub max_delta_tot: f64,
    pub max_force: f64,
    /// Central difference of the imposed axial reaction about the idle state.
    pub axial_stiffness: f64,
}

impl SampleMetrics {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::MeanDeltaTot => self.mean_delta_tot,
            Metric::MaxDeltaTot => self.max_delta_tot,
            Metric::MaxForce => self.max_force,
            Metric::AxialStiffness => self.axial_stiffness,
        }
    }
}

/// Statistics of one metric at one preload.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub preload: f64,
    pub metric: Metric,
    pub samples: usize,
    pub min: f64,
    pub p05: f64,
    pub p50: f64,
    pub mean: f64,
    pub p95: f64,
    pub max: f64,
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let i = (pos.floor() as usize).min(n - 2);
            let t = pos - i as f64;
            sorted[i] + t * (sorted[i + 1] - sorted[i])
        }
    }
}

pub fn band_stats(preload: f64, metric: Metric, values: &[f64]) -> Band {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mean = if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    };
    Band {
        preload,
        metric,
        samples: v.len(),
        min: v.first().copied().unwrap_or(f64::NAN),
        p05: percentile(&v, 0.05),
        p50: percentile(&v, 0.5),
        mean,
        p95: percentile(&v, 0.95),
        max: v.last().copied().unwrap_or(f64::NAN),
    }
}

fn sample_errors(analysis: &Analysis, spec: &SweepSpec, sample: usize, preload: f64) -> Result<ErrorMap<f64>> {
    let cfg = &analysis.config;
    let generator = spec.generator.as_ref().or(match &cfg.errors {
        Some(ErrorSource::Generator(g)) => Some(g),
        _ => None,
    });
    let map = match generator {
        Some(g) => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(sample as u64);
            generate_errors_with(g, &cfg.bearing, &mut rng)
        }
        None => analysis.errors()?,
    };
    Ok(map.with_preload(preload))
}

fn sample_metrics(
    analysis: &Analysis,
    rings: Option<&Rings>,
    spec: &SweepSpec,
    sample: usize,
    preload: f64,
) -> Result<Option<SampleMetrics>> {
    let cfg = &analysis.config.solver;
    let model = analysis.model_with(sample_errors(analysis, spec, sample, preload)?, rings)?;
    let idle = solver::solve_idle(&model, cfg)?;
    if !idle.converged {
        return Ok(None);
    }
    let h = spec.stiffness_step;
    let up = solver::solve_imposed(&model, &idle, [h, 0.0, 0.0], 0.0, cfg)?;
    let down = solver::solve_imposed(&model, &idle, [-h, 0.0, 0.0], 0.0, cfg)?;
    if !(up.converged && down.converged) {
        return Ok(None);
    }
    let deltas: Vec<f64> = idle.interferences().collect();
    Ok(Some(SampleMetrics {
        mean_delta_tot: deltas.iter().sum::<f64>() / deltas.len() as f64,
        max_delta_tot: deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_force: idle.max_force(),
        axial_stiffness: (up.reactions[0] - down.reactions[0]) / (2.0 * h),
    }))
}

/// Per-sample metrics for every `(preload, sample)` pair, preload-major.
pub(super) fn samples(analysis: &Analysis, mode: RingMode, spec: &SweepSpec) -> Result<Vec<Option<SampleMetrics>>> {
    let jobs: Vec<(f64, usize)> = spec
        .preloads
        .iter()
        .flat_map(|&p| (0..spec.samples).map(move |s| (p, s)))
        .collect();
    let rings = match mode {
        RingMode::Rigid => None,
        RingMode::Flexible => Some(analysis.ring_matrices()?),
    };
    // indexed collect keeps grid order regardless of scheduling
    jobs.par_iter()
        .map(|&(p, s)| sample_metrics(analysis, rings.as_ref(), spec, s, p))
        .collect()
}

pub(super) fn run(analysis: &Analysis, mode: RingMode, spec: &SweepSpec) -> Result<(Vec<Band>, usize)> {
    let all = samples(analysis, mode, spec)?;
    let failed = all.iter().filter(|m| m.is_none()).count();
    let mut bands = Vec::with_capacity(spec.preloads.len() * Metric::ALL.len());
    for (i, &p) in spec.preloads.iter().enumerate() {
        let chunk = &all[i * spec.samples..(i + 1) * spec.samples];
        let ok: Vec<&SampleMetrics> = chunk.iter().flatten().collect();
        for m in Metric::ALL {
            let values: Vec<f64> = ok.iter().map(|s| s.get(m)).collect();
            bands.push(band_stats(p, m, &values));
        }
    }
    Ok((bands, failed))
}
