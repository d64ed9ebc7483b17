//! Synthetic manufacturing deviations: harmonic raceway-center profiles and
//! truncated-normal ball diameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BearingGeometry, ErrorMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Radial,
    Axial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub order: u32,
    /// mm.
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Harmonic profile `Σ A_k cos(k φ + ψ_k)` of one raceway-center coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterProfile {
    /// Contact number, 1..=4.
    pub contact: usize,
    pub component: Component,
    pub harmonics: Vec<Harmonic>,
}

/// Normal distribution truncated to `[lower, upper]`, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallDiameterSpec {
    #[serde(default)]
    pub mean: f64,
    pub std: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorGeneratorSpec {
    #[serde(default)]
    pub centers: Vec<CenterProfile>,
    #[serde(default)]
    pub ball_diameter: Option<BallDiameterSpec>,
    pub seed: u64,
}

impl ErrorGeneratorSpec {
    /// Same harmonic amplitude on the radial coordinate of all four centers.
    pub fn radial_harmonic(order: u32, amplitude: f64, seed: u64) -> Self {
        Self {
            centers: (1..=4)
                .map(|contact| CenterProfile {
                    contact,
                    component: Component::Radial,
                    harmonics: vec![Harmonic {
                        order,
                        amplitude,
                        phase: 0.0,
                    }],
                })
                .collect(),
            ball_diameter: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.centers {
            if !(1..=4).contains(&p.contact) {
                return Err(Error::Config(format!("contact {} outside 1..=4", p.contact)));
            }
            for h in &p.harmonics {
                if !(h.amplitude >= 0.0 && h.amplitude.is_finite() && h.phase.is_finite()) {
                    return Err(Error::Config(format!(
                        "harmonic amplitudes must be finite and non-negative, got {}",
                        h.amplitude
                    )));
                }
            }
        }
        if let Some(d) = &self.ball_diameter {
            let finite = [d.mean, d.std, d.lower, d.upper].iter().all(|v| v.is_finite());
            if !finite || d.std < 0.0 || d.lower > d.upper {
                return Err(Error::Config(format!("invalid ball diameter distribution {d:?}")));
            }
            if d.std == 0.0 && !(d.lower..=d.upper).contains(&d.mean) {
                return Err(Error::Config("zero-spread ball diameter mean outside its bounds".into()));
            }
        }
        Ok(())
    }
}

/// Deviations for `geom`, reproducible from the spec's seed.
pub fn generate_errors(spec: &ErrorGeneratorSpec, geom: &BearingGeometry<f64>) -> ErrorMap<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    generate_errors_with(spec, geom, &mut rng)
}

/// Deviations drawing the ball diameters from `rng`.
pub fn generate_errors_with<R: Rng + ?Sized>(
    spec: &ErrorGeneratorSpec,
    geom: &BearingGeometry<f64>,
    rng: &mut R,
) -> ErrorMap<f64> {
    let b = geom.ball_count;
    let mut map = ErrorMap::zero(b);
    for p in &spec.centers {
        let c = p.contact - 1;
        for ball in 0..b {
            let phi = geom.ball_azimuth(ball);
            let v: f64 = p
                .harmonics
                .iter()
                .map(|h| h.amplitude * (h.order as f64 * phi + h.phase).cos())
                .sum();
            match p.component {
                Component::Radial => map.center_radial[ball][c] += v,
                Component::Axial => map.center_axial[ball][c] += v,
            }
        }
    }
    if let Some(d) = &spec.ball_diameter {
        for v in map.ball_diameter.iter_mut() {
            *v = truncated_normal(d, rng);
        }
    }
    map
}

fn truncated_normal<R: Rng + ?Sized>(d: &BallDiameterSpec, rng: &mut R) -> f64 {
    if d.std == 0.0 || d.lower == d.upper {
        return d.mean.clamp(d.lower, d.upper);
    }
    let normal = Normal::new(d.mean, d.std).expect("validated distribution");
    // rejection sampling; fall back to uniform on the interval when the
    // bounds sit far in a tail
    for _ in 0..10_000 {
        let v = normal.sample(rng);
        if (d.lower..=d.upper).contains(&v) {
            return v;
        }
    }
    rng.gen_range(d.lower..=d.upper)
}
