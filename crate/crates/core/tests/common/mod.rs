#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use slewing_core::analysis::{CenterProfile, Component, ErrorGeneratorSpec, Harmonic};
use slewing_core::geometry::BearingGeometry;
use slewing_core::ring::{rigid_master_modes, RingSection, RingStiffness};

/// Measured-bearing geometry used throughout the validation runs.
pub fn table3(b: usize) -> BearingGeometry<f64> {
    BearingGeometry::uniform(541.0, 25.0, 13.25, std::f64::consts::FRAC_PI_4, b)
}

/// One radial and one axial harmonic per raceway center, distinct orders and
/// phases per contact so that the two diagonals see different deviations.
pub fn harmonic_errors(amplitude: f64) -> ErrorGeneratorSpec {
    let mut centers = Vec::new();
    for (c, (kr, ka)) in [(2u32, 3u32), (3, 2), (2, 4), (4, 2)].into_iter().enumerate() {
        let profile = |component, order, phase| CenterProfile {
            contact: c + 1,
            component,
            harmonics: vec![Harmonic { order, amplitude, phase }],
        };
        centers.push(profile(Component::Radial, kr, 0.7 * c as f64));
        centers.push(profile(Component::Axial, ka, 1.3 * c as f64 + 0.4));
    }
    ErrorGeneratorSpec {
        centers,
        ball_diameter: None,
        seed: 0,
    }
}

pub fn thin_section(epb: usize) -> RingSection<f64> {
    RingSection {
        centroid_radius: 500.0,
        width: 20.0,
        height: 20.0,
        young_modulus: 2e5,
        poisson: 0.3,
        center_offsets: [[0.0, 0.0], [0.0, 5.0]],
        elements_per_ball: epb,
        link_stiffness: None,
    }
}

pub fn orthonormal(basis: Vec<Vec<f64>>) -> Vec<DVector<f64>> {
    let mut q: Vec<DVector<f64>> = Vec::new();
    for b in basis {
        let mut u = DVector::from_vec(b);
        for e in &q {
            let c = e.dot(&u);
            u -= e * c;
        }
        let n = u.norm();
        q.push(u / n);
    }
    q
}

pub fn rigid_basis(section: &RingSection<f64>, b: usize) -> Vec<DVector<f64>> {
    let pos = section.center_positions();
    let az: Vec<f64> = (0..b).map(|i| std::f64::consts::TAU * i as f64 / b as f64).collect();
    orthonormal(rigid_master_modes(&vec![[pos[0], pos[1]]; b], &az).to_vec())
}

/// Displacement of the masters under a self-equilibrated load.
pub fn respond(k: &RingStiffness<f64>, section: &RingSection<f64>, f: &DVector<f64>) -> DVector<f64> {
    let n = k.dimension();
    let mut m = DMatrix::from_row_slice(n, n, &k.to_dense());
    let scale = m.amax();
    for q in rigid_basis(section, k.ball_count) {
        m += (&q * q.transpose()) * scale;
    }
    // a truncated band need not stay semidefinite
    m.lu().solve(f).expect("regularised ring matrix is regular")
}

/// Diameter increase and strain energy under two opposite outward radial loads `p`.
pub fn pinch(k: &RingStiffness<f64>, section: &RingSection<f64>, p: f64) -> (f64, f64) {
    let b = k.ball_count;
    let mut f = DVector::zeros(4 * b);
    f[0] = p;
    f[4 * (b / 2)] = p;
    let x = respond(k, section, &f);
    (x[0] + x[4 * (b / 2)], 0.5 * f.dot(&x))
}

pub fn thin_ring_oracle(s: &RingSection<f64>, p: f64) -> f64 {
    let i = s.height * s.width.powi(3) / 12.0;
    p * s.centroid_radius.powi(3) / (s.young_modulus * i) * (std::f64::consts::FRAC_PI_4 - 2.0 / std::f64::consts::PI)
}
