//! Ring flexibility: a closed beam model of each ring, condensed onto the
//! radial and axial translations of the raceway centers.
//!
//! The beam runs along the section centroid with `elements_per_ball`
//! straight chords between consecutive balls. Each raceway center is tied to
//! the beam node at its ball by a stiff elastic link carried through the
//! node rotation, which stands in for the local compliance of the section
//! that a beam cannot represent.

mod beam;
mod cyclic;
mod exchange;
mod model;
mod stiffness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BearingGeometry, Ring};
use crate::scalar::Real;

pub use cyclic::{harmonic_blocks, sector_blocks};
pub use exchange::{export_matrix, import_matrix, MatrixHeader};
pub use model::{guyan_condense, RingModel};
pub use stiffness::{cyclic_distance, expand_from_sector, Block, RingStiffness, Storage};

/// Default tolerance for [`RingStiffness::default_bandwidth`].
pub const DEFAULT_BAND_TOLERANCE: f64 = 1e-3;

/// Rectangular ring cross-section and raceway-center attachment. mm, MPa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct RingSection<T> {
    pub centroid_radius: T,
    /// Radial extent of the section.
    pub width: T,
    /// Axial extent of the section.
    pub height: T,
    #[serde(default = "steel_modulus")]
    pub young_modulus: T,
    #[serde(default = "steel_poisson")]
    pub poisson: T,
    /// `(dR, dz)` from the centroid to the ring's first and second raceway
    /// center (contacts 1, 4 for the outer ring; 2, 3 for the inner ring).
    pub center_offsets: [[T; 2]; 2],
    pub elements_per_ball: usize,
    /// Stiffness of the center-to-node links, N/mm. Defaults to
    /// `E * min(width, height)`.
    #[serde(default)]
    pub link_stiffness: Option<T>,
}

fn steel_modulus<T: Real>() -> T {
    T::lit(2e5)
}

fn steel_poisson<T: Real>() -> T {
    T::lit(0.3)
}

impl<T: Real> RingSection<T> {
    /// Section placed against the ball pitch circle: the outer ring spans
    /// radially `[R_p, R_p + width]`, the inner ring `[R_p - width, R_p]`,
    /// both centred axially on the pitch plane. Raceway centers sit at
    /// their nominal positions.
    pub fn for_bearing(geom: &BearingGeometry<T>, ring: Ring, width: T, height: T, elements_per_ball: usize) -> Self {
        let half = width / T::lit(2.0);
        let centroid_radius = match ring {
            Ring::Outer => geom.pitch_radius() + half,
            Ring::Inner => geom.pitch_radius() - half,
        };
        let center_offsets = ring.contacts().map(|c| {
            let (r, z) = geom.nominal_center(c);
            [r - centroid_radius, z]
        });
        Self {
            centroid_radius,
            width,
            height,
            young_modulus: steel_modulus(),
            poisson: steel_poisson(),
            center_offsets,
            elements_per_ball,
            link_stiffness: None,
        }
    }

    /// Default proportions used when a run gives no section: width
    /// `1.6 D_w`, height `2.4 D_w`, four elements per ball.
    pub fn default_for(geom: &BearingGeometry<T>, ring: Ring) -> Self {
        let dw = geom.ball_diameter;
        Self::for_bearing(geom, ring, T::lit(1.6) * dw, T::lit(2.4) * dw, 4)
    }

    pub fn link(&self) -> T {
        self.link_stiffness
            .unwrap_or_else(|| self.young_modulus * self.width.min(self.height))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("centroid radius", self.centroid_radius),
            ("width", self.width),
            ("height", self.height),
            ("Young's modulus", self.young_modulus),
            ("link stiffness", self.link()),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Section(format!("{name} must be positive, got {v:?}")));
            }
        }
        if !(self.poisson > -T::one() && self.poisson < T::lit(0.5)) {
            return Err(Error::Section(format!("Poisson ratio {:?} outside (-1, 0.5)", self.poisson)));
        }
        if self.elements_per_ball < 2 {
            return Err(Error::Section(format!(
                "elements_per_ball must be at least 2, got {}",
                self.elements_per_ball
            )));
        }
        if self.width >= T::lit(2.0) * self.centroid_radius {
            return Err(Error::Section("width exceeds the ring diameter".into()));
        }
        // "near" the envelope: within a quarter of the section beyond it
        let (lim_r, lim_z) = (T::lit(0.75) * self.width, T::lit(0.75) * self.height);
        for [dr, dz] in self.center_offsets {
            if !(dr.is_finite() && dz.is_finite()) {
                return Err(Error::Section("non-finite raceway-center offset".into()));
            }
            if dr.abs() > lim_r || dz.abs() > lim_z {
                log::warn!("raceway-center offset ({dr:?}, {dz:?}) lies outside the ring section");
            }
        }
        Ok(())
    }

    /// Absolute `(R, z)` of the first and second raceway center.
    pub fn center_positions(&self) -> [(T, T); 2] {
        self.center_offsets
            .map(|[dr, dz]| (self.centroid_radius + dr, dz))
    }
}

/// The five rigid-body motions of a ring that its raceway centers can see
/// (translations X, Y, Z and rotations about x and y), as master-space
/// vectors with the layout of a ring elastic vector.
///
/// `centers[ball][slot] = (R, z)`; `azimuth[ball]` in rad.
pub fn rigid_master_modes<T: Real>(centers: &[[(T, T); 2]], azimuth: &[T]) -> [Vec<T>; 5] {
    let n = 4 * azimuth.len();
    let mut modes: [Vec<T>; 5] = std::array::from_fn(|_| vec![T::zero(); n]);
    for (b, (&phi, slots)) in azimuth.iter().zip(centers).enumerate() {
        let (s, c) = phi.sin_cos();
        for (slot, &(r, z)) in slots.iter().enumerate() {
            let k = crate::geometry::elastic_index(b, slot);
            let rows: [(T, T); 5] = [(c, T::zero()), (s, T::zero()), (T::zero(), T::one()), (-z * s, r * s), (z * c, -r * c)];
            for (m, (dr, dz)) in modes.iter_mut().zip(rows) {
                m[k] = dr;
                m[k + 1] = dz;
            }
        }
    }
    modes
}

/// Condensed stiffness of a ring with `ball_count` balls, through the
/// one-sector cyclic model, at the default bandwidth.
pub fn ring_stiffness(section: &RingSection<f64>, ring: Ring, ball_count: usize) -> Result<RingStiffness<f64>> {
    let model = RingModel::new(section.clone(), ball_count)?;
    let full = model.condense_cyclic(Some(ring))?;
    let w = full.default_bandwidth(DEFAULT_BAND_TOLERANCE);
    Ok(full.truncated(w))
}

/// Ring strain energy `½ Dᵀ K D`.
pub fn ring_energy<T: Real>(k: &RingStiffness<T>, d: &[T]) -> Result<T> {
    k.energy(d)
}
