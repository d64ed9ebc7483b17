//! Ball load distribution of four-point contact slewing bearings.
//!
//! Equilibrium is found by minimising the total potential energy of the
//! balls (Hertzian traction-only springs along the two contact diagonals),
//! the elastic rings (condensed beam models) and the external loads.
//!
//! The numerical core is generic over the scalar type; the aliases below
//! fix it to `f64`.

pub mod analysis;
pub mod contact;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod ring;
mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Geometry = geometry::BearingGeometry<f64>;
pub type Errors = geometry::ErrorMap<f64>;
pub type Pose = geometry::RigidBodyPose<f64>;
pub type Section = ring::RingSection<f64>;
pub type Stiffness = ring::RingStiffness<f64>;
pub type Model = energy::BearingModel<f64>;
pub type Loads = energy::LoadCase<f64>;
