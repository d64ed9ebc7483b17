//! Total potential energy of the bearing and its derivatives.
//!
//! The unknowns are collected in a state vector whose layout depends on the
//! phase of the analysis:
//!
//! - idling: `[X, Y, Z, R_m α, R_m β] ++ D_out ++ D_in`
//! - loaded: `[δ_a, δ_r, R_m θ_t] ++ D_out ++ D_in`, idling pose frozen
//! - imposed: `D_out ++ D_in`, every rigid-body motion frozen
//!
//! Rotations are multiplied by the pitch radius `R_m` so that every entry is
//! a length in mm and every gradient entry a force in N. The elastic parts
//! are absent in rigid mode. `D_out` and `D_in` are kept orthogonal to the
//! five rigid-body motions of each ring, which the ring matrices do not
//! resist and which would otherwise duplicate the pose variables.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::contact::{series_stiffness, ContactLaw, DiagonalContactState};
use crate::error::{Error, Result};
use crate::geometry::{
    elastic_index, initial_centers, move_inner_center, natural_length, pose_var, ring_slot, BearingGeometry,
    CenterPositions, ErrorMap, Kinematics, MovedCenter, Ring, RigidBodyPose,
};
use crate::ring::{rigid_master_modes, RingStiffness};
use crate::scalar::{pow5_2, Real};

/// External loads on the inner ring. N, N·mm, rad.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadCase<T> {
    pub axial_force: T,
    pub radial_force: T,
    /// About the axis perpendicular to the radial load direction.
    pub tilting_moment: T,
    /// Azimuth of the radial load.
    pub load_direction: T,
}

impl<T: Real> LoadCase<T> {
    pub fn zero() -> Self {
        Self {
            axial_force: T::zero(),
            radial_force: T::zero(),
            tilting_moment: T::zero(),
            load_direction: T::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.axial_force == T::zero() && self.radial_force == T::zero() && self.tilting_moment == T::zero()
    }

    /// `[F_a, F_r, M_t]`.
    pub fn generalized(&self) -> [T; 3] {
        [self.axial_force, self.radial_force, self.tilting_moment]
    }

    /// Work `F_a δ_a + F_r δ_r + M_t θ_t` over the load-induced motions.
    pub fn work(&self, pose: &RigidBodyPose<T>) -> T {
        self.axial_force * pose.axial + self.radial_force * pose.radial + self.tilting_moment * pose.tilt
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            axial_force: self.axial_force * factor,
            radial_force: self.radial_force * factor,
            tilting_moment: self.tilting_moment * factor,
            load_direction: self.load_direction,
        }
    }
}

/// Which unknowns a state vector carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Idle,
    Loaded,
    Imposed,
}

impl Phase {
    /// Pose variables carried by the state, in state order.
    pub fn pose_vars(self) -> &'static [usize] {
        use pose_var::*;
        match self {
            Phase::Idle => &[X, Y, Z, ALPHA, BETA],
            Phase::Loaded => &[AXIAL, RADIAL, TILT],
            Phase::Imposed => &[],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Idle => "idle",
            Phase::Loaded => "loaded",
            Phase::Imposed => "imposed",
        }
    }
}

/// Whether a pose variable is a rotation (scaled by the pitch radius).
fn is_rotation(var: usize) -> bool {
    matches!(var, pose_var::ALPHA | pose_var::BETA | pose_var::TILT)
}

/// Bearing data prepared for energy evaluation: contact constants per
/// diagonal, initial raceway centers and, in flexible mode, ring matrices.
#[derive(Debug, Clone)]
pub struct BearingModel<T> {
    pub geometry: BearingGeometry<T>,
    pub errors: ErrorMap<T>,
    pub kinematics: Kinematics,
    initial: CenterPositions<T>,
    natural: Vec<[T; 2]>,
    /// Closed-contact `K` of contact `[d, d + 2]` per ball and diagonal.
    stiffness: Vec<[[T; 2]; 2]>,
    k_total: Vec<[T; 2]>,
    rings: Option<Rings<T>>,
    scale: T,
}

#[derive(Debug, Clone)]
struct Rings<T> {
    outer: RingStiffness<T>,
    inner: RingStiffness<T>,
    /// Orthonormal rigid-body motions of each ring in master space.
    modes: [Vec<Vec<T>>; 2],
}

impl<T: Real> BearingModel<T> {
    /// Rigid-ring model.
    pub fn rigid(geometry: BearingGeometry<T>, errors: ErrorMap<T>, kinematics: Kinematics) -> Result<Self> {
        geometry.validate()?;
        errors.validate(&geometry)?;
        let b = geometry.ball_count;
        let law = ContactLaw::<T>::steel();
        let mut natural = Vec::with_capacity(b);
        let mut stiffness = Vec::with_capacity(b);
        let mut k_total = Vec::with_capacity(b);
        for ball in 0..b {
            let dw = errors.ball_diameter_of(&geometry, ball);
            let mut ks = [[T::zero(); 2]; 2];
            let mut kt = [T::zero(); 2];
            let mut ln = [T::zero(); 2];
            for d in 0..2 {
                ln[d] = natural_length(&geometry, &errors, ball, d)?;
                for (slot, c) in [d, d + 2].into_iter().enumerate() {
                    ks[d][slot] = law.active_stiffness(dw, errors.osculation(&geometry, ball, c))?;
                }
                kt[d] = series_stiffness(ks[d][0], ks[d][1]);
            }
            natural.push(ln);
            stiffness.push(ks);
            k_total.push(kt);
        }
        let initial = initial_centers(&geometry, &errors);
        let scale = geometry.pitch_radius();
        Ok(Self {
            geometry,
            errors,
            kinematics,
            initial,
            natural,
            stiffness,
            k_total,
            rings: None,
            scale,
        })
    }

    /// Flexible-ring model with condensed ring matrices.
    pub fn flexible(
        geometry: BearingGeometry<T>,
        errors: ErrorMap<T>,
        kinematics: Kinematics,
        outer: RingStiffness<T>,
        inner: RingStiffness<T>,
    ) -> Result<Self> {
        let mut model = Self::rigid(geometry, errors, kinematics)?;
        let b = model.geometry.ball_count;
        for (k, ring) in [(&outer, Ring::Outer), (&inner, Ring::Inner)] {
            if k.ball_count != b {
                return Err(Error::Matrix(format!(
                    "{} ring matrix is for {} balls, bearing has {b}",
                    ring.as_str(),
                    k.ball_count
                )));
            }
            if let Some(r) = k.ring {
                if r != ring {
                    log::warn!("matrix labelled {} used for the {} ring", r.as_str(), ring.as_str());
                }
            }
        }
        let modes = [Ring::Outer, Ring::Inner].map(|ring| {
            let c = ring.contacts().map(|c| model.geometry.nominal_center(c));
            let az: Vec<T> = (0..b).map(|i| model.geometry.ball_azimuth(i)).collect();
            orthonormalize(rigid_master_modes(&vec![c; b], &az).to_vec())
        });
        model.rings = Some(Rings { outer, inner, modes });
        Ok(model)
    }

    pub fn ball_count(&self) -> usize {
        self.geometry.ball_count
    }

    pub fn is_flexible(&self) -> bool {
        self.rings.is_some()
    }

    /// Length scale applied to rotations in the state vector.
    pub fn rotation_scale(&self) -> T {
        self.scale
    }

    pub fn initial_centers(&self) -> &CenterPositions<T> {
        &self.initial
    }

    pub fn natural_length(&self, ball: usize, diagonal: usize) -> T {
        self.natural[ball][diagonal]
    }

    /// Series stiffness of a closed diagonal.
    pub fn diagonal_stiffness(&self, ball: usize, diagonal: usize) -> T {
        self.k_total[ball][diagonal]
    }

    pub fn ring_matrices(&self) -> Option<(&RingStiffness<T>, &RingStiffness<T>)> {
        self.rings.as_ref().map(|r| (&r.outer, &r.inner))
    }

    /// Same model with the ring matrices multiplied by `factor`.
    pub fn with_scaled_rings(&self, factor: T) -> Self {
        let mut out = self.clone();
        if let Some(r) = &mut out.rings {
            r.outer = r.outer.scaled(factor);
            r.inner = r.inner.scaled(factor);
        }
        out
    }

    /// Length of a state vector for `phase`.
    pub fn state_len(&self, phase: Phase) -> usize {
        phase.pose_vars().len() + if self.is_flexible() { 8 * self.ball_count() } else { 0 }
    }

    /// Removes the rigid-body components of both elastic parts of `v`,
    /// starting at `offset`.
    pub fn project_elastic(&self, v: &mut [T], offset: usize) {
        let Some(rings) = &self.rings else { return };
        let n = 4 * self.ball_count();
        for (r, modes) in rings.modes.iter().enumerate() {
            let part = &mut v[offset + r * n..offset + (r + 1) * n];
            for q in modes {
                let c = dot(q, part);
                for (x, &qi) in part.iter_mut().zip(q) {
                    *x -= c * qi;
                }
            }
        }
    }

    /// Rigid-body directions of the elastic parts, as state-length vectors
    /// starting at `offset` (empty in rigid mode).
    pub fn rigid_directions(&self, len: usize, offset: usize) -> Vec<Vec<T>> {
        let Some(rings) = &self.rings else { return Vec::new() };
        let n = 4 * self.ball_count();
        let mut out = Vec::with_capacity(10);
        for (r, modes) in rings.modes.iter().enumerate() {
            for q in modes {
                let mut v = vec![T::zero(); len];
                v[offset + r * n..offset + (r + 1) * n].copy_from_slice(q);
                out.push(v);
            }
        }
        out
    }

    /// Converts the model to another scalar type.
    pub fn cast<U: Real>(&self) -> BearingModel<U> {
        let c = |x: T| U::lit(x.as_f64());
        let c4 = |a: &[T; 4]| a.map(c);
        let g = &self.geometry;
        let e = &self.errors;
        BearingModel {
            geometry: BearingGeometry {
                mean_diameter: c(g.mean_diameter),
                ball_diameter: c(g.ball_diameter),
                raceway_radius: c4(&g.raceway_radius),
                contact_angle: c(g.contact_angle),
                ball_count: g.ball_count,
                first_ball_azimuth: c(g.first_ball_azimuth),
            },
            errors: ErrorMap {
                center_radial: e.center_radial.iter().map(c4).collect(),
                center_axial: e.center_axial.iter().map(c4).collect(),
                raceway_radius: e.raceway_radius.iter().map(c4).collect(),
                ball_diameter: e.ball_diameter.iter().map(|&v| c(v)).collect(),
                preload: c(e.preload),
            },
            kinematics: self.kinematics,
            initial: CenterPositions {
                radial: self.initial.radial.iter().map(c4).collect(),
                axial: self.initial.axial.iter().map(c4).collect(),
                azimuth: self.initial.azimuth.iter().map(|&v| c(v)).collect(),
            },
            natural: self.natural.iter().map(|a| a.map(c)).collect(),
            stiffness: self.stiffness.iter().map(|a| a.map(|p| p.map(c))).collect(),
            k_total: self.k_total.iter().map(|a| a.map(c)).collect(),
            rings: self.rings.as_ref().map(|r| Rings {
                outer: r.outer.cast(),
                inner: r.inner.cast(),
                modes: r.modes.clone().map(|m| m.into_iter().map(|q| q.into_iter().map(c).collect()).collect()),
            }),
            scale: c(self.scale),
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn orthonormalize<T: Real>(basis: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(basis.len());
    for mut v in basis {
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &v);
                for (x, &qi) in v.iter_mut().zip(q) {
                    *x -= c * qi;
                }
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > T::zero() {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Energy split into its terms. N·mm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown<T> {
    pub contact: T,
    pub rings: T,
    /// Work of the external loads, subtracted in the total.
    pub loads: T,
    pub total: T,
}

/// Contact state of one diagonal at a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalState<T> {
    pub contact: DiagonalContactState<T>,
    pub length: T,
    /// Unit vector from the second to the first raceway center, `(R, z)`.
    pub direction: (T, T),
}

/// Energy of a bearing model over one state layout.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a, T> {
    pub model: &'a BearingModel<T>,
    pub phase: Phase,
    /// Pose values for the variables the state does not carry.
    pub base: RigidBodyPose<T>,
    pub load: LoadCase<T>,
}

/// One inner- or outer-ring center of a diagonal with its pose derivatives.
struct Center<T> {
    r: T,
    z: T,
    moved: Option<MovedCenter<T>>,
    elastic: Option<usize>,
}

impl<'a, T: Real> Problem<'a, T> {
    pub fn idle(model: &'a BearingModel<T>) -> Self {
        Self {
            model,
            phase: Phase::Idle,
            base: RigidBodyPose::zero(),
            load: LoadCase::zero(),
        }
    }

    /// Loaded problem starting from the idling pose `idle`.
    pub fn loaded(model: &'a BearingModel<T>, idle: &RigidBodyPose<T>, load: LoadCase<T>) -> Self {
        let mut base = *idle;
        base.axial = T::zero();
        base.radial = T::zero();
        base.tilt = T::zero();
        base.load_direction = load.load_direction;
        Self {
            model,
            phase: Phase::Loaded,
            base,
            load,
        }
    }

    /// Problem over the elastic parts only, at the full pose `pose`.
    pub fn imposed(model: &'a BearingModel<T>, pose: &RigidBodyPose<T>) -> Self {
        Self {
            model,
            phase: Phase::Imposed,
            base: *pose,
            load: LoadCase {
                load_direction: pose.load_direction,
                ..LoadCase::zero()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.model.state_len(self.phase)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of pose entries leading the state.
    pub fn pose_len(&self) -> usize {
        self.phase.pose_vars().len()
    }

    /// Factor from a state entry to its pose variable.
    fn var_scale(&self, var: usize) -> T {
        if is_rotation(var) {
            T::one() / self.model.scale
        } else {
            T::one()
        }
    }

    fn check(&self, x: &[T]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Dimension {
                what: "state vector",
                expected: self.len(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Pose described by a state.
    pub fn pose(&self, x: &[T]) -> RigidBodyPose<T> {
        let mut a = self.base.to_array();
        for (i, &var) in self.phase.pose_vars().iter().enumerate() {
            a[var] = x[i] * self.var_scale(var);
        }
        RigidBodyPose::from_array(a, self.base.load_direction)
    }

    /// State entries for a pose (elastic parts zero).
    pub fn state_from_pose(&self, pose: &RigidBodyPose<T>) -> Vec<T> {
        let mut x = vec![T::zero(); self.len()];
        let a = pose.to_array();
        for (i, &var) in self.phase.pose_vars().iter().enumerate() {
            x[i] = a[var] / self.var_scale(var);
        }
        x
    }

    /// `(D_out, D_in)` of a state, if flexible.
    pub fn elastic<'x>(&self, x: &'x [T]) -> Option<(&'x [T], &'x [T])> {
        self.model.rings.as_ref()?;
        let p = self.pose_len();
        let n = 4 * self.model.ball_count();
        Some((&x[p..p + n], &x[p + n..p + 2 * n]))
    }

    /// Removes rigid-body components from the elastic parts of `v`.
    pub fn project(&self, v: &mut [T]) {
        self.model.project_elastic(v, self.pose_len());
    }

    fn center(&self, pose: &RigidBodyPose<T>, ball: usize, contact: usize, x: &[T]) -> Center<T> {
        let init = &self.model.initial;
        let (r0, z0) = (init.radial[ball][contact], init.axial[ball][contact]);
        let (ring, slot) = ring_slot(contact);
        let elastic = self.model.rings.as_ref().map(|_| {
            let n = 4 * self.model.ball_count();
            let ring_off = match ring {
                Ring::Outer => 0,
                Ring::Inner => n,
            };
            self.pose_len() + ring_off + elastic_index(ball, slot)
        });
        let (mut r, mut z, moved) = match ring {
            Ring::Outer => (r0, z0, None),
            Ring::Inner => {
                let m = move_inner_center(r0, z0, init.azimuth[ball], pose, self.model.kinematics);
                (m.radial, m.axial, Some(m))
            }
        };
        if let Some(k) = elastic {
            r += x[k];
            z += x[k + 1];
        }
        Center { r, z, moved, elastic }
    }

    fn diagonal(&self, pose: &RigidBodyPose<T>, ball: usize, d: usize, x: &[T]) -> (DiagonalState<T>, [Center<T>; 2]) {
        let a = self.center(pose, ball, d, x);
        let b = self.center(pose, ball, d + 2, x);
        let (dr, dz) = (a.r - b.r, a.z - b.z);
        let length = dr.hypot(dz);
        let direction = if length > T::zero() {
            (dr / length, dz / length)
        } else {
            (T::zero(), T::zero())
        };
        let delta = length - self.model.natural[ball][d];
        let [ka, kb] = self.model.stiffness[ball][d];
        let contact = DiagonalContactState::evaluate(delta, ka, kb);
        (
            DiagonalState {
                contact,
                length,
                direction,
            },
            [a, b],
        )
    }

    /// Contact state of every diagonal, `[ball][diagonal]`.
    pub fn diagonals(&self, x: &[T]) -> Result<Vec<[DiagonalState<T>; 2]>> {
        self.check(x)?;
        let pose = self.pose(x);
        Ok((0..self.model.ball_count())
            .map(|ball| [0, 1].map(|d| self.diagonal(&pose, ball, d, x).0))
            .collect())
    }

    /// `(2/5) Σ K_Tot max(δ_Tot, 0)^{5/2}`.
    pub fn contact_energy(&self, x: &[T]) -> Result<T> {
        self.check(x)?;
        let pose = self.pose(x);
        let mut u = T::zero();
        for ball in 0..self.model.ball_count() {
            for d in 0..2 {
                let (s, _) = self.diagonal(&pose, ball, d, x);
                if s.contact.active {
                    u += s.contact.k_total * pow5_2(s.contact.delta_total);
                }
            }
        }
        Ok(u * T::lit(0.4))
    }

    /// `½ (D_outᵀ K_out D_out + D_inᵀ K_in D_in)`.
    pub fn ring_energy(&self, x: &[T]) -> Result<T> {
        self.check(x)?;
        match (self.elastic(x), &self.model.rings) {
            (Some((dout, din)), Some(r)) => Ok(r.outer.energy(dout)? + r.inner.energy(din)?),
            _ => Ok(T::zero()),
        }
    }

    pub fn breakdown(&self, x: &[T]) -> Result<EnergyBreakdown<T>> {
        let contact = self.contact_energy(x)?;
        let rings = self.ring_energy(x)?;
        let loads = self.load.work(&self.pose(x));
        Ok(EnergyBreakdown {
            contact,
            rings,
            loads,
            total: contact + rings - loads,
        })
    }

    /// Total potential energy.
    pub fn energy(&self, x: &[T]) -> Result<T> {
        Ok(self.breakdown(x)?.total)
    }

    /// Derivatives of the spring-length difference vector of a diagonal
    /// with respect to the state: `(column, ∂ΔR, ∂Δz)`.
    fn jacobian(&self, centers: &[Center<T>; 2]) -> Vec<(usize, T, T)> {
        let mut out: Vec<(usize, T, T)> = Vec::with_capacity(self.pose_len() + 4);
        for (c, sign) in centers.iter().zip([T::one(), -T::one()]) {
            if let Some(m) = &c.moved {
                for (i, &var) in self.phase.pose_vars().iter().enumerate() {
                    let s = self.var_scale(var) * sign;
                    let (jr, jz) = (m.d_radial[var] * s, m.d_axial[var] * s);
                    if jr != T::zero() || jz != T::zero() {
                        out.push((i, jr, jz));
                    }
                }
            }
            if let Some(k) = c.elastic {
                out.push((k, sign, T::zero()));
                out.push((k + 1, T::zero(), sign));
            }
        }
        out
    }

    /// Analytic gradient of the total energy.
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        let mut g = self.internal_gradient(x)?;
        let a = self.load.generalized();
        for (i, &var) in self.phase.pose_vars().iter().enumerate() {
            let f = match var {
                pose_var::AXIAL => a[0],
                pose_var::RADIAL => a[1],
                pose_var::TILT => a[2],
                _ => T::zero(),
            };
            g[i] -= f * self.var_scale(var);
        }
        Ok(g)
    }

    /// Gradient of `U_contact + U_rings` alone.
    pub fn internal_gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.check(x)?;
        let pose = self.pose(x);
        let mut g = vec![T::zero(); x.len()];
        for ball in 0..self.model.ball_count() {
            for d in 0..2 {
                let (s, centers) = self.diagonal(&pose, ball, d, x);
                if !s.contact.active {
                    continue;
                }
                let q = s.contact.force;
                let (er, ez) = s.direction;
                for (k, jr, jz) in self.jacobian(&centers) {
                    g[k] += q * (er * jr + ez * jz);
                }
            }
        }
        if let (Some((dout, din)), Some(r)) = (self.elastic(x), &self.model.rings) {
            let p = self.pose_len();
            let n = dout.len();
            for (i, v) in r.outer.apply(dout)?.into_iter().enumerate() {
                g[p + i] += v;
            }
            for (i, v) in r.inner.apply(din)?.into_iter().enumerate() {
                g[p + n + i] += v;
            }
        }
        Ok(g)
    }

    /// `∂(U_contact + U_rings)` with respect to `δ_a`, `δ_r` and `θ_t` at
    /// the pose and elastic parts of `x`: the loads the bearing resists.
    pub fn reactions(&self, x: &[T]) -> Result<[T; 3]> {
        self.check(x)?;
        let pose = self.pose(x);
        let probe = Problem::loaded(self.model, &pose, LoadCase::zero());
        let mut y = probe.state_from_pose(&pose);
        let p = self.pose_len();
        y[3..].copy_from_slice(&x[p..]);
        let g = probe.internal_gradient(&y)?;
        Ok([g[0], g[1], g[2] * self.model.scale])
    }
}

impl<'a> Problem<'a, f64> {
    /// Hessian of the total energy (the load work is linear and drops out).
    ///
    /// Second derivatives of the center positions with respect to the pose
    /// are omitted; they vanish for linearized kinematics.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check(x)?;
        let n = x.len();
        let pose = self.pose(x);
        let mut h = DMatrix::<f64>::zeros(n, n);
        for ball in 0..self.model.ball_count() {
            for d in 0..2 {
                let (s, centers) = self.diagonal(&pose, ball, d, x);
                if !s.contact.active {
                    continue;
                }
                let c = &s.contact;
                let dq = 1.5 * c.k_total * c.delta_total.sqrt();
                let ql = c.force / s.length;
                let (er, ez) = s.direction;
                // dQ/dl e eᵀ + (Q / l)(I - e eᵀ)
                let m = [
                    [dq * er * er + ql * (1.0 - er * er), (dq - ql) * er * ez],
                    [(dq - ql) * er * ez, dq * ez * ez + ql * (1.0 - ez * ez)],
                ];
                let jac = self.jacobian(&centers);
                for &(a, ar, az) in &jac {
                    let (ma, mb) = (m[0][0] * ar + m[1][0] * az, m[0][1] * ar + m[1][1] * az);
                    for &(b, br, bz) in &jac {
                        h[(a, b)] += ma * br + mb * bz;
                    }
                }
            }
        }
        if let Some(r) = &self.model.rings {
            let p = self.pose_len();
            let nb = 4 * self.model.ball_count();
            for (k, off) in [(&r.outer, p), (&r.inner, p + nb)] {
                let dense = k.to_dense();
                for i in 0..nb {
                    for j in 0..nb {
                        h[(off + i, off + j)] += dense[i * nb + j];
                    }
                }
            }
        }
        Ok(h)
    }
}

/// Contact energy of the rigid model at a pose.
pub fn contact_energy<T: Real>(model: &BearingModel<T>, pose: &RigidBodyPose<T>) -> Result<T> {
    let problem = Problem::imposed(model, pose);
    let x = vec![T::zero(); problem.len()];
    problem.contact_energy(&x)
}
