//! Bearing geometry, manufacturing errors and raceway-center kinematics.
//!
//! Positions live in the cylindrical frame of the outer ring: `R` radial,
//! `z` axial (zero on the ball pitch plane) and `phi` the azimuth of a ball.
//! Contacts are indexed `0..4` for contacts 1..4. Contacts 1 and 4 belong to
//! the outer ring, 2 and 3 to the inner ring. Diagonal `d` (0 or 1) links
//! contact `d` with contact `d + 2`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of rigid-body pose variables carried by the kinematics.
pub const POSE_DIM: usize = 8;

/// Index of each rigid-body variable in pose-sized arrays.
pub mod pose_var {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const Z: usize = 2;
    pub const ALPHA: usize = 3;
    pub const BETA: usize = 4;
    pub const AXIAL: usize = 5;
    pub const RADIAL: usize = 6;
    pub const TILT: usize = 7;
}

/// Which ring a raceway center belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Outer,
    Inner,
}

impl Ring {
    /// Contacts (0-based) of this ring in elastic-vector slot order.
    pub const fn contacts(self) -> [usize; 2] {
        match self {
            Ring::Outer => [0, 3],
            Ring::Inner => [1, 2],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ring::Outer => "outer",
            Ring::Inner => "inner",
        }
    }
}

/// Ring and slot (0 = first center, 1 = second center) of a contact.
pub const fn ring_slot(contact: usize) -> (Ring, usize) {
    match contact {
        0 => (Ring::Outer, 0),
        3 => (Ring::Outer, 1),
        1 => (Ring::Inner, 0),
        _ => (Ring::Inner, 1),
    }
}

/// Offset of the radial component of `(ball, slot)` in a ring's elastic vector.
///
/// Layout per ball: `[R first, z first, R second, z second]`.
#[inline]
pub const fn elastic_index(ball: usize, slot: usize) -> usize {
    4 * ball + 2 * slot
}

/// Nominal bearing dimensions. Lengths in mm, angles in rad.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BearingGeometry<T> {
    pub mean_diameter: T,
    pub ball_diameter: T,
    /// Raceway groove radius of contacts 1..4.
    pub raceway_radius: [T; 4],
    pub contact_angle: T,
    pub ball_count: usize,
    pub first_ball_azimuth: T,
}

impl<T: Real> BearingGeometry<T> {
    /// Geometry with one groove radius for all four raceways.
    pub fn uniform(
        mean_diameter: T,
        ball_diameter: T,
        raceway_radius: T,
        contact_angle: T,
        ball_count: usize,
    ) -> Self {
        Self {
            mean_diameter,
            ball_diameter,
            raceway_radius: [raceway_radius; 4],
            contact_angle,
            ball_count,
            first_ball_azimuth: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ball_count < 3 {
            return Err(Error::Geometry(format!(
                "ball count must be at least 3, got {}",
                self.ball_count
            )));
        }
        let lengths = [
            ("mean diameter", self.mean_diameter),
            ("ball diameter", self.ball_diameter),
        ];
        for (name, v) in lengths.into_iter().chain(
            self.raceway_radius
                .iter()
                .map(|&r| ("raceway radius", r)),
        ) {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Geometry(format!("{name} must be positive, got {v:?}")));
            }
        }
        if !(self.contact_angle > T::zero() && self.contact_angle < T::FRAC_PI_2()) {
            return Err(Error::Geometry(format!(
                "contact angle must lie in (0, pi/2), got {:?}",
                self.contact_angle
            )));
        }
        for i in 0..4 {
            let s = self.osculation(i).as_f64();
            if !(0.89..=0.99).contains(&s) {
                return Err(Error::Geometry(format!(
                    "osculation of contact {} is {s:.6}, outside [0.89, 0.99]",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn pitch_radius(&self) -> T {
        self.mean_diameter / T::lit(2.0)
    }

    /// Nominal osculation ratio `D_w / (2 R_C)` of a contact.
    pub fn osculation(&self, contact: usize) -> T {
        self.ball_diameter / (T::lit(2.0) * self.raceway_radius[contact])
    }

    pub fn ball_azimuth(&self, ball: usize) -> T {
        self.first_ball_azimuth
            + T::TAU() * T::from_usize_lossy(ball) / T::from_usize_lossy(self.ball_count)
    }

    /// Unit vector from the ball center towards contact point `contact`.
    pub fn contact_direction(&self, contact: usize) -> (T, T) {
        let (c, s) = (self.contact_angle.cos(), self.contact_angle.sin());
        match contact {
            0 => (c, s),
            1 => (-c, s),
            2 => (-c, -s),
            _ => (c, -s),
        }
    }

    /// Nominal raceway-center position `(R, z)` of a contact.
    ///
    /// The center sits on the contact line, `R_C - D_w/2` beyond the ball
    /// center on the side opposite the contact point, so that a nominal ball
    /// touches all four raceways without interference.
    pub fn nominal_center(&self, contact: usize) -> (T, T) {
        let offset = self.raceway_radius[contact] - self.ball_diameter / T::lit(2.0);
        let (ur, uz) = self.contact_direction(contact);
        (self.pitch_radius() - offset * ur, -offset * uz)
    }
}

/// Per-ball manufacturing deviations plus the global ball preload. mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMap<T> {
    /// Radial deviation of each raceway center, `[ball][contact]`.
    pub center_radial: Vec<[T; 4]>,
    /// Axial deviation of each raceway center, `[ball][contact]`.
    pub center_axial: Vec<[T; 4]>,
    /// Raceway groove radius deviation, `[ball][contact]`.
    pub raceway_radius: Vec<[T; 4]>,
    /// Ball diameter deviation per ball.
    pub ball_diameter: Vec<T>,
    /// Ball oversize applied to every ball.
    pub preload: T,
}

impl<T: Real> ErrorMap<T> {
    pub fn zero(ball_count: usize) -> Self {
        Self {
            center_radial: vec![[T::zero(); 4]; ball_count],
            center_axial: vec![[T::zero(); 4]; ball_count],
            raceway_radius: vec![[T::zero(); 4]; ball_count],
            ball_diameter: vec![T::zero(); ball_count],
            preload: T::zero(),
        }
    }

    pub fn with_preload(mut self, preload: T) -> Self {
        self.preload = preload;
        self
    }

    pub fn ball_count(&self) -> usize {
        self.ball_diameter.len()
    }

    pub fn validate(&self, geom: &BearingGeometry<T>) -> Result<()> {
        let b = geom.ball_count;
        for (what, len) in [
            ("center_radial", self.center_radial.len()),
            ("center_axial", self.center_axial.len()),
            ("raceway_radius", self.raceway_radius.len()),
            ("ball_diameter", self.ball_diameter.len()),
        ] {
            if len != b {
                return Err(Error::ErrorMap(format!(
                    "{what} has {len} balls, geometry has {b}"
                )));
            }
        }
        let warn = T::lit(0.5);
        let all = self
            .center_radial
            .iter()
            .chain(&self.center_axial)
            .chain(&self.raceway_radius)
            .flat_map(|row| row.iter().copied())
            .chain(self.ball_diameter.iter().copied())
            .chain(std::iter::once(self.preload));
        let mut large = false;
        for v in all {
            if !v.is_finite() {
                return Err(Error::ErrorMap("non-finite deviation".into()));
            }
            large |= v.abs() > warn;
        }
        if large {
            log::warn!("error map contains deviations above 0.5 mm");
        }
        for ball in 0..b {
            let dw = self.ball_diameter_of(geom, ball);
            if !(dw > T::zero()) {
                return Err(Error::ErrorMap(format!(
                    "ball {} has non-positive diameter {dw:?}",
                    ball + 1
                )));
            }
        }
        Ok(())
    }

    /// Actual ball diameter `D_w^nom + dD_w + preload`.
    pub fn ball_diameter_of(&self, geom: &BearingGeometry<T>, ball: usize) -> T {
        geom.ball_diameter + self.ball_diameter[ball] + self.preload
    }

    /// Actual groove radius of a contact at a ball.
    pub fn raceway_radius_of(&self, geom: &BearingGeometry<T>, ball: usize, contact: usize) -> T {
        geom.raceway_radius[contact] + self.raceway_radius[ball][contact]
    }

    /// Osculation ratio of a contact at a ball, with the actual ball diameter.
    pub fn osculation(&self, geom: &BearingGeometry<T>, ball: usize, contact: usize) -> T {
        self.ball_diameter_of(geom, ball)
            / (T::lit(2.0) * self.raceway_radius_of(geom, ball, contact))
    }
}

/// Rigid-body pose of the inner ring relative to the outer ring.
///
/// `x, y, z, alpha, beta` are the idling (assembly) motions; `axial`,
/// `radial` and `tilt` the load-induced motions applied along the fixed
/// `load_direction`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RigidBodyPose<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub alpha: T,
    pub beta: T,
    pub axial: T,
    pub radial: T,
    pub tilt: T,
    pub load_direction: T,
}

impl<T: Real> RigidBodyPose<T> {
    pub fn zero() -> Self {
        Self {
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
            alpha: T::zero(),
            beta: T::zero(),
            axial: T::zero(),
            radial: T::zero(),
            tilt: T::zero(),
            load_direction: T::zero(),
        }
    }

    /// Effective rotation about x including the tilt.
    pub fn alpha_eff(&self) -> T {
        self.alpha - self.tilt * self.load_direction.sin()
    }

    /// Effective rotation about y including the tilt.
    pub fn beta_eff(&self) -> T {
        self.beta + self.tilt * self.load_direction.cos()
    }

    pub fn is_idle(&self) -> bool {
        self.axial == T::zero() && self.radial == T::zero() && self.tilt == T::zero()
    }

    pub fn to_array(&self) -> [T; POSE_DIM] {
        [
            self.x,
            self.y,
            self.z,
            self.alpha,
            self.beta,
            self.axial,
            self.radial,
            self.tilt,
        ]
    }

    pub fn from_array(v: [T; POSE_DIM], load_direction: T) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
            alpha: v[3],
            beta: v[4],
            axial: v[5],
            radial: v[6],
            tilt: v[7],
            load_direction,
        }
    }
}

/// Kinematic model of the inner-ring rigid-body motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kinematics {
    /// Small-displacement form, linear in the pose.
    #[default]
    Linearized,
    /// Full trigonometric form.
    Exact,
}

/// Raceway-center positions for every ball and contact.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterPositions<T> {
    pub radial: Vec<[T; 4]>,
    pub axial: Vec<[T; 4]>,
    pub azimuth: Vec<T>,
}

impl<T: Real> CenterPositions<T> {
    pub fn ball_count(&self) -> usize {
        self.azimuth.len()
    }
}

/// Elastic raceway-center displacements of both rings, each `4B` long.
#[derive(Debug, Clone, Copy)]
pub struct Elastic<'a, T> {
    pub outer: &'a [T],
    pub inner: &'a [T],
}

impl<'a, T: Real> Elastic<'a, T> {
    pub fn new(outer: &'a [T], inner: &'a [T]) -> Self {
        Self { outer, inner }
    }

    fn check(&self, ball_count: usize) -> Result<()> {
        for (what, d) in [("outer elastic vector", self.outer), ("inner elastic vector", self.inner)] {
            if d.len() != 4 * ball_count {
                return Err(Error::Dimension {
                    what,
                    expected: 4 * ball_count,
                    actual: d.len(),
                });
            }
        }
        Ok(())
    }

    /// `(D^R, D^z)` of a contact at a ball.
    #[inline]
    pub fn get(&self, ball: usize, contact: usize) -> (T, T) {
        let (ring, slot) = ring_slot(contact);
        let d = match ring {
            Ring::Outer => self.outer,
            Ring::Inner => self.inner,
        };
        let k = elastic_index(ball, slot);
        (d[k], d[k + 1])
    }
}

/// Initial raceway-center positions: nominal construction plus deviations.
pub fn initial_centers<T: Real>(geom: &BearingGeometry<T>, errors: &ErrorMap<T>) -> CenterPositions<T> {
    let b = geom.ball_count;
    let nominal: [(T, T); 4] = std::array::from_fn(|i| geom.nominal_center(i));
    let mut radial = Vec::with_capacity(b);
    let mut axial = Vec::with_capacity(b);
    for ball in 0..b {
        radial.push(std::array::from_fn(|i| nominal[i].0 + errors.center_radial[ball][i]));
        axial.push(std::array::from_fn(|i| nominal[i].1 + errors.center_axial[ball][i]));
    }
    CenterPositions {
        radial,
        axial,
        azimuth: (0..b).map(|ball| geom.ball_azimuth(ball)).collect(),
    }
}

/// Position of an inner-ring center after rigid-body motion, with its
/// derivatives with respect to the pose variables (see [`pose_var`]).
#[derive(Debug, Clone, Copy)]
pub struct MovedCenter<T> {
    pub radial: T,
    pub axial: T,
    pub d_radial: [T; POSE_DIM],
    pub d_axial: [T; POSE_DIM],
}

/// Rigid-body motion of one inner-ring center at `(r0, z0, phi)`.
pub fn move_inner_center<T: Real>(
    r0: T,
    z0: T,
    phi: T,
    pose: &RigidBodyPose<T>,
    kinematics: Kinematics,
) -> MovedCenter<T> {
    use pose_var::*;
    let (sp, cp) = phi.sin_cos();
    let (sr, cr) = pose.load_direction.sin_cos();
    let a = pose.alpha_eff();
    let b = pose.beta_eff();
    let radial_dir = (pose.load_direction - phi).cos();

    let mut d_radial = [T::zero(); POSE_DIM];
    let mut d_axial = [T::zero(); POSE_DIM];

    let (radial, axial, dr_da, dr_db, dz_da, dz_db) = match kinematics {
        Kinematics::Linearized => {
            let radial = r0 + (pose.x + z0 * b) * cp + (pose.y - z0 * a) * sp + pose.radial * radial_dir;
            let axial = z0 + r0 * (a * sp - b * cp) + pose.z - pose.axial;
            (radial, axial, -z0 * sp, z0 * cp, r0 * sp, -r0 * cp)
        }
        Kinematics::Exact => {
            let (sa, ca) = a.sin_cos();
            let (sb, cb) = b.sin_cos();
            let radial = r0 * (ca * sp * sp + cb * cp * cp)
                + (pose.x + z0 * sb) * cp
                + (pose.y - z0 * sa) * sp
                + pose.radial * radial_dir;
            let axial = z0 * ca * cb + r0 * (sa * sp - sb * cp) + pose.z - pose.axial;
            (
                radial,
                axial,
                -r0 * sa * sp * sp - z0 * ca * sp,
                -r0 * sb * cp * cp + z0 * cb * cp,
                -z0 * sa * cb + r0 * ca * sp,
                -z0 * ca * sb - r0 * cb * cp,
            )
        }
    };

    d_radial[X] = cp;
    d_radial[Y] = sp;
    d_radial[ALPHA] = dr_da;
    d_radial[BETA] = dr_db;
    d_radial[RADIAL] = radial_dir;
    // alpha' = alpha - tilt sin(phi_r), beta' = beta + tilt cos(phi_r)
    d_radial[TILT] = -dr_da * sr + dr_db * cr;

    d_axial[Z] = T::one();
    d_axial[ALPHA] = dz_da;
    d_axial[BETA] = dz_db;
    d_axial[AXIAL] = -T::one();
    d_axial[TILT] = -dz_da * sr + dz_db * cr;

    MovedCenter {
        radial,
        axial,
        d_radial,
        d_axial,
    }
}

/// Center positions under the idling pose (`x, y, z, alpha, beta`) and
/// elastic displacements.
pub fn deformed_centers_idle<T: Real>(
    init: &CenterPositions<T>,
    pose: &RigidBodyPose<T>,
    elastic: Option<Elastic<'_, T>>,
    kinematics: Kinematics,
) -> Result<CenterPositions<T>> {
    if !pose.is_idle() {
        return Err(Error::Index(
            "idling kinematics accept only x, y, z, alpha and beta".into(),
        ));
    }
    deformed_centers_loaded(init, pose, elastic, kinematics)
}

/// Center positions under the full pose including load-induced motions.
///
/// Outer-ring centers (contacts 1, 4) move only elastically; inner-ring
/// centers (contacts 2, 3) follow the rigid-body motion plus elastic terms.
pub fn deformed_centers_loaded<T: Real>(
    init: &CenterPositions<T>,
    pose: &RigidBodyPose<T>,
    elastic: Option<Elastic<'_, T>>,
    kinematics: Kinematics,
) -> Result<CenterPositions<T>> {
    let b = init.ball_count();
    if let Some(e) = &elastic {
        e.check(b)?;
    }
    let mut out = init.clone();
    for ball in 0..b {
        let phi = init.azimuth[ball];
        for contact in 0..4 {
            let (dr, dz) = elastic.map_or((T::zero(), T::zero()), |e| e.get(ball, contact));
            let (r0, z0) = (init.radial[ball][contact], init.axial[ball][contact]);
            let (r, z) = match ring_slot(contact).0 {
                Ring::Outer => (r0, z0),
                Ring::Inner => {
                    let m = move_inner_center(r0, z0, phi, pose, kinematics);
                    (m.radial, m.axial)
                }
            };
            out.radial[ball][contact] = r + dr;
            out.axial[ball][contact] = z + dz;
        }
    }
    Ok(out)
}

/// Unloaded length of the spring on a diagonal: `R_C^i + R_C^{i+2} - D_w`.
pub fn natural_length<T: Real>(
    geom: &BearingGeometry<T>,
    errors: &ErrorMap<T>,
    ball: usize,
    diagonal: usize,
) -> Result<T> {
    if ball >= geom.ball_count || diagonal > 1 {
        return Err(Error::Index(format!("ball {ball}, diagonal {diagonal}")));
    }
    let l = errors.raceway_radius_of(geom, ball, diagonal)
        + errors.raceway_radius_of(geom, ball, diagonal + 2)
        - errors.ball_diameter_of(geom, ball);
    if l > T::zero() {
        Ok(l)
    } else {
        Err(Error::DegenerateConformity {
            ball: ball + 1,
            diagonal: diagonal + 1,
            length: l.as_f64(),
        })
    }
}

/// Distance between the two raceway centers of a diagonal.
pub fn spring_length<T: Real>(centers: &CenterPositions<T>, ball: usize, diagonal: usize) -> T {
    let dr = centers.radial[ball][diagonal] - centers.radial[ball][diagonal + 2];
    let dz = centers.axial[ball][diagonal] - centers.axial[ball][diagonal + 2];
    dr.hypot(dz)
}

/// Total interference of a diagonal; negative values are gaps.
#[inline]
pub fn total_interference<T: Real>(length: T, natural: T) -> T {
    length - natural
}

/// Inclination of the center-to-center line in the `(R, z)` half-plane.
pub fn contact_angle<T: Real>(centers: &CenterPositions<T>, ball: usize, diagonal: usize) -> Result<T> {
    let dr = centers.radial[ball][diagonal] - centers.radial[ball][diagonal + 2];
    let dz = centers.axial[ball][diagonal] - centers.axial[ball][diagonal + 2];
    if dr == T::zero() && dz == T::zero() {
        return Err(Error::ZeroSpringLength {
            ball: ball + 1,
            diagonal: diagonal + 1,
        });
    }
    Ok(dz.abs().atan2(dr.abs()))
}

const CENTERS_HEADER: [&str; 5] = ["ball", "contact", "dR_center_mm", "dz_center_mm", "dRc_mm"];
const BALLS_HEADER: [&str; 2] = ["ball", "dDw_mm"];

fn check_header(path: &Path, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = found.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::parse(
            path,
            format!("expected header `{}`, found `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn parse_field<F: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<F> {
    let line = rec.position().map_or(0, |p| p.line());
    rec.get(i)
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::parse(path, format!("line {line}: bad field {}", i + 1)))
}

impl<T: Real> ErrorMap<T> {
    /// Reads the per-center and per-ball deviation tables.
    ///
    /// Rows may be omitted (zero deviation); duplicates are rejected.
    pub fn read_csv(
        centers_path: impl AsRef<Path>,
        balls_path: impl AsRef<Path>,
        ball_count: usize,
        preload: T,
    ) -> Result<Self> {
        let mut map = Self::zero(ball_count).with_preload(preload);
        let path = centers_path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
        check_header(path, rdr.headers().map_err(|e| Error::parse(path, e))?, &CENTERS_HEADER)?;
        let mut seen = vec![[false; 4]; ball_count];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::parse(path, e))?;
            let ball: usize = parse_field(path, &rec, 0)?;
            let contact: usize = parse_field(path, &rec, 1)?;
            if !(1..=ball_count).contains(&ball) || !(1..=4).contains(&contact) {
                return Err(Error::parse(path, format!("ball {ball} / contact {contact} out of range")));
            }
            let (b, c) = (ball - 1, contact - 1);
            if std::mem::replace(&mut seen[b][c], true) {
                return Err(Error::parse(path, format!("duplicate row for ball {ball}, contact {contact}")));
            }
            map.center_radial[b][c] = T::lit(parse_field::<f64>(path, &rec, 2)?);
            map.center_axial[b][c] = T::lit(parse_field::<f64>(path, &rec, 3)?);
            map.raceway_radius[b][c] = T::lit(parse_field::<f64>(path, &rec, 4)?);
        }

        let path = balls_path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
        check_header(path, rdr.headers().map_err(|e| Error::parse(path, e))?, &BALLS_HEADER)?;
        let mut seen = vec![false; ball_count];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::parse(path, e))?;
            let ball: usize = parse_field(path, &rec, 0)?;
            if !(1..=ball_count).contains(&ball) {
                return Err(Error::parse(path, format!("ball {ball} out of range")));
            }
            if std::mem::replace(&mut seen[ball - 1], true) {
                return Err(Error::parse(path, format!("duplicate row for ball {ball}")));
            }
            map.ball_diameter[ball - 1] = T::lit(parse_field::<f64>(path, &rec, 1)?);
        }
        Ok(map)
    }

    /// Writes both deviation tables in the format read by [`ErrorMap::read_csv`].
    pub fn write_csv(&self, centers_path: impl AsRef<Path>, balls_path: impl AsRef<Path>) -> Result<()> {
        let path = centers_path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))?;
        let to_err = |e: csv::Error| Error::parse(path, e);
        w.write_record(CENTERS_HEADER).map_err(to_err)?;
        for b in 0..self.ball_count() {
            for c in 0..4 {
                w.write_record([
                    (b + 1).to_string(),
                    (c + 1).to_string(),
                    format!("{:e}", self.center_radial[b][c].as_f64()),
                    format!("{:e}", self.center_axial[b][c].as_f64()),
                    format!("{:e}", self.raceway_radius[b][c].as_f64()),
                ])
                .map_err(to_err)?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;

        let path = balls_path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))?;
        let to_err = |e: csv::Error| Error::parse(path, e);
        w.write_record(BALLS_HEADER).map_err(to_err)?;
        for b in 0..self.ball_count() {
            w.write_record([(b + 1).to_string(), format!("{:e}", self.ball_diameter[b].as_f64())])
                .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
