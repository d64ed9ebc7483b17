//! Straight-chord 3D Euler-Bernoulli beam element of the ring model.

use nalgebra::{Matrix3, RealField, SMatrix, Vector3};

pub(crate) type Mat12<T> = SMatrix<T, 12, 12>;

/// Section stiffnesses of the ring beam.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BeamStiffness<T> {
    pub axial: T,
    pub torsion: T,
    /// Bending in the ring plane (deflection radial, axis parallel to z).
    pub in_plane: T,
    /// Bending out of the ring plane (deflection axial).
    pub out_of_plane: T,
}

impl<T: RealField + Copy> BeamStiffness<T> {
    /// Rectangular section, `width` radial and `height` axial.
    pub fn rectangle(width: T, height: T, young: T, poisson: T) -> Self {
        let c = |x: f64| nalgebra::convert::<f64, T>(x);
        let shear = young / (c(2.0) * (T::one() + poisson));
        let (a, b) = if width >= height { (width, height) } else { (height, width) };
        // Roark single-term approximation for a solid rectangle, a >= b:
        // J = a b^3 (1/3 - 0.21 (b/a)(1 - b^4 / (12 a^4)))
        let r = b / a;
        let j = a * b * b * b * (c(1.0 / 3.0) - c(0.21) * r * (T::one() - r * r * r * r / c(12.0)));
        Self {
            axial: young * width * height,
            torsion: shear * j,
            in_plane: young * height * width * width * width / c(12.0),
            out_of_plane: young * width * height * height * height / c(12.0),
        }
    }
}

/// Element stiffness in the element frame, DoF order
/// `[u v w tx ty tz]` per node, `u` along the chord, `w` along z.
pub(crate) fn local_stiffness<T: RealField + Copy>(s: &BeamStiffness<T>, len: T) -> Mat12<T> {
    let c = |x: f64| nalgebra::convert::<f64, T>(x);
    let mut k = Mat12::<T>::zeros();
    let l2 = len * len;
    let l3 = l2 * len;

    let ea = s.axial / len;
    k[(0, 0)] = ea;
    k[(0, 6)] = -ea;
    k[(6, 0)] = -ea;
    k[(6, 6)] = ea;

    let gj = s.torsion / len;
    k[(3, 3)] = gj;
    k[(3, 9)] = -gj;
    k[(9, 3)] = -gj;
    k[(9, 9)] = gj;

    // v / tz pair (bending about the local z axis)
    let ei = s.in_plane;
    let (a, b, d, e) = (c(12.0) * ei / l3, c(6.0) * ei / l2, c(4.0) * ei / len, c(2.0) * ei / len);
    let pairs = [
        (1, 1, a),
        (1, 5, b),
        (1, 7, -a),
        (1, 11, b),
        (5, 5, d),
        (5, 7, -b),
        (5, 11, e),
        (7, 7, a),
        (7, 11, -b),
        (11, 11, d),
    ];
    for (i, j, v) in pairs {
        k[(i, j)] = v;
        k[(j, i)] = v;
    }

    // w / ty pair (bending about the local y axis), opposite coupling sign
    let ei = s.out_of_plane;
    let (a, b, d, e) = (c(12.0) * ei / l3, c(6.0) * ei / l2, c(4.0) * ei / len, c(2.0) * ei / len);
    let pairs = [
        (2, 2, a),
        (2, 4, -b),
        (2, 8, -a),
        (2, 10, -b),
        (4, 4, d),
        (4, 8, b),
        (4, 10, e),
        (8, 8, a),
        (8, 10, b),
        (10, 10, d),
    ];
    for (i, j, v) in pairs {
        k[(i, j)] = v;
        k[(j, i)] = v;
    }
    k
}

/// Rows `e_R, e_T, e_z` of the cylindrical frame at azimuth `theta`.
pub(crate) fn cylindrical_frame<T: RealField + Copy>(theta: T) -> Matrix3<T> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(c, s, T::zero(), -s, c, T::zero(), T::zero(), T::zero(), T::one())
}

/// Stiffness of the chord element between azimuths `0` and `span` on a
/// circle of radius `radius`, expressed in the cylindrical frames of its two
/// nodes. By rotational symmetry the same matrix serves every element.
pub(crate) fn chord_element<T: RealField + Copy>(s: &BeamStiffness<T>, radius: T, span: T) -> Mat12<T> {
    let p1 = Vector3::new(radius, T::zero(), T::zero());
    let p2 = Vector3::new(radius * span.cos(), radius * span.sin(), T::zero());
    let chord = p2 - p1;
    let len = chord.norm();
    let e1 = chord / len;
    let e3 = Vector3::z();
    let e2 = e3.cross(&e1);
    let lambda = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()]);

    let t1 = lambda * cylindrical_frame(T::zero()).transpose();
    let t2 = lambda * cylindrical_frame(span).transpose();
    let mut t = Mat12::<T>::zeros();
    for (blk, tb) in [(0, &t1), (1, &t1), (2, &t2), (3, &t2)] {
        t.fixed_view_mut::<3, 3>(3 * blk, 3 * blk).copy_from(tb);
    }
    let kl = local_stiffness(s, len);
    t.transpose() * kl * t
}
