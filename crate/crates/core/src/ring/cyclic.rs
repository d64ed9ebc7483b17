//! One-sector cyclic model: the ring between two balls, closed with Bloch
//! boundary conditions per circumferential harmonic.
//!
//! For harmonic `j` the next sector moves as `w^j` times this one,
//! `w = exp(2 pi i / B)`, so the condensed sector matrix is
//! `H_j = sum_k G_k w^{jk}` and the coupling blocks follow from the inverse
//! transform `G_k = (1/B) sum_j H_j w^{-jk}`.

use nalgebra::{Complex, ComplexField, DMatrix, Matrix4, RealField};

use super::model::{guyan_condense, RingModel, NODE_DOF};
use super::stiffness::Block;
use crate::error::Result;
use crate::scalar::Real;

/// Condensed 4x4 Hermitian matrix of harmonic `j`.
pub fn harmonic_blocks<T: RealField + Real + Copy>(model: &RingModel<T>, j: usize) -> Result<Matrix4<Complex<T>>> {
    let bc = model.ball_count();
    let epb = model.section().elements_per_ball;
    let dim = 4 + NODE_DOF * epb;
    let zero = Complex::new(T::zero(), T::zero());
    let mut k = DMatrix::from_element(dim, dim, zero);
    let cx = |v: T| Complex::new(v, T::zero());

    let angle = <T as Real>::lit(std::f64::consts::TAU) * <T as Real>::from_usize_lossy(j % bc)
        / <T as Real>::from_usize_lossy(bc);
    let phase = Complex::new(<T as ComplexField>::cos(angle), <T as ComplexField>::sin(angle));

    for e in 0..epb {
        let wraps = e + 1 == epb;
        let nodes = [e, (e + 1) % epb];
        let phases = [cx(T::one()), if wraps { phase } else { cx(T::one()) }];
        for bi in 0..2 {
            for bj in 0..2 {
                let p: Complex<T> = phases[bi].conj() * phases[bj];
                for i in 0..NODE_DOF {
                    for jj in 0..NODE_DOF {
                        let v = model.element[(NODE_DOF * bi + i, NODE_DOF * bj + jj)];
                        let add: Complex<T> = p * cx(v);
                        k[(4 + NODE_DOF * nodes[bi] + i, 4 + NODE_DOF * nodes[bj] + jj)] += add;
                    }
                }
            }
        }
    }

    for (slot, t) in model.link_terms().iter().enumerate() {
        let mut entries: Vec<(usize, T)> = vec![(slot, T::one())];
        entries.extend(t.iter().map(|&(d, c)| (4 + d, -c)));
        for &(a, ca) in &entries {
            for &(b, cb) in &entries {
                k[(a, b)] += cx(model.link * ca * cb);
            }
        }
    }

    if j % bc == 0 {
        // spin penalty, see RingModel::condense_direct
        let scale = (0..dim).fold(T::zero(), |acc, i| RealField::max(acc, k[(i, i)].re));
        let g = model.spin_node();
        let gn = g.iter().fold(T::zero(), |acc, &v| acc + v * v) * <T as Real>::from_usize_lossy(epb);
        for n1 in 0..epb {
            for n2 in 0..epb {
                for a in 0..NODE_DOF {
                    for b in 0..NODE_DOF {
                        k[(4 + NODE_DOF * n1 + a, 4 + NODE_DOF * n2 + b)] += cx(scale * g[a] * g[b] / gn);
                    }
                }
            }
        }
    }

    let h = guyan_condense(&k, &[0, 1, 2, 3])?;
    Ok(Matrix4::from_fn(|r, c| h[(r, c)]))
}

/// All `B` coupling blocks `G_k` from the harmonic sector matrices.
pub fn sector_blocks<T: RealField + Real + Copy>(model: &RingModel<T>) -> Result<Vec<Block<T>>> {
    let bc = model.ball_count();
    // H_{B-j} = conj(H_j): only half the harmonics need a solve
    let mut h: Vec<Matrix4<Complex<T>>> = Vec::with_capacity(bc);
    for j in 0..bc {
        if j > bc / 2 {
            let mirror = h[bc - j];
            h.push(mirror.map(|v| v.conj()));
        } else {
            h.push(harmonic_blocks(model, j)?);
        }
    }
    let inv_b = T::one() / <T as Real>::from_usize_lossy(bc);
    let two_pi = <T as Real>::lit(std::f64::consts::TAU);
    let mut out = Vec::with_capacity(bc);
    for k in 0..bc {
        let mut acc = Matrix4::<T>::zeros();
        for (j, hj) in h.iter().enumerate() {
            let a = -two_pi * <T as Real>::from_usize_lossy((j * k) % bc) * inv_b;
            let w = Complex::new(<T as ComplexField>::cos(a), <T as ComplexField>::sin(a));
            acc += hj.map(|v| (v * w).re);
        }
        acc *= inv_b;
        out.push(std::array::from_fn(|r| std::array::from_fn(|c| acc[(r, c)])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{expand_from_sector, RingSection};

    fn section() -> RingSection<f64> {
        RingSection {
            centroid_radius: 280.0,
            width: 40.0,
            height: 60.0,
            young_modulus: 2e5,
            poisson: 0.3,
            center_offsets: [[-19.5, 0.53], [-19.5, -0.53]],
            elements_per_ball: 3,
            link_stiffness: None,
        }
    }

    fn rel_frobenius(a: &[f64], b: &[f64]) -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let n: f64 = b.iter().map(|y| y * y).sum();
        (d / n).sqrt()
    }

    #[test]
    fn harmonics_are_hermitian() {
        let model = RingModel::new(section(), 7).unwrap();
        for j in 0..7 {
            let h = harmonic_blocks(&model, j).unwrap();
            assert!((h - h.adjoint()).iter().all(|v| v.norm() < 1e-9 * h.iter().map(|v| v.norm()).fold(0.0, f64::max)));
        }
    }

    #[test]
    fn sector_route_matches_direct_condensation() {
        for b in [5usize, 8] {
            let model = RingModel::new(section(), b).unwrap();
            let direct = model.condense_direct().unwrap();
            let blocks = sector_blocks(&model).unwrap();
            let one_sided: Vec<Block<f64>> = blocks[..=b / 2].to_vec();
            let k = expand_from_sector(None, &one_sided, b, None).unwrap();
            let n = 4 * b;
            let dense: Vec<f64> = (0..n * n).map(|i| direct[(i / n, i % n)]).collect();
            let err = rel_frobenius(&k.to_dense(), &dense);
            assert!(err <= 1e-10, "B = {b}: {err:e}");
        }
    }
}
