//! Full-ring beam model and static condensation.

use nalgebra::{ComplexField, DMatrix, DVector, RealField};

use super::beam::{chord_element, BeamStiffness, Mat12};
use super::stiffness::RingStiffness;
use super::RingSection;
use crate::error::{Error, Result};
use crate::geometry::Ring;
use crate::scalar::Real;

/// DoF per beam node: `u_R, u_T, u_z, theta_R, theta_T, theta_z` in the
/// node's cylindrical frame.
pub(crate) const NODE_DOF: usize = 6;
const U_R: usize = 0;
const U_T: usize = 1;
const U_Z: usize = 2;
const TH_T: usize = 4;
const TH_Z: usize = 5;

/// Closed ring of straight-chord beam elements with linked raceway centers.
///
/// Full DoF ordering: the `4B` masters (ring elastic-vector layout) first,
/// then `6` DoF per beam node. Ball `b` sits at node `b * elements_per_ball`.
#[derive(Debug, Clone)]
pub struct RingModel<T> {
    section: RingSection<T>,
    ball_count: usize,
    pub(crate) element: Mat12<T>,
    pub(crate) link: T,
}

impl<T: RealField + Real + Copy> RingModel<T> {
    pub fn new(section: RingSection<T>, ball_count: usize) -> Result<Self> {
        section.validate()?;
        if ball_count < 3 {
            return Err(Error::Section(format!("ring needs at least 3 balls, got {ball_count}")));
        }
        let beam = BeamStiffness::rectangle(section.width, section.height, section.young_modulus, section.poisson);
        let n = ball_count * section.elements_per_ball;
        let span = <T as Real>::lit(std::f64::consts::TAU) / <T as Real>::from_usize_lossy(n);
        let element = chord_element(&beam, section.centroid_radius, span);
        if element.iter().any(|v| !num_traits::Float::is_finite(*v)) {
            return Err(Error::Section("singular element geometry".into()));
        }
        let link = section.link();
        Ok(Self {
            section,
            ball_count,
            element,
            link,
        })
    }

    pub fn section(&self) -> &RingSection<T> {
        &self.section
    }

    pub fn ball_count(&self) -> usize {
        self.ball_count
    }

    pub fn node_count(&self) -> usize {
        self.ball_count * self.section.elements_per_ball
    }

    pub fn master_count(&self) -> usize {
        4 * self.ball_count
    }

    pub fn dof_count(&self) -> usize {
        self.master_count() + NODE_DOF * self.node_count()
    }

    /// Link constraint of each of a ball's four masters: master `k` follows
    /// `sum coef * u[node dof]`.
    pub(crate) fn link_terms(&self) -> [[(usize, T); 2]; 4] {
        let [[a1, c1], [a2, c2]] = self.section.center_offsets;
        // center = node + theta x (a, 0, c) in the node frame
        [
            [(U_R, T::one()), (TH_T, c1)],
            [(U_Z, T::one()), (TH_T, -a1)],
            [(U_R, T::one()), (TH_T, c2)],
            [(U_Z, T::one()), (TH_T, -a2)],
        ]
    }

    /// Rigid spin about the ring axis restricted to one node.
    pub(crate) fn spin_node(&self) -> [T; NODE_DOF] {
        let mut g = [T::zero(); NODE_DOF];
        g[U_T] = self.section.centroid_radius;
        g[TH_Z] = T::one();
        g
    }

    /// Assembled stiffness of the free ring, including the links.
    pub fn assemble(&self) -> DMatrix<T> {
        let n = self.node_count();
        let m = self.master_count();
        let dim = self.dof_count();
        let mut k = DMatrix::<T>::zeros(dim, dim);
        for e in 0..n {
            let nodes = [e, (e + 1) % n];
            for (bi, &ni) in nodes.iter().enumerate() {
                for (bj, &nj) in nodes.iter().enumerate() {
                    for i in 0..NODE_DOF {
                        for j in 0..NODE_DOF {
                            k[(m + NODE_DOF * ni + i, m + NODE_DOF * nj + j)] +=
                                self.element[(NODE_DOF * bi + i, NODE_DOF * bj + j)];
                        }
                    }
                }
            }
        }
        let terms = self.link_terms();
        for ball in 0..self.ball_count {
            let base = m + NODE_DOF * ball * self.section.elements_per_ball;
            for (slot, t) in terms.iter().enumerate() {
                // elongation = master - sum coef * u
                let mut entries: Vec<(usize, T)> = vec![(4 * ball + slot, T::one())];
                entries.extend(t.iter().map(|&(d, c)| (base + d, -c)));
                for &(i, ci) in &entries {
                    for &(j, cj) in &entries {
                        k[(i, j)] += self.link * ci * cj;
                    }
                }
            }
        }
        k
    }

    /// Spin mode of the full model (zero on the masters).
    pub fn spin_mode(&self) -> DVector<T> {
        let m = self.master_count();
        let g = self.spin_node();
        let mut v = DVector::<T>::zeros(self.dof_count());
        for node in 0..self.node_count() {
            for d in 0..NODE_DOF {
                v[m + NODE_DOF * node + d] = g[d];
            }
        }
        v
    }

    /// Dense `4B x 4B` condensed matrix from the full ring.
    pub fn condense_direct(&self) -> Result<DMatrix<T>> {
        let mut k = self.assemble();
        // Spin is invisible to the masters: a penalty along it makes the
        // interior block regular without changing the condensed matrix.
        let scale = (0..k.nrows()).fold(T::zero(), |acc, i| RealField::max(acc, k[(i, i)]));
        let g = self.spin_mode();
        let gn = g.dot(&g);
        k += (&g * g.transpose()) * (scale / gn);
        let masters: Vec<usize> = (0..self.master_count()).collect();
        guyan_condense(&k, &masters)
    }

    /// Condensed stiffness from the full ring, in circulant form when the
    /// result is circulant to `1e-9`.
    pub fn condense(&self, ring: Option<Ring>) -> Result<RingStiffness<T>> {
        let dense = self.condense_direct()?;
        let n = dense.nrows();
        let values: Vec<T> = (0..n * n).map(|i| dense[(i / n, i % n)]).collect();
        RingStiffness::from_dense(ring, self.ball_count, values, <T as Real>::lit(1e-9))
    }

    /// Condensed stiffness through the one-sector cyclic model (all
    /// coupling blocks, untruncated).
    pub fn condense_cyclic(&self, ring: Option<Ring>) -> Result<RingStiffness<T>> {
        let blocks = super::cyclic::sector_blocks(self)?;
        RingStiffness::circulant(ring, blocks, self.ball_count / 2)
    }
}

/// Static condensation `K_mm - K_ms K_ss^{-1} K_sm` onto `masters`.
///
/// The interior block must be Hermitian positive definite; otherwise the
/// model lacks constraints and the call fails.
pub fn guyan_condense<N: ComplexField + Copy>(k: &DMatrix<N>, masters: &[usize]) -> Result<DMatrix<N>> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(Error::Dimension {
            what: "stiffness matrix columns",
            expected: n,
            actual: k.ncols(),
        });
    }
    let mut is_master = vec![false; n];
    for &i in masters {
        if i >= n || is_master[i] {
            return Err(Error::Index(format!("master DoF {i} invalid or repeated")));
        }
        is_master[i] = true;
    }
    let slaves: Vec<usize> = (0..n).filter(|&i| !is_master[i]).collect();
    let kmm = k.select_rows(masters).select_columns(masters);
    if slaves.is_empty() {
        return Ok(kmm);
    }
    let kss = k.select_rows(&slaves).select_columns(&slaves);
    let ksm = k.select_rows(&slaves).select_columns(masters);
    let chol = kss.cholesky().ok_or_else(|| {
        Error::InsufficientConstraints("interior stiffness block is singular or indefinite".into())
    })?;
    let x = chol.solve(&ksm);
    let out = kmm - ksm.adjoint() * x;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::InsufficientConstraints("condensed matrix is not finite".into()));
    }
    Ok(out)
}
