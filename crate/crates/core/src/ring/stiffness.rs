//! Condensed ring stiffness at the raceway-center master DoF.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Ring;
use crate::scalar::Real;

/// 4x4 coupling block between two balls, DoF order
/// `[R first, z first, R second, z second]`.
pub type Block<T> = [[T; 4]; 4];

/// Storage of a ring stiffness matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Storage<T> {
    /// Block-circulant: `blocks[k]` couples ball `b` to ball `b + k (mod B)`.
    /// Blocks with cyclic distance above `bandwidth` all equal the far-field
    /// block (see [`RingStiffness::far_field`]).
    Circulant { blocks: Vec<Block<T>>, bandwidth: usize },
    /// Row-major `4B x 4B`.
    Dense { values: Vec<T> },
}

/// Stiffness of one ring condensed onto the radial and axial DoF of its
/// raceway centers. N/mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingStiffness<T> {
    pub ring: Option<Ring>,
    pub ball_count: usize,
    pub storage: Storage<T>,
}

pub(crate) fn zero_block<T: Real>() -> Block<T> {
    [[T::zero(); 4]; 4]
}

pub(crate) fn transpose<T: Copy>(b: &Block<T>) -> Block<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| b[j][i]))
}

pub(crate) fn frobenius<T: Real>(b: &Block<T>) -> T {
    b.iter().flatten().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

fn far_field_of<T: Real>(blocks: &[Block<T>]) -> Block<T> {
    let h = blocks[blocks.len() / 2];
    let half = T::lit(0.5);
    std::array::from_fn(|i| std::array::from_fn(|j| half * (h[i][j] + h[j][i])))
}

/// Cyclic distance between two ball indices.
#[inline]
pub fn cyclic_distance(k: usize, ball_count: usize) -> usize {
    let k = k % ball_count;
    k.min(ball_count - k)
}

fn clamp_bandwidth(bandwidth: usize, ball_count: usize) -> usize {
    let max = ball_count / 2;
    if bandwidth > max {
        log::warn!("bandwidth {bandwidth} >= B/2 for B = {ball_count}; clamped to {max}");
        max
    } else {
        bandwidth
    }
}

impl<T: Real> RingStiffness<T> {
    /// Block-circulant stiffness from all `B` generating blocks, truncated to
    /// `bandwidth` (clamped to `B/2`).
    ///
    /// Truncation replaces the blocks beyond the band by the far-field block
    /// rather than zero: the coupling between distant balls does not vanish
    /// but settles to a constant carried by the ring's global modes, and
    /// zeroing it leaves an indefinite matrix.
    pub fn circulant(ring: Option<Ring>, blocks: Vec<Block<T>>, bandwidth: usize) -> Result<Self> {
        let b = blocks.len();
        if b < 3 {
            return Err(Error::Matrix(format!("need at least 3 balls, got {b}")));
        }
        let bandwidth = clamp_bandwidth(bandwidth, b);
        let far = far_field_of(&blocks);
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(k, blk)| if cyclic_distance(k, b) <= bandwidth { blk } else { far })
            .collect();
        Ok(Self {
            ring,
            ball_count: b,
            storage: Storage::Circulant { blocks, bandwidth },
        })
    }

    /// Wraps a dense matrix, converting to circulant form when the matrix is
    /// block-circulant to `tol` (relative to its largest entry).
    pub fn from_dense(ring: Option<Ring>, ball_count: usize, values: Vec<T>, tol: T) -> Result<Self> {
        let n = 4 * ball_count;
        if values.len() != n * n {
            return Err(Error::Dimension {
                what: "dense ring stiffness",
                expected: n * n,
                actual: values.len(),
            });
        }
        let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let at = |r: usize, c: usize| values[r * n + c];
        let mut circulant = true;
        'outer: for b1 in 0..ball_count {
            for b2 in 0..ball_count {
                let k = (b2 + ball_count - b1) % ball_count;
                for i in 0..4 {
                    for j in 0..4 {
                        if (at(4 * b1 + i, 4 * b2 + j) - at(i, 4 * k + j)).abs() > tol * scale {
                            circulant = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        if circulant {
            let blocks = (0..ball_count)
                .map(|k| std::array::from_fn(|i| std::array::from_fn(|j| at(i, 4 * k + j))))
                .collect();
            Self::circulant(ring, blocks, ball_count / 2)
        } else {
            Ok(Self {
                ring,
                ball_count,
                storage: Storage::Dense { values },
            })
        }
    }

    pub fn dimension(&self) -> usize {
        4 * self.ball_count
    }

    /// Bandwidth in balls; `B/2` for dense storage.
    pub fn bandwidth(&self) -> usize {
        match &self.storage {
            Storage::Circulant { bandwidth, .. } => *bandwidth,
            Storage::Dense { .. } => self.ball_count / 2,
        }
    }

    pub fn is_circulant(&self) -> bool {
        matches!(self.storage, Storage::Circulant { .. })
    }

    /// Generating blocks, if circulant.
    pub fn generating_blocks(&self) -> Option<&[Block<T>]> {
        match &self.storage {
            Storage::Circulant { blocks, .. } => Some(blocks),
            Storage::Dense { .. } => None,
        }
    }

    /// Coupling block between two balls.
    pub fn block(&self, b1: usize, b2: usize) -> Block<T> {
        let bc = self.ball_count;
        match &self.storage {
            Storage::Circulant { blocks, .. } => blocks[(b2 + bc - b1 % bc) % bc],
            Storage::Dense { values } => {
                let n = self.dimension();
                std::array::from_fn(|i| std::array::from_fn(|j| values[(4 * b1 + i) * n + 4 * b2 + j]))
            }
        }
    }

    /// Row-major dense matrix.
    pub fn to_dense(&self) -> Vec<T> {
        match &self.storage {
            Storage::Dense { values } => values.clone(),
            Storage::Circulant { .. } => {
                let n = self.dimension();
                let mut out = vec![T::zero(); n * n];
                for b1 in 0..self.ball_count {
                    for b2 in 0..self.ball_count {
                        let blk = self.block(b1, b2);
                        for i in 0..4 {
                            out[(4 * b1 + i) * n + 4 * b2..(4 * b1 + i) * n + 4 * b2 + 4]
                                .copy_from_slice(&blk[i]);
                        }
                    }
                }
                out
            }
        }
    }

    /// `K d`, using only the stored band for circulant matrices.
    pub fn apply(&self, d: &[T]) -> Result<Vec<T>> {
        let n = self.dimension();
        if d.len() != n {
            return Err(Error::Dimension {
                what: "ring displacement vector",
                expected: n,
                actual: d.len(),
            });
        }
        let mut out = vec![T::zero(); n];
        match &self.storage {
            Storage::Dense { values } => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = values[r * n..(r + 1) * n]
                        .iter()
                        .zip(d)
                        .fold(T::zero(), |acc, (&k, &x)| acc + k * x);
                }
            }
            Storage::Circulant { blocks, bandwidth } => {
                // K d = F * sum(d) + sum over the band of (G_k - F) d_{b+k}
                let bc = self.ball_count;
                let w = *bandwidth;
                let far = far_field_of(blocks);
                let mut total = [T::zero(); 4];
                for b in 0..bc {
                    for j in 0..4 {
                        total[j] += d[4 * b + j];
                    }
                }
                let far_part: [T; 4] =
                    std::array::from_fn(|i| (0..4).fold(T::zero(), |acc, j| acc + far[i][j] * total[j]));
                // k runs over -w..=w without revisiting a block twice
                let offsets: Vec<usize> = (0..=(2 * w).min(bc - 1))
                    .filter(|&off| !(off > 0 && off == 2 * w && 2 * w == bc))
                    .map(|off| (bc + off - w) % bc)
                    .collect();
                let local: Vec<(usize, Block<T>)> = offsets
                    .iter()
                    .map(|&k| (k, std::array::from_fn(|i| std::array::from_fn(|j| blocks[k][i][j] - far[i][j]))))
                    .collect();
                for b1 in 0..bc {
                    let mut acc = far_part;
                    for (k, blk) in &local {
                        let b2 = (b1 + k) % bc;
                        for i in 0..4 {
                            for j in 0..4 {
                                acc[i] += blk[i][j] * d[4 * b2 + j];
                            }
                        }
                    }
                    out[4 * b1..4 * b1 + 4].copy_from_slice(&acc);
                }
            }
        }
        Ok(out)
    }

    /// Strain energy `½ dᵀ K d`.
    pub fn energy(&self, d: &[T]) -> Result<T> {
        let kd = self.apply(d)?;
        Ok(kd.iter().zip(d).fold(T::zero(), |acc, (&a, &b)| acc + a * b) / T::lit(2.0))
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> RingStiffness<U> {
        let c = |v: &T| U::lit(v.as_f64());
        RingStiffness {
            ring: self.ring,
            ball_count: self.ball_count,
            storage: match &self.storage {
                Storage::Circulant { blocks, bandwidth } => Storage::Circulant {
                    blocks: blocks.iter().map(|b| b.map(|row| row.map(|v| c(&v)))).collect(),
                    bandwidth: *bandwidth,
                },
                Storage::Dense { values } => Storage::Dense {
                    values: values.iter().map(c).collect(),
                },
            },
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        match &mut out.storage {
            Storage::Circulant { blocks, .. } => {
                for v in blocks.iter_mut().flatten().flatten() {
                    *v *= factor;
                }
            }
            Storage::Dense { values } => {
                for v in values {
                    *v *= factor;
                }
            }
        }
        out
    }

    /// Frobenius norm of each generating block.
    pub fn block_norms(&self) -> Option<Vec<T>> {
        self.generating_blocks()
            .map(|blocks| blocks.iter().map(frobenius).collect())
    }

    /// Far-field block: the symmetric part of the coupling to the most
    /// distant ball.
    pub fn far_field(&self) -> Option<Block<T>> {
        self.generating_blocks().map(far_field_of)
    }

    /// `|G_k - F|` for each generating block, `F` the far-field block.
    pub fn far_field_deviations(&self) -> Option<Vec<T>> {
        let blocks = self.generating_blocks()?;
        let far = far_field_of(blocks);
        Some(
            blocks
                .iter()
                .map(|g| frobenius(&std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] - far[i][j]))))
                .collect(),
        )
    }

    /// Eigenvalues of a circulant matrix, ascending, from its `B` harmonic
    /// 4x4 blocks `sum_k G_k w^{jk}`.
    pub fn circulant_eigenvalues(&self) -> Option<Vec<f64>> {
        let blocks = self.generating_blocks()?;
        let bc = self.ball_count;
        let mut out = Vec::with_capacity(4 * bc);
        for j in 0..bc {
            // Hermitian 4x4 as a real symmetric 8x8; each eigenvalue appears twice
            let mut m = nalgebra::SMatrix::<f64, 8, 8>::zeros();
            for (k, g) in blocks.iter().enumerate() {
                let a = std::f64::consts::TAU * ((j * k) % bc) as f64 / bc as f64;
                let (s, c) = a.sin_cos();
                for r in 0..4 {
                    for q in 0..4 {
                        let v = g[r][q].as_f64();
                        m[(r, q)] += c * v;
                        m[(r + 4, q + 4)] += c * v;
                        m[(r + 4, q)] += s * v;
                        m[(r, q + 4)] -= s * v;
                    }
                }
            }
            let m = (m + m.transpose()) * 0.5;
            let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            out.extend(ev.iter().step_by(2));
        }
        out.sort_by(f64::total_cmp);
        Some(out)
    }

    /// Softest deforming stiffness: the smallest eigenvalue once the five
    /// rigid motions seen by the raceway centers are set aside.
    pub fn softest_deforming_stiffness(&self) -> Option<f64> {
        self.circulant_eigenvalues().and_then(|ev| ev.get(5).copied())
    }

    /// Smallest bandwidth whose dropped far-field deviations `|G_k - F|`
    /// sum to less than `tol` times the softest deforming stiffness.
    ///
    /// The dropped part bounds the spectral norm of the truncation error, so
    /// every deforming eigenvalue moves by at most the fraction `tol`.
    pub fn default_bandwidth(&self, tol: f64) -> usize {
        let bc = self.ball_count;
        let (Some(dev), Some(soft)) = (self.far_field_deviations(), self.softest_deforming_stiffness()) else {
            return bc / 2;
        };
        if !(soft > 0.0) {
            return bc / 2;
        }
        (0..=bc / 2)
            .find(|&w| {
                let dropped: f64 = (0..bc)
                    .filter(|&k| cyclic_distance(k, bc) > w)
                    .map(|k| dev[k].as_f64())
                    .sum();
                dropped < tol * soft
            })
            .unwrap_or(bc / 2)
    }

    /// Copy with blocks beyond `bandwidth` replaced by the far-field block.
    pub fn truncated(&self, bandwidth: usize) -> Self {
        match &self.storage {
            Storage::Circulant { blocks, .. } => {
                Self::circulant(self.ring, blocks.clone(), bandwidth).expect("ball count already validated")
            }
            Storage::Dense { .. } => self.clone(),
        }
    }

    /// Largest entry of `K - Kᵀ` relative to the largest entry of `K`.
    pub fn asymmetry(&self) -> T {
        let n = self.dimension();
        let scale_of = |vals: &mut dyn Iterator<Item = T>| vals.fold(T::zero(), |m, v| m.max(v.abs()));
        match &self.storage {
            Storage::Dense { values } => {
                let scale = scale_of(&mut values.iter().copied());
                let mut worst = T::zero();
                for r in 0..n {
                    for c in r + 1..n {
                        worst = worst.max((values[r * n + c] - values[c * n + r]).abs());
                    }
                }
                if scale > T::zero() { worst / scale } else { T::zero() }
            }
            Storage::Circulant { blocks, .. } => {
                let bc = self.ball_count;
                let scale = scale_of(&mut blocks.iter().flatten().flatten().copied());
                let mut worst = T::zero();
                for k in 0..bc {
                    let mirror = transpose(&blocks[(bc - k) % bc]);
                    for i in 0..4 {
                        for j in 0..4 {
                            worst = worst.max((blocks[k][i][j] - mirror[i][j]).abs());
                        }
                    }
                }
                if scale > T::zero() { worst / scale } else { T::zero() }
            }
        }
    }
}

/// Builds the full block-circulant stiffness from one ball's coupling blocks.
///
/// `one_sided[k]` is the block coupling a ball to the ball `k` positions
/// ahead, `k = 0..=w`; blocks behind are mirrored as `G_{B-k} = G_kᵀ`.
/// Coupling beyond `bandwidth` (default: all supplied blocks) is truncated
/// as in [`RingStiffness::circulant`]; unsupplied blocks are zero.
pub fn expand_from_sector<T: Real>(
    ring: Option<Ring>,
    one_sided: &[Block<T>],
    ball_count: usize,
    bandwidth: Option<usize>,
) -> Result<RingStiffness<T>> {
    if one_sided.is_empty() {
        return Err(Error::Matrix("no sector blocks supplied".into()));
    }
    if ball_count < 3 {
        return Err(Error::Matrix(format!("need at least 3 balls, got {ball_count}")));
    }
    let supplied = (one_sided.len() - 1).min(ball_count / 2);
    let w = clamp_bandwidth(bandwidth.unwrap_or(supplied), ball_count);
    if w > supplied {
        return Err(Error::Matrix(format!(
            "bandwidth {w} needs coupling blocks up to {w}, only {supplied} supplied"
        )));
    }
    let mut blocks = vec![zero_block(); ball_count];
    for (k, blk) in one_sided.iter().enumerate().take(supplied + 1) {
        blocks[k] = *blk;
        if k > 0 {
            let back = ball_count - k;
            if back != k {
                blocks[back] = transpose(blk);
            }
        }
    }
    RingStiffness::circulant(ring, blocks, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eye(v: f64) -> Block<f64> {
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { v } else { 0.0 }))
    }

    fn toy() -> RingStiffness<f64> {
        expand_from_sector(None, &[eye(1.0), eye(-0.25), eye(0.0)], 4, None).unwrap()
    }

    #[test]
    fn four_ball_toy_structure() {
        let k = toy();
        let d = k.to_dense();
        assert_eq!(d.len(), 256);
        for r in 0..16 {
            for c in 0..16 {
                assert_eq!(d[r * 16 + c], d[c * 16 + r]);
                let (b1, b2) = (r / 4, c / 4);
                let dist = cyclic_distance(b2 + 4 - b1, 4);
                let want = match (dist, r % 4 == c % 4) {
                    (0, true) => 1.0,
                    (1, true) => -0.25,
                    _ => 0.0,
                };
                assert_eq!(d[r * 16 + c], want, "({r},{c})");
            }
        }
    }

    #[test]
    fn energy_cases() {
        let k = toy();
        let zero = vec![0.0; 16];
        assert_eq!(k.energy(&zero).unwrap(), 0.0);
        for j in 0..16 {
            let mut e = zero.clone();
            e[j] = 1.0;
            assert_eq!(k.energy(&e).unwrap(), 0.5);
        }
        let d: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        assert_eq!(k.energy(&d).unwrap(), k.energy(&neg).unwrap());
        assert!(k.energy(&d[..15]).is_err());
    }

    #[test]
    fn banded_product_matches_dense() {
        for bc in [3usize, 4, 5, 8, 9] {
            let blocks: Vec<Block<f64>> = (0..bc)
                .map(|k| std::array::from_fn(|i| std::array::from_fn(|j| ((k * 16 + i * 4 + j) as f64).cos())))
                .collect();
            // symmetrise: G_{B-k} = G_k^T
            let mut sym = blocks.clone();
            for k in 1..bc {
                if bc - k > k {
                    sym[bc - k] = transpose(&sym[k]);
                }
            }
            let sym0 = sym[0];
            sym[0] = std::array::from_fn(|i| std::array::from_fn(|j| sym0[i][j] + sym0[j][i]));
            if bc % 2 == 0 {
                let h = sym[bc / 2];
                sym[bc / 2] = std::array::from_fn(|i| std::array::from_fn(|j| h[i][j] + h[j][i]));
            }
            for w in 0..=bc / 2 {
                let k = RingStiffness::circulant(None, sym.clone(), w).unwrap();
                let dense = k.to_dense();
                let n = 4 * bc;
                let d: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
                let fast = k.apply(&d).unwrap();
                for r in 0..n {
                    let slow: f64 = (0..n).map(|c| dense[r * n + c] * d[c]).sum();
                    assert!((slow - fast[r]).abs() < 1e-12, "B={bc} w={w}");
                }
                assert!(k.asymmetry() < 1e-15);
            }
        }
    }

    #[test]
    fn dense_round_trip_detects_circulant() {
        let k = toy();
        let back = RingStiffness::from_dense(None, 4, k.to_dense(), 1e-6).unwrap();
        assert!(back.is_circulant());
        assert_eq!(back.to_dense(), k.to_dense());

        let mut d = k.to_dense();
        d[0] = 2.0;
        let dense = RingStiffness::from_dense(None, 4, d, 1e-6).unwrap();
        assert!(!dense.is_circulant());
    }

    #[test]
    fn bandwidth_clamps() {
        let k = expand_from_sector(None, &[eye(1.0), eye(-0.25), eye(0.0)], 4, Some(3)).unwrap();
        assert_eq!(k.bandwidth(), 2);
        assert_eq!(k.to_dense(), toy().to_dense());
        assert!(expand_from_sector(None, &[eye(1.0)], 8, Some(2)).is_err());
    }
}
