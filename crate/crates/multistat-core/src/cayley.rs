//! Cayley configurations, mixed simplices and binomial solving.
//!
//! The lifted points (a, e_i) live on the hyperplane where the last d
//! coordinates sum to one. Dropping the final coordinate is a unimodular
//! affine isomorphism onto Z^{2d-1}, so the projected configuration carries
//! the same simplices, determinants (up to sign) and height cones.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::decoration::CoefficientMatrix;
use crate::geometry::{joint_cone, combinations, ConeDescription, GeometryError, PointConfiguration, Simplex};
use crate::linalg::{q, q_to_f64, RationalMatrix, Q};
use crate::lp::Feasibility;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CayleyError {
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("expected {want} blocks of points in Z^{want}, got {got}")]
    BlockCount { got: usize, want: usize },
    #[error("point {point} of block {block} has the wrong dimension")]
    Ragged { block: usize, point: usize },
    #[error("exponent difference matrix is singular")]
    Singular,
    #[error("binomial right-hand side must be positive")]
    NonPositive,
    #[error("Cayley configuration has no full-dimensional simplex: {0}")]
    Degenerate(GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyConfiguration {
    dim: usize,
    blocks: Vec<Vec<Vec<i64>>>,
    offsets: Vec<usize>,
    projected: PointConfiguration,
}

impl CayleyConfiguration {
    pub fn new(blocks: Vec<Vec<Vec<i64>>>) -> Result<Self, CayleyError> {
        let d = blocks.len();
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(CayleyError::EmptyBlock(i));
            }
            for (j, p) in b.iter().enumerate() {
                if p.len() != d {
                    return Err(CayleyError::Ragged { block: i, point: j });
                }
            }
        }
        if d == 0 {
            return Err(CayleyError::BlockCount { got: 0, want: 1 });
        }
        let mut offsets = Vec::with_capacity(d);
        let mut pts = Vec::new();
        for (i, b) in blocks.iter().enumerate() {
            offsets.push(pts.len());
            for p in b {
                let mut v = p.clone();
                v.extend((0..d - 1).map(|k| i64::from(k == i)));
                pts.push(v);
            }
        }
        let projected = PointConfiguration::new(pts).map_err(CayleyError::Degenerate)?;
        Ok(CayleyConfiguration { dim: d, blocks, offsets, projected })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Vec<Vec<i64>>] {
        &self.blocks
    }

    /// Total number of lifted points.
    pub fn len(&self) -> usize {
        self.projected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projected.is_empty()
    }

    /// Lifted point (a_j, e_i) in Z^{2d}.
    pub fn lifted(&self, block: usize, j: usize) -> Vec<i64> {
        let mut v = self.blocks[block][j].clone();
        v.extend((0..self.dim).map(|k| i64::from(k == block)));
        v
    }

    pub fn global_index(&self, block: usize, j: usize) -> usize {
        self.offsets[block] + j
    }

    /// Full-dimensional image in Z^{2d-1}.
    pub fn projected(&self) -> &PointConfiguration {
        &self.projected
    }

    /// The 2d x N matrix of lifted points without the redundant row of ones.
    pub fn matrix(&self) -> RationalMatrix {
        let n = self.len();
        let mut m = RationalMatrix::zeros(2 * self.dim, n);
        for (i, b) in self.blocks.iter().enumerate() {
            for j in 0..b.len() {
                for (r, v) in self.lifted(i, j).into_iter().enumerate() {
                    m.set(r, self.global_index(i, j), q(v));
                }
            }
        }
        m
    }
}

/// One unordered pair of point indices per block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MixedSimplex {
    pub pairs: Vec<(usize, usize)>,
}

impl MixedSimplex {
    /// Row i is a_{j1} - a_{j2} for the pair of block i.
    pub fn exponent_matrix(&self, cay: &CayleyConfiguration) -> Vec<Vec<i64>> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, &(j1, j2))| {
                let (a, b) = (&cay.blocks[i][j1], &cay.blocks[i][j2]);
                a.iter().zip(b).map(|(x, y)| x - y).collect()
            })
            .collect()
    }

    pub fn to_simplex(&self, cay: &CayleyConfiguration) -> Result<Simplex, GeometryError> {
        let idx = self
            .pairs
            .iter()
            .enumerate()
            .flat_map(|(i, &(a, b))| [cay.global_index(i, a), cay.global_index(i, b)])
            .collect();
        Simplex::new(cay.projected(), idx)
    }

    /// The mixed cell {b_1 + ... + b_d} of the Minkowski sum.
    pub fn minkowski_cell(&self, cay: &CayleyConfiguration) -> Vec<Vec<i64>> {
        let mut cell: BTreeSet<Vec<i64>> = BTreeSet::new();
        let d = cay.dim;
        for mask in 0..(1usize << d) {
            let mut sum = vec![0i64; d];
            for (i, &(a, b)) in self.pairs.iter().enumerate() {
                let j = if mask >> i & 1 == 0 { a } else { b };
                for (s, v) in sum.iter_mut().zip(&cay.blocks[i][j]) {
                    *s += v;
                }
            }
            cell.insert(sum);
        }
        cell.into_iter().collect()
    }
}

pub(crate) fn det_i64(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0] as i128,
        2 => m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128,
        _ => {
            let mut acc = 0i128;
            for j in 0..n {
                if m[0][j] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
                let t = m[0][j] as i128 * det_i64(&minor);
                acc += if j % 2 == 0 { t } else { -t };
            }
            acc
        }
    }
}

/// Every choice of one pair per block with invertible exponent matrix.
pub fn enumerate_mixed_simplices(cay: &CayleyConfiguration) -> Vec<MixedSimplex> {
    let per_block: Vec<Vec<(usize, usize)>> =
        cay.blocks.iter().map(|b| combinations(b.len(), 2).into_iter().map(|c| (c[0], c[1])).collect()).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; cay.dim];
    if per_block.iter().any(|p| p.is_empty()) {
        return out;
    }
    loop {
        let ms = MixedSimplex { pairs: choice.iter().enumerate().map(|(i, &c)| per_block[i][c]).collect() };
        if det_i64(&ms.exponent_matrix(cay)) != 0 {
            out.push(ms);
        }
        let mut i = cay.dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < per_block[i].len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Coefficients aligned with the blocks: row i lists the coefficients of
/// block i's points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedCoefficients {
    pub rows: Vec<Vec<Q>>,
}

impl MixedCoefficients {
    pub fn is_mixed_decorated(&self, ms: &MixedSimplex) -> bool {
        ms.pairs.iter().enumerate().all(|(i, &(a, b))| (&self.rows[i][a] * &self.rows[i][b]).is_negative())
    }

    /// beta_i = -c_{i,j2} / c_{i,j1}.
    pub fn binomial_rhs(&self, ms: &MixedSimplex) -> Vec<Q> {
        ms.pairs.iter().enumerate().map(|(i, &(a, b))| -(&self.rows[i][b] / &self.rows[i][a])).collect()
    }
}

/// Cayley data of an unmixed system: block i is the support of row i of C.
/// Also returns, for each block, the original column index of each point.
pub fn from_unmixed(
    cfg: &PointConfiguration,
    c: &CoefficientMatrix,
) -> Result<(CayleyConfiguration, MixedCoefficients, Vec<Vec<usize>>), CayleyError> {
    let m = c.matrix();
    let mut blocks = Vec::new();
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for r in 0..m.rows() {
        let idx: Vec<usize> = (0..m.cols()).filter(|&j| !m.get(r, j).is_zero()).collect();
        blocks.push(idx.iter().map(|&j| cfg.point(j).to_vec()).collect());
        rows.push(idx.iter().map(|&j| m.get(r, j).clone()).collect());
        cols.push(idx);
    }
    Ok((CayleyConfiguration::new(blocks)?, MixedCoefficients { rows }, cols))
}

/// Solve M log x = log beta where row i of M is an exponent difference.
pub fn solve_binomial(m: &[Vec<i64>], beta: &[f64]) -> Result<Vec<f64>, CayleyError> {
    if beta.iter().any(|&b| !(b > 0.0) || !b.is_finite()) {
        return Err(CayleyError::NonPositive);
    }
    let lb: Vec<f64> = beta.iter().map(|&b| libm::log(b)).collect();
    Ok(solve_binomial_log(m, &lb)?.into_iter().map(libm::exp).collect())
}

/// Log-coordinate form of [`solve_binomial`].
pub fn solve_binomial_log(m: &[Vec<i64>], log_beta: &[f64]) -> Result<Vec<f64>, CayleyError> {
    let d = m.len();
    if det_i64(m) == 0 {
        return Err(CayleyError::Singular);
    }
    let rm = RationalMatrix::from_i64_rows(&m.iter().map(|r| r.as_slice()).collect::<Vec<_>>())
        .map_err(|_| CayleyError::Singular)?;
    let inv = rm.inverse().map_err(|_| CayleyError::Singular)?;
    Ok((0..d).map(|r| (0..d).map(|c| q_to_f64(inv.get(r, c)) * log_beta[c]).sum()).collect())
}

/// Joint cone of mixed simplices, with normals indexed by lifted points.
pub fn mixed_joint_cone(
    cay: &CayleyConfiguration,
    simplices: &[MixedSimplex],
) -> Result<(ConeDescription, Feasibility), GeometryError> {
    let s: Result<Vec<Simplex>, _> = simplices.iter().map(|m| m.to_simplex(cay)).collect();
    Ok(joint_cone(cay.projected(), &s?))
}

/// Decorated mixed simplices (lexicographic) and a greedy realizable family.
pub fn find_mixed_decorated(
    cay: &CayleyConfiguration,
    coeffs: &MixedCoefficients,
) -> (Vec<MixedSimplex>, Vec<MixedSimplex>, Option<(ConeDescription, Vec<Q>)>) {
    let dec: Vec<MixedSimplex> =
        enumerate_mixed_simplices(cay).into_iter().filter(|m| coeffs.is_mixed_decorated(m)).collect();
    let mut compatible = alloc::collections::BTreeMap::new();
    let mut pair_ok = |i: usize, j: usize| -> bool {
        let key = (i.min(j), i.max(j));
        *compatible.entry(key).or_insert_with(|| {
            mixed_joint_cone(cay, &[dec[key.0].clone(), dec[key.1].clone()]).map_or(false, |(_, f)| f.is_feasible())
        })
    };
    let mut best: Vec<MixedSimplex> = Vec::new();
    let mut best_cone = None;
    for start in 0..dec.len() {
        let mut members = vec![start];
        let mut cone = mixed_joint_cone(cay, &[dec[start].clone()]).ok();
        for cand in 0..dec.len() {
            if members.contains(&cand) || !members.iter().all(|&m| pair_ok(m, cand)) {
                continue;
            }
            let mut trial = members.clone();
            trial.push(cand);
            let fam: Vec<MixedSimplex> = trial.iter().map(|&k| dec[k].clone()).collect();
            if let Ok((c, f)) = mixed_joint_cone(cay, &fam) {
                if f.is_feasible() {
                    members = trial;
                    cone = Some((c, f));
                }
            }
        }
        if members.len() > best.len() {
            let mut fam: Vec<MixedSimplex> = members.iter().map(|&k| dec[k].clone()).collect();
            fam.sort();
            best = fam;
            best_cone = cone.and_then(|(c, f)| f.point().map(|p| (c, p.to_vec())));
        }
    }
    (dec, best, best_cone)
}
