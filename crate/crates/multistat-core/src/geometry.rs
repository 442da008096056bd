//! Lattice point configurations, their simplices, regular subdivisions and
//! the cones of height functions that induce a given collection of cells.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::linalg::{dot, primitive, q, LinalgError, RationalMatrix, Q};
use crate::lp::{strict_feasible, Feasibility, StrictInequalitySystem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("configuration is empty")]
    Empty,
    #[error("point {0} has the wrong dimension")]
    Ragged(usize),
    #[error("points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("configuration is not full dimensional (rank of A is {rank}, need {need})")]
    Degenerate { rank: usize, need: usize },
    #[error("index set {0:?} is not a simplex of the configuration")]
    NotSimplex(Vec<usize>),
    #[error("simplices do not share a facet")]
    NoSharedFacet,
    #[error("circuit support must have {need} distinct indices")]
    CircuitSize { need: usize },
    #[error("circuit support does not span the ambient space")]
    CircuitDegenerate,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Distinct lattice points a_1..a_n in Z^d whose convex hull is full dimensional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfiguration {
    dim: usize,
    points: Vec<Vec<i64>>,
    a: RationalMatrix,
}

impl PointConfiguration {
    pub fn new(points: Vec<Vec<i64>>) -> Result<Self, GeometryError> {
        let dim = points.first().ok_or(GeometryError::Empty)?.len();
        for (j, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(GeometryError::Ragged(j));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(GeometryError::Duplicate(i, j));
                }
            }
        }
        let a = build_matrix_a(&points);
        let rank = a.rank();
        if rank != dim + 1 {
            return Err(GeometryError::Degenerate { rank, need: dim + 1 });
        }
        Ok(PointConfiguration { dim, points, a })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn point(&self, j: usize) -> &[i64] {
        &self.points[j]
    }

    /// The (d+1) x n matrix with a leading row of ones.
    pub fn matrix_a(&self) -> &RationalMatrix {
        &self.a
    }

    /// Determinant d_I of the columns of A indexed by `idx` (in the given order).
    pub fn d_index(&self, idx: &[usize]) -> Q {
        self.a.select_columns(idx).determinant().unwrap_or_else(|_| Q::zero())
    }

    /// Lifted (d+2) x (d+2) determinant d_{I}(h) for |I| = d+2.
    pub fn d_lifted(&self, idx: &[usize], h: &[Q]) -> Q {
        let mut m = self.a.select_columns(idx);
        let row: Vec<Q> = idx.iter().map(|&j| h[j].clone()).collect();
        m.push_row(&row).expect("row length");
        m.determinant().expect("square")
    }

    /// Affine function (as coefficients on (1, a)) agreeing with `h` on a simplex.
    pub fn interpolant(&self, s: &Simplex, h: &[Q]) -> Vec<Q> {
        let at = self.a.select_columns(&s.indices).transpose();
        let rhs: Vec<Q> = s.indices.iter().map(|&j| h[j].clone()).collect();
        at.solve(&rhs).expect("simplex columns are independent")
    }

    /// Value of an affine function (coefficients on (1, a)) at point j.
    pub fn eval_affine(&self, w: &[Q], j: usize) -> Q {
        dot(w, &self.a.column(j))
    }
}

/// A = (1 ... 1; a_1 ... a_n).
pub fn build_matrix_a(points: &[Vec<i64>]) -> RationalMatrix {
    let d = points.first().map_or(0, |p| p.len());
    let mut m = RationalMatrix::zeros(d + 1, points.len());
    for (j, p) in points.iter().enumerate() {
        m.set(0, j, Q::one());
        for (i, &v) in p.iter().enumerate() {
            m.set(i + 1, j, q(v));
        }
    }
    m
}

/// A d-simplex given by d+1 sorted point indices with d_I != 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    indices: Vec<usize>,
}

impl Simplex {
    pub fn new(cfg: &PointConfiguration, mut indices: Vec<usize>) -> Result<Self, GeometryError> {
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != cfg.dim() + 1 || indices.iter().any(|&j| j >= cfg.len()) {
            return Err(GeometryError::NotSimplex(indices));
        }
        if cfg.d_index(&indices).is_zero() {
            return Err(GeometryError::NotSimplex(indices));
        }
        Ok(Simplex { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }
}

/// Lexicographic k-subsets of 0..n.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        while i > 0 && c[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        c[i - 1] += 1;
        for j in i..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Every (d+1)-subset with nonzero d_I, in lexicographic order.
pub fn enumerate_simplices(cfg: &PointConfiguration) -> Vec<Simplex> {
    combinations(cfg.len(), cfg.dim() + 1)
        .into_iter()
        .filter(|idx| !cfg.d_index(idx).is_zero())
        .map(|indices| Simplex { indices })
        .collect()
}

/// Whether the convex hulls of two simplices meet in a common facet.
pub fn shares_facet(cfg: &PointConfiguration, s1: &Simplex, s2: &Simplex) -> bool {
    let common: Vec<usize> = s1.indices.iter().copied().filter(|&j| s2.contains(j)).collect();
    if common.len() != cfg.dim() {
        return false;
    }
    if cfg.matrix_a().select_columns(&common).rank() != cfg.dim() {
        return false;
    }
    let v1 = *s1.indices.iter().find(|j| !common.contains(j)).expect("one extra vertex");
    let v2 = *s2.indices.iter().find(|j| !common.contains(j)).expect("one extra vertex");
    let side = |v: usize| {
        let mut idx = common.clone();
        idx.push(v);
        cfg.d_index(&idx)
    };
    let (a, b) = (side(v1), side(v2));
    (a.is_positive() && b.is_negative()) || (a.is_negative() && b.is_positive())
}

/// Affine relation on d+2 points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitRelation {
    pub support: Vec<usize>,
    /// Coefficients aligned with `support`, primitive, first nonzero positive.
    pub lambda: Vec<Q>,
    /// Positions (into `support`) with positive coefficient.
    pub n_plus: Vec<usize>,
    pub n_minus: Vec<usize>,
    /// False when some coefficient vanishes.
    pub is_circuit: bool,
}

impl CircuitRelation {
    /// Maximal cells of the triangulation induced by the height `lambda`:
    /// the support minus one positive-coefficient point each.
    pub fn triangulation_plus(&self) -> Vec<Vec<usize>> {
        self.drop_each(&self.n_plus)
    }

    pub fn triangulation_minus(&self) -> Vec<Vec<usize>> {
        self.drop_each(&self.n_minus)
    }

    fn drop_each(&self, which: &[usize]) -> Vec<Vec<usize>> {
        let mut cells: Vec<Vec<usize>> = which
            .iter()
            .map(|&i| {
                let mut c: Vec<usize> =
                    self.support.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &j)| j).collect();
                c.sort_unstable();
                c
            })
            .collect();
        cells.sort();
        cells
    }
}

pub fn circuit_relation(cfg: &PointConfiguration, support: &[usize]) -> Result<CircuitRelation, GeometryError> {
    let need = cfg.dim() + 2;
    let mut uniq = support.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if support.len() != need || uniq.len() != need || support.iter().any(|&j| j >= cfg.len()) {
        return Err(GeometryError::CircuitSize { need });
    }
    let sub = cfg.matrix_a().select_columns(support);
    if sub.rank() != cfg.dim() + 1 {
        return Err(GeometryError::CircuitDegenerate);
    }
    let ker = sub.kernel_basis();
    let v = &ker[0];
    let mut lambda: Vec<Q> = primitive(v).into_iter().map(Q::from_integer).collect();
    if lambda.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        lambda = lambda.into_iter().map(|x| -x).collect();
    }
    let n_plus = (0..need).filter(|&i| lambda[i].is_positive()).collect();
    let n_minus = (0..need).filter(|&i| lambda[i].is_negative()).collect();
    let is_circuit = lambda.iter().all(|x| !x.is_zero());
    Ok(CircuitRelation { support: support.to_vec(), lambda, n_plus, n_minus, is_circuit })
}

/// Strict inequalities on height vectors, each tagged with the simplex
/// (position in the input list) and the point it constrains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeDescription {
    pub normals: Vec<Vec<Q>>,
    pub tags: Vec<(usize, usize)>,
}

impl ConeDescription {
    pub fn system(&self, n: usize) -> StrictInequalitySystem {
        StrictInequalitySystem::homogeneous(n, self.normals.clone())
    }
}

/// The cone of heights for which `s` is a cell with no extra marked points:
/// one normal d_I^2 (e_i - sum_k lambda_k e_k) per point i outside the simplex,
/// where (1, a_i) = sum_k lambda_k (1, a_k).
pub fn simplex_cone(cfg: &PointConfiguration, s: &Simplex) -> ConeDescription {
    let a = cfg.matrix_a();
    let ai = a.select_columns(&s.indices);
    let inv = ai.inverse().expect("simplex columns are independent");
    let di = ai.determinant().expect("square");
    let d2 = &di * &di;
    let mut normals = Vec::new();
    let mut tags = Vec::new();
    for i in (0..cfg.len()).filter(|&i| !s.contains(i)) {
        let lam = inv.mul_vec(&a.column(i)).expect("dimensions");
        let mut m = vec![Q::zero(); cfg.len()];
        m[i] = d2.clone();
        for (k, &j) in s.indices.iter().enumerate() {
            m[j] = -&d2 * &lam[k];
        }
        debug_assert!(a.mul_vec(&m).unwrap().iter().all(|x| x.is_zero()));
        normals.push(m);
        tags.push((0, i));
    }
    ConeDescription { normals, tags }
}

/// Union of the per-simplex cones (duplicate directions removed) and its
/// feasibility; the interior point, when present, induces all the simplices.
pub fn joint_cone(cfg: &PointConfiguration, simplices: &[Simplex]) -> (ConeDescription, Feasibility) {
    let mut seen = BTreeSet::new();
    let mut normals = Vec::new();
    let mut tags = Vec::new();
    for (k, s) in simplices.iter().enumerate() {
        let c = simplex_cone(cfg, s);
        for (m, (_, i)) in c.normals.into_iter().zip(c.tags) {
            if seen.insert(primitive(&m)) {
                normals.push(m);
                tags.push((k, i));
            }
        }
    }
    let cone = ConeDescription { normals, tags };
    let feas = if cone.normals.is_empty() {
        Feasibility::Interior(vec![Q::zero(); cfg.len()])
    } else {
        strict_feasible(&cone.system(cfg.len()))
    };
    (cone, feas)
}

pub type HeightFunction = Vec<Q>;

/// Height inducing a subdivision that contains two facet-sharing simplices:
/// zero on the second simplex, one at the opposite vertex of the first, and
/// strictly above both interpolants elsewhere with a per-index 1/1009 jitter.
pub fn extend_height(cfg: &PointConfiguration, s1: &Simplex, s2: &Simplex) -> Result<HeightFunction, GeometryError> {
    if !shares_facet(cfg, s1, s2) {
        return Err(GeometryError::NoSharedFacet);
    }
    let n = cfg.len();
    let mut h = vec![Q::zero(); n];
    let v1 = *s1.indices.iter().find(|&&j| !s2.contains(j)).expect("extra vertex");
    h[v1] = Q::one();
    let w1 = cfg.interpolant(s1, &h);
    let delta = crate::linalg::qr(1, 1009);
    for j in 0..n {
        if s1.contains(j) || s2.contains(j) {
            continue;
        }
        let phi1 = cfg.eval_affine(&w1, j);
        let phi = if phi1.is_positive() { phi1 } else { Q::zero() };
        h[j] = phi + Q::one() + &delta * q(j as i64 + 1);
    }
    Ok(h)
}

/// Maximal cells of a regular subdivision as marked point sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub cells: Vec<Vec<usize>>,
    pub height: HeightFunction,
}

impl Subdivision {
    /// True when every cell is a simplex without extra marked points.
    pub fn is_triangulation(&self, cfg: &PointConfiguration) -> bool {
        self.cells.iter().all(|c| c.len() == cfg.dim() + 1)
    }

    /// Whether the vertex set of `s` is exactly one of the cells.
    pub fn has_cell(&self, s: &Simplex) -> bool {
        self.cells.iter().any(|c| c.as_slice() == s.indices())
    }
}

/// Lower hull of the lifted points by exhaustive supporting-hyperplane search.
pub fn regular_subdivision(cfg: &PointConfiguration, h: &[Q]) -> Subdivision {
    assert_eq!(h.len(), cfg.len(), "one height per point");
    let mut cells = BTreeSet::new();
    for s in enumerate_simplices(cfg) {
        let w = cfg.interpolant(&s, h);
        let mut marked = Vec::new();
        let mut lower = true;
        for j in 0..cfg.len() {
            let gap = &h[j] - cfg.eval_affine(&w, j);
            if gap.is_negative() {
                lower = false;
                break;
            }
            if gap.is_zero() {
                marked.push(j);
            }
        }
        if lower {
            cells.insert(marked);
        }
    }
    Subdivision { cells: cells.into_iter().collect(), height: h.to_vec() }
}

/// Regularity of a candidate triangulation via feasibility of its joint cone.
pub fn is_regular(cfg: &PointConfiguration, cells: &[Simplex]) -> (bool, Feasibility) {
    let (_, f) = joint_cone(cfg, cells);
    (f.is_feasible(), f)
}
