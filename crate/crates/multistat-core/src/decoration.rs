//! Positively spanning matrices and positively decorated simplices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::expr::Expr;
use crate::geometry::{enumerate_simplices, joint_cone, shares_facet, ConeDescription, PointConfiguration, Simplex};
use crate::linalg::{ln_abs, q_to_f64, LinalgError, RationalMatrix, Q};
use crate::lp::Feasibility;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecorationError {
    #[error("expected a d x (d+1) matrix, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("coefficient matrix has {got} columns but the configuration has {want} points")]
    Columns { got: usize, want: usize },
    #[error("coefficient matrix has {got} rows but the configuration has dimension {want}")]
    Rows { got: usize, want: usize },
    #[error("row {0} of the coefficient matrix is zero")]
    ZeroRow(usize),
    #[error("simplex {0:?} is not positively decorated")]
    NotDecorated(Vec<usize>),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The d x n coefficient matrix of a sparse system, column j paired with a_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMatrix {
    c: RationalMatrix,
    symbolic: Option<Vec<Vec<Expr>>>,
}

impl CoefficientMatrix {
    pub fn new(cfg: &PointConfiguration, c: RationalMatrix) -> Result<Self, DecorationError> {
        if c.cols() != cfg.len() {
            return Err(DecorationError::Columns { got: c.cols(), want: cfg.len() });
        }
        if c.rows() != cfg.dim() {
            return Err(DecorationError::Rows { got: c.rows(), want: cfg.dim() });
        }
        if let Some(r) = (0..c.rows()).find(|&r| c.row(r).iter().all(|v| v.is_zero())) {
            return Err(DecorationError::ZeroRow(r));
        }
        Ok(CoefficientMatrix { c, symbolic: None })
    }

    /// Attach symbolic entries with the same shape as the numeric matrix.
    pub fn with_symbolic(mut self, entries: Vec<Vec<Expr>>) -> Self {
        assert_eq!(entries.len(), self.c.rows());
        assert!(entries.iter().all(|r| r.len() == self.c.cols()));
        self.symbolic = Some(entries);
        self
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.c
    }

    pub fn symbolic(&self) -> Option<&[Vec<Expr>]> {
        self.symbolic.as_deref()
    }

    pub fn rows(&self) -> usize {
        self.c.rows()
    }

    pub fn cols(&self) -> usize {
        self.c.cols()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.c.rows()).map(|r| self.c.row(r).iter().map(q_to_f64).collect()).collect()
    }
}

/// (-1)^i times the minor obtained by deleting column i, i = 0..d.
pub fn signed_minors(m: &RationalMatrix) -> Result<Vec<Q>, DecorationError> {
    if m.cols() != m.rows() + 1 {
        return Err(DecorationError::Shape { rows: m.rows(), cols: m.cols() });
    }
    let n = m.cols();
    Ok((0..n)
        .map(|i| {
            let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let det = m.select_columns(&keep).determinant().expect("square");
            if i % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect())
}

/// All signed maximal minors nonzero and of one sign.
pub fn positively_spanning(m: &RationalMatrix) -> Result<bool, DecorationError> {
    let s = signed_minors(m)?;
    Ok(s.iter().all(|v| v.is_positive()) || s.iter().all(|v| v.is_negative()))
}

/// Same predicate through the kernel: it is one dimensional and spanned by
/// a vector with all coordinates nonzero of one sign.
pub fn positively_spanning_by_kernel(m: &RationalMatrix) -> Result<bool, DecorationError> {
    if m.cols() != m.rows() + 1 {
        return Err(DecorationError::Shape { rows: m.rows(), cols: m.cols() });
    }
    let ker = m.kernel_basis();
    if ker.len() != 1 {
        return Ok(false);
    }
    let v = &ker[0];
    Ok(v.iter().all(|x| x.is_positive()) || v.iter().all(|x| x.is_negative()))
}

/// Sign classification for floating coefficient matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

/// Floating-point variant: a minor whose magnitude is below 1e-9 times the
/// product of its column norms is treated as an undecidable sign.
pub fn positively_spanning_f64(m: &[Vec<f64>]) -> Verdict {
    let d = m.len();
    if m.iter().any(|r| r.len() != d + 1) {
        return Verdict::No;
    }
    let mut signs = Vec::new();
    for i in 0..=d {
        let keep: Vec<usize> = (0..=d).filter(|&k| k != i).collect();
        let sub: Vec<Vec<f64>> = m.iter().map(|r| keep.iter().map(|&k| r[k]).collect()).collect();
        let det = det_f64(&sub);
        let scale: f64 = keep
            .iter()
            .map(|&k| libm::sqrt(m.iter().map(|r| r[k] * r[k]).sum::<f64>()))
            .product();
        if libm::fabs(det) <= 1e-9 * scale {
            return Verdict::Indeterminate;
        }
        signs.push(if i % 2 == 0 { det > 0.0 } else { det < 0.0 });
    }
    if signs.iter().all(|&s| s) || signs.iter().all(|&s| !s) {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

pub(crate) fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| libm::fabs(a[x][col]).partial_cmp(&libm::fabs(a[y][col])).unwrap())
            .unwrap();
        if a[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

pub fn is_decorated(c: &CoefficientMatrix, s: &Simplex) -> bool {
    positively_spanning(&c.matrix().select_columns(s.indices())).unwrap_or(false)
}

/// One signed minor of a restricted submatrix with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMinor {
    /// Column (support point index) deleted from the submatrix.
    pub deleted: usize,
    pub value: Q,
    pub symbolic: Option<Expr>,
}

/// The signed minors that must share one sign for `s` to be decorated.
pub fn decoration_conditions(c: &CoefficientMatrix, s: &Simplex) -> Vec<SignedMinor> {
    let sub = c.matrix().select_columns(s.indices());
    let vals = signed_minors(&sub).expect("shape");
    let sym = c.symbolic().map(|e| {
        let cols: Vec<Vec<Expr>> = e.iter().map(|row| s.indices().iter().map(|&j| row[j].clone()).collect()).collect();
        let n = s.indices().len();
        (0..n)
            .map(|i| {
                let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
                let m: Vec<Vec<Expr>> = cols.iter().map(|r| keep.iter().map(|&k| r[k].clone()).collect()).collect();
                let det = det_expr(&m);
                if i % 2 == 0 {
                    det
                } else {
                    det.neg()
                }
            })
            .collect::<Vec<_>>()
    });
    vals.into_iter()
        .enumerate()
        .map(|(i, value)| SignedMinor {
            deleted: s.indices()[i],
            value,
            symbolic: sym.as_ref().map(|v| v[i].clone()),
        })
        .collect()
}

/// Laplace expansion along the first row, skipping zero entries.
fn det_expr(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Expr::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Expr>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, e)| e.clone()).collect()).collect();
        let term = m[0][j].clone().mul(det_expr(&minor));
        acc = if j % 2 == 0 { acc.add(term) } else { acc.sub(term) };
    }
    acc
}

/// A set of decorated simplices that occur together in one regular subdivision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizableFamily {
    pub simplices: Vec<Simplex>,
    pub cone: ConeDescription,
    pub height: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedFamily {
    /// Every positively decorated simplex, lexicographic.
    pub decorated: Vec<Simplex>,
    /// Facet-sharing pairs as positions into `decorated`.
    pub facet_pairs: Vec<(usize, usize)>,
    /// Greedy maximal realizable subsets, largest first.
    pub families: Vec<RealizableFamily>,
}

impl DecoratedFamily {
    pub fn best(&self) -> Option<&RealizableFamily> {
        self.families.first()
    }
}

/// Enumerate decorated simplices, facet-sharing pairs, and greedy realizable
/// families (one greedy pass seeded by each decorated simplex, candidates in
/// lexicographic order).
pub fn find_decorated(cfg: &PointConfiguration, c: &CoefficientMatrix) -> DecoratedFamily {
    let decorated: Vec<Simplex> = enumerate_simplices(cfg).into_iter().filter(|s| is_decorated(c, s)).collect();
    let n = decorated.len();
    let mut facet_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if shares_facet(cfg, &decorated[i], &decorated[j]) {
                facet_pairs.push((i, j));
            }
        }
    }
    // pairwise compatibility prunes most joint-cone LPs
    let mut compatible = BTreeMap::new();
    let mut pair_ok = |i: usize, j: usize| -> bool {
        let key = (i.min(j), i.max(j));
        *compatible.entry(key).or_insert_with(|| {
            let (_, f) = joint_cone(cfg, &[decorated[key.0].clone(), decorated[key.1].clone()]);
            f.is_feasible()
        })
    };
    let mut seen = BTreeSet::new();
    let mut families = Vec::new();
    for start in 0..n {
        let mut members = vec![start];
        let (mut cone, mut feas) = joint_cone(cfg, &[decorated[start].clone()]);
        for cand in 0..n {
            if members.contains(&cand) || !members.iter().all(|&m| pair_ok(m, cand)) {
                continue;
            }
            let mut trial: Vec<usize> = members.clone();
            trial.push(cand);
            trial.sort_unstable();
            let simplices: Vec<Simplex> = trial.iter().map(|&k| decorated[k].clone()).collect();
            let (c2, f2) = joint_cone(cfg, &simplices);
            if f2.is_feasible() {
                members = trial;
                cone = c2;
                feas = f2;
            }
        }
        if seen.insert(members.clone()) {
            let Feasibility::Interior(height) = feas else { unreachable!("single simplex cones are feasible") };
            families.push(RealizableFamily {
                simplices: members.iter().map(|&k| decorated[k].clone()).collect(),
                cone,
                height,
            });
        }
    }
    families.sort_by(|a, b| b.simplices.len().cmp(&a.simplices.len()).then_with(|| a.simplices.cmp(&b.simplices)));
    DecoratedFamily { decorated, facet_pairs, families }
}

/// Unique positive root of the restricted system sum_{k in s} c_k x^{a_k} = 0
/// in log coordinates. `col_log_scale[j]` multiplies column j by exp of it
/// (used for t-deformed coefficients); pass `None` for the plain system.
pub fn restricted_positive_solution(
    cfg: &PointConfiguration,
    c: &CoefficientMatrix,
    s: &Simplex,
    col_log_scale: Option<&[f64]>,
) -> Result<Vec<f64>, DecorationError> {
    if !is_decorated(c, s) {
        return Err(DecorationError::NotDecorated(s.indices().to_vec()));
    }
    let sub = c.matrix().select_columns(s.indices());
    let minors = signed_minors(&sub)?;
    let d = cfg.dim();
    // x^{a_k} = lambda * v_k with v the positive kernel vector of the scaled columns
    let logv: Vec<f64> = s
        .indices()
        .iter()
        .zip(&minors)
        .map(|(&j, m)| ln_abs(m) - col_log_scale.map_or(0.0, |sc| sc[j]))
        .collect();
    let mut b = RationalMatrix::zeros(d + 1, d + 1);
    for (k, &j) in s.indices().iter().enumerate() {
        for i in 0..d {
            b.set(k, i, crate::linalg::q(cfg.point(j)[i]));
        }
        b.set(k, d, crate::linalg::q(-1));
    }
    let inv = b.inverse()?;
    let sol: Vec<f64> = (0..=d)
        .map(|r| (0..=d).map(|c| q_to_f64(inv.get(r, c)) * logv[c]).sum())
        .collect();
    Ok(sol[..d].to_vec())
}
