//! Exact strict-inequality feasibility via a bounded slack LP.
//!
//! The LP is solved by a dense two-phase simplex over rationals using
//! Bland's rule, so it always terminates and never needs a tolerance.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::linalg::{dot, q, Q};

/// Strict homogeneous or shifted inequalities `<m_r, h> > eps_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictInequalitySystem {
    dim: usize,
    normals: Vec<Vec<Q>>,
    bounds: Vec<Q>,
}

impl StrictInequalitySystem {
    /// All right-hand sides zero. Panics if the normals differ in length.
    pub fn homogeneous(dim: usize, normals: Vec<Vec<Q>>) -> Self {
        assert!(normals.iter().all(|m| m.len() == dim), "normals must have length {dim}");
        let bounds = vec![Q::zero(); normals.len()];
        StrictInequalitySystem { dim, normals, bounds }
    }

    pub fn shifted(dim: usize, normals: Vec<Vec<Q>>, bounds: Vec<Q>) -> Self {
        assert!(normals.iter().all(|m| m.len() == dim), "normals must have length {dim}");
        assert_eq!(normals.len(), bounds.len());
        StrictInequalitySystem { dim, normals, bounds }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec<Q>] {
        &self.normals
    }

    pub fn bounds(&self) -> &[Q] {
        &self.bounds
    }

    /// Whether `h` satisfies every strict inequality.
    pub fn contains(&self, h: &[Q]) -> bool {
        self.normals.iter().zip(&self.bounds).all(|(m, e)| dot(m, h) > *e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A point satisfying every strict inequality, verified by substitution.
    Interior(Vec<Q>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Interior(_))
    }

    pub fn point(&self) -> Option<&[Q]> {
        match self {
            Feasibility::Interior(p) => Some(p),
            Feasibility::Infeasible => None,
        }
    }
}

/// Feasibility of `<m_r, h> > eps_r`. Homogeneous systems are solved inside
/// the box `|h_i| <= 1`; shifted ones are homogenized first.
pub fn strict_feasible(sys: &StrictInequalitySystem) -> Feasibility {
    feasible_with_weak(sys, &[])
}

/// Like [`strict_feasible`] with additional weak constraints `<w, h> >= 0`.
pub fn feasible_with_weak(sys: &StrictInequalitySystem, weak: &[Vec<Q>]) -> Feasibility {
    let n = sys.dim;
    assert!(weak.iter().all(|w| w.len() == n));
    if sys.bounds.iter().any(|e| !e.is_zero()) {
        // the box would cut off shifted cones; solve <m,h> - eps*tau > 0, tau > 0
        let mut normals: Vec<Vec<Q>> = sys
            .normals
            .iter()
            .zip(&sys.bounds)
            .map(|(m, e)| m.iter().cloned().chain(core::iter::once(-e.clone())).collect())
            .collect();
        let mut tau = vec![Q::zero(); n + 1];
        tau[n] = Q::one();
        normals.push(tau);
        let weak: Vec<Vec<Q>> = weak.iter().map(|w| w.iter().cloned().chain(core::iter::once(Q::zero())).collect()).collect();
        let hom = StrictInequalitySystem::homogeneous(n + 1, normals);
        let Feasibility::Interior(p) = feasible_with_weak(&hom, &weak) else {
            return Feasibility::Infeasible;
        };
        let h: Vec<Q> = p[..n].iter().map(|v| v / &p[n]).collect();
        return if sys.contains(&h) { Feasibility::Interior(h) } else { Feasibility::Infeasible };
    }
    // variables: s, p_1..p_n, q_1..q_n, all >= 0, h = p - q
    let nv = 1 + 2 * n;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    let hrow = |m: &[Q], sign: i64, s: i64| {
        let mut r = vec![Q::zero(); nv];
        r[0] = q(s);
        for i in 0..n {
            r[1 + i] = -m[i].clone() * q(sign);
            r[1 + n + i] = m[i].clone() * q(sign);
        }
        r
    };
    for (m, e) in sys.normals.iter().zip(&sys.bounds) {
        // s - <m,h> <= -eps
        rows.push(hrow(m, 1, 1));
        rhs.push(-e.clone());
    }
    for w in weak {
        // -<w,h> <= 0
        rows.push(hrow(w, 1, 0));
        rhs.push(Q::zero());
    }
    for i in 0..n {
        let mut up = vec![Q::zero(); nv];
        up[1 + i] = Q::one();
        up[1 + n + i] = -Q::one();
        rows.push(up.clone());
        rhs.push(Q::one());
        let down: Vec<Q> = up.iter().map(|x| -x.clone()).collect();
        rows.push(down);
        rhs.push(Q::one());
    }
    let mut srow = vec![Q::zero(); nv];
    srow[0] = Q::one();
    rows.push(srow);
    rhs.push(Q::one());

    let mut obj = vec![Q::zero(); nv];
    obj[0] = Q::one();
    let LpOutcome::Optimal { x, value } = maximize(&obj, &rows, &rhs) else {
        return Feasibility::Infeasible;
    };
    if !value.is_positive() {
        return Feasibility::Infeasible;
    }
    let h: Vec<Q> = (0..n).map(|i| &x[1 + i] - &x[1 + n + i]).collect();
    if sys.contains(&h) && weak.iter().all(|w| !dot(w, &h).is_negative()) {
        Feasibility::Interior(h)
    } else {
        Feasibility::Infeasible
    }
}

/// Gordan alternative for a homogeneous system: lambda >= 0 summing to one
/// with sum_r lambda_r m_r = 0. Exists exactly when no h has every
/// <m_r, h> > 0.
pub fn gordan_certificate(normals: &[Vec<Q>]) -> Option<Vec<Q>> {
    let r = normals.len();
    let n = normals.first()?.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        let col: Vec<Q> = normals.iter().map(|m| m[i].clone()).collect();
        rows.push(col.iter().map(|v| -v.clone()).collect());
        rows.push(col);
        rhs.push(Q::zero());
        rhs.push(Q::zero());
    }
    rows.push(vec![Q::one(); r]);
    rhs.push(Q::one());
    rows.push(vec![-Q::one(); r]);
    rhs.push(-Q::one());
    let LpOutcome::Optimal { x, .. } = maximize(&vec![Q::zero(); r], &rows, &rhs) else {
        return None;
    };
    let ok = x.iter().all(|v| !v.is_negative())
        && (0..n).all(|i| normals.iter().zip(&x).fold(Q::zero(), |a, (m, l)| a + &m[i] * l).is_zero());
    ok.then_some(x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

/// Maximize `c.x` subject to `A x <= b`, `x >= 0`.
pub fn maximize(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> LpOutcome {
    let m = a.len();
    let nv = c.len();
    // columns: structural, slacks, artificials, rhs
    let n_art = b.iter().filter(|v| v.is_negative()).count();
    let ncol = nv + m + n_art;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    let mut basis = vec![0usize; m];
    let mut art = nv + m;
    let mut art_rows = Vec::new();
    for i in 0..m {
        let mut row = vec![Q::zero(); ncol + 1];
        let neg = b[i].is_negative();
        let sg = if neg { -Q::one() } else { Q::one() };
        for j in 0..nv {
            row[j] = &a[i][j] * &sg;
        }
        row[nv + i] = sg.clone();
        row[ncol] = &b[i] * &sg;
        if neg {
            row[art] = Q::one();
            basis[i] = art;
            art_rows.push(i);
            art += 1;
        } else {
            basis[i] = nv + i;
        }
        t.push(row);
    }
    // phase 1: maximize -sum(artificials)
    let mut z = vec![Q::zero(); ncol + 1];
    for j in nv + m..ncol {
        z[j] = Q::one();
    }
    for &i in &art_rows {
        for j in 0..=ncol {
            z[j] = &z[j] - &t[i][j];
        }
    }
    t.push(z);
    if n_art > 0 {
        run_simplex(&mut t, &mut basis, ncol, ncol);
        if t[m][ncol].is_negative() {
            return LpOutcome::Infeasible;
        }
        // drive remaining artificials out of the basis
        let mut i = 0;
        while i < basis.len() {
            if basis[i] >= nv + m {
                if let Some(j) = (0..nv + m).find(|&j| !t[i][j].is_zero()) {
                    pivot(&mut t, &mut basis, i, j);
                } else {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
    }
    let rows = basis.len();
    // phase 2 objective row
    let mut z = vec![Q::zero(); ncol + 1];
    for j in 0..nv {
        z[j] = -c[j].clone();
    }
    for i in 0..rows {
        let bj = basis[i];
        if bj < nv && !c[bj].is_zero() {
            for j in 0..=ncol {
                z[j] = &z[j] + &c[bj] * &t[i][j];
            }
        }
    }
    let last = t.len() - 1;
    t[last] = z;
    if !run_simplex(&mut t, &mut basis, nv + m, ncol) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); nv];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < nv {
            x[bj] = t[i][ncol].clone();
        }
    }
    let value = dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// Bland's rule iterations; entering columns restricted to `0..allowed`.
/// Returns false when unbounded.
fn run_simplex(t: &mut [Vec<Q>], basis: &mut [usize], allowed: usize, rhs: usize) -> bool {
    let zr = t.len() - 1;
    loop {
        let Some(enter) = (0..allowed).find(|&j| t[zr][j].is_negative()) else {
            return true;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..zr {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((li, _)) = leave else {
            return false;
        };
        pivot(t, basis, li, enter);
    }
}

fn pivot(t: &mut [Vec<Q>], basis: &mut [usize], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for v in t[r].iter_mut() {
        if !v.is_zero() {
            *v = &*v * &inv;
        }
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, p) in row.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v = &*v - &f * p;
            }
        }
    }
    basis[r] = c;
}
