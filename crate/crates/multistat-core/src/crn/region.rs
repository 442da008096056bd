//! The system sum_j phi_{alpha,j}(kappa) x^{a_j} = T_alpha obtained by
//! substituting a parametrization into the block conservation laws.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::param::{terms_expr, SteadyParametrization, Term};
use super::CrnError;
use crate::decoration::CoefficientMatrix;
use crate::expr::Expr;
use crate::geometry::PointConfiguration;
use crate::linalg::{RationalMatrix, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSystem {
    pub chosen: Vec<usize>,
    /// Block of each row.
    pub row_blocks: Vec<usize>,
    pub config: PointConfiguration,
    pub coefficients: CoefficientMatrix,
    /// Totals per row.
    pub totals: Vec<Q>,
    pub total_names: Vec<String>,
    /// Parametrization terms contributing to each entry.
    pub cells: Vec<Vec<Vec<Term>>>,
    pub const_col: usize,
    /// Column of x_k for each chosen variable, when present.
    pub unit_cols: Vec<Option<usize>>,
}

impl RegionSystem {
    pub fn exponents(&self) -> &[Vec<i64>] {
        self.config.points()
    }
}

fn column_order(a: &Vec<i64>, b: &Vec<i64>) -> core::cmp::Ordering {
    let unit = |v: &Vec<i64>| {
        if v.iter().filter(|&&x| x != 0).count() == 1 && v.iter().any(|&x| x == 1) {
            v.iter().position(|&x| x == 1)
        } else {
            None
        }
    };
    let zero = |v: &Vec<i64>| v.iter().all(|&x| x == 0);
    let key = |v: &Vec<i64>| match (unit(v), zero(v)) {
        (Some(k), _) => (0, k as i64, Vec::new()),
        (_, true) => (2, 0, Vec::new()),
        _ => (1, v.iter().sum::<i64>(), v.clone()),
    };
    key(a).cmp(&key(b))
}

/// Collect like monomials of each block law. Rows follow the order of the
/// chosen variables; `totals` and `total_names` are indexed by block.
pub fn assemble_region_system(
    param: &SteadyParametrization,
    laws: &[Vec<Q>],
    row_blocks: &[usize],
    totals: &[Q],
    total_names: &[String],
) -> Result<RegionSystem, CrnError> {
    let m = param.chosen.len();
    let mut rows: Vec<BTreeMap<Vec<i64>, Vec<Term>>> = Vec::new();
    for &b in row_blocks {
        let mut map: BTreeMap<Vec<i64>, Vec<Term>> = BTreeMap::new();
        for (s, c) in laws[b].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for t in &param.species[s] {
                let mut t = t.clone();
                t.coeff *= c;
                map.entry(t.xexp.clone()).or_default().push(t);
            }
        }
        rows.push(map);
    }
    let mut exps: Vec<Vec<i64>> = rows.iter().flat_map(|r| r.keys().cloned()).collect();
    exps.push(vec![0; m]);
    exps.sort_by(column_order);
    exps.dedup();
    let n = exps.len();
    let const_col = n - 1;
    let config = PointConfiguration::new(exps.clone())?;
    let mut c = RationalMatrix::zeros(m, n);
    let mut sym = vec![vec![Expr::zero(); n]; m];
    let mut cells = vec![vec![Vec::new(); n]; m];
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in exps.iter().enumerate() {
            let terms = row.get(e).cloned().unwrap_or_default();
            let mut v = terms.iter().fold(Q::zero(), |a, t| a + &t.coeff);
            let mut s = terms_expr(&terms);
            if j == const_col {
                v -= &totals[row_blocks[i]];
                s = s.sub(Expr::sym(&total_names[row_blocks[i]]));
            }
            c.set(i, j, v);
            sym[i][j] = s;
            cells[i][j] = terms;
        }
    }
    let unit_cols = (0..m)
        .map(|k| exps.iter().position(|e| e.iter().enumerate().all(|(i, &x)| x == i64::from(i == k))))
        .collect();
    let coefficients = CoefficientMatrix::new(&config, c)?.with_symbolic(sym);
    Ok(RegionSystem {
        chosen: param.chosen.clone(),
        row_blocks: row_blocks.to_vec(),
        config,
        coefficients,
        totals: row_blocks.iter().map(|&b| totals[b].clone()).collect(),
        total_names: row_blocks.iter().map(|&b| total_names[b].clone()).collect(),
        cells,
        const_col,
        unit_cols,
    })
}
