//! Turning a coefficient scaling gamma into rescaled rate constants.
//!
//! Multiplying every rate leaving a core complex y by l_y multiplies each
//! parametrization term by prod_y l_y^{ell_y}. We look for the smallest set
//! of complexes whose multipliers reproduce the normalized gamma on every
//! term, solve for log l exactly, and check the result by reassembling.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::region::RegionSystem;
use super::{CrnError, Network};
use crate::geometry::combinations;
use crate::linalg::{q, q_from_f64, q_to_f64, RationalMatrix, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct RescaleOutcome {
    pub kappa_bar: Vec<f64>,
    /// (complex, l_y) for each rescaled complex.
    pub multipliers: Vec<(usize, f64)>,
    /// log of the normalized gamma, per column.
    pub log_gamma: Vec<f64>,
    /// log alpha_0 followed by log alpha_k per chosen variable; roots map by
    /// y_k = x_k / alpha_k.
    pub log_alpha: Vec<f64>,
    /// Largest relative deviation of the reassembled coefficients.
    pub max_rel_error: f64,
}

/// Normalize log gamma to be zero on the constant column and on each chosen
/// variable column. Returns the normalized vector and log alpha.
pub fn normalize_gamma(region: &RegionSystem, log_gamma: &[f64]) -> Result<(Vec<f64>, Vec<f64>), CrnError> {
    let a0 = -log_gamma[region.const_col];
    let mut alpha = vec![a0];
    for (k, uc) in region.unit_cols.iter().enumerate() {
        let j = uc.ok_or_else(|| CrnError::Hypothesis(format!("no column x_{} for chosen variable {}", k + 1, k + 1)))?;
        alpha.push(-log_gamma[j] - a0);
    }
    let out = region
        .exponents()
        .iter()
        .zip(log_gamma)
        .map(|(a, g)| g + a0 + a.iter().zip(&alpha[1..]).map(|(&ai, al)| ai as f64 * al).sum::<f64>())
        .collect();
    Ok((out, alpha))
}

/// Columns other than the constant and chosen-variable columns.
fn free_columns(region: &RegionSystem) -> Vec<usize> {
    (0..region.exponents().len())
        .filter(|&j| j != region.const_col && !region.unit_cols.contains(&Some(j)))
        .collect()
}

/// Smallest subset (first in the given candidate order) whose multipliers
/// can realize every normalized gamma, with the exact solve map
/// log l = P * log gamma_free.
pub fn find_support(region: &RegionSystem, candidates: &[usize]) -> Result<(Vec<usize>, RationalMatrix), CrnError> {
    let free = free_columns(region);
    let mut rows: Vec<(usize, &[i64])> = Vec::new();
    for row in &region.cells {
        for (j, cell) in row.iter().enumerate() {
            for t in cell {
                rows.push((j, &t.ell));
            }
        }
    }
    let g = {
        let mut g = RationalMatrix::zeros(rows.len(), free.len());
        for (r, &(j, _)) in rows.iter().enumerate() {
            if let Some(f) = free.iter().position(|&x| x == j) {
                g.set(r, f, q(1));
            }
        }
        g
    };
    for k in 0..=candidates.len() {
        for subset in combinations(candidates.len(), k) {
            let s: Vec<usize> = subset.iter().map(|&i| candidates[i]).collect();
            let mut e = RationalMatrix::zeros(rows.len(), s.len());
            let mut aug = RationalMatrix::zeros(rows.len(), s.len() + free.len());
            for (r, &(_, ell)) in rows.iter().enumerate() {
                for (c, &y) in s.iter().enumerate() {
                    e.set(r, c, q(ell[y]));
                    aug.set(r, c, q(ell[y]));
                }
                for f in 0..free.len() {
                    aug.set(r, s.len() + f, g.get(r, f).clone());
                }
            }
            let re = e.rank();
            if re != s.len() || aug.rank() != re {
                continue;
            }
            if s.is_empty() {
                return Ok((s, RationalMatrix::zeros(0, free.len())));
            }
            let et = e.transpose();
            let normal = et.mul(&e).map_err(|_| CrnError::Hypothesis(String::from("dimension")))?;
            let p = normal
                .inverse()
                .and_then(|inv| inv.mul(&et))
                .and_then(|m| m.mul(&g))
                .map_err(|_| CrnError::Hypothesis(String::from("singular normal equations")))?;
            return Ok((s, p));
        }
    }
    Err(CrnError::Hypothesis(String::from("no set of core complexes realizes the requested scaling")))
}

/// Rescaled rates whose region system is C * diag(gamma) after
/// normalization. `rebuild` reassembles the region system at given rates.
pub fn rescale_back<F>(
    net: &Network,
    kappa: &[Q],
    region: &RegionSystem,
    log_gamma: &[f64],
    candidates: &[usize],
    rebuild: F,
) -> Result<RescaleOutcome, CrnError>
where
    F: Fn(&[Q]) -> Result<RegionSystem, CrnError>,
{
    let (lg, log_alpha) = normalize_gamma(region, log_gamma)?;
    let free = free_columns(region);
    let (support, p) = find_support(region, candidates)?;
    let g_free: Vec<f64> = free.iter().map(|&j| lg[j]).collect();
    let mut log_l = vec![0.0; net.complexes().len()];
    let mut multipliers = Vec::new();
    for (i, &y) in support.iter().enumerate() {
        let v: f64 = (0..free.len()).map(|f| q_to_f64(p.get(i, f)) * g_free[f]).sum();
        log_l[y] = v;
        multipliers.push((y, libm::exp(v)));
    }
    let kappa_bar: Vec<f64> = net
        .reactions()
        .iter()
        .zip(kappa)
        .map(|(r, k)| q_to_f64(k) * libm::exp(log_l[r.source]))
        .collect();
    let kbar_q: Vec<Q> = kappa_bar
        .iter()
        .map(|&v| q_from_f64(v).ok_or_else(|| CrnError::Postcondition(format!("rescaled rate {v} is not finite"))))
        .collect::<Result<_, _>>()?;
    let rebuilt = rebuild(&kbar_q)?;
    if rebuilt.exponents() != region.exponents() {
        return Err(CrnError::Postcondition(String::from("support changed after rescaling")));
    }
    let c0 = region.coefficients.matrix();
    let c1 = rebuilt.coefficients.matrix();
    let mut worst = 0.0f64;
    for i in 0..c0.rows() {
        for (j, g) in lg.iter().enumerate() {
            let want = q_to_f64(c0.get(i, j)) * libm::exp(*g);
            let got = q_to_f64(c1.get(i, j));
            if c0.get(i, j).is_zero() {
                if !c1.get(i, j).is_zero() {
                    worst = f64::INFINITY;
                }
                continue;
            }
            worst = worst.max(libm::fabs(got - want) / libm::fabs(want));
        }
    }
    if !(worst < 1e-9) {
        return Err(CrnError::Postcondition(format!("reassembled coefficients deviate by {worst:e}")));
    }
    Ok(RescaleOutcome { kappa_bar, multipliers, log_gamma: lg, log_alpha, max_rel_error: worst })
}
