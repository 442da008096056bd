//! Deformed systems, certified positive roots and the decreasing-t search.
//!
//! Everything here works in log coordinates u = log x. Coefficients are kept
//! as (sign, log |c|) so that t^h never underflows, and each polynomial is
//! evaluated relative to its largest term.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cayley::{find_mixed_decorated, from_unmixed, solve_binomial_log, CayleyConfiguration, MixedCoefficients, MixedSimplex};
use crate::crn::model::MessiModel;
use crate::crn::region::RegionSystem;
use crate::crn::rescale::RescaleOutcome;
use crate::crn::{mass_action_residual_f64, CrnError};
use crate::decoration::{find_decorated, restricted_positive_solution, CoefficientMatrix, DecoratedFamily};
use crate::geometry::{ConeDescription, PointConfiguration, Simplex};
use crate::linalg::{ln_abs, q_from_f64, q_to_f64, Q};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WitnessError {
    #[error("height is not in the interior of the family's cone (normal {0})")]
    HeightOutsideCone(usize),
    #[error("expected {want} heights, got {got}")]
    HeightLength { got: usize, want: usize },
    #[error("t must lie in (0, 1], got {0}")]
    BadT(f64),
    #[error("no positively decorated simplex")]
    NoDecorated,
    #[error("system has {rows} equations in {dim} unknowns")]
    NotSquare { rows: usize, dim: usize },
    #[error(transparent)]
    Crn(#[from] CrnError),
}

/// gamma_j = alpha_0 * prod_k alpha_k^{a_jk} * t^{h_j}, in logs.
pub fn phi_map_log(cfg: &PointConfiguration, log_alpha: &[f64], log_t: f64, h: &[f64]) -> Vec<f64> {
    cfg.points()
        .iter()
        .zip(h)
        .map(|(a, hj)| {
            log_alpha[0] + a.iter().zip(&log_alpha[1..]).map(|(&ak, l)| ak as f64 * l).sum::<f64>() + hj * log_t
        })
        .collect()
}

pub fn phi_map(cfg: &PointConfiguration, alpha: &[f64], t: f64, h: &[f64]) -> Vec<f64> {
    let la: Vec<f64> = alpha.iter().map(|&a| libm::log(a)).collect();
    phi_map_log(cfg, &la, libm::log(t), h).into_iter().map(libm::exp).collect()
}

/// One monomial of a sparse system: sign * exp(log_abs) * x^exp.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTerm {
    pub exp: Vec<i64>,
    pub negative: bool,
    pub log_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    dim: usize,
    rows: Vec<Vec<LogTerm>>,
}

/// Row-normalized values and log-Jacobian at a point.
#[derive(Debug, Clone)]
struct Evaluation {
    values: Vec<f64>,
    jacobian: Vec<Vec<f64>>,
    log_scale: Vec<f64>,
}

impl SparseSystem {
    pub fn new(dim: usize, rows: Vec<Vec<LogTerm>>) -> Self {
        SparseSystem { dim, rows }
    }

    /// Plain system sum_j c_ij x^{a_j} with rational coefficients.
    pub fn from_rational(points: &[Vec<i64>], rows: &[Vec<Q>]) -> Self {
        let dim = points.first().map_or(0, |p| p.len());
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(points)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, a)| LogTerm { exp: a.clone(), negative: c.is_negative(), log_abs: ln_abs(c) })
                    .collect()
            })
            .collect();
        SparseSystem { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<LogTerm>] {
        &self.rows
    }

    fn exponents_at(&self, i: usize, u: &[f64]) -> Vec<f64> {
        self.rows[i]
            .iter()
            .map(|t| t.log_abs + t.exp.iter().zip(u).map(|(&a, x)| a as f64 * x).sum::<f64>())
            .collect()
    }

    fn evaluate(&self, u: &[f64]) -> Evaluation {
        let mut values = Vec::with_capacity(self.rows.len());
        let mut jacobian = Vec::with_capacity(self.rows.len());
        let mut log_scale = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let z = self.exponents_at(i, u);
            let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut s = 0.0;
            let mut f = 0.0;
            let mut g = vec![0.0; self.dim];
            for (t, zj) in row.iter().zip(&z) {
                let w = libm::exp(zj - m);
                let sw = if t.negative { -w } else { w };
                s += w;
                f += sw;
                for (gk, &a) in g.iter_mut().zip(&t.exp) {
                    *gk += a as f64 * sw;
                }
            }
            if row.is_empty() {
                values.push(0.0);
                jacobian.push(g);
                log_scale.push(0.0);
                continue;
            }
            values.push(f / s);
            jacobian.push(g.iter().map(|x| x / s).collect());
            log_scale.push(m + libm::log(s));
        }
        Evaluation { values, jacobian, log_scale }
    }

    /// Values at `u` divided by fixed row scales computed elsewhere.
    fn values_with_scale(&self, u: &[f64], log_scale: &[f64]) -> Vec<f64> {
        (0..self.rows.len())
            .map(|i| {
                self.rows[i]
                    .iter()
                    .zip(self.exponents_at(i, u))
                    .map(|(t, z)| {
                        let w = libm::exp(z - log_scale[i]);
                        if t.negative {
                            -w
                        } else {
                            w
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// Max over rows of |f_i| / sum_j |terms of f_i|.
    pub fn relative_residual(&self, log_x: &[f64]) -> f64 {
        self.evaluate(log_x).values.iter().fold(0.0, |a, v| a.max(libm::fabs(*v)))
    }

    /// Row-normalized Jacobian with respect to log x.
    pub fn log_jacobian(&self, log_x: &[f64]) -> Vec<Vec<f64>> {
        self.evaluate(log_x).jacobian
    }
}

/// One entry of a deformed system: coefficient c of column `col`, scaled
/// by t^height.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedEntry {
    pub col: usize,
    pub coeff: Q,
    pub height: f64,
}

/// f_{i,t}(x) = sum c_ij t^{h_ij} x^{a_j}. In the unmixed case h_ij = h_j.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedSystem {
    points: Vec<Vec<i64>>,
    rows: Vec<Vec<DeformedEntry>>,
    log_t: f64,
}

impl DeformedSystem {
    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn entries(&self) -> &[Vec<DeformedEntry>] {
        &self.rows
    }

    pub fn log_t(&self) -> f64 {
        self.log_t
    }

    pub fn at_log_t(&self, log_t: f64) -> DeformedSystem {
        DeformedSystem { points: self.points.clone(), rows: self.rows.clone(), log_t }
    }

    /// log |c_ij t^{h_ij}| for each entry.
    pub fn log_coefficients(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(|e| ln_abs(&e.coeff) + e.height * self.log_t).collect()).collect()
    }

    pub fn sparse(&self) -> SparseSystem {
        let dim = self.points.first().map_or(0, |p| p.len());
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| LogTerm {
                        exp: self.points[e.col].clone(),
                        negative: e.coeff.is_negative(),
                        log_abs: ln_abs(&e.coeff) + e.height * self.log_t,
                    })
                    .collect()
            })
            .collect();
        SparseSystem { dim, rows }
    }
}

/// The system with coefficients c_ij t^{h_j}.
pub fn deformed_system(
    cfg: &PointConfiguration,
    c: &CoefficientMatrix,
    h: &[f64],
    t: f64,
) -> Result<DeformedSystem, WitnessError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(WitnessError::BadT(t));
    }
    if h.len() != cfg.len() {
        return Err(WitnessError::HeightLength { got: h.len(), want: cfg.len() });
    }
    let m = c.matrix();
    let rows = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .filter(|&j| !m.get(i, j).is_zero())
                .map(|j| DeformedEntry { col: j, coeff: m.get(i, j).clone(), height: h[j] })
                .collect()
        })
        .collect();
    Ok(DeformedSystem { points: cfg.points().to_vec(), rows, log_t: libm::log(t) })
}

/// Mixed deformation: `h` is indexed by Cayley points, `cols[i][j]` is the
/// original column of point j of block i.
pub fn mixed_deformed_system(
    cay: &CayleyConfiguration,
    coeffs: &MixedCoefficients,
    cols: &[Vec<usize>],
    points: &[Vec<i64>],
    h: &[f64],
    t: f64,
) -> Result<DeformedSystem, WitnessError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(WitnessError::BadT(t));
    }
    if h.len() != cay.len() {
        return Err(WitnessError::HeightLength { got: h.len(), want: cay.len() });
    }
    let rows = coeffs
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, c)| DeformedEntry { col: cols[i][j], coeff: c.clone(), height: h[cay.global_index(i, j)] })
                .collect()
        })
        .collect();
    Ok(DeformedSystem { points: points.to_vec(), rows, log_t: libm::log(t) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub residual_tol: f64,
    /// Relative to max(1, |u|_inf).
    pub step_tol: f64,
    /// Cap on |step|_inf in log coordinates.
    pub max_step: f64,
    /// Required sigma_min / sigma_max.
    pub conditioning: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iterations: 200, residual_tol: 1e-10, step_tol: 1e-14, max_step: 5.0, conditioning: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedRoot {
    pub x: Vec<f64>,
    pub log_x: Vec<f64>,
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub iterations: usize,
    pub seed_index: usize,
    /// Decorated simplex whose restricted solution seeded this root.
    pub basin: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NewtonFailureKind {
    NonFiniteSeed,
    SingularJacobian,
    Diverged,
    Stalled,
    IterationCap,
    Degenerate { sigma_min: f64, sigma_max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonFailure {
    pub kind: NewtonFailureKind,
    pub iterations: usize,
    /// Residual after each iteration.
    pub trace: Vec<f64>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(libm::fabs(*x)))
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| r.iter().copied().chain([bi]).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| libm::fabs(m[i][col]).total_cmp(&libm::fabs(m[j][col])))?;
        if m[piv][col] == 0.0 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Singular values, descending, by one-sided Jacobi rotations.
pub fn singular_values(a: &[Vec<f64>]) -> Vec<f64> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    // work on columns of the taller orientation
    let mut u: Vec<Vec<f64>> = if rows >= cols {
        (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
    } else {
        a.to_vec()
    };
    let k = u.len();
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                let beta: f64 = u[q].iter().map(|x| x * x).sum();
                let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || libm::fabs(gamma) <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (left, right) = u.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = u.iter().map(|col| libm::sqrt(col.iter().map(|x| x * x).sum())).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Damped Newton on the row-normalized system in u = log x.
pub fn newton_solve_log(
    sys: &SparseSystem,
    u0: &[f64],
    opts: &NewtonOptions,
) -> Result<CertifiedRoot, NewtonFailure> {
    let fail = |kind, iterations, trace| Err(NewtonFailure { kind, iterations, trace });
    if u0.len() != sys.dim || u0.iter().any(|v| !v.is_finite()) {
        return fail(NewtonFailureKind::NonFiniteSeed, 0, Vec::new());
    }
    let mut u = u0.to_vec();
    let mut trace = Vec::new();
    let mut prev_below = false;
    for it in 0..opts.max_iterations {
        let ev = sys.evaluate(&u);
        let r = inf_norm(&ev.values);
        trace.push(r);
        let below = r < opts.residual_tol;
        let neg: Vec<f64> = ev.values.iter().map(|v| -v).collect();
        let Some(mut step) = solve_dense(&ev.jacobian, &neg) else {
            return fail(NewtonFailureKind::SingularJacobian, it, trace);
        };
        let sn = inf_norm(&step);
        if below && sn <= opts.step_tol * inf_norm(&u).max(1.0) {
            return certify(sys, u, it, opts, trace);
        }
        if sn > opts.max_step {
            step.iter_mut().for_each(|s| *s *= opts.max_step / sn);
        }
        let merit0: f64 = ev.values.iter().map(|v| v * v).sum();
        let mut lambda = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let g = sys.values_with_scale(&trial, &ev.log_scale);
            let merit: f64 = g.iter().map(|v| v * v).sum();
            if merit.is_finite() && merit <= (1.0 - 1e-4 * lambda) * merit0 {
                break Some(trial);
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                break None;
            }
        };
        match accepted {
            Some(next) => {
                // at the noise floor the residual no longer drops; two
                // consecutive iterates below tolerance count as converged
                if below && prev_below {
                    return certify(sys, u, it, opts, trace);
                }
                u = next;
            }
            None if below => return certify(sys, u, it, opts, trace),
            None => return fail(NewtonFailureKind::Stalled, it, trace),
        }
        prev_below = below;
        if inf_norm(&u) > 700.0 {
            return fail(NewtonFailureKind::Diverged, it + 1, trace);
        }
    }
    let r = sys.relative_residual(&u);
    if r < opts.residual_tol {
        return certify(sys, u, opts.max_iterations, opts, trace);
    }
    fail(NewtonFailureKind::IterationCap, opts.max_iterations, trace)
}

fn certify(
    sys: &SparseSystem,
    u: Vec<f64>,
    iterations: usize,
    opts: &NewtonOptions,
    trace: Vec<f64>,
) -> Result<CertifiedRoot, NewtonFailure> {
    let ev = sys.evaluate(&u);
    let residual = inf_norm(&ev.values);
    let sv = singular_values(&ev.jacobian);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    if !(sigma_min > opts.conditioning * sigma_max) || sv.len() < sys.dim {
        return Err(NewtonFailure { kind: NewtonFailureKind::Degenerate { sigma_min, sigma_max }, iterations, trace });
    }
    Ok(CertifiedRoot {
        x: u.iter().map(|&v| libm::exp(v)).collect(),
        log_x: u,
        residual,
        sigma_min,
        sigma_max,
        iterations,
        seed_index: 0,
        basin: None,
    })
}

/// [`newton_solve_log`] from a positive seed.
pub fn newton_solve(sys: &SparseSystem, seed: &[f64], opts: &NewtonOptions) -> Result<CertifiedRoot, NewtonFailure> {
    if seed.iter().any(|&v| !(v > 0.0)) {
        return Err(NewtonFailure { kind: NewtonFailureKind::NonFiniteSeed, iterations: 0, trace: Vec::new() });
    }
    let u: Vec<f64> = seed.iter().map(|&v| libm::log(v)).collect();
    newton_solve_log(sys, &u, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub log_x: Vec<f64>,
    pub basin: Option<usize>,
}

/// per_axis^d points spaced evenly in log over [lo, hi]^d, optionally
/// jittered by up to half a spacing.
pub fn lattice_seeds(d: usize, per_axis: usize, lo: f64, hi: f64, jitter: Option<u64>) -> Vec<Seed> {
    let (a, b) = (libm::log(lo), libm::log(hi));
    let axis: Vec<f64> = if per_axis <= 1 {
        vec![(a + b) / 2.0]
    } else {
        (0..per_axis).map(|i| a + (b - a) * i as f64 / (per_axis - 1) as f64).collect()
    };
    let spacing = if per_axis > 1 { (b - a) / (per_axis - 1) as f64 } else { 0.0 };
    let mut rng = jitter.map(ChaCha8Rng::seed_from_u64);
    let total = per_axis.max(1).pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut u = Vec::with_capacity(d);
            for _ in 0..d {
                u.push(axis[idx % axis.len()]);
                idx /= axis.len();
            }
            if let Some(r) = rng.as_mut() {
                for v in u.iter_mut() {
                    *v += spacing * r.gen_range(-0.5..0.5);
                }
            }
            Seed { log_x: u, basin: None }
        })
        .collect()
}

/// Runs independent per-seed jobs; implementations may parallelize but must
/// return results in job order.
pub trait SeedExecutor: Sync {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> Option<CertifiedRoot> + Sync)) -> Vec<Option<CertifiedRoot>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl SeedExecutor for Sequential {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> Option<CertifiedRoot> + Sync)) -> Vec<Option<CertifiedRoot>> {
        (0..jobs).map(job).collect()
    }
}

pub const DEDUP_DISTANCE: f64 = 1e-6;

fn log_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max(libm::fabs(x - y)))
}

/// Newton from every seed; distinct roots in seed order, earlier seeds
/// winning ties.
pub fn count_positive_roots(
    sys: &SparseSystem,
    seeds: &[Seed],
    opts: &NewtonOptions,
    exec: &dyn SeedExecutor,
) -> Vec<CertifiedRoot> {
    let job = |i: usize| {
        newton_solve_log(sys, &seeds[i].log_x, opts).ok().map(|mut r| {
            r.seed_index = i;
            r.basin = seeds[i].basin;
            r
        })
    };
    let mut out: Vec<CertifiedRoot> = Vec::new();
    for r in exec.run(seeds.len(), &job).into_iter().flatten() {
        if !out.iter().any(|o| log_distance(&o.log_x, &r.log_x) < DEDUP_DISTANCE) {
            out.push(r);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionReport {
    /// Log-coordinate box examined.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: usize,
    pub excluded: usize,
    /// Minimal cells that could not be excluded but from whose center Newton
    /// reaches a certified root.
    pub near_roots: usize,
    /// Minimal cells where neither test decides.
    pub unresolved: usize,
    /// Certified roots reached from cells that the seeds had missed.
    pub missed_roots: Vec<CertifiedRoot>,
    /// The first few unresolved cells as (lower, upper).
    pub unresolved_cells: Vec<(Vec<f64>, Vec<f64>)>,
    /// False when the cell budget ran out.
    pub complete: bool,
}

impl ExclusionReport {
    pub fn consistent(&self) -> bool {
        self.complete && self.unresolved == 0 && self.missed_roots.is_empty()
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + libm::log(v.iter().map(|x| libm::exp(x - m)).sum::<f64>())
}

/// True when some polynomial has constant sign on the box [lo, hi].
fn excludes(sys: &SparseSystem, lo: &[f64], hi: &[f64]) -> bool {
    sys.rows.iter().any(|row| {
        let (mut pmin, mut pmax, mut nmin, mut nmax) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for t in row {
            let (mut zmin, mut zmax) = (t.log_abs, t.log_abs);
            for ((&a, &l), &h) in t.exp.iter().zip(lo).zip(hi) {
                let (p, q) = (a as f64 * l, a as f64 * h);
                zmin += p.min(q);
                zmax += p.max(q);
            }
            if t.negative {
                nmin.push(zmin);
                nmax.push(zmax);
            } else {
                pmin.push(zmin);
                pmax.push(zmax);
            }
        }
        let (pl, ph, nl, nh) = (log_sum_exp(&pmin), log_sum_exp(&pmax), log_sum_exp(&nmin), log_sum_exp(&nmax));
        pl > nh || nl > ph
    })
}

/// Adaptive bisection of a log box, discarding cells where one polynomial
/// has constant sign. Cells narrower than `min_width` that survive are
/// classified by running Newton from their center.
pub fn exclusion_check(
    sys: &SparseSystem,
    roots: &[CertifiedRoot],
    lower: &[f64],
    upper: &[f64],
    min_width: f64,
    max_cells: usize,
    opts: &NewtonOptions,
) -> ExclusionReport {
    let mut rep = ExclusionReport {
        lower: lower.to_vec(),
        upper: upper.to_vec(),
        cells: 0,
        excluded: 0,
        near_roots: 0,
        unresolved: 0,
        unresolved_cells: Vec::new(),
        missed_roots: Vec::new(),
        complete: true,
    };
    let mut stack = vec![(lower.to_vec(), upper.to_vec())];
    while let Some((lo, hi)) = stack.pop() {
        rep.cells += 1;
        if rep.cells > max_cells {
            rep.complete = false;
            break;
        }
        if excludes(sys, &lo, &hi) {
            rep.excluded += 1;
            continue;
        }
        let (k, w) = lo.iter().zip(&hi).map(|(a, b)| b - a).enumerate().fold((0, 0.0), |m, (i, w)| {
            if w > m.1 {
                (i, w)
            } else {
                m
            }
        });
        if w <= min_width {
            let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
            match newton_solve_log(sys, &center, opts) {
                Ok(r) if roots.iter().any(|k| log_distance(&k.log_x, &r.log_x) < DEDUP_DISTANCE) => rep.near_roots += 1,
                Ok(r) => {
                    if !rep.missed_roots.iter().any(|k| log_distance(&k.log_x, &r.log_x) < DEDUP_DISTANCE) {
                        rep.missed_roots.push(r);
                    }
                    rep.near_roots += 1;
                }
                Err(_) => {
                    rep.unresolved += 1;
                    if rep.unresolved_cells.len() < 16 {
                        rep.unresolved_cells.push((lo, hi));
                    }
                }
            }
            continue;
        }
        let mid = (lo[k] + hi[k]) / 2.0;
        let mut hi1 = hi.clone();
        hi1[k] = mid;
        let mut lo2 = lo.clone();
        lo2[k] = mid;
        stack.push((lo2, hi));
        stack.push((lo, hi1));
    }
    rep
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOptions {
    /// Largest k in the schedule t = 2^-k.
    pub budget: u32,
    pub lattice_per_axis: usize,
    pub lattice_lo: f64,
    pub lattice_hi: f64,
    pub jitter_seed: Option<u64>,
    /// Extra schedule steps examined after success (logged only).
    pub monotonicity_checks: u32,
    /// Run the rectangle exclusion test at t* when d = 2.
    pub exclusion: bool,
    pub newton: NewtonOptions,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            budget: 60,
            lattice_per_axis: 5,
            lattice_lo: 1e-6,
            lattice_hi: 1e6,
            jitter_seed: None,
            monotonicity_checks: 2,
            exclusion: true,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessStatus {
    Success,
    /// Budget ended without enough roots; says nothing about nonexistence.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchStep {
    pub k: u32,
    pub log_t: f64,
    pub seeds: usize,
    pub roots: usize,
    /// Seeds from decorated subsystems that failed to produce a seed point.
    pub seed_failures: usize,
    /// Step examined after success, for the monotonicity log.
    pub after_success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    /// Family members as point indices of the (unmixed or Cayley) configuration.
    pub family: Vec<Vec<usize>>,
    pub cone: ConeDescription,
    pub height: Vec<f64>,
    pub p: usize,
    pub status: WitnessStatus,
    pub k_star: Option<u32>,
    pub log_t_star: Option<f64>,
    /// log gamma_j = h_j log t*, indexed like `height`.
    pub log_gamma: Option<Vec<f64>>,
    pub roots: Vec<CertifiedRoot>,
    pub log: Vec<SearchStep>,
    pub exclusion: Option<ExclusionReport>,
}

impl WitnessReport {
    pub fn t_star(&self) -> Option<f64> {
        self.k_star.map(|k| libm::ldexp(1.0, -(k as i32)))
    }

    /// Whether every step after success also reached p roots.
    pub fn monotone(&self) -> bool {
        self.log.iter().filter(|s| s.after_success).all(|s| s.roots >= self.p)
    }
}

/// Height scaled so that every cone inequality has slack at least one in
/// units of the constrained point's height.
pub fn normalized_height(cone: &ConeDescription, h: &[Q]) -> Result<Vec<f64>, WitnessError> {
    let mut min_gap: Option<Q> = None;
    for (r, (m, &(_, i))) in cone.normals.iter().zip(&cone.tags).enumerate() {
        let v = m.iter().zip(h).fold(Q::zero(), |a, (x, y)| a + x * y);
        if !v.is_positive() {
            return Err(WitnessError::HeightOutsideCone(r));
        }
        let gap = v / &m[i];
        if min_gap.as_ref().map_or(true, |g| &gap < g) {
            min_gap = Some(gap);
        }
    }
    Ok(match min_gap {
        Some(g) => h.iter().map(|x| q_to_f64(&(x / &g))).collect(),
        None => h.iter().map(q_to_f64).collect(),
    })
}

fn check_height(cone: &ConeDescription, h: &[f64]) -> Result<(), WitnessError> {
    for (r, m) in cone.normals.iter().enumerate() {
        let v: f64 = m.iter().zip(h).map(|(a, b)| q_to_f64(a) * b).sum();
        if !(v > 0.0) {
            return Err(WitnessError::HeightOutsideCone(r));
        }
    }
    Ok(())
}

fn search<F>(
    base: &DeformedSystem,
    p: usize,
    decorated_seeds: F,
    opts: &WitnessOptions,
    exec: &dyn SeedExecutor,
) -> (WitnessStatus, Option<(u32, f64)>, Vec<CertifiedRoot>, Vec<SearchStep>, Option<ExclusionReport>)
where
    F: Fn(f64) -> (Vec<Seed>, usize),
{
    let d = base.points.first().map_or(0, |p| p.len());
    let lattice = lattice_seeds(d, opts.lattice_per_axis, opts.lattice_lo, opts.lattice_hi, opts.jitter_seed);
    let mut log = Vec::new();
    let mut found: Option<(u32, f64, Vec<CertifiedRoot>, SparseSystem)> = None;
    let mut extra = 0;
    for k in 1..=opts.budget {
        if found.is_some() && extra >= opts.monotonicity_checks {
            break;
        }
        let log_t = -(k as f64) * core::f64::consts::LN_2;
        let sys = base.at_log_t(log_t).sparse();
        let (mut seeds, seed_failures) = decorated_seeds(log_t);
        seeds.extend(lattice.iter().cloned());
        let roots = count_positive_roots(&sys, &seeds, &opts.newton, exec);
        log.push(SearchStep {
            k,
            log_t,
            seeds: seeds.len(),
            roots: roots.len(),
            seed_failures,
            after_success: found.is_some(),
        });
        if found.is_some() {
            extra += 1;
        } else if roots.len() >= p {
            found = Some((k, log_t, roots, sys));
        }
    }
    match found {
        None => (WitnessStatus::Exhausted, None, Vec::new(), log, None),
        Some((k, log_t, roots, sys)) => {
            let exclusion = (opts.exclusion && d == 2).then(|| {
                let mut lo = vec![libm::log(opts.lattice_lo); d];
                let mut hi = vec![libm::log(opts.lattice_hi); d];
                for r in &roots {
                    for i in 0..d {
                        lo[i] = lo[i].min(r.log_x[i] - 2.0);
                        hi[i] = hi[i].max(r.log_x[i] + 2.0);
                    }
                }
                exclusion_check(&sys, &roots, &lo, &hi, 1.0 / 64.0, 400_000, &opts.newton)
            });
            (WitnessStatus::Success, Some((k, log_t)), roots, log, exclusion)
        }
    }
}

/// Decreasing-t search for p = |family| roots of sum_j c_ij t^{h_j} x^{a_j}.
pub fn witness_search(
    cfg: &PointConfiguration,
    c: &CoefficientMatrix,
    family: &[Simplex],
    cone: &ConeDescription,
    h: &[f64],
    opts: &WitnessOptions,
    exec: &dyn SeedExecutor,
) -> Result<WitnessReport, WitnessError> {
    if c.rows() != cfg.dim() {
        return Err(WitnessError::NotSquare { rows: c.rows(), dim: cfg.dim() });
    }
    if h.len() != cfg.len() {
        return Err(WitnessError::HeightLength { got: h.len(), want: cfg.len() });
    }
    check_height(cone, h)?;
    let base = deformed_system(cfg, c, h, 1.0)?;
    let seeds = |log_t: f64| {
        let scale: Vec<f64> = h.iter().map(|x| x * log_t).collect();
        let mut out = Vec::new();
        let mut failures = 0;
        for (b, s) in family.iter().enumerate() {
            match restricted_positive_solution(cfg, c, s, Some(&scale)) {
                Ok(u) => out.push(Seed { log_x: u, basin: Some(b) }),
                Err(_) => failures += 1,
            }
        }
        (out, failures)
    };
    let (status, star, roots, log, exclusion) = search(&base, family.len(), seeds, opts, exec);
    Ok(WitnessReport {
        family: family.iter().map(|s| s.indices().to_vec()).collect(),
        cone: cone.clone(),
        height: h.to_vec(),
        p: family.len(),
        status,
        k_star: star.map(|s| s.0),
        log_t_star: star.map(|s| s.1),
        log_gamma: star.map(|(_, lt)| h.iter().map(|x| x * lt).collect()),
        roots,
        log,
        exclusion,
    })
}

/// Mixed-route search: heights live on Cayley points and seeds come from the
/// binomial systems of mixed decorated simplices.
#[allow(clippy::too_many_arguments)]
pub fn mixed_witness_search(
    cay: &CayleyConfiguration,
    coeffs: &MixedCoefficients,
    cols: &[Vec<usize>],
    points: &[Vec<i64>],
    family: &[MixedSimplex],
    cone: &ConeDescription,
    h: &[f64],
    opts: &WitnessOptions,
    exec: &dyn SeedExecutor,
) -> Result<WitnessReport, WitnessError> {
    if h.len() != cay.len() {
        return Err(WitnessError::HeightLength { got: h.len(), want: cay.len() });
    }
    check_height(cone, h)?;
    let base = mixed_deformed_system(cay, coeffs, cols, points, h, 1.0)?;
    let seeds = |log_t: f64| {
        let mut out = Vec::new();
        let mut failures = 0;
        for (b, ms) in family.iter().enumerate() {
            let m = ms.exponent_matrix(cay);
            let lb: Vec<f64> = ms
                .pairs
                .iter()
                .enumerate()
                .map(|(i, &(j1, j2))| {
                    let (c1, c2) = (&coeffs.rows[i][j1], &coeffs.rows[i][j2]);
                    let (h1, h2) = (h[cay.global_index(i, j1)], h[cay.global_index(i, j2)]);
                    ln_abs(c2) - ln_abs(c1) + (h2 - h1) * log_t
                })
                .collect();
            match solve_binomial_log(&m, &lb) {
                Ok(u) => out.push(Seed { log_x: u, basin: Some(b) }),
                Err(_) => failures += 1,
            }
        }
        (out, failures)
    };
    let (status, star, roots, log, exclusion) = search(&base, family.len(), seeds, opts, exec);
    let family_idx = family
        .iter()
        .map(|ms| ms.pairs.iter().enumerate().flat_map(|(i, &(a, b))| [cay.global_index(i, a), cay.global_index(i, b)]).collect())
        .collect();
    Ok(WitnessReport {
        family: family_idx,
        cone: cone.clone(),
        height: h.to_vec(),
        p: family.len(),
        status,
        k_star: star.map(|s| s.0),
        log_t_star: star.map(|s| s.1),
        log_gamma: star.map(|(_, lt)| h.iter().map(|x| x * lt).collect()),
        roots,
        log,
        exclusion,
    })
}

/// A certified root carried back to the network at the rescaled rates.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Chosen variables y = x / alpha.
    pub chosen: Vec<f64>,
    /// All species concentrations from the parametrization at kappa-bar.
    pub concentrations: Vec<f64>,
    pub mass_action_residual: f64,
    /// Max relative deviation of the block laws from their totals.
    pub conservation_residual: f64,
    /// Newton on the kappa-bar system reproduced this point.
    pub recertified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    Unmixed,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkWitness {
    pub route: Route,
    pub region: RegionSystem,
    pub decorated: DecoratedFamily,
    /// Mixed route: decorated mixed simplices as Cayley point indices.
    pub mixed_decorated: Vec<Vec<usize>>,
    pub report: WitnessReport,
    pub rescale: Option<RescaleOutcome>,
    /// Why no kappa-bar was produced, when it was not.
    pub rescale_note: Option<String>,
    /// Reactions whose rate changed.
    pub changed_rates: Vec<usize>,
    pub steady_states: Vec<SteadyState>,
}

impl NetworkWitness {
    /// Success, kappa-bar produced and every root re-validated.
    pub fn validated(&self) -> bool {
        self.report.status == WitnessStatus::Success
            && self.rescale.is_some()
            && self.steady_states.len() == self.report.roots.len()
            && self.steady_states.iter().all(|s| s.mass_action_residual < 1e-8 && s.conservation_residual < 1e-8 && s.recertified)
    }
}

pub const REVALIDATION_TOL: f64 = 1e-8;

/// Map roots to the network at kappa-bar and check them there.
fn revalidate(
    model: &MessiModel,
    totals: &[Q],
    rescale: &RescaleOutcome,
    roots: &[CertifiedRoot],
    opts: &NewtonOptions,
) -> Result<Vec<SteadyState>, WitnessError> {
    let kbar_q: Vec<Q> = rescale
        .kappa_bar
        .iter()
        .map(|&v| q_from_f64(v).ok_or_else(|| CrnError::Postcondition(format!("rate {v} is not finite"))))
        .collect::<Result<_, _>>()?;
    let (param, region) = model.region_system(&kbar_q, totals)?;
    let sys = SparseSystem::from_rational(region.exponents(), &region.coefficients.matrix().to_rows());
    let mut out = Vec::new();
    for r in roots {
        let log_y: Vec<f64> = r.log_x.iter().zip(&rescale.log_alpha[1..]).map(|(x, a)| x - a).collect();
        let y: Vec<f64> = log_y.iter().map(|&v| libm::exp(v)).collect();
        let conc = param.eval_f64(&y);
        let mass_action_residual = inf_norm(&mass_action_residual_f64(&model.network, &rescale.kappa_bar, &conc));
        let mut conservation_residual = 0.0f64;
        for (b, law) in model.laws.iter().enumerate() {
            let (mut v, mut s) = (0.0, 0.0);
            for (c, x) in law.iter().zip(&conc) {
                let t = q_to_f64(c) * x;
                v += t;
                s += libm::fabs(t);
            }
            let tb = q_to_f64(&totals[b]);
            conservation_residual = conservation_residual.max(libm::fabs(v - tb) / s.max(libm::fabs(tb)));
        }
        let recertified = newton_solve_log(&sys, &log_y, opts)
            .map(|rr| log_distance(&rr.log_x, &log_y) < DEDUP_DISTANCE)
            .unwrap_or(false);
        out.push(SteadyState { chosen: y, concentrations: conc, mass_action_residual, conservation_residual, recertified });
    }
    Ok(out)
}

fn changed_rates(kappa: &[Q], kbar: &[f64]) -> Vec<usize> {
    kappa
        .iter()
        .zip(kbar)
        .enumerate()
        .filter(|(_, (k, b))| {
            let k = q_to_f64(k);
            libm::fabs(k - *b) > 1e-12 * libm::fabs(k)
        })
        .map(|(i, _)| i)
        .collect()
}

fn finish(
    model: &MessiModel,
    kappa: &[Q],
    totals: &[Q],
    region: &RegionSystem,
    log_gamma_cols: Result<Vec<f64>, String>,
    report: &WitnessReport,
    newton: &NewtonOptions,
) -> Result<(Option<RescaleOutcome>, Option<String>, Vec<usize>, Vec<SteadyState>), WitnessError> {
    if report.status != WitnessStatus::Success {
        return Ok((None, None, Vec::new(), Vec::new()));
    }
    let lg = match log_gamma_cols {
        Ok(lg) => lg,
        Err(note) => return Ok((None, Some(note), Vec::new(), Vec::new())),
    };
    let rescale = match model.rescale_back(kappa, totals, region, &lg) {
        Ok(r) => r,
        Err(e) => return Ok((None, Some(format!("{e}")), Vec::new(), Vec::new())),
    };
    let states = revalidate(model, totals, &rescale, &report.roots, newton)?;
    let changed = changed_rates(kappa, &rescale.kappa_bar);
    Ok((Some(rescale), None, changed, states))
}

/// Full unmixed pipeline: region system, decorated family, search, rescale,
/// revalidation. `totals` are indexed by block.
pub fn certify_multistationarity(
    model: &MessiModel,
    kappa: &[Q],
    totals: &[Q],
    opts: &WitnessOptions,
    exec: &dyn SeedExecutor,
) -> Result<NetworkWitness, WitnessError> {
    let (_, region) = model.region_system(kappa, totals)?;
    let decorated = find_decorated(&region.config, &region.coefficients);
    let best = decorated.best().ok_or(WitnessError::NoDecorated)?.clone();
    let h = normalized_height(&best.cone, &best.height)?;
    let report = witness_search(&region.config, &region.coefficients, &best.simplices, &best.cone, &h, opts, exec)?;
    let lg = report.log_gamma.clone().ok_or_else(String::new);
    let (rescale, rescale_note, changed_rates, steady_states) =
        finish(model, kappa, totals, &region, lg, &report, &opts.newton)?;
    Ok(NetworkWitness {
        route: Route::Unmixed,
        region,
        decorated,
        mixed_decorated: Vec::new(),
        report,
        rescale,
        rescale_note,
        changed_rates,
        steady_states,
    })
}

/// Column scaling equivalent to a mixed gamma, when gamma_ij = r_i g_j.
pub fn factor_mixed_gamma(
    region: &RegionSystem,
    cay: &CayleyConfiguration,
    cols: &[Vec<usize>],
    log_gamma: &[f64],
) -> Result<Vec<f64>, String> {
    let n = region.exponents().len();
    let mut g: Vec<Option<f64>> = vec![None; n];
    for (i, row) in cols.iter().enumerate() {
        let Some(kc) = row.iter().position(|&j| j == region.const_col) else {
            return Err(format!("row {} has no constant term", i + 1));
        };
        let r = log_gamma[cay.global_index(i, kc)];
        for (k, &j) in row.iter().enumerate() {
            let v = log_gamma[cay.global_index(i, k)] - r;
            match g[j] {
                None => g[j] = Some(v),
                Some(w) if libm::fabs(w - v) <= 1e-9 * w.abs().max(v.abs()).max(1.0) => {}
                Some(_) => {
                    return Err(format!("mixed heights do not factor into row and column scalings at column {}", j + 1));
                }
            }
        }
    }
    Ok(g.into_iter().map(|v| v.unwrap_or(0.0)).collect())
}

/// Mixed pipeline on the Cayley configuration of the region system.
pub fn certify_mixed(
    model: &MessiModel,
    kappa: &[Q],
    totals: &[Q],
    opts: &WitnessOptions,
    exec: &dyn SeedExecutor,
) -> Result<NetworkWitness, WitnessError> {
    let (_, region) = model.region_system(kappa, totals)?;
    let decorated = find_decorated(&region.config, &region.coefficients);
    let (cay, coeffs, cols) = from_unmixed(&region.config, &region.coefficients)
        .map_err(|e| CrnError::Hypothesis(format!("{e}")))?;
    let (dec, best, cone) = find_mixed_decorated(&cay, &coeffs);
    let to_idx = |ms: &MixedSimplex| -> Vec<usize> {
        ms.pairs.iter().enumerate().flat_map(|(i, &(a, b))| [cay.global_index(i, a), cay.global_index(i, b)]).collect()
    };
    let mixed_decorated = dec.iter().map(to_idx).collect();
    let (cone, hq) = cone.ok_or(WitnessError::NoDecorated)?;
    let h = normalized_height(&cone, &hq)?;
    let report = mixed_witness_search(&cay, &coeffs, &cols, region.exponents(), &best, &cone, &h, opts, exec)?;
    let lg = report
        .log_gamma
        .as_ref()
        .ok_or_else(String::new)
        .and_then(|lg| factor_mixed_gamma(&region, &cay, &cols, lg));
    let (rescale, rescale_note, changed_rates, steady_states) =
        finish(model, kappa, totals, &region, lg, &report, &opts.newton)?;
    Ok(NetworkWitness {
        route: Route::Mixed,
        region,
        decorated,
        mixed_decorated,
        report,
        rescale,
        rescale_note,
        changed_rates,
        steady_states,
    })
}
