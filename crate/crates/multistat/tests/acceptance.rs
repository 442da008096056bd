//! End-to-end acceptance checks. Runs without the test harness and prints
//! one PASS/FAIL line per criterion.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use multistat_core::cayley::{from_unmixed, mixed_joint_cone, solve_binomial, MixedSimplex};
use multistat_core::crn::builtins::{hybrid_hk_network, michaelis_menten, mixed_phospho_network, phospho_network};
use multistat_core::crn::messi::{hat_graph, intermediate_coefficients, MessiStructure};
use multistat_core::crn::model::MessiModel;
use multistat_core::crn::parse::NetworkFile;
use multistat_core::crn::trees::{enumerated_tree_sum, matrix_tree};
use multistat_core::crn::mass_action_residual_f64;
use multistat_core::decoration::{
    find_decorated, is_decorated, positively_spanning, positively_spanning_by_kernel, restricted_positive_solution,
    CoefficientMatrix,
};
use multistat_core::geometry::{is_regular, regular_subdivision, shares_facet, PointConfiguration, Simplex};
use multistat_core::linalg::{q, q_from_f64, q_to_f64, qr, RationalMatrix, Q};
use multistat_core::lp::{feasible_with_weak, gordan_certificate, strict_feasible, Feasibility, StrictInequalitySystem};
use multistat_core::witness::{certify_multistationarity, phi_map_log, Sequential, WitnessOptions, WitnessStatus};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn totals(f: &NetworkFile) -> Vec<Q> {
    f.totals.as_ref().expect("totals").iter().map(|(_, v)| v.clone()).collect()
}

fn ratio(a: i64, b: i64) -> Q {
    qr(a, b)
}

fn column_of(cfg: &PointConfiguration, p: &[i64]) -> Result<usize, String> {
    cfg.points().iter().position(|x| x == p).ok_or_else(|| format!("no column with exponent {p:?}"))
}

fn simplex_of(cfg: &PointConfiguration, pts: &[&[i64]]) -> Result<Simplex, String> {
    let idx = pts.iter().map(|p| column_of(cfg, p)).collect::<Result<Vec<_>, _>>()?;
    Simplex::new(cfg, idx).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- criterion 1

fn criterion_1() -> Check {
    let out = std::env::temp_dir().join(format!("multistat-acceptance-{}.json", std::process::id()));
    let status = Command::new(env!("CARGO_BIN_EXE_multistat"))
        .args(["witness", "--builtin", "hk", "--k", "1,1,2,1,1,1", "--T", "7/4,1", "--quiet", "--out"])
        .arg(&out)
        .status()
        .map_err(|e| e.to_string())?;
    ensure!(status.code() == Some(0), "witness exited with {status}");
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&out);
    let report: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let w = &report["witness"];

    // the interval k6(1/k2+1/k3) < T1/T2 < k6(1/k1+1/k2) at these rates is (3/2, 2)
    let (k1, k2, k3, k6) = (q(1), q(1), q(2), q(1));
    let lo = &k6 * (q(1) / &k2 + q(1) / &k3);
    let hi = &k6 * (q(1) / &k1 + q(1) / &k2);
    let r = ratio(7, 4);
    ensure!(lo == ratio(3, 2) && hi == q(2) && lo < r && r < hi, "T1/T2 outside the interval");

    // (a) the family is the three simplices of the triangulation with h = (h1, h2, 0, 0, 0)
    let points: Vec<Vec<i64>> = serde_json::from_value(report["system"]["exponents"].clone()).map_err(|e| e.to_string())?;
    let cfg = PointConfiguration::new(points.clone()).map_err(|e| e.to_string())?;
    let want = [
        simplex_of(&cfg, &[&[1, 0], &[1, 1], &[0, 0]])?,
        simplex_of(&cfg, &[&[1, 1], &[1, 2], &[0, 0]])?,
        simplex_of(&cfg, &[&[0, 1], &[1, 2], &[0, 0]])?,
    ];
    let mut want_idx: Vec<Vec<usize>> = want.iter().map(|s| s.indices().to_vec()).collect();
    want_idx.sort();
    let mut family: Vec<Vec<usize>> = serde_json::from_value(w["family"].clone()).map_err(|e| e.to_string())?;
    family.sort();
    ensure!(family == want_idx, "family {family:?}, expected {want_idx:?}");
    let hk = hybrid_hk_network();
    let model = MessiModel::from_file(&hk).map_err(|e| e.to_string())?;
    let kappa = vec![q(1), q(1), q(2), q(1), q(1), q(1)];
    let (_, region) = model.region_system(&kappa, &[ratio(7, 4), q(1)]).map_err(|e| e.to_string())?;
    let hk_tri = regular_subdivision(&region.config, &[q(1), q(1), q(0), q(0), q(0)]);
    let mut dec_cells: Vec<Vec<usize>> = hk_tri
        .cells
        .iter()
        .filter_map(|c| Simplex::new(&region.config, c.clone()).ok())
        .filter(|s| is_decorated(&region.coefficients, s))
        .map(|s| s.indices().to_vec())
        .collect();
    dec_cells.sort();
    ensure!(dec_cells == want_idx, "decorated cells of the triangulation: {dec_cells:?}");

    // (b) at least three distinct certified roots at a schedule point
    ensure!(w["status"] == "success", "status {}", w["status"]);
    let k_star = w["k_star"].as_u64().ok_or("no k_star")?;
    let t_star = w["t_star"].as_f64().ok_or("no t_star")?;
    ensure!(t_star == (0.5f64).powi(k_star as i32), "t* = {t_star} is not 2^-{k_star}");
    let roots = w["roots"].as_array().ok_or("no roots")?;
    ensure!(roots.len() >= 3, "{} roots", roots.len());
    let mut xs: Vec<Vec<f64>> = Vec::new();
    for r in roots {
        let res = r["residual"].as_f64().ok_or("residual")?;
        let (smin, smax) = (r["sigma_min"].as_f64().ok_or("sigma")?, r["sigma_max"].as_f64().ok_or("sigma")?);
        ensure!(res < 1e-10, "residual {res:e}");
        ensure!(smin > 1e-8 * smax, "singular Jacobian {smin:e}/{smax:e}");
        let x: Vec<f64> = serde_json::from_value(r["x"].clone()).map_err(|e| e.to_string())?;
        ensure!(x.iter().all(|&v| v > 0.0), "root {x:?} not positive");
        for y in &xs {
            let dist = x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((a.ln() - b.ln()).abs()));
            ensure!(dist > 1e-6, "duplicate roots {x:?} {y:?}");
        }
        xs.push(x);
    }

    // (c) only k4 and k5 change
    let changed: Vec<String> = serde_json::from_value(w["changed_rates"].clone()).map_err(|e| e.to_string())?;
    ensure!(changed == ["k4", "k5"], "changed rates {changed:?}");
    let kbar: Vec<f64> = serde_json::from_value(w["kappa_bar"].clone()).map_err(|e| e.to_string())?;
    for i in [0usize, 1, 2, 5] {
        ensure!(kbar[i] == q_to_f64(&kappa[i]), "k{} changed to {}", i + 1, kbar[i]);
    }

    // (d) independent re-check of the steady states at the rescaled rates
    let states = w["steady_states"].as_array().ok_or("no steady states")?;
    ensure!(states.len() >= 3, "{} steady states", states.len());
    ensure!(w["validated"] == true, "report says not validated");
    let net = hk.network.clone();
    let mut worst = 0.0f64;
    for s in states {
        let x: Vec<f64> = serde_json::from_value(s["concentrations"].clone()).map_err(|e| e.to_string())?;
        let ma = mass_action_residual_f64(&net, &kbar, &x).into_iter().fold(0.0, f64::max);
        let c1 = (x[0] + x[1] + x[2] + x[3] - 1.75).abs() / 1.75;
        let c2 = (x[4] + x[5] - 1.0).abs();
        worst = worst.max(ma).max(c1).max(c2);
    }
    ensure!(worst < 1e-8, "re-validation residual {worst:e}");
    Ok(format!("family {family:?}, {} roots at t* = 2^-{k_star}, changed {changed:?}, worst residual {worst:.1e}", roots.len()))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Check {
    let hk = hybrid_hk_network();
    let model = MessiModel::from_file(&hk).map_err(|e| e.to_string())?;
    let kappa = vec![q(1), q(1), q(2), q(1), q(1), q(1)];
    let (t1, t2) = (q(3), q(1));
    let (k1, k2, k6) = (&kappa[0], &kappa[1], &kappa[5]);
    let lhs = &t1 * k1 * k2 - &t2 * k1 * k6 - &t2 * k2 * k6;
    ensure!(lhs >= q(0), "inequality unexpectedly satisfied ({lhs})");
    let (_, region) = model.region_system(&kappa, &[t1, t2]).map_err(|e| e.to_string())?;
    let d3 = simplex_of(&region.config, &[&[0, 1], &[1, 2], &[0, 0]])?;
    ensure!(!is_decorated(&region.coefficients, &d3), "simplex {:?} still decorated", d3.indices());
    let fam = find_decorated(&region.config, &region.coefficients);
    let p = fam.best().map_or(0, |f| f.simplices.len());
    ensure!(p < 3, "best family has p = {p}");
    Ok(format!("T1k1k2 - T2k1k6 - T2k2k6 = {lhs}, {:?} undecorated, best p = {p}", d3.indices()))
}

// ---------------------------------------------------------------- criterion 3

fn phospho_case(n: usize) -> Check {
    let start = Instant::now();
    let f = phospho_network(n).map_err(|e| e.to_string())?;
    let model = MessiModel::from_file(&f).map_err(|e| e.to_string())?;
    let kappa = f.network.rates().map_err(|e| e.to_string())?;
    let tot = totals(&f);
    let names = f.network.rate_names();
    let rate = |name: &str| -> Q { kappa[names.iter().position(|x| x == name).expect("rate")].clone() };
    // S, E, F totals in block order of the generated network
    let (s, e, fr) = (tot[0].clone(), tot[1].clone(), tot[2].clone());
    let lhs = rate("kcat1") / rate("lcat1");
    let bound = core::cmp::max(&fr / (&s - &fr), &fr / &e);
    ensure!(s > fr && lhs > bound, "hypotheses fail: S={s}, F={fr}, kcat1/lcat1={lhs}, bound {bound}");

    let (_, region) = model.region_system(&kappa, &tot).map_err(|e| e.to_string())?;
    let cfg = &region.config;
    let d1 = simplex_of(cfg, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])?;
    let d2 = simplex_of(cfg, &[&[1, 0, 0], &[0, 1, 0], &[1, 2, -1], &[0, 0, 0]])?;
    ensure!(is_decorated(&region.coefficients, &d1), "first simplex not decorated");
    ensure!(is_decorated(&region.coefficients, &d2), "second simplex not decorated");
    ensure!(shares_facet(cfg, &d1, &d2), "the simplices do not share a facet");

    let w = certify_multistationarity(&model, &kappa, &tot, &WitnessOptions::default(), &Sequential)
        .map_err(|e| e.to_string())?;
    ensure!(w.report.status == WitnessStatus::Success, "search exhausted");
    ensure!(w.report.roots.len() >= 2, "{} roots", w.report.roots.len());
    ensure!(w.validated(), "steady states not re-validated");
    ensure!(w.rescale.is_some(), "no rescaled rates: {:?}", w.rescale_note);
    let allowed: Vec<String> = (0..n).flat_map(|i| [format!("kon{i}"), format!("lon{i}")]).collect();
    let changed: Vec<String> = w.changed_rates.iter().map(|&i| names[i].clone()).collect();
    ensure!(changed.iter().all(|c| allowed.contains(c)), "changed rates {changed:?} outside kon/lon");
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 30.0, "n = {n} took {secs:.1}s");
    Ok(format!("n={n}: {} roots, changed {changed:?}, {secs:.2}s", w.report.roots.len()))
}

fn criterion_3() -> Check {
    let a = phospho_case(2)?;
    let b = phospho_case(3)?;
    Ok(format!("{a}; {b}"))
}

// ---------------------------------------------------------------- criterion 4

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// Every strict inequality of `a` holds on the open cone `b`.
fn implies(b: &[Vec<Q>], a: &[Vec<Q>]) -> Result<(), String> {
    let sys = StrictInequalitySystem::homogeneous(b[0].len(), b.to_vec());
    let p = match strict_feasible(&sys) {
        Feasibility::Interior(p) => p,
        Feasibility::Infeasible => return Err("empty cone".into()),
    };
    for (r, m) in a.iter().enumerate() {
        let v: Q = m.iter().zip(&p).map(|(x, y)| x * y).sum();
        ensure!(v > q(0), "interior sample violates normal {r}");
        // b together with <m, h> <= 0 must be empty
        let neg: Vec<Q> = m.iter().map(|x| -x).collect();
        ensure!(!feasible_with_weak(&sys, &[neg]).is_feasible(), "normal {r} is not implied");
    }
    Ok(())
}

fn criterion_4() -> Check {
    let hk = hybrid_hk_network();
    let model = MessiModel::from_file(&hk).map_err(|e| e.to_string())?;
    let kappa = hk.network.rates().map_err(|e| e.to_string())?;
    let (_, region) = model.region_system(&kappa, &totals(&hk)).map_err(|e| e.to_string())?;
    let (cay, _, cols) = from_unmixed(&region.config, &region.coefficients).map_err(|e| e.to_string())?;
    // block order is (1,0) (1,1) (1,2) (0,0) and (0,1) (1,1) (1,2) (0,0)
    let blocks: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 0]],
        vec![vec![0, 1], vec![1, 1], vec![1, 2], vec![0, 0]],
    ];
    ensure!(cay.blocks() == blocks.as_slice(), "unexpected Cayley blocks {:?} (columns {cols:?})", cay.blocks());
    let find = |b: usize, p: [i64; 2]| cay.blocks()[b].iter().position(|x| x == &p).expect("point");
    let pair = |b: usize, u: [i64; 2], v: [i64; 2]| {
        let (i, j) = (find(b, u), find(b, v));
        (i.min(j), i.max(j))
    };
    let ms = |a, b| MixedSimplex { pairs: vec![a, b] };
    let family = [
        ms(pair(0, [0, 0], [1, 2]), pair(1, [0, 0], [0, 1])),
        ms(pair(0, [0, 0], [1, 2]), pair(1, [0, 0], [1, 1])),
        ms(pair(0, [0, 0], [1, 0]), pair(1, [0, 0], [1, 1])),
    ];
    let (cone, feas) = mixed_joint_cone(&cay, &family).map_err(|e| e.to_string())?;
    ensure!(feas.is_feasible(), "computed cone is empty");
    let listed: Vec<Vec<Q>> = [
        [1, 0, -1, 0, 2, 0, 0, -2],
        [0, 1, -1, 0, 1, 0, 0, -1],
        [0, 0, -1, 1, 0, 0, 1, -1],
        [0, 0, -1, 1, 1, 1, 0, -2],
        [1, 0, 1, -2, 0, -2, 0, 2],
        [0, 1, 0, -1, 0, -1, 0, 1],
        [1, 0, 0, -1, 1, -1, 0, 0],
        [1, 0, 0, -1, 0, -2, 1, 1],
    ]
    .iter()
    .map(|r| ints(r))
    .collect();
    implies(&cone.normals, &listed).map_err(|e| format!("computed => listed: {e}"))?;
    implies(&listed, &cone.normals).map_err(|e| format!("listed => computed: {e}"))?;
    Ok(format!("{} computed normals and the 8 listed normals cut out the same open cone", cone.normals.len()))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Check {
    let pinwheel = PointConfiguration::new(vec![vec![0, 0], vec![4, 0], vec![0, 4], vec![1, 1], vec![1, 2], vec![2, 1]])
        .map_err(|e| e.to_string())?;
    let cells: Vec<Simplex> = [[3, 4, 5], [0, 1, 3], [1, 3, 5], [1, 2, 5], [2, 4, 5], [0, 2, 4], [0, 3, 4]]
        .iter()
        .map(|c| Simplex::new(&pinwheel, c.to_vec()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let (regular, _) = is_regular(&pinwheel, &cells);
    ensure!(!regular, "non-regular triangulation reported regular");
    let (cone, _) = multistat_core::geometry::joint_cone(&pinwheel, &cells);
    let cert = gordan_certificate(&cone.normals).ok_or("no infeasibility certificate")?;
    ensure!(cert.iter().all(|l| l >= &q(0)), "certificate has a negative multiplier");

    let hk = PointConfiguration::new(vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2], vec![0, 0]])
        .map_err(|e| e.to_string())?;
    let tri: Vec<Simplex> = [[0, 2, 4], [2, 3, 4], [1, 3, 4]]
        .iter()
        .map(|c| Simplex::new(&hk, c.to_vec()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let (regular, feas) = is_regular(&hk, &tri);
    ensure!(regular, "triangulation reported non-regular");
    let h = feas.point().ok_or("no witness height")?.to_vec();
    let sub = regular_subdivision(&hk, &h);
    let mut want: Vec<Vec<usize>> = tri.iter().map(|s| s.indices().to_vec()).collect();
    want.sort();
    ensure!(sub.cells == want, "witness height induces {:?}", sub.cells);
    let shown: Vec<String> = h.iter().map(|v| v.to_string()).collect();
    Ok(format!("non-regular certified by {} multipliers; regular with height ({})", cert.iter().filter(|l| **l != q(0)).count(), shown.join(", ")))
}

// ---------------------------------------------------------------- criterion 6

fn builtin_files() -> Vec<(String, NetworkFile)> {
    let mut out = vec![
        ("hk".to_string(), hybrid_hk_network()),
        ("mm".to_string(), michaelis_menten()),
        ("mixed-phospho".to_string(), mixed_phospho_network()),
    ];
    for n in 1..=3 {
        out.push((format!("phospho:{n}"), phospho_network(n).expect("phospho")));
    }
    out
}

fn random_rates(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| qr(rng.gen_range(1..40), rng.gen_range(1..12))).collect()
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mm = michaelis_menten();
    let p = mm.partition.clone().ok_or("partition")?;
    let st = MessiStructure::new(&mm.network, &p).map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let k = random_rates(&mut rng, 3);
        let mu = intermediate_coefficients(&st, &mm.network, &k).map_err(|e| e.to_string())?;
        ensure!(mu.len() == 1, "{} intermediates", mu.len());
        let want = &k[0] / (&k[1] + &k[2]);
        ensure!(mu[0].value == want, "mu = {}, expected {want}", mu[0].value);
        let names = mm.network.rate_names();
        let env = |s: &str| names.iter().position(|n| n == s).map(|i| k[i].clone());
        ensure!(mu[0].symbolic.eval(&env) == Some(want.clone()), "symbolic mu {} disagrees", mu[0].symbolic);
    }

    let mp = mixed_phospho_network();
    let st = MessiStructure::new(&mp.network, mp.partition.as_ref().ok_or("partition")?).map_err(|e| e.to_string())?;
    // core blocks are numbered after the intermediates, as in the partition line
    let layers: Vec<Vec<usize>> =
        st.layers().map_err(|e| e.to_string())?.iter().map(|l| l.iter().map(|b| b + 1).collect()).collect();
    ensure!(layers == vec![vec![1, 2], vec![3]], "layers {layers:?}");

    let mut graphs = 0;
    for (name, f) in builtin_files() {
        let st = MessiStructure::new(&f.network, f.partition.as_ref().ok_or("partition")?).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let k = random_rates(&mut rng, f.network.reactions().len());
            let g = hat_graph(&st, &f.network, &k);
            for root in 0..g.nodes {
                let mt = matrix_tree(&g, root);
                let en = enumerated_tree_sum(&g, root, 1 << 20).ok_or("enumeration limit")?;
                ensure!(mt == en, "{name}: root {root}: matrix-tree {mt} vs enumeration {en}");
            }
            graphs += 1;
        }
    }
    Ok(format!("mu exact on 50 rate draws, layers {layers:?}, {graphs} collapsed graphs agree"))
}

// ---------------------------------------------------------------- criterion 7

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> RationalMatrix {
    let r: Vec<Vec<Q>> = (0..rows).map(|_| (0..cols).map(|_| q(rng.gen_range(-bound..=bound))).collect()).collect();
    RationalMatrix::from_rows(r).expect("rectangular")
}

fn prop_scaling(rng: &mut ChaCha8Rng) -> Check {
    let mut positive = 0;
    for case in 0..10_000 {
        let d = rng.gen_range(1..=3);
        let mut m = random_matrix(rng, d, d + 1, 4);
        if case % 2 == 0 {
            // bias half the cases toward positively spanning matrices
            let lam: Vec<Q> = (0..=d).map(|_| q(rng.gen_range(1..5))).collect();
            for r in 0..d {
                let s: Q = (0..d).map(|c| m.get(r, c) * &lam[c]).sum();
                m.set(r, d, -s / &lam[d]);
            }
        }
        let base = positively_spanning(&m).map_err(|e| e.to_string())?;
        ensure!(base == positively_spanning_by_kernel(&m).map_err(|e| e.to_string())?, "minor and kernel tests disagree");
        let mut s = m.clone();
        for r in 0..d {
            let a = qr(rng.gen_range(1..50), rng.gen_range(1..50));
            for c in 0..=d {
                s.set(r, c, s.get(r, c) * &a);
            }
        }
        for c in 0..=d {
            let b = qr(rng.gen_range(1..50), rng.gen_range(1..50));
            for r in 0..d {
                s.set(r, c, s.get(r, c) * &b);
            }
        }
        ensure!(positively_spanning(&s).map_err(|e| e.to_string())? == base, "scaling changed the verdict in case {case}");
        positive += base as usize;
    }
    Ok(format!("(i) 10000 cases, {positive} positively spanning"))
}

fn prop_phi(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 1000 {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(d + 2..=d + 5);
        let pts: Vec<Vec<i64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let Ok(cfg) = PointConfiguration::new(pts) else { continue };
        let ker = cfg.matrix_a().kernel_basis();
        if ker.is_empty() {
            continue;
        }
        let coef: Vec<i64> = (0..ker.len()).map(|_| rng.gen_range(-2..=2)).collect();
        let m: Vec<f64> = (0..n).map(|j| ker.iter().zip(&coef).map(|(v, &c)| q_to_f64(&v[j]) * c as f64).sum()).collect();
        let la: Vec<f64> = (0..=d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let lt = rng.gen_range(-5.0..0.0);
        let lg = phi_map_log(&cfg, &la, lt, &h);
        let lhs: f64 = m.iter().zip(&lg).map(|(a, b)| a * b).sum();
        let rhs: f64 = m.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>() * lt;
        worst = worst.max((lhs - rhs).abs());
        done += 1;
    }
    ensure!(worst < 1e-10, "(ii) worst log deviation {worst:e}");
    Ok(format!("(ii) 1000 cases, worst {worst:.1e}"))
}

/// Positive roots of c0 x^a0 + c1 x^a1 (+ ...) by sign changes and bisection in log x.
fn bisection_roots(coef: &[f64], exps: &[i64]) -> Vec<f64> {
    let f = |u: f64| {
        let terms: Vec<f64> = coef.iter().zip(exps).map(|(c, &a)| c * (a as f64 * u).exp()).collect();
        let s: f64 = terms.iter().map(|t| t.abs()).sum();
        terms.iter().sum::<f64>() / s
    };
    let grid: Vec<f64> = (0..=4000).map(|i| -40.0 + 0.02 * i as f64).collect();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let r = 0.5 * (a + b);
        if out.last().map_or(true, |&p: &f64| (p - r).abs() > 1e-9) {
            out.push(r);
        }
    }
    out
}

/// Positive roots of a 2x3 system in log coordinates from a grid of Newton seeds.
fn grid_newton_roots(c: &[[f64; 3]; 2], a: &[[i64; 2]; 3]) -> Vec<[f64; 2]> {
    let eval = |u: [f64; 2]| {
        let mono: Vec<f64> = a.iter().map(|p| (p[0] as f64 * u[0] + p[1] as f64 * u[1]).exp()).collect();
        let mut f = [0.0; 2];
        let mut j = [[0.0; 2]; 2];
        for i in 0..2 {
            let s: f64 = (0..3).map(|k| (c[i][k] * mono[k]).abs()).sum();
            for k in 0..3 {
                let t = c[i][k] * mono[k] / s;
                f[i] += t;
                j[i][0] += t * a[k][0] as f64;
                j[i][1] += t * a[k][1] as f64;
            }
        }
        (f, j)
    };
    let mut roots: Vec<[f64; 2]> = Vec::new();
    for gi in 0..15 {
        for gj in 0..15 {
            let mut u = [-28.0 + 4.0 * gi as f64, -28.0 + 4.0 * gj as f64];
            let mut ok = false;
            for _ in 0..100 {
                let (f, j) = eval(u);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if det.abs() < 1e-300 {
                    break;
                }
                let mut du = [(f[0] * j[1][1] - f[1] * j[0][1]) / det, (j[0][0] * f[1] - j[1][0] * f[0]) / det];
                let norm = du[0].abs().max(du[1].abs());
                if norm > 2.0 {
                    du = [du[0] * 2.0 / norm, du[1] * 2.0 / norm];
                }
                u = [u[0] - du[0], u[1] - du[1]];
                if u[0].abs() > 200.0 || u[1].abs() > 200.0 {
                    break;
                }
                if norm < 1e-13 {
                    ok = eval(u).0.iter().all(|v| v.abs() < 1e-12);
                    break;
                }
            }
            if ok && !roots.iter().any(|r| (r[0] - u[0]).abs().max((r[1] - u[1]).abs()) < 1e-6) {
                roots.push(u);
            }
        }
    }
    roots
}

fn prop_restricted(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    let (mut one, mut two) = (0, 0);
    while one < 200 || two < 200 {
        let d = if one < 200 { 1 } else { 2 };
        let pts: Vec<Vec<i64>> = (0..=d).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let Ok(cfg) = PointConfiguration::new(pts.clone()) else { continue };
        if cfg.len() != d + 1 || cfg.matrix_a().rank() != d + 1 {
            continue;
        }
        let m = random_matrix(rng, d, d + 1, 6);
        if !positively_spanning(&m).map_err(|e| e.to_string())? {
            continue;
        }
        let c = CoefficientMatrix::new(&cfg, m.clone()).map_err(|e| e.to_string())?;
        let s = Simplex::new(&cfg, (0..=d).collect()).map_err(|e| e.to_string())?;
        let u = restricted_positive_solution(&cfg, &c, &s, None).map_err(|e| e.to_string())?;
        let cf: Vec<Vec<f64>> = c.to_f64();
        if d == 1 {
            let exps: Vec<i64> = pts.iter().map(|p| p[0]).collect();
            let r = bisection_roots(&cf[0], &exps);
            ensure!(r.len() == 1, "(iii) d=1 oracle finds {} roots", r.len());
            worst = worst.max((r[0] - u[0]).abs());
            one += 1;
        } else {
            let cc = [[cf[0][0], cf[0][1], cf[0][2]], [cf[1][0], cf[1][1], cf[1][2]]];
            let aa = [[pts[0][0], pts[0][1]], [pts[1][0], pts[1][1]], [pts[2][0], pts[2][1]]];
            if u.iter().any(|v| v.abs() > 25.0) {
                // outside the oracle's seed grid
                continue;
            }
            let r = grid_newton_roots(&cc, &aa);
            ensure!(r.len() == 1, "(iii) d=2 oracle finds {} roots for {pts:?}", r.len());
            worst = worst.max((r[0][0] - u[0]).abs()).max((r[0][1] - u[1]).abs());
            two += 1;
        }
    }
    ensure!(worst < 1e-8, "(iii) closed form and oracle differ by {worst:e}");
    Ok(format!("(iii) 200+200 cases, worst {worst:.1e}"))
}

fn prop_binomial(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 1000 {
        let d = rng.gen_range(1..=4);
        let m: Vec<Vec<i64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let rm = RationalMatrix::from_i64_rows(&m.iter().map(|r| r.as_slice()).collect::<Vec<_>>()).expect("square");
        if rm.determinant().map_err(|e| e.to_string())? == q(0) {
            continue;
        }
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0f64..3.0).exp()).collect();
        let beta: Vec<f64> = m.iter().map(|r| r.iter().zip(&x).map(|(&e, v)| v.powi(e as i32)).product()).collect();
        let y = solve_binomial(&m, &beta).map_err(|e| e.to_string())?;
        for (a, b) in x.iter().zip(&y) {
            worst = worst.max((a - b).abs() / a);
        }
        done += 1;
    }
    ensure!(worst < 1e-12, "(iv) round trip error {worst:e}");
    Ok(format!("(iv) 1000 cases, worst {worst:.1e}"))
}

fn prop_rescale(rng: &mut ChaCha8Rng) -> Check {
    let mut notes = Vec::new();
    for (name, f) in builtin_files() {
        let model = MessiModel::from_file(&f).map_err(|e| e.to_string())?;
        let kappa = f.network.rates().map_err(|e| e.to_string())?;
        let tot = totals(&f);
        let region = match model.region_system(&kappa, &tot) {
            Ok((_, r)) => r,
            Err(e) => {
                notes.push(format!("{name} n/a ({e})"));
                continue;
            }
        };
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let lg: Vec<f64> = (0..region.config.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let out = model.rescale_back(&kappa, &tot, &region, &lg).map_err(|e| format!("{name}: {e}"))?;
            let kbar: Vec<Q> = out.kappa_bar.iter().map(|&v| q_from_f64(v).expect("finite")).collect();
            let (_, again) = model.region_system(&kbar, &tot).map_err(|e| e.to_string())?;
            ensure!(again.exponents() == region.exponents(), "{name}: support changed");
            let (c0, c1) = (region.coefficients.matrix(), again.coefficients.matrix());
            for i in 0..c0.rows() {
                for j in 0..c0.cols() {
                    let want = q_to_f64(c0.get(i, j)) * out.log_gamma[j].exp();
                    let got = q_to_f64(c1.get(i, j));
                    let err = if want == 0.0 { got.abs() } else { (got - want).abs() / want.abs() };
                    worst = worst.max(err);
                }
            }
        }
        ensure!(worst < 1e-9, "(v) {name}: deviation {worst:e}");
        notes.push(format!("{name} {worst:.0e}"));
    }
    Ok(format!("(v) {}", notes.join(", ")))
}

fn prop_param(rng: &mut ChaCha8Rng) -> Check {
    let mut notes = Vec::new();
    for (name, f) in builtin_files() {
        let model = MessiModel::from_file(&f).map_err(|e| e.to_string())?;
        let kappa = f.network.rates().map_err(|e| e.to_string())?;
        let param = match model.parametrize(&kappa) {
            Ok(p) => p,
            Err(e) => {
                notes.push(format!("{name} n/a ({e})"));
                continue;
            }
        };
        let kf: Vec<f64> = kappa.iter().map(q_to_f64).collect();
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let y: Vec<f64> = (0..param.chosen.len()).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
            let x = param.eval_f64(&y);
            ensure!(x.iter().all(|&v| v > 0.0), "{name}: non-positive concentration");
            for (k, &c) in param.chosen.iter().enumerate() {
                ensure!((x[c] - y[k]).abs() <= 1e-15 * y[k], "{name}: chosen variable not reproduced");
            }
            worst = mass_action_residual_f64(&f.network, &kf, &x).into_iter().fold(worst, f64::max);
        }
        ensure!(worst < 1e-9, "(vi) {name}: residual {worst:e}");
        notes.push(format!("{name} {worst:.0e}"));
    }
    Ok(format!("(vi) {}", notes.join(", ")))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let parts = [
        prop_scaling(&mut rng)?,
        prop_phi(&mut rng)?,
        prop_restricted(&mut rng)?,
        prop_binomial(&mut rng)?,
        prop_rescale(&mut rng)?,
        prop_param(&mut rng)?,
    ];
    Ok(parts.join("; "))
}

fn main() {
    let criteria: [(&str, f64, fn() -> Check); 7] = [
        ("HK end-to-end witness", 10.0, criterion_1),
        ("HK negative control", 1.0, criterion_2),
        ("phosphorylation n = 2, 3", 60.0, criterion_3),
        ("mixed cone of three mixed simplices", 5.0, criterion_4),
        ("regularity oracle", 1.0, criterion_5),
        ("MESSI machinery", 1.0, criterion_6),
        ("property suites", f64::INFINITY, criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match result {
            Ok(d) if secs < *limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {limit}s limit")),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!("criterion {} ({name}): {} in {secs:.2}s: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
