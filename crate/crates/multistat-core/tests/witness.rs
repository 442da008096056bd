use multistat_core::crn::builtins::hybrid_hk_network;
use multistat_core::crn::model::MessiModel;
use multistat_core::crn::region::RegionSystem;
use multistat_core::decoration::CoefficientMatrix;
use multistat_core::geometry::{joint_cone, PointConfiguration, Simplex};
use multistat_core::linalg::{q, qr, Q};
use multistat_core::witness::{
    count_positive_roots, deformed_system, lattice_seeds, newton_solve, newton_solve_log, phi_map, phi_map_log,
    witness_search, NewtonOptions, Sequential, SparseSystem, WitnessError, WitnessOptions, WitnessStatus,
};
use proptest::prelude::*;

fn hk_region() -> RegionSystem {
    let m = MessiModel::from_file(&hybrid_hk_network()).unwrap();
    let k: Vec<Q> = [1, 1, 2, 1, 1, 1].iter().map(|&v| q(v)).collect();
    m.region_system(&k, &[qr(7, 4), q(1)]).unwrap().1
}

fn family(cfg: &PointConfiguration, cells: &[&[usize]]) -> Vec<Simplex> {
    cells.iter().map(|c| Simplex::new(cfg, c.to_vec()).unwrap()).collect()
}

fn fast() -> WitnessOptions {
    WitnessOptions { exclusion: false, ..WitnessOptions::default() }
}

#[test]
fn phi_map_trivial_cases() {
    let cfg = hk_region().config;
    let g = phi_map(&cfg, &[1.0, 1.0, 1.0], 0.3, &[0.0; 5]);
    assert!(g.iter().all(|v| (v - 1.0).abs() < 1e-15));
    let mut h = vec![0.0; 5];
    h[2] = 1.0;
    let g = phi_map(&cfg, &[1.0, 1.0, 1.0], 0.3, &h);
    for (j, v) in g.iter().enumerate() {
        let want = if j == 2 { 0.3 } else { 1.0 };
        assert!((v - want).abs() < 1e-15);
    }
}

#[test]
fn deformed_at_one_is_base() {
    let r = hk_region();
    let base = SparseSystem::from_rational(r.config.points(), &r.coefficients.matrix().to_rows());
    let d = deformed_system(&r.config, &r.coefficients, &[1.0, 1.0, 0.0, 0.0, 0.0], 1.0).unwrap();
    assert_eq!(d.sparse(), base);
    assert_eq!(deformed_system(&r.config, &r.coefficients, &[0.0; 5], 0.0), Err(WitnessError::BadT(0.0)));
    assert_eq!(deformed_system(&r.config, &r.coefficients, &[0.0; 5], 1.5), Err(WitnessError::BadT(1.5)));
    assert!(matches!(
        deformed_system(&r.config, &r.coefficients, &[0.0; 4], 0.5),
        Err(WitnessError::HeightLength { got: 4, want: 5 })
    ));
    // t^{h_1} x4 is the leading term of the first row
    let d = d.at_log_t(-3.0);
    let lc = d.log_coefficients();
    assert!((lc[0][0] + 3.0).abs() < 1e-15);
}

#[test]
fn newton_on_a_line() {
    let sys = SparseSystem::from_rational(&[vec![1], vec![0]], &[vec![q(1), q(-2)]]);
    let r = newton_solve(&sys, &[1.0], &NewtonOptions::default()).unwrap();
    assert!((r.x[0] - 2.0).abs() < 1e-12);
    assert!(r.residual < 1e-10);
    assert!(newton_solve(&sys, &[-1.0], &NewtonOptions::default()).is_err());
    assert!(newton_solve(&sys, &[0.0], &NewtonOptions::default()).is_err());
}

#[test]
fn no_sign_change_no_roots() {
    let pts = vec![vec![1, 0], vec![0, 1], vec![0, 0]];
    let sys = SparseSystem::from_rational(&pts, &[vec![q(1), q(2), q(3)], vec![q(1), q(1), q(1)]]);
    let seeds = lattice_seeds(2, 5, 1e-6, 1e6, None);
    assert_eq!(seeds.len(), 25);
    assert!(count_positive_roots(&sys, &seeds, &NewtonOptions::default(), &Sequential).is_empty());
}

#[test]
fn lattice_is_deterministic() {
    assert_eq!(lattice_seeds(2, 5, 1e-6, 1e6, Some(7)), lattice_seeds(2, 5, 1e-6, 1e6, Some(7)));
    assert_ne!(lattice_seeds(2, 5, 1e-6, 1e6, Some(7)), lattice_seeds(2, 5, 1e-6, 1e6, Some(8)));
    let plain = lattice_seeds(1, 3, 1e-2, 1e2, None);
    let u: Vec<f64> = plain.iter().map(|s| s.log_x[0]).collect();
    assert!((u[0] - 1e-2f64.ln()).abs() < 1e-12 && u[1].abs() < 1e-12 && (u[2] - 1e2f64.ln()).abs() < 1e-12);
}

#[test]
fn hk_search_finds_three_roots() {
    let r = hk_region();
    let fam = family(&r.config, &[&[0, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
    let (cone, _) = joint_cone(&r.config, &fam);
    let h = [1.0, 1.0, 0.0, 0.0, 0.0];
    let opts = WitnessOptions::default();
    let rep = witness_search(&r.config, &r.coefficients, &fam, &cone, &h, &opts, &Sequential).unwrap();
    assert_eq!(rep.status, WitnessStatus::Success);
    assert_eq!(rep.p, 3);
    assert!(rep.roots.len() >= 3);
    let lt = rep.log_t_star.unwrap();
    let k = rep.k_star.unwrap();
    assert_eq!(rep.t_star().unwrap(), 0.5f64.powi(k as i32));
    assert!((lt + k as f64 * std::f64::consts::LN_2).abs() < 1e-12);
    let lg = rep.log_gamma.as_ref().unwrap();
    assert!(lg.iter().zip(&h).all(|(g, hj)| (g - hj * lt).abs() < 1e-15));
    let sys = deformed_system(&r.config, &r.coefficients, &h, rep.t_star().unwrap()).unwrap().sparse();
    for root in &rep.roots {
        assert!(root.residual < 1e-10);
        assert!(root.sigma_min > 1e-8 * root.sigma_max);
        // rerunning from a certified root reproduces it
        let again = newton_solve_log(&sys, &root.log_x, &opts.newton).unwrap();
        assert!(again.log_x.iter().zip(&root.log_x).all(|(a, b)| (a - b).abs() < 1e-12));
    }
    for (i, a) in rep.roots.iter().enumerate() {
        for b in &rep.roots[i + 1..] {
            assert!(a.log_x.iter().zip(&b.log_x).any(|(x, y)| (x - y).abs() > 1e-6));
        }
    }
    assert!(rep.monotone());
    let ex = rep.exclusion.as_ref().unwrap();
    assert!(ex.consistent(), "{ex:?}");
}

#[test]
fn scaled_system_has_the_same_roots() {
    let r = hk_region();
    let fam = family(&r.config, &[&[0, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
    let (cone, _) = joint_cone(&r.config, &fam);
    let h = [1.0, 1.0, 0.0, 0.0, 0.0];
    let rep = witness_search(&r.config, &r.coefficients, &fam, &cone, &h, &fast(), &Sequential).unwrap();
    let la = [0.4f64, -1.3, 0.7];
    let lg = phi_map_log(&r.config, &la, rep.log_t_star.unwrap(), &h);
    // c_ij gamma_j y^{a_j} with y = x / alpha
    let c = r.coefficients.matrix();
    let rows = (0..c.rows())
        .map(|i| {
            (0..c.cols())
                .filter(|&j| !num_traits::Zero::is_zero(c.get(i, j)))
                .map(|j| multistat_core::witness::LogTerm {
                    exp: r.config.point(j).to_vec(),
                    negative: num_traits::Signed::is_negative(c.get(i, j)),
                    log_abs: multistat_core::linalg::q_to_f64(c.get(i, j)).abs().ln() + lg[j],
                })
                .collect()
        })
        .collect();
    let scaled = SparseSystem::new(2, rows);
    for root in &rep.roots {
        let u: Vec<f64> = root.log_x.iter().zip(&la[1..]).map(|(x, a)| x - a).collect();
        assert!(scaled.relative_residual(&u) < 1e-10);
        let again = newton_solve_log(&scaled, &u, &NewtonOptions::default()).unwrap();
        assert!(again.log_x.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-9));
    }
}

#[test]
fn single_simplex_family() {
    let r = hk_region();
    let fam = family(&r.config, &[&[0, 2, 4]]);
    let (cone, f) = joint_cone(&r.config, &fam);
    let h: Vec<f64> = f.point().unwrap().iter().map(multistat_core::linalg::q_to_f64).collect();
    let rep = witness_search(&r.config, &r.coefficients, &fam, &cone, &h, &fast(), &Sequential).unwrap();
    assert_eq!(rep.status, WitnessStatus::Success);
    assert!(!rep.roots.is_empty());
}

#[test]
fn height_must_be_in_the_cone() {
    let r = hk_region();
    let fam = family(&r.config, &[&[0, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
    let (cone, _) = joint_cone(&r.config, &fam);
    let res = witness_search(&r.config, &r.coefficients, &fam, &cone, &[0.0; 5], &fast(), &Sequential);
    assert!(matches!(res, Err(WitnessError::HeightOutsideCone(_))));
    let res = witness_search(&r.config, &r.coefficients, &fam, &cone, &[1.0; 3], &fast(), &Sequential);
    assert!(matches!(res, Err(WitnessError::HeightLength { .. })));
}

#[test]
fn non_square_is_rejected() {
    // the coefficient matrix already refuses a wrong row count
    let cfg = PointConfiguration::new(vec![vec![1, 0], vec![0, 1], vec![0, 0]]).unwrap();
    let one_row = multistat_core::linalg::RationalMatrix::from_i64_rows(&[&[1, 1, -1]]).unwrap();
    assert!(CoefficientMatrix::new(&cfg, one_row).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_identity_on_hk(la in prop::collection::vec(-3.0f64..3.0, 3), lt in -10.0f64..-0.01, h in prop::collection::vec(-5.0f64..5.0, 5)) {
        let cfg = hk_region().config;
        let g = phi_map_log(&cfg, &la, lt, &h);
        for m in [[1.0, 0.0, -2.0, 1.0, 0.0], [0.0, 1.0, 1.0, -1.0, -1.0]] {
            let lhs: f64 = m.iter().zip(&g).map(|(a, b)| a * b).sum();
            let rhs: f64 = lt * m.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
