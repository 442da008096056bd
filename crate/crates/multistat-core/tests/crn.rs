use multistat_core::crn::builtins::{builtin, hybrid_hk_network, michaelis_menten, mixed_phospho_network, phospho_network};
use multistat_core::crn::messi::{intermediate_coefficients, layer_sets, validate_messi, MessiStructure, Partition};
use multistat_core::crn::model::MessiModel;
use multistat_core::crn::parse::{parse_network, write_network};
use multistat_core::crn::trees::{enumerated_tree_sum, matrix_tree, LabeledDigraph};
use multistat_core::crn::{conservation_laws, mass_action_system, Network};
use multistat_core::expr::Expr;
use multistat_core::linalg::{q, qr, RationalMatrix, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Q> {
    (1i64..30, 1i64..10).prop_map(|(a, b)| qr(a, b))
}

fn idx(net: &Network, name: &str) -> usize {
    net.species_index(name).unwrap()
}

fn rate(net: &Network, k: &[Q], name: &str) -> Q {
    k[net.rate_names().iter().position(|n| n == name).unwrap()].clone()
}

fn same_span(a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    let ra = RationalMatrix::from_columns(a).unwrap().rank();
    let rb = RationalMatrix::from_columns(b).unwrap().rank();
    let both: Vec<Vec<Q>> = a.iter().chain(b).cloned().collect();
    ra == rb && RationalMatrix::from_columns(&both).unwrap().rank() == ra
}

#[test]
fn parse_sizes() {
    let hk = hybrid_hk_network();
    assert_eq!(hk.network.species().len(), 6);
    assert_eq!(hk.network.complexes().len(), 10);
    assert_eq!(hk.network.reactions().len(), 6);
    let one = parse_network("species: A B\nreaction: A -> B ; k = 1\n").unwrap();
    assert_eq!(one.network.species().len(), 2);
    assert_eq!(one.network.reactions().len(), 1);
    assert!(one.partition.is_none());
    let p2 = phospho_network(2).unwrap();
    assert_eq!(p2.network.species().len(), 9);
    assert_eq!(p2.network.reactions().len(), 12);
    assert_eq!(mixed_phospho_network().network.species().len(), 9);
    assert!(phospho_network(0).is_err());
}

#[test]
fn parse_errors() {
    for bad in [
        "species: A\nreaction: A -> A\n",
        "species: A B\nreaction: A -> B -> A\n",
        "species: A B\nreaction: A -> C\n",
        "species: A B\nreaction: A -> B ; k = -1\n",
        "species: A A\nreaction: A -> A\n",
        "reaction: A -> B\n",
        "species: A B\nfoo: bar\n",
    ] {
        assert!(parse_network(bad).is_err(), "{bad}");
    }
    assert_eq!(parse_network("species: A B\nfoo: x\n").unwrap_err().line, 2);
}

#[test]
fn write_round_trip() {
    for name in ["hk", "mm", "mixed-phospho", "phospho:3"] {
        let f = builtin(name).unwrap();
        let again = parse_network(&write_network(&f)).unwrap();
        assert_eq!(again, f, "{name}");
    }
}

#[test]
fn hk_mass_action() {
    let f = hybrid_hk_network();
    let net = &f.network;
    let k: Vec<Q> = (1..=6).map(|i| qr(i, 3)).collect();
    let sys = mass_action_system(net, &k).unwrap();
    let x: Vec<Q> = [2, 3, 5, 7, 11, 13].iter().map(|&v| qr(v, 2)).collect();
    let fx = sys.eval(&x);
    assert_eq!(fx[0], -&k[0] * &x[0] + &k[3] * &x[2] * &x[4]);
    // f1 + .. + f4 = 0 and f5 + f6 = 0 identically
    assert!((&fx[0] + &fx[1] + &fx[2] + &fx[3]).is_zero());
    assert!((&fx[4] + &fx[5]).is_zero());
    assert!(mass_action_system(net, &k[..5]).is_err());
    let laws = conservation_laws(net);
    let want: Vec<Vec<Q>> = vec![[1, 1, 1, 1, 0, 0], [0, 0, 0, 0, 1, 1]]
        .iter()
        .map(|r| r.iter().map(|&v| q(v)).collect())
        .collect();
    assert!(same_span(&laws, &want));
    let m = MessiModel::from_file(&f).unwrap();
    assert_eq!(m.laws, want);
}

#[test]
fn mm_shape_and_mu() {
    let f = michaelis_menten();
    assert_eq!(f.network.species().len(), 4);
    assert_eq!(f.network.reactions().len(), 3);
    let p = f.partition.clone().unwrap();
    let st = MessiStructure::new(&f.network, &p).unwrap();
    let k = [q(3), qr(1, 2), q(5)];
    let mu = intermediate_coefficients(&st, &f.network, &k).unwrap();
    assert_eq!(mu.len(), 1);
    assert_eq!(mu[0].value, &k[0] / (&k[1] + &k[2]));
    assert_eq!(f.network.complex_label(mu[0].source), "S0 + E");
    assert_eq!(st.g1.len(), 1);
}

#[test]
fn phospho_mu_is_l() {
    let f = phospho_network(3).unwrap();
    let net = &f.network;
    let st = MessiStructure::new(net, f.partition.as_ref().unwrap()).unwrap();
    let k: Vec<Q> = (0..net.reactions().len()).map(|i| qr(i as i64 + 2, 3)).collect();
    let mu = intermediate_coefficients(&st, net, &k).unwrap();
    for i in 0..3 {
        let u = mu.iter().find(|m| m.species == idx(net, &format!("FS{}", i + 1))).unwrap();
        let l = rate(net, &k, &format!("lon{i}")) / (rate(net, &k, &format!("loff{i}")) + rate(net, &k, &format!("lcat{i}")));
        assert_eq!(u.value, l);
    }
}

#[test]
fn messi_validation() {
    let f = mixed_phospho_network();
    let p = f.partition.clone().unwrap();
    assert!(validate_messi(&f.network, &p).is_empty());
    let net = &f.network;
    // S0 moved into the block of E
    let e = idx(net, "E");
    let fs = idx(net, "F");
    let s: Vec<usize> = ["S0", "S1", "S2"].iter().map(|n| idx(net, n)).collect();
    let moved = Partition::new(net.species().len(), p.intermediates().to_vec(), vec![vec![e, s[0]], vec![fs], vec![s[1], s[2]]])
        .unwrap();
    assert!(!validate_messi(net, &moved).is_empty());
    assert!(MessiStructure::new(net, &moved).is_err());
}

#[test]
fn s_toric_cases() {
    for f in [phospho_network(1).unwrap(), phospho_network(2).unwrap(), phospho_network(4).unwrap(), mixed_phospho_network()] {
        let st = MessiStructure::new(&f.network, f.partition.as_ref().unwrap()).unwrap();
        assert!(st.s_toric.holds(), "{:?}", st.s_toric.diagnostics);
    }
    let text = "\
species: A B C D I1 I2
partition: 0: I1 I2 ; 1: A B ; 2: C D
reaction: A + C -> I1
reaction: B + D -> I1
reaction: I1 -> A + C
reaction: I1 -> B + D
reaction: A + D -> I2
reaction: B + C -> I2
reaction: I2 -> A + D
reaction: I2 -> B + C
";
    let f = parse_network(text).unwrap();
    let st = MessiStructure::new(&f.network, f.partition.as_ref().unwrap()).unwrap();
    assert!(!st.s_toric.unique_sources);
    assert!(!st.s_toric.holds());
}

#[test]
fn mixed_phospho_graphs() {
    let f = mixed_phospho_network();
    let net = &f.network;
    let st = MessiStructure::new(net, f.partition.as_ref().unwrap()).unwrap();
    let mut g1: Vec<(String, String)> = st.g1.iter().map(|&(a, b)| (net.complex_label(a), net.complex_label(b))).collect();
    g1.sort();
    let mut want = vec![
        ("S0 + E".to_string(), "S1 + E".to_string()),
        ("S1 + E".to_string(), "S2 + E".to_string()),
        ("S2 + F".to_string(), "S0 + F".to_string()),
    ];
    want.sort();
    assert_eq!(g1, want);
    let mut ge = st.ge.clone();
    ge.sort();
    assert_eq!(ge, vec![(0, 2), (1, 2)]);
    assert_eq!(st.layers().unwrap(), vec![vec![0, 1], vec![2]]);
    assert!(st.minimal);
}

#[test]
fn layer_examples() {
    assert_eq!(layer_sets(1, &[]).unwrap(), vec![vec![0]]);
    assert_eq!(layer_sets(3, &[(0, 1), (1, 2)]).unwrap(), vec![vec![0], vec![1], vec![2]]);
    assert!(layer_sets(2, &[(0, 1), (1, 0)]).is_err());
}

#[test]
fn phospho_parametrization() {
    let f = phospho_network(3).unwrap();
    let net = &f.network;
    let m = MessiModel::from_file(&f).unwrap();
    let k: Vec<Q> = (0..net.reactions().len()).map(|i| qr(i as i64 % 5 + 1, i as i64 % 3 + 1)).collect();
    let param = m.parametrize(&k).unwrap();
    let y = [qr(3, 2), qr(2, 5), qr(7, 3)];
    let x = param.eval(&y);
    let (s0, e, fv) = (&y[0], &y[1], &y[2]);
    let mut t = Q::one();
    for i in 1..=3 {
        let j = i - 1;
        let kk = rate(net, &k, &format!("kon{j}")) / (rate(net, &k, &format!("koff{j}")) + rate(net, &k, &format!("kcat{j}")));
        let ll = rate(net, &k, &format!("lon{j}")) / (rate(net, &k, &format!("loff{j}")) + rate(net, &k, &format!("lcat{j}")));
        t *= rate(net, &k, &format!("kcat{j}")) * kk / (rate(net, &k, &format!("lcat{j}")) * ll);
        let mut want = &t * s0;
        for _ in 0..i {
            want = want * e / fv;
        }
        assert_eq!(x[idx(net, &format!("S{i}"))], want, "s{i}");
    }
    let fx = mass_action_system(net, &k).unwrap().eval(&x);
    assert!(fx.iter().all(|v| v.is_zero()));
}

#[test]
fn hk_parametrization_and_region() {
    let f = hybrid_hk_network();
    let net = &f.network;
    let m = MessiModel::from_file(&f).unwrap();
    let k: Vec<Q> = [2, 3, 5, 7, 11, 13].iter().map(|&v| qr(v, 4)).collect();
    let (param, region) = m.region_system(&k, &[q(2), q(3)]).unwrap();
    let y = [qr(2, 3), qr(5, 7)];
    let x = param.eval(&y);
    assert_eq!(x[0], &k[3] * &k[4] * &y[0] * &y[1] * &y[1] / (&k[0] * &k[2]));
    assert!(mass_action_system(net, &k).unwrap().eval(&x).iter().all(|v| v.is_zero()));
    let pts: Vec<Vec<i64>> = region.exponents().to_vec();
    assert_eq!(pts, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2], vec![0, 0]]);
    let c = region.coefficients.matrix();
    assert_eq!(c.get(0, 2), &(&k[4] * (q(1) / &k[1] + q(1) / &k[2])));
    assert_eq!(c.get(1, 2), &(&k[4] / &k[5]));
    assert_eq!(c.get(0, 4), &q(-2));
    assert_eq!(c.get(1, 4), &q(-3));
}

#[test]
fn hk_rescale_example() {
    let f = hybrid_hk_network();
    let net = &f.network;
    let m = MessiModel::from_file(&f).unwrap();
    let k = net.rates().unwrap();
    let t = [qr(7, 4), q(1)];
    let (_, region) = m.region_system(&k, &t).unwrap();
    let (g3, g4) = (0.37f64, 2.9f64);
    let out = m.rescale_back(&k, &t, &region, &[0.0, 0.0, g3.ln(), g4.ln(), 0.0]).unwrap();
    let kf: Vec<f64> = k.iter().map(multistat_core::linalg::q_to_f64).collect();
    for (i, (a, b)) in out.kappa_bar.iter().zip(&kf).enumerate() {
        let want = match i {
            3 => g4 / g3 * b,
            4 => g3 * b,
            _ => *b,
        };
        assert!((a - want).abs() < 1e-12 * want, "k{}: {a} vs {want}", i + 1);
    }
    assert!(out.max_rel_error < 1e-9);
    let id = m.rescale_back(&k, &t, &region, &[0.0; 5]).unwrap();
    assert!(id.kappa_bar.iter().zip(&kf).all(|(a, b)| (a - b).abs() < 1e-14 * b));
}

#[test]
fn phospho_rescale_from_height() {
    let n = 2;
    let f = phospho_network(n).unwrap();
    let net = &f.network;
    let m = MessiModel::from_file(&f).unwrap();
    let k = net.rates().unwrap();
    let t = [q(3), q(1), q(1)];
    let (_, region) = m.region_system(&k, &t).unwrap();
    let pts = region.exponents().to_vec();
    let hts = [0.3, -0.7, 1.1, 0.45, -0.2, 0.8, 0.15, -1.3];
    let h = |p: [i64; 3]| -> f64 {
        let j = pts.iter().position(|x| x == &p).unwrap();
        if region.unit_cols.contains(&Some(j)) || j == region.const_col {
            0.0
        } else {
            hts[j % hts.len()]
        }
    };
    let lt = -0.9f64;
    let lg: Vec<f64> = pts.iter().map(|p| lt * h([p[0], p[1], p[2]])).collect();
    let out = m.rescale_back(&k, &t, &region, &lg).unwrap();
    let ratio = |name: &str| {
        let r = net.rate_names().iter().position(|x| x == name).unwrap();
        out.kappa_bar[r] / multistat_core::linalg::q_to_f64(&k[r])
    };
    let s = |i: i64, j: i64| [1, i, j];
    let close = |a: f64, b: f64| (a - b).abs() < 1e-10 * b;
    assert!(close(ratio("kon0"), (lt * h(s(1, 0))).exp()));
    for i in 1..n as i64 {
        assert!(close(ratio(&format!("kon{i}")), (lt * (h(s(i + 1, -i)) - h(s(i, -i)))).exp()), "kon{i}");
    }
    for i in 0..n as i64 {
        assert!(close(ratio(&format!("lon{i}")), (lt * (h(s(i + 1, -i)) - h(s(i + 1, -(i + 1))))).exp()), "lon{i}");
    }
    for name in ["koff0", "kcat0", "loff0", "lcat0"] {
        assert!(close(ratio(name), 1.0), "{name}");
    }
}

#[test]
fn matrix_tree_on_builtins() {
    for name in ["hk", "mm", "mixed-phospho", "phospho:1", "phospho:2"] {
        let f = builtin(name).unwrap();
        let st = MessiStructure::new(&f.network, f.partition.as_ref().unwrap()).unwrap();
        let k: Vec<Q> = (0..f.network.reactions().len()).map(|i| qr(i as i64 + 1, 2)).collect();
        let g = multistat_core::crn::messi::hat_graph(&st, &f.network, &k);
        for root in 0..g.nodes {
            assert_eq!(Some(matrix_tree(&g, root)), enumerated_tree_sum(&g, root, 1 << 16), "{name} root {root}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matrix_tree_matches_enumeration(n in 2usize..6, edges in prop::collection::vec((0usize..6, 0usize..6, rat()), 1..14)) {
        let mut g = LabeledDigraph::new(n);
        for (a, b, w) in edges {
            let (a, b) = (a % n, b % n);
            if a != b && !g.edges.iter().any(|e| e.from == a && e.to == b) {
                g.add_edge(a, b, w.clone(), Expr::num(w));
            }
        }
        for root in 0..n {
            prop_assert_eq!(Some(matrix_tree(&g, root)), enumerated_tree_sum(&g, root, 1 << 16));
        }
    }

    #[test]
    fn mixed_phospho_parametrization_residual(k in prop::collection::vec(rat(), 10), y in prop::collection::vec(rat(), 3)) {
        let f = mixed_phospho_network();
        let m = MessiModel::from_file(&f).unwrap();
        let x = m.parametrize(&k).unwrap().eval(&y);
        prop_assert!(x.iter().all(|v| *v > Q::zero()));
        prop_assert!(mass_action_system(&f.network, &k).unwrap().eval(&x).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn hk_parametrization_residual(k in prop::collection::vec(rat(), 6), y in prop::collection::vec(rat(), 2)) {
        let f = hybrid_hk_network();
        let m = MessiModel::from_file(&f).unwrap();
        let x = m.parametrize(&k).unwrap().eval(&y);
        prop_assert!(mass_action_system(&f.network, &k).unwrap().eval(&x).iter().all(|v| v.is_zero()));
    }
}
