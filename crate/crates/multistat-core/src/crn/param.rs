//! Positive monomial steady-state parametrizations.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::messi::{g1_labels, intermediate_coefficients, ComplexKind, MessiStructure};
use super::trees::{enumerate_trees, LabeledDigraph};
use super::{CrnError, Network};
use crate::expr::Expr;
use crate::linalg::{q, q_to_f64, Q};

/// coeff * x^xexp, where `ell` records how the coefficient scales when the
/// rates leaving each complex are multiplied by a common factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Q,
    /// Exponent per complex.
    pub ell: Vec<i64>,
    /// Exponent per chosen variable.
    pub xexp: Vec<i64>,
    num: Vec<Expr>,
    den: Vec<Expr>,
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let split = |s: &str| {
        let p = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        (String::from(&s[..p]), s[p..].parse::<u64>().unwrap_or(0), String::from(s))
    };
    split(a).cmp(&split(b))
}

fn sort_factors(v: &mut [Expr]) {
    v.sort_by(|a, b| {
        let (sa, sb) = (a.to_string(), b.to_string());
        natural_cmp(&sa, &sb)
    });
}

impl Term {
    pub fn one(n_complexes: usize, m: usize) -> Term {
        Term { coeff: Q::one(), ell: vec![0; n_complexes], xexp: vec![0; m], num: Vec::new(), den: Vec::new() }
    }

    /// A rate-like factor with value, symbol and scaling complex.
    pub fn factor(value: Q, symbol: Expr, complex: Option<usize>, n_complexes: usize, m: usize) -> Term {
        let mut t = Term::one(n_complexes, m);
        t.coeff = value;
        if let Some(c) = complex {
            t.ell[c] = 1;
        }
        let (num, den) = split_fraction(symbol);
        t.num = num;
        t.den = den;
        cancel(&mut t.num, &mut t.den);
        t
    }

    pub fn variable(k: usize, n_complexes: usize, m: usize) -> Term {
        let mut t = Term::one(n_complexes, m);
        t.xexp[k] = 1;
        t
    }

    pub fn mul(&self, o: &Term) -> Term {
        let mut num: Vec<Expr> = self.num.iter().chain(&o.num).cloned().collect();
        let mut den: Vec<Expr> = self.den.iter().chain(&o.den).cloned().collect();
        cancel(&mut num, &mut den);
        Term {
            coeff: &self.coeff * &o.coeff,
            ell: self.ell.iter().zip(&o.ell).map(|(a, b)| a + b).collect(),
            xexp: self.xexp.iter().zip(&o.xexp).map(|(a, b)| a + b).collect(),
            num,
            den,
        }
    }

    pub fn div(&self, o: &Term) -> Term {
        let mut num: Vec<Expr> = self.num.iter().chain(&o.den).cloned().collect();
        let mut den: Vec<Expr> = self.den.iter().chain(&o.num).cloned().collect();
        cancel(&mut num, &mut den);
        Term {
            coeff: &self.coeff / &o.coeff,
            ell: self.ell.iter().zip(&o.ell).map(|(a, b)| a - b).collect(),
            xexp: self.xexp.iter().zip(&o.xexp).map(|(a, b)| a - b).collect(),
            num,
            den,
        }
    }

    pub fn negated(&self) -> Term {
        let mut t = self.clone();
        t.coeff = -t.coeff;
        t
    }

    /// Symbolic form of |coeff|.
    pub fn expr(&self) -> Expr {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        sort_factors(&mut num);
        sort_factors(&mut den);
        Expr::product(num).div(Expr::product(den))
    }

    pub fn eval_f64(&self, y: &[f64]) -> f64 {
        let mut v = q_to_f64(&self.coeff);
        for (yi, &e) in y.iter().zip(&self.xexp) {
            if e != 0 {
                v *= libm::pow(*yi, e as f64);
            }
        }
        v
    }

    pub fn eval(&self, y: &[Q]) -> Q {
        let mut v = self.coeff.clone();
        for (yi, &e) in y.iter().zip(&self.xexp) {
            let p = pow_q(yi, e.unsigned_abs());
            if e > 0 {
                v *= p;
            } else if e < 0 {
                v /= p;
            }
        }
        v
    }
}

/// Numerator and denominator factor lists of a product of quotients.
fn split_fraction(e: Expr) -> (Vec<Expr>, Vec<Expr>) {
    match e {
        Expr::Mul(fs) => {
            let (mut n, mut d) = (Vec::new(), Vec::new());
            for f in fs {
                let (a, b) = split_fraction(f);
                n.extend(a);
                d.extend(b);
            }
            (n, d)
        }
        Expr::Div(a, b) => {
            let (mut n, mut d) = split_fraction(*a);
            let (bn, bd) = split_fraction(*b);
            n.extend(bd);
            d.extend(bn);
            (n, d)
        }
        e => (vec![e], Vec::new()),
    }
}

fn pow_q(v: &Q, e: u64) -> Q {
    let mut r = Q::one();
    for _ in 0..e {
        r *= v;
    }
    r
}

fn cancel(num: &mut Vec<Expr>, den: &mut Vec<Expr>) {
    let mut i = 0;
    while i < num.len() {
        if let Some(j) = den.iter().position(|d| *d == num[i]) {
            num.remove(i);
            den.remove(j);
        } else {
            i += 1;
        }
    }
    num.retain(|e| !e.is_one());
    den.retain(|e| !e.is_one());
}

pub fn terms_expr(terms: &[Term]) -> Expr {
    Expr::sum(terms.iter().map(|t| if t.coeff.is_negative() { t.expr().neg() } else { t.expr() }))
}

fn expand_product(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.push(x.mul(y));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Trees of G2 and matrix-tree elimination of intermediates.
    Messi,
    /// Sequential solving of single-unknown steady-state equations.
    Elimination,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteadyParametrization {
    pub chosen: Vec<usize>,
    /// Per species, a positive sum of terms in the chosen variables.
    pub species: Vec<Vec<Term>>,
    pub route: Route,
    /// Species in the order they were expressed.
    pub order: Vec<usize>,
}

impl SteadyParametrization {
    pub fn eval_f64(&self, y: &[f64]) -> Vec<f64> {
        self.species.iter().map(|ts| ts.iter().map(|t| t.eval_f64(y)).sum()).collect()
    }

    pub fn eval(&self, y: &[Q]) -> Vec<Q> {
        self.species.iter().map(|ts| ts.iter().fold(Q::zero(), |a, t| a + t.eval(y))).collect()
    }

    pub fn species_expr(&self, s: usize) -> Expr {
        terms_expr(&self.species[s])
    }
}

/// Check that `chosen` has exactly one species per core block.
pub fn check_chosen(st: &MessiStructure, chosen: &[usize]) -> Result<(), CrnError> {
    let p = &st.partition;
    let mut seen = vec![false; p.num_blocks()];
    for &c in chosen {
        let b = p
            .block_of(c)
            .ok_or_else(|| CrnError::Hypothesis(format!("chosen species {c} is an intermediate")))?;
        if core::mem::replace(&mut seen[b], true) {
            return Err(CrnError::Hypothesis(format!("two chosen species in block {}", b + 1)));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CrnError::Hypothesis(String::from("every core block needs one chosen species")));
    }
    Ok(())
}

/// Parametrization through i-trees of G2, valid for s-toric networks with
/// acyclic G_E and unique simple paths.
pub fn messi_parametrization(
    net: &Network,
    st: &MessiStructure,
    kappa: &[Q],
    chosen: &[usize],
) -> Result<SteadyParametrization, CrnError> {
    check_chosen(st, chosen)?;
    if !st.s_toric.holds() {
        return Err(CrnError::Hypothesis(format!("not s-toric: {}", st.s_toric.diagnostics.join("; "))));
    }
    if !st.minimal {
        return Err(CrnError::Hypothesis(String::from("partition is not minimal: G2 components differ from blocks")));
    }
    let layers = st.layers()?;
    let mu = intermediate_coefficients(st, net, kappa)?;
    let tau = g1_labels(st, net, kappa, &mu);
    let p = &st.partition;
    let nc = net.complexes().len();
    let m = chosen.len();
    let mut species: Vec<Option<Term>> = vec![None; net.num_species()];
    let mut order = Vec::new();
    for layer in &layers {
        for &alpha in layer {
            let k = chosen.iter().position(|&c| p.block_of(c) == Some(alpha)).expect("checked");
            let root = chosen[k];
            species[root] = Some(Term::variable(k, nc, m));
            order.push(root);
            let nodes = &p.blocks()[alpha];
            let pos = |s: usize| nodes.iter().position(|&x| x == s);
            let mut g = LabeledDigraph::new(nodes.len());
            let mut labels = Vec::new();
            for e in st.g2.iter().filter(|e| !e.is_loop()) {
                let (Some(a), Some(b)) = (pos(e.from), pos(e.to)) else { continue };
                let mg = &st.mg2[e.mg2[0]];
                let (y, _) = st.g1[mg.g1];
                let t = &tau[mg.g1];
                let mut label = Term::factor(t.value.clone(), t.symbolic.clone(), Some(y), nc, m);
                if let Some(l) = mg.label_species {
                    let lt = species[l].as_ref().ok_or_else(|| {
                        CrnError::Hypothesis(format!("label species {} not yet parametrized", net.species()[l]))
                    })?;
                    label = label.mul(lt);
                }
                g.add_edge(a, b, t.value.clone(), Expr::sym("e"));
                labels.push(label);
            }
            let tree_of = |r: usize| -> Result<Vec<usize>, CrnError> {
                let trees = enumerate_trees(&g, r, 1 << 20)
                    .ok_or_else(|| CrnError::Hypothesis(String::from("G2 component too large for tree enumeration")))?;
                if trees.len() != 1 {
                    return Err(CrnError::Hypothesis(format!(
                        "block {} has {} spanning trees rooted at {}; condition (iii) not verified",
                        alpha + 1,
                        trees.len(),
                        net.species()[nodes[r]]
                    )));
                }
                Ok(trees.into_iter().next().expect("one"))
            };
            let rpos = pos(root).expect("root in block");
            let t_root = tree_of(rpos)?;
            for (i, &s) in nodes.iter().enumerate() {
                if s == root {
                    continue;
                }
                let t_s = tree_of(i)?;
                let mut term = species[root].clone().expect("root");
                for e in t_s.iter().filter(|e| !t_root.contains(e)) {
                    term = term.mul(&labels[*e]);
                }
                for e in t_root.iter().filter(|e| !t_s.contains(e)) {
                    term = term.div(&labels[*e]);
                }
                species[s] = Some(term);
                order.push(s);
            }
        }
    }
    for (k, &u) in p.intermediates().iter().enumerate() {
        let c = &mu[k];
        let mut term = Term::factor(c.value.clone(), c.symbolic.clone(), Some(c.source), nc, m);
        for s in st.kinds[c.source].species() {
            term = term.mul(species[s].as_ref().expect("core species parametrized"));
        }
        species[u] = Some(term);
        order.push(u);
    }
    Ok(SteadyParametrization {
        chosen: chosen.to_vec(),
        species: species.into_iter().map(|t| vec![t.expect("all species")]).collect(),
        route: Route::Messi,
        order,
    })
}

/// Solve steady-state equations one unknown at a time. An equation is used
/// when it involves a single unknown, linearly, with a one-term coefficient
/// and every remaining term of the opposite sign.
pub fn elimination_parametrization(net: &Network, kappa: &[Q], chosen: &[usize]) -> Result<SteadyParametrization, CrnError> {
    let s = net.num_species();
    let nc = net.complexes().len();
    let m = chosen.len();
    let mut known: Vec<Option<Vec<Term>>> = vec![None; s];
    let mut order = Vec::new();
    for (k, &c) in chosen.iter().enumerate() {
        known[c] = Some(vec![Term::variable(k, nc, m)]);
        order.push(c);
    }
    // Per species equation: (reaction, stoichiometric change).
    let eqs: Vec<Vec<(usize, i64)>> = (0..s)
        .map(|i| {
            net.reactions()
                .iter()
                .enumerate()
                .filter_map(|(r, re)| {
                    let d = net.complexes()[re.target][i] - net.complexes()[re.source][i];
                    (d != 0).then_some((r, d))
                })
                .collect()
        })
        .collect();
    while known.iter().any(|k| k.is_none()) {
        let mut progress = false;
        'eq: for eq in &eqs {
            let mut unknowns: Vec<usize> = Vec::new();
            for &(r, _) in eq {
                for (i, &e) in net.complexes()[net.reactions()[r].source].iter().enumerate() {
                    if e != 0 && known[i].is_none() && !unknowns.contains(&i) {
                        unknowns.push(i);
                    }
                }
            }
            if unknowns.len() != 1 {
                continue;
            }
            let u = unknowns[0];
            let mut a: Vec<Term> = Vec::new();
            let mut b: Vec<Term> = Vec::new();
            for &(r, d) in eq {
                let re = &net.reactions()[r];
                let y = &net.complexes()[re.source];
                if y[u] > 1 {
                    continue 'eq;
                }
                let sym = if d == 1 {
                    Expr::sym(&re.rate)
                } else {
                    Expr::num(q(d.abs())).mul(Expr::sym(&re.rate))
                };
                let mut terms = vec![Term::factor(&kappa[r] * q(d), sym, Some(re.source), nc, m)];
                for (i, &e) in y.iter().enumerate() {
                    if i == u || e == 0 {
                        continue;
                    }
                    for _ in 0..e {
                        terms = expand_product(&terms, known[i].as_ref().expect("known"));
                    }
                }
                if y[u] == 1 {
                    a.extend(terms);
                } else {
                    b.extend(terms);
                }
            }
            if a.len() != 1 || b.is_empty() {
                continue;
            }
            let sa = a[0].coeff.is_positive();
            if b.iter().any(|t| t.coeff.is_positive() == sa) {
                continue;
            }
            let neg_a = a[0].negated();
            let sol: Vec<Term> = b.iter().map(|t| t.div(&neg_a)).collect();
            known[u] = Some(sol);
            order.push(u);
            progress = true;
            break;
        }
        if !progress {
            let left: Vec<&str> = (0..s).filter(|&i| known[i].is_none()).map(|i| net.species()[i].as_str()).collect();
            return Err(CrnError::Hypothesis(format!("elimination stalled with unknowns {}", left.join(", "))));
        }
    }
    Ok(SteadyParametrization {
        chosen: chosen.to_vec(),
        species: known.into_iter().map(|k| k.expect("solved")).collect(),
        route: Route::Elimination,
        order,
    })
}

/// MESSI route when its hypotheses hold, elimination otherwise.
pub fn steady_state_parametrization(
    net: &Network,
    st: &MessiStructure,
    kappa: &[Q],
    chosen: &[usize],
) -> Result<SteadyParametrization, CrnError> {
    check_chosen(st, chosen)?;
    let messi_ok = st.s_toric.holds() && st.minimal && st.layers().is_ok();
    if messi_ok {
        messi_parametrization(net, st, kappa, chosen)
    } else {
        elimination_parametrization(net, kappa, chosen)
    }
}

/// Whether a complex is a core reactant complex.
pub fn core_reactants(net: &Network, st: &MessiStructure) -> Vec<usize> {
    net.reactant_complexes()
        .into_iter()
        .filter(|&c| !matches!(st.kinds[c], ComplexKind::Intermediate(_)))
        .collect()
}
