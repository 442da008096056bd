//! MESSI partitions, their validation and the derived graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::trees::{matrix_tree, tree_sum_expr, LabeledDigraph};
use super::Network;
use crate::expr::Expr;
use crate::linalg::{RationalMatrix, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("species {0} assigned twice")]
    Duplicate(usize),
    #[error("species {0} not assigned to any block")]
    Missing(usize),
    #[error("species index {0} out of range")]
    OutOfRange(usize),
    #[error("core block {0} is empty")]
    EmptyBlock(usize),
    #[error("partition has no core blocks")]
    NoCoreBlocks,
}

/// Intermediates plus core blocks. Core blocks are 0-based here; block `a`
/// is numbered `a + 1` in files and reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    intermediates: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<Option<usize>>,
}

impl Partition {
    pub fn new(n_species: usize, intermediates: Vec<usize>, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        if blocks.is_empty() {
            return Err(PartitionError::NoCoreBlocks);
        }
        let mut seen = vec![false; n_species];
        let mut block_of = vec![None; n_species];
        for &s in &intermediates {
            if s >= n_species {
                return Err(PartitionError::OutOfRange(s));
            }
            if seen[s] {
                return Err(PartitionError::Duplicate(s));
            }
            seen[s] = true;
        }
        for (a, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(PartitionError::EmptyBlock(a + 1));
            }
            for &s in b {
                if s >= n_species {
                    return Err(PartitionError::OutOfRange(s));
                }
                if seen[s] {
                    return Err(PartitionError::Duplicate(s));
                }
                seen[s] = true;
                block_of[s] = Some(a);
            }
        }
        if let Some(s) = seen.iter().position(|&x| !x) {
            return Err(PartitionError::Missing(s));
        }
        Ok(Partition { intermediates, blocks, block_of })
    }

    pub fn intermediates(&self) -> &[usize] {
        &self.intermediates
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Core block of a species, `None` for intermediates.
    pub fn block_of(&self, species: usize) -> Option<usize> {
        self.block_of[species]
    }

    pub fn is_intermediate(&self, species: usize) -> bool {
        self.block_of[species].is_none()
    }

    /// Position of an intermediate species in `intermediates()`.
    pub fn intermediate_index(&self, species: usize) -> Option<usize> {
        self.intermediates.iter().position(|&s| s == species)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexKind {
    Intermediate(usize),
    Mono(usize),
    /// Two core species, smaller species index first.
    Bi(usize, usize),
    Invalid,
}

impl ComplexKind {
    pub fn is_core(&self) -> bool {
        matches!(self, ComplexKind::Mono(_) | ComplexKind::Bi(..))
    }

    pub fn species(&self) -> Vec<usize> {
        match *self {
            ComplexKind::Intermediate(s) | ComplexKind::Mono(s) => vec![s],
            ComplexKind::Bi(a, b) => vec![a, b],
            ComplexKind::Invalid => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MessiError {
    #[error("partition: {0}")]
    Partition(#[from] PartitionError),
    #[error("MESSI rules violated: {}", .0.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    Violations(Vec<Violation>),
    #[error("intermediate {0} is reached from {1} core complexes, expected exactly one")]
    NonUniqueSource(String, usize),
    #[error("tree sum for the collapsed intermediate graph vanishes")]
    DegenerateTrees,
    #[error("G_E has a directed cycle")]
    CyclicGE,
    #[error("conservation law for block {0} is not conserved")]
    LawNotConserved(usize),
    #[error("missing rate constants")]
    MissingRates,
    #[error("{0}")]
    Hypothesis(String),
}

fn classify(net: &Network, p: &Partition, c: usize) -> ComplexKind {
    let v = &net.complexes()[c];
    let support: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
    match support.as_slice() {
        [s] if v[*s] == 1 => {
            if p.is_intermediate(*s) {
                ComplexKind::Intermediate(*s)
            } else {
                ComplexKind::Mono(*s)
            }
        }
        [a, b] if v[*a] == 1 && v[*b] == 1 && !p.is_intermediate(*a) && !p.is_intermediate(*b) => ComplexKind::Bi(*a, *b),
        _ => ComplexKind::Invalid,
    }
}

/// For each complex, the complexes reached by a reaction path whose interior
/// nodes are intermediate complexes.
fn reach_sets(net: &Network, kinds: &[ComplexKind]) -> Vec<BTreeSet<usize>> {
    let n = net.complexes().len();
    let mut succ = vec![Vec::new(); n];
    for r in net.reactions() {
        succ[r.source].push(r.target);
    }
    (0..n)
        .map(|start| {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<usize> = succ[start].clone();
            while let Some(z) = stack.pop() {
                if !seen.insert(z) {
                    continue;
                }
                if matches!(kinds[z], ComplexKind::Intermediate(_)) {
                    stack.extend(succ[z].iter().copied());
                }
            }
            seen
        })
        .collect()
}

/// Every structural rule, with one entry per offending complex or pair.
pub fn validate_messi(net: &Network, p: &Partition) -> Vec<Violation> {
    let mut out = Vec::new();
    let kinds: Vec<ComplexKind> = (0..net.complexes().len()).map(|c| classify(net, p, c)).collect();
    for (c, k) in kinds.iter().enumerate() {
        let v = &net.complexes()[c];
        let has_int = v.iter().enumerate().any(|(i, &e)| e != 0 && p.is_intermediate(i));
        if *k == ComplexKind::Invalid {
            let (rule, why) = if has_int {
                ("intermediate-complex", "an intermediate species must form its complex alone")
            } else {
                ("core-complex", "core complexes must be one species or two distinct species")
            };
            out.push(Violation { rule, message: format!("complex {}: {why}", net.complex_label(c)) });
        }
        if let ComplexKind::Bi(a, b) = *k {
            if p.block_of(a) == p.block_of(b) {
                out.push(Violation {
                    rule: "bimolecular-blocks",
                    message: format!("complex {}: both species lie in the same block", net.complex_label(c)),
                });
            }
        }
    }
    let reach = reach_sets(net, &kinds);
    for &u in p.intermediates() {
        let Some(c) = kinds.iter().position(|k| *k == ComplexKind::Intermediate(u)) else {
            out.push(Violation {
                rule: "intermediate-complex",
                message: format!("intermediate {} does not occur as a complex", net.species()[u]),
            });
            continue;
        };
        let fed = (0..kinds.len()).any(|y| kinds[y].is_core() && reach[y].contains(&c));
        let drains = reach[c].iter().any(|&z| kinds[z].is_core());
        if !fed || !drains {
            out.push(Violation {
                rule: "intermediate-reachability",
                message: format!("intermediate {} must be reached from and lead to core complexes", net.species()[u]),
            });
        }
    }
    for y in 0..kinds.len() {
        if !kinds[y].is_core() {
            continue;
        }
        for &z in &reach[y] {
            if z == y || !kinds[z].is_core() {
                continue;
            }
            let label = || format!("{} ->o {}", net.complex_label(y), net.complex_label(z));
            match (kinds[y], kinds[z]) {
                (ComplexKind::Mono(a), ComplexKind::Mono(b)) => {
                    if p.block_of(a) != p.block_of(b) {
                        out.push(Violation {
                            rule: "same-block",
                            message: format!("{}: monomolecular species in different blocks", label()),
                        });
                    }
                }
                (ComplexKind::Bi(a, b), ComplexKind::Bi(c, d)) => {
                    let (ba, bb, bc, bd) = (p.block_of(a), p.block_of(b), p.block_of(c), p.block_of(d));
                    let straight = ba == bc && bb == bd && ba != bb;
                    let crossed = ba == bd && bb == bc && ba != bb;
                    if !straight && !crossed {
                        out.push(Violation {
                            rule: "crossed-block",
                            message: format!("{}: species do not pair up across two blocks", label()),
                        });
                    }
                }
                _ => out.push(Violation {
                    rule: "mono-bi",
                    message: format!("{}: must pass through an intermediate", label()),
                }),
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mg2Edge {
    pub from: usize,
    pub to: usize,
    /// Index into `MessiStructure::g1`.
    pub g1: usize,
    /// Species whose concentration multiplies the label.
    pub label_species: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G2Edge {
    pub from: usize,
    pub to: usize,
    pub mg2: Vec<usize>,
}

impl G2Edge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SToricReport {
    pub unique_sources: bool,
    pub no_parallel_edges: bool,
    pub weakly_reversible: bool,
    pub unique_simple_paths: bool,
    pub diagnostics: Vec<String>,
}

impl SToricReport {
    /// Conditions (i), (ii) and (iii), the last one only in the
    /// unique-simple-path regime.
    pub fn holds(&self) -> bool {
        self.unique_sources && self.no_parallel_edges && self.weakly_reversible && self.unique_simple_paths
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessiStructure {
    pub partition: Partition,
    pub kinds: Vec<ComplexKind>,
    /// Core sources of each intermediate, indexed like `partition.intermediates()`.
    pub intermediate_sources: Vec<Vec<usize>>,
    /// Edges y -> y' of G1 between core complexes.
    pub g1: Vec<(usize, usize)>,
    pub mg2: Vec<Mg2Edge>,
    pub g2: Vec<G2Edge>,
    /// Connected components of G2 as sorted species lists.
    pub components: Vec<Vec<usize>>,
    /// Edges between core blocks.
    pub ge: Vec<(usize, usize)>,
    pub s_toric: SToricReport,
    /// Components of G2 coincide with the core blocks.
    pub minimal: bool,
}

impl MessiStructure {
    pub fn new(net: &Network, p: &Partition) -> Result<Self, MessiError> {
        let violations = validate_messi(net, p);
        if !violations.is_empty() {
            return Err(MessiError::Violations(violations));
        }
        let kinds: Vec<ComplexKind> = (0..net.complexes().len()).map(|c| classify(net, p, c)).collect();
        let reach = reach_sets(net, &kinds);
        let intermediate_sources: Vec<Vec<usize>> = p
            .intermediates()
            .iter()
            .map(|&u| {
                let c = kinds.iter().position(|k| *k == ComplexKind::Intermediate(u)).expect("validated");
                (0..kinds.len()).filter(|&y| kinds[y].is_core() && reach[y].contains(&c)).collect()
            })
            .collect();
        let mut g1 = Vec::new();
        for y in 0..kinds.len() {
            if kinds[y].is_core() {
                for &z in &reach[y] {
                    if z != y && kinds[z].is_core() {
                        g1.push((y, z));
                    }
                }
            }
        }
        let mut mg2 = Vec::new();
        for (e, &(y, z)) in g1.iter().enumerate() {
            match (kinds[y], kinds[z]) {
                (ComplexKind::Mono(a), ComplexKind::Mono(b)) => {
                    mg2.push(Mg2Edge { from: a, to: b, g1: e, label_species: None });
                }
                (ComplexKind::Bi(a, b), ComplexKind::Bi(c, d)) => {
                    let (c, d) = if p.block_of(a) == p.block_of(c) { (c, d) } else { (d, c) };
                    mg2.push(Mg2Edge { from: a, to: c, g1: e, label_species: Some(b) });
                    mg2.push(Mg2Edge { from: b, to: d, g1: e, label_species: Some(a) });
                }
                _ => unreachable!("validated"),
            }
        }
        let mut grouped: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in mg2.iter().enumerate() {
            grouped.entry((e.from, e.to)).or_default().push(i);
        }
        let g2: Vec<G2Edge> = grouped.into_iter().map(|((from, to), mg2)| G2Edge { from, to, mg2 }).collect();

        let core: Vec<usize> = (0..net.num_species()).filter(|&s| !p.is_intermediate(s)).collect();
        let components = undirected_components(&core, g2.iter().map(|e| (e.from, e.to)));
        let minimal = components.len() == p.num_blocks()
            && components.iter().all(|c| {
                let mut b = p.blocks()[p.block_of(c[0]).expect("core")].clone();
                b.sort_unstable();
                b == *c
            });

        let mut ge = BTreeSet::new();
        for e in g2.iter().filter(|e| !e.is_loop()) {
            let beta = p.block_of(e.from).expect("core");
            for &m in &e.mg2 {
                if let Some(l) = mg2[m].label_species {
                    let alpha = p.block_of(l).expect("core");
                    if alpha != beta {
                        ge.insert((alpha, beta));
                    }
                }
            }
        }
        let ge: Vec<(usize, usize)> = ge.into_iter().collect();

        let mut st = SToricReport { unique_sources: true, no_parallel_edges: true, weakly_reversible: true, unique_simple_paths: true, diagnostics: Vec::new() };
        for (k, src) in intermediate_sources.iter().enumerate() {
            if src.len() != 1 {
                st.unique_sources = false;
                st.diagnostics.push(format!(
                    "(i) intermediate {} has {} core sources",
                    net.species()[p.intermediates()[k]],
                    src.len()
                ));
            }
        }
        for e in g2.iter().filter(|e| !e.is_loop() && e.mg2.len() > 1) {
            st.no_parallel_edges = false;
            st.diagnostics.push(format!(
                "(ii) MG2 has {} parallel edges {} -> {}",
                e.mg2.len(),
                net.species()[e.from],
                net.species()[e.to]
            ));
        }
        let adj = adjacency(net.num_species(), &g2);
        for e in g2.iter().filter(|e| !e.is_loop()) {
            if !reachable(&adj, e.to, e.from) {
                st.weakly_reversible = false;
                st.diagnostics.push(format!(
                    "(ii) G2 not weakly reversible: no path {} -> {}",
                    net.species()[e.to],
                    net.species()[e.from]
                ));
            }
        }
        for comp in &components {
            for &u in comp {
                for &v in comp {
                    if u != v && count_simple_paths(&adj, u, v, 2) > 1 {
                        st.unique_simple_paths = false;
                        st.diagnostics.push(format!(
                            "(iii) several simple paths {} -> {}; condition not verified",
                            net.species()[u],
                            net.species()[v]
                        ));
                    }
                }
            }
        }
        if !minimal {
            st.diagnostics.push(String::from("components of G2 do not match the core blocks"));
        }
        Ok(MessiStructure { partition: p.clone(), kinds, intermediate_sources, g1, mg2, g2, components, ge, s_toric: st, minimal })
    }

    /// G2 adjacency without loops (that is, G2 with loops deleted).
    pub fn g2_adjacency(&self, n_species: usize) -> Vec<Vec<usize>> {
        adjacency(n_species, &self.g2)
    }

    pub fn layers(&self) -> Result<Vec<Vec<usize>>, MessiError> {
        layer_sets(self.partition.num_blocks(), &self.ge)
    }

    /// Blocks of the core complex `y` other than `alpha`, with the species.
    fn species_in_block(&self, y: usize, alpha: usize) -> Option<usize> {
        self.kinds[y].species().into_iter().find(|&s| self.partition.block_of(s) == Some(alpha))
    }
}

fn undirected_components(nodes: &[usize], edges: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let max = nodes.iter().copied().max().map_or(0, |m| m + 1);
    let mut parent: Vec<usize> = (0..max).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let n = p[x];
            p[x] = r;
            x = n;
        }
        r
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in nodes {
        let r = find(&mut parent, v);
        comps.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = comps.into_values().collect();
    for c in out.iter_mut() {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn adjacency(n: usize, g2: &[G2Edge]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in g2.iter().filter(|e| !e.is_loop()) {
        adj[e.from].push(e.to);
    }
    adj
}

fn reachable(adj: &[Vec<usize>], from: usize, to: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if core::mem::replace(&mut seen[v], true) {
            continue;
        }
        stack.extend(adj[v].iter().copied());
    }
    false
}

/// Number of simple directed paths from `u` to `v`, counting stops at `cap`.
pub fn count_simple_paths(adj: &[Vec<usize>], u: usize, v: usize, cap: usize) -> usize {
    fn go(adj: &[Vec<usize>], x: usize, v: usize, on: &mut [bool], count: &mut usize, cap: usize) {
        if *count >= cap {
            return;
        }
        if x == v {
            *count += 1;
            return;
        }
        on[x] = true;
        for &y in &adj[x] {
            if !on[y] {
                go(adj, y, v, on, count, cap);
            }
        }
        on[x] = false;
    }
    let mut on = vec![false; adj.len()];
    let mut count = 0;
    go(adj, u, v, &mut on, &mut count, cap);
    count
}

/// Simple directed cycles as node sequences, each listed once starting from
/// its smallest node.
pub fn simple_cycles(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn go(adj: &[Vec<usize>], start: usize, x: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        for &y in &adj[x] {
            if y == start {
                out.push(path.clone());
            } else if y > start && !on[y] {
                on[y] = true;
                path.push(y);
                go(adj, start, y, path, on, out);
                path.pop();
                on[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on = vec![false; adj.len()];
    for s in 0..adj.len() {
        let mut path = vec![s];
        on[s] = true;
        go(adj, s, s, &mut path, &mut on, &mut out);
        on[s] = false;
    }
    out
}

/// Stratification of the blocks by G_E: L_0 has no incoming edges and L_k
/// collects blocks whose predecessors all lie in earlier layers.
pub fn layer_sets(n_blocks: usize, ge: &[(usize, usize)]) -> Result<Vec<Vec<usize>>, MessiError> {
    let mut layer = vec![usize::MAX; n_blocks];
    let mut layers = Vec::new();
    let mut assigned = 0;
    while assigned < n_blocks {
        let k = layers.len();
        let next: Vec<usize> = (0..n_blocks)
            .filter(|&b| layer[b] == usize::MAX)
            .filter(|&b| ge.iter().filter(|e| e.1 == b).all(|&(a, _)| layer[a] < k))
            .collect();
        if next.is_empty() {
            return Err(MessiError::CyclicGE);
        }
        for &b in &next {
            layer[b] = k;
        }
        assigned += next.len();
        layers.push(next);
    }
    Ok(layers)
}

/// The 0/1 conservation laws, one per core block, over all species.
pub fn messi_conservation(net: &Network, p: &Partition) -> Result<Vec<Vec<Q>>, MessiError> {
    let st = MessiStructure::new(net, p)?;
    let mut laws = Vec::new();
    for (a, block) in p.blocks().iter().enumerate() {
        let mut law = vec![Q::zero(); net.num_species()];
        for &s in block {
            law[s] = Q::one();
        }
        for (k, &u) in p.intermediates().iter().enumerate() {
            let fed = st.intermediate_sources[k]
                .iter()
                .any(|&y| st.kinds[y].species().iter().any(|&s| p.block_of(s) == Some(a)));
            if fed {
                law[u] = Q::one();
            }
        }
        let n = net.stoichiometric_matrix();
        let row = RationalMatrix::from_rows(vec![law.clone()]).expect("row");
        let prod = row.mul(&n).expect("dims");
        if prod.row(0).iter().any(|v| !v.is_zero()) {
            return Err(MessiError::LawNotConserved(a + 1));
        }
        laws.push(law);
    }
    let m = RationalMatrix::from_rows(laws.clone()).expect("rows");
    if m.rank() != laws.len() {
        return Err(MessiError::Hypothesis(String::from("block conservation laws are linearly dependent")));
    }
    Ok(laws)
}

/// The collapsed graph on intermediates plus `*` (the last node), with
/// concentration symbols set to one.
pub fn hat_graph(st: &MessiStructure, net: &Network, kappa: &[Q]) -> LabeledDigraph {
    let p = &st.partition;
    let star = p.intermediates().len();
    let node = |c: usize| match st.kinds[c] {
        ComplexKind::Intermediate(u) => p.intermediate_index(u).expect("intermediate"),
        _ => star,
    };
    let mut g = LabeledDigraph::new(star + 1);
    for (r, re) in net.reactions().iter().enumerate() {
        let (a, b) = (node(re.source), node(re.target));
        if a == star && b == star {
            continue;
        }
        g.add_edge(a, b, kappa[r].clone(), Expr::sym(&re.rate));
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntermediateCoefficient {
    pub species: usize,
    /// The unique core complex feeding this intermediate.
    pub source: usize,
    pub value: Q,
    pub symbolic: Expr,
}

const TREE_LIMIT: usize = 1 << 16;

/// mu_k = rho_k / rho on the collapsed graph, one per intermediate.
pub fn intermediate_coefficients(
    st: &MessiStructure,
    net: &Network,
    kappa: &[Q],
) -> Result<Vec<IntermediateCoefficient>, MessiError> {
    let p = &st.partition;
    for (k, src) in st.intermediate_sources.iter().enumerate() {
        if src.len() != 1 {
            return Err(MessiError::NonUniqueSource(net.species()[p.intermediates()[k]].clone(), src.len()));
        }
    }
    let g = hat_graph(st, net, kappa);
    let star = p.intermediates().len();
    let rho = matrix_tree(&g, star);
    if rho.is_zero() {
        return Err(MessiError::DegenerateTrees);
    }
    let comps = undirected_components(
        &(0..star).collect::<Vec<_>>(),
        g.edges.iter().filter(|e| e.from != star && e.to != star).map(|e| (e.from, e.to)),
    );
    let mut out = Vec::new();
    for (k, &u) in p.intermediates().iter().enumerate() {
        let value = matrix_tree(&g, k) / &rho;
        let comp = comps.iter().find(|c| c.contains(&k)).expect("component");
        let mut keep = comp.clone();
        keep.push(star);
        let sub = g.induced(&keep);
        let root = keep.iter().position(|&v| v == k).expect("member");
        let symbolic = match (tree_sum_expr(&sub, root, TREE_LIMIT), tree_sum_expr(&sub, keep.len() - 1, TREE_LIMIT)) {
            (Some(num), Some(den)) => num.div(den),
            _ => Expr::num(value.clone()),
        };
        out.push(IntermediateCoefficient { species: u, source: st.intermediate_sources[k][0], value, symbolic });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G1Label {
    pub value: Q,
    pub symbolic: Expr,
}

/// tau for every G1 edge: the direct rate plus rates leaving fed intermediates
/// weighted by their mu.
pub fn g1_labels(st: &MessiStructure, net: &Network, kappa: &[Q], mu: &[IntermediateCoefficient]) -> Vec<G1Label> {
    st.g1
        .iter()
        .map(|&(y, z)| {
            let mut value = Q::zero();
            let mut terms = Vec::new();
            for (r, re) in net.reactions().iter().enumerate() {
                if re.target != z {
                    continue;
                }
                if re.source == y {
                    value += &kappa[r];
                    terms.push(Expr::sym(&re.rate));
                } else if let ComplexKind::Intermediate(u) = st.kinds[re.source] {
                    let m = &mu[st.partition.intermediate_index(u).expect("intermediate")];
                    if m.source == y {
                        value += &kappa[r] * &m.value;
                        terms.push(Expr::sym(&re.rate).mul(m.symbolic.clone()));
                    }
                }
            }
            G1Label { value, symbolic: Expr::sum(terms) }
        })
        .collect()
}

/// Ordered sets M_0, M'_0, M_1, M'_1, ... of reactant core complexes for a
/// block, relative to its chosen species.
pub fn mq_sets(
    st: &MessiStructure,
    net: &Network,
    alpha: usize,
    root: usize,
    layers: &[Vec<usize>],
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let p = &st.partition;
    let layer_of = |b: usize| layers.iter().position(|l| l.contains(&b)).unwrap_or(usize::MAX);
    let la = layer_of(alpha);
    let reactants = net.reactant_complexes();
    let y_alpha: Vec<usize> = reactants
        .into_iter()
        .filter(|&y| match st.kinds[y] {
            ComplexKind::Mono(s) => p.block_of(s) == Some(alpha),
            ComplexKind::Bi(a, b) => {
                let (ba, bb) = (p.block_of(a).expect("core"), p.block_of(b).expect("core"));
                (ba == alpha && layer_of(bb) < la) || (bb == alpha && layer_of(ba) < la)
            }
            _ => false,
        })
        .collect();
    let adj = st.g2_adjacency(net.num_species());
    let cycles: Vec<Vec<usize>> = simple_cycles(&adj)
        .into_iter()
        .filter(|c| p.block_of(c[0]) == Some(alpha))
        .collect();
    let appears = |y: usize, c: &[usize]| {
        let Some(x) = st.species_in_block(y, alpha) else { return false };
        (0..c.len()).any(|i| {
            let (a, b) = (c[i], c[(i + 1) % c.len()]);
            a == x
                && st.mg2.iter().any(|e| e.from == a && e.to == b && st.g1[e.g1].0 == y)
        })
    };
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut seen_nodes: BTreeSet<usize> = BTreeSet::new();
    let mut frontier = vec![root];
    let mut out = Vec::new();
    while !frontier.is_empty() {
        seen_nodes.extend(frontier.iter().copied());
        let m: Vec<usize> = y_alpha
            .iter()
            .copied()
            .filter(|&y| !used.contains(&y) && st.species_in_block(y, alpha).is_some_and(|s| frontier.contains(&s)))
            .collect();
        used.extend(m.iter().copied());
        let through: Vec<&Vec<usize>> = cycles.iter().filter(|c| c.iter().any(|v| frontier.contains(v))).collect();
        let mp: Vec<usize> = y_alpha
            .iter()
            .copied()
            .filter(|&y| !used.contains(&y) && through.iter().any(|c| appears(y, c)))
            .collect();
        used.extend(mp.iter().copied());
        out.push((m, mp));
        let mut next: BTreeSet<usize> = BTreeSet::new();
        for c in &through {
            next.extend(c.iter().copied().filter(|v| !seen_nodes.contains(v)));
        }
        frontier = next.into_iter().collect();
    }
    out
}
