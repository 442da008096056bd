//! Rooted spanning-tree sums on labeled digraphs.
//!
//! A tree rooted at `r` here is an in-arborescence: every node other than
//! `r` has exactly one outgoing tree edge and all paths end at `r`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::expr::Expr;
use crate::linalg::{RationalMatrix, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledEdge {
    pub from: usize,
    pub to: usize,
    pub weight: Q,
    pub label: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledDigraph {
    pub nodes: usize,
    pub edges: Vec<LabeledEdge>,
}

impl LabeledDigraph {
    pub fn new(nodes: usize) -> Self {
        LabeledDigraph { nodes, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, weight: Q, label: Expr) {
        self.edges.push(LabeledEdge { from, to, weight, label });
    }

    /// Out-degree Laplacian D_out - W, self-loops ignored.
    pub fn laplacian(&self) -> RationalMatrix {
        let mut l = RationalMatrix::zeros(self.nodes, self.nodes);
        for e in &self.edges {
            if e.from == e.to {
                continue;
            }
            let d = l.get(e.from, e.from) + &e.weight;
            l.set(e.from, e.from, d);
            let w = l.get(e.from, e.to) - &e.weight;
            l.set(e.from, e.to, w);
        }
        l
    }

    /// Induced subgraph on `keep` (in that order).
    pub fn induced(&self, keep: &[usize]) -> LabeledDigraph {
        let pos = |v: usize| keep.iter().position(|&k| k == v);
        let mut g = LabeledDigraph::new(keep.len());
        for e in &self.edges {
            if let (Some(a), Some(b)) = (pos(e.from), pos(e.to)) {
                g.add_edge(a, b, e.weight.clone(), e.label.clone());
            }
        }
        g
    }

    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes];
        for (i, e) in self.edges.iter().enumerate() {
            if e.from != e.to {
                out[e.from].push(i);
            }
        }
        out
    }
}

/// Sum over trees rooted at `root` of the product of edge weights, via the
/// principal minor of the Laplacian.
pub fn matrix_tree(g: &LabeledDigraph, root: usize) -> Q {
    let keep: Vec<usize> = (0..g.nodes).filter(|&v| v != root).collect();
    if keep.is_empty() {
        return Q::from_integer(1.into());
    }
    let l = g.laplacian().select_rows(&keep).select_columns(&keep);
    l.determinant().expect("square minor")
}

/// Every tree rooted at `root`, as edge index lists ordered by source node.
/// Returns `None` when the number of candidate edge choices exceeds `limit`.
pub fn enumerate_trees(g: &LabeledDigraph, root: usize, limit: usize) -> Option<Vec<Vec<usize>>> {
    let out = g.out_edges();
    let others: Vec<usize> = (0..g.nodes).filter(|&v| v != root).collect();
    let mut total: usize = 1;
    for &v in &others {
        if out[v].is_empty() {
            return Some(Vec::new());
        }
        total = total.checked_mul(out[v].len())?;
        if total > limit {
            return None;
        }
    }
    let mut trees = Vec::new();
    let mut choice = vec![0usize; others.len()];
    let mut next = vec![usize::MAX; g.nodes];
    loop {
        for (k, &v) in others.iter().enumerate() {
            next[v] = g.edges[out[v][choice[k]]].to;
        }
        if reaches_root(&next, &others, root) {
            trees.push(others.iter().zip(&choice).map(|(&v, &c)| out[v][c]).collect());
        }
        let mut k = 0;
        loop {
            if k == others.len() {
                return Some(trees);
            }
            choice[k] += 1;
            if choice[k] < out[others[k]].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn reaches_root(next: &[usize], others: &[usize], root: usize) -> bool {
    let n = next.len();
    others.iter().all(|&start| {
        let mut v = start;
        for _ in 0..n {
            if v == root {
                return true;
            }
            v = next[v];
        }
        v == root
    })
}

/// Tree sum by explicit enumeration.
pub fn enumerated_tree_sum(g: &LabeledDigraph, root: usize, limit: usize) -> Option<Q> {
    let trees = enumerate_trees(g, root, limit)?;
    Some(trees.iter().fold(Q::zero(), |acc, t| {
        acc + t.iter().fold(Q::from_integer(1.into()), |p, &e| p * &g.edges[e].weight)
    }))
}

/// Symbolic tree sum, one product of labels per tree.
pub fn tree_sum_expr(g: &LabeledDigraph, root: usize, limit: usize) -> Option<Expr> {
    let trees = enumerate_trees(g, root, limit)?;
    Some(Expr::sum(trees.iter().map(|t| Expr::product(t.iter().map(|&e| g.edges[e].label.clone())))))
}
