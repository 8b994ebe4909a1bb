use std::collections::BTreeSet;

use crate::forests::GoodForest;

/// A subtree of `MaxSpan(F, s)`: the minimal subtree spanning the leaves of
/// one component that carry `index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanSubtree {
    pub index: usize,
    /// Position of the component among `forest.components()`.
    pub component: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MaxSpanForest {
    pub subtrees: Vec<SpanSubtree>,
}

impl MaxSpanForest {
    pub fn is_empty(&self) -> bool {
        self.subtrees.is_empty()
    }

    /// Tight constraint pattern: the forced value of each internal vertex.
    pub fn pins(&self, forest: &GoodForest) -> Vec<Option<usize>> {
        let ml = forest.n_leaves();
        let mut pins = vec![None; forest.n_internal()];
        for t in &self.subtrees {
            for &v in t.vertices.iter().filter(|&&v| v >= ml) {
                pins[v - ml] = Some(t.index);
            }
        }
        pins
    }
}

/// Minimal subtree of a tree containing `targets`: prune non-target vertices
/// of degree at most one until none remain.
fn steiner_tree(comp: &[usize], adj: &[Vec<usize>], targets: &[usize]) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut alive: BTreeSet<usize> = comp.iter().copied().collect();
    let target: BTreeSet<usize> = targets.iter().copied().collect();
    loop {
        let prune: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|v| !target.contains(v) && adj[*v].iter().filter(|w| alive.contains(w)).count() <= 1)
            .collect();
        if prune.is_empty() {
            break;
        }
        for v in prune {
            alive.remove(&v);
        }
    }
    let mut edges = Vec::new();
    for &v in &alive {
        for &w in &adj[v] {
            if v < w && alive.contains(&w) {
                edges.push((v, w));
            }
        }
    }
    (alive.into_iter().collect(), edges)
}

/// Greedy construction: indices ascending in the outer loop, components in
/// order of smallest leaf in the inner loop; a spanning subtree is added when
/// it is vertex-disjoint from everything added so far.
pub fn max_span(forest: &GoodForest, s: &[usize]) -> MaxSpanForest {
    let adj = forest.adjacency();
    let comps = forest.components();
    let indices: BTreeSet<usize> = s.iter().copied().collect();
    let mut used = vec![false; forest.n_vertices()];
    let mut out = MaxSpanForest::default();
    for &i in &indices {
        for (ci, comp) in comps.iter().enumerate() {
            let leaves: Vec<usize> = comp.iter().copied().filter(|&v| forest.is_leaf(v) && s[v] == i).collect();
            if leaves.len() < 2 {
                continue;
            }
            let (vertices, edges) = steiner_tree(comp, &adj, &leaves);
            if vertices.iter().any(|&v| used[v]) {
                continue;
            }
            for &v in &vertices {
                used[v] = true;
            }
            out.subtrees.push(SpanSubtree { index: i, component: ci, vertices, edges });
        }
    }
    out
}

/// Whether the internal assignment `a` is tight for `span`.
pub fn is_tight(span: &MaxSpanForest, forest: &GoodForest, a: &[usize]) -> bool {
    span.pins(forest).iter().zip(a).all(|(p, &x)| p.is_none_or(|p| p == x))
}
