use std::fmt::Write as _;

use crate::combinat::factorial;
use crate::error::{ForgeError, Result};

/// A good forest in canonical form.
///
/// Vertices `0..n_leaves` are the leaves, leaf `i` carrying label `i`;
/// vertices `n_leaves..n_leaves + n_internal` are internal. Each component is
/// rooted at its smallest leaf, children are ordered by the smallest leaf
/// below them, and internal vertices are numbered in that preorder with
/// components taken by smallest leaf. Edges are stored as sorted `(lo, hi)`
/// pairs. Two forests compare equal exactly when they are isomorphic by a map
/// fixing every leaf label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoodForest {
    n_leaves: usize,
    n_internal: usize,
    edges: Vec<(usize, usize)>,
}

/// A forest together with its coefficient `μ(F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestTerm {
    pub forest: GoodForest,
    pub coefficient: i128,
}

impl ForestTerm {
    pub fn new(forest: GoodForest) -> Self {
        let coefficient = forest.mu();
        Self { forest, coefficient }
    }
}

impl GoodForest {
    /// The forest with no vertices.
    pub fn empty() -> Self {
        Self { n_leaves: 0, n_internal: 0, edges: Vec::new() }
    }

    /// Validates the good-forest conditions and canonicalizes.
    pub fn from_edges(n_leaves: usize, n_internal: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n = n_leaves + n_internal;
        let mut deg = vec![0usize; n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(ForgeError::InvalidForest(format!("bad edge ({a}, {b})")));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        for (v, &d) in deg.iter().enumerate() {
            if v < n_leaves && d != 1 {
                return Err(ForgeError::InvalidForest(format!("leaf {v} has degree {d}")));
            }
            if v >= n_leaves && (d < 4 || d % 2 == 1) {
                return Err(ForgeError::InvalidForest(format!("internal vertex has degree {d}")));
            }
        }
        Self::canonicalize(n_leaves, n_internal, edges)
    }

    /// Canonical form of any leaf-labelled forest whose internal vertices have
    /// degree at least two (so every subtree reaches a leaf). Degree parity is
    /// not checked here.
    pub(crate) fn canonicalize(n_leaves: usize, n_internal: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n = n_leaves + n_internal;
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for v in n_leaves..n {
            if adj[v].len() < 2 {
                return Err(ForgeError::InvalidForest("internal vertex of degree below two".into()));
            }
        }
        let mut parent = vec![usize::MAX; n];
        let mut visited = vec![false; n];
        let mut min_leaf = vec![usize::MAX; n];
        let mut new_id = vec![usize::MAX; n];
        let mut next_internal = n_leaves;
        let mut visit_count = 0usize;
        for root in 0..n_leaves {
            if visited[root] {
                continue;
            }
            // Iterative DFS for postorder min-leaf keys.
            let mut order = Vec::new();
            let mut stack = vec![root];
            visited[root] = true;
            while let Some(v) = stack.pop() {
                order.push(v);
                for &w in &adj[v] {
                    if w == parent[v] {
                        continue;
                    }
                    if visited[w] {
                        return Err(ForgeError::InvalidForest("graph has a cycle".into()));
                    }
                    visited[w] = true;
                    parent[w] = v;
                    stack.push(w);
                }
            }
            visit_count += order.len();
            for &v in order.iter().rev() {
                let own = if v < n_leaves { v } else { usize::MAX };
                let below = adj[v]
                    .iter()
                    .filter(|&&w| w != parent[v])
                    .map(|&w| min_leaf[w])
                    .min()
                    .unwrap_or(usize::MAX);
                min_leaf[v] = own.min(below);
            }
            // Preorder numbering with children sorted by key.
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                if v >= n_leaves {
                    new_id[v] = next_internal;
                    next_internal += 1;
                } else {
                    new_id[v] = v;
                }
                let mut children: Vec<usize> = adj[v].iter().copied().filter(|&w| w != parent[v]).collect();
                children.sort_by_key(|&w| std::cmp::Reverse(min_leaf[w]));
                stack.extend(children);
            }
        }
        if visit_count != n {
            return Err(ForgeError::InvalidForest("component without leaves".into()));
        }
        let mut out: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (new_id[a], new_id[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        out.sort_unstable();
        Ok(Self { n_leaves, n_internal, edges: out })
    }

    /// The single edge joining two leaves.
    pub fn pair() -> Self {
        Self { n_leaves: 2, n_internal: 0, edges: vec![(0, 1)] }
    }

    /// The star on `m` leaves (the pair for `m = 2`).
    pub fn star(m: usize) -> Result<Self> {
        if m == 2 {
            return Ok(Self::pair());
        }
        let edges: Vec<(usize, usize)> = (0..m).map(|i| (i, m)).collect();
        Self::from_edges(m, 1, &edges)
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn n_internal(&self) -> usize {
        self.n_internal
    }

    pub fn n_vertices(&self) -> usize {
        self.n_leaves + self.n_internal
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.n_leaves
    }

    pub fn internal_vertices(&self) -> std::ops::Range<usize> {
        self.n_leaves..self.n_vertices()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Edges incident to `v`, in stored order: the auxiliary ordering used by
    /// composition.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&k| self.edges[k].0 == v || self.edges[k].1 == v).collect()
    }

    /// Connected components as vertex lists, ordered by smallest leaf.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n_vertices()];
        let mut out = Vec::new();
        for root in 0..self.n_leaves {
            if seen[root] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![root];
            seen[root] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Leaves of each component, ascending.
    pub fn component_leaves(&self) -> Vec<Vec<usize>> {
        self.components()
            .into_iter()
            .map(|c| c.into_iter().filter(|&v| v < self.n_leaves).collect())
            .collect()
    }

    pub fn is_tree(&self) -> bool {
        self.n_leaves > 0 && self.components().len() == 1
    }

    /// `μ(F) = ∏_{internal v} −(deg v − 2)!`; one for the empty product.
    pub fn mu(&self) -> i128 {
        self.degrees()[self.n_leaves..].iter().map(|&d| -factorial(d - 2)).product()
    }

    /// The same forest with leaf `i` relabelled `perm[i]`.
    pub fn relabel_leaves(&self, perm: &[usize]) -> Self {
        let map = |v: usize| if v < self.n_leaves { perm[v] } else { v };
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (map(a), map(b))).collect();
        Self::canonicalize(self.n_leaves, self.n_internal, &edges).expect("relabelling preserves validity")
    }

    /// Disjoint union; leaves of `parts[k]` are sent to `leaf_maps[k]`.
    pub fn union_of(n_leaves: usize, parts: &[(&GoodForest, &[usize])]) -> Result<Self> {
        let mut edges = Vec::new();
        let mut next = n_leaves;
        for (f, leaf_map) in parts {
            let base = next;
            let map = |v: usize| if v < f.n_leaves { leaf_map[v] } else { base + (v - f.n_leaves) };
            edges.extend(f.edges.iter().map(|&(a, b)| (map(a), map(b))));
            next += f.n_internal;
        }
        Self::from_edges(n_leaves, next - n_leaves, &edges)
    }

    /// DOT text for inspection: leaves as labelled points, internal vertices as boxes.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph forest {\n");
        for v in 0..self.n_leaves {
            let _ = writeln!(s, "  v{v} [shape=point, xlabel=\"{v}\"];");
        }
        for v in self.internal_vertices() {
            let _ = writeln!(s, "  v{v} [shape=box, label=\"\"];");
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "  v{a} -- v{b};");
        }
        s.push_str("}\n");
        s
    }
}
