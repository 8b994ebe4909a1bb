use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::error::{ForgeError, Result};

use super::diagram::{LabelledDiagram, LabelledEdge};

fn encode(t: &[usize], dims: &[usize]) -> usize {
    t.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

fn decode(mut x: usize, dims: &[usize]) -> Vec<usize> {
    let mut t = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        t[k] = x % dims[k];
        x /= dims[k];
    }
    t
}

/// Connected components together with the axis permutations that recover
/// the original matrix from the Kronecker product of component matrices.
#[derive(Clone, Debug)]
pub struct Tensorization {
    pub components: Vec<LabelledDiagram>,
    /// `left_positions[k]` is the original left position of the `k`-th left
    /// axis of the Kronecker product.
    pub left_positions: Vec<usize>,
    pub right_positions: Vec<usize>,
    left_dims: Vec<usize>,
    right_dims: Vec<usize>,
}

impl Tensorization {
    /// `Π_L (⊗_k Z^{G_k}) Π_Rᵀ`.
    pub fn assemble(&self) -> DMatrix<f64> {
        let k = self
            .components
            .iter()
            .fold(DMatrix::from_element(1, 1, 1.0), |acc, c| acc.kronecker(&c.eval()));
        let kl: Vec<usize> = self.left_positions.iter().map(|&p| self.left_dims[p]).collect();
        let kr: Vec<usize> = self.right_positions.iter().map(|&p| self.right_dims[p]).collect();
        let rows: usize = self.left_dims.iter().product();
        let cols: usize = self.right_dims.iter().product();
        DMatrix::from_fn(rows, cols, |r, c| {
            let s = decode(r, &self.left_dims);
            let t = decode(c, &self.right_dims);
            let u: Vec<usize> = self.left_positions.iter().map(|&p| s[p]).collect();
            let w: Vec<usize> = self.right_positions.iter().map(|&p| t[p]).collect();
            k[(encode(&u, &kl), encode(&w, &kr))]
        })
    }
}

/// The blocks `Z^{G[a]}` of the direct sum over assignments `a` to the
/// vertices shared by both sides.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub shared: Vec<usize>,
    pub blocks: Vec<(Vec<usize>, LabelledDiagram)>,
    left_dims: Vec<usize>,
    right_dims: Vec<usize>,
    left_shared: Vec<Option<usize>>,
    right_shared: Vec<Option<usize>>,
    shared_dims: Vec<usize>,
}

impl DirectSum {
    /// Reassembles the original matrix from the blocks.
    pub fn assemble(&self) -> DMatrix<f64> {
        let evals: Vec<DMatrix<f64>> = self.blocks.iter().map(|(_, d)| d.eval()).collect();
        let rows: usize = self.left_dims.iter().product();
        let cols: usize = self.right_dims.iter().product();
        let free_l: Vec<usize> = (0..self.left_dims.len()).filter(|&k| self.left_shared[k].is_none()).collect();
        let free_r: Vec<usize> = (0..self.right_dims.len()).filter(|&k| self.right_shared[k].is_none()).collect();
        let dl: Vec<usize> = free_l.iter().map(|&k| self.left_dims[k]).collect();
        let dr: Vec<usize> = free_r.iter().map(|&k| self.right_dims[k]).collect();
        DMatrix::from_fn(rows, cols, |r, c| {
            let s = decode(r, &self.left_dims);
            let t = decode(c, &self.right_dims);
            let mut a = vec![0; self.shared.len()];
            for (k, p) in self.left_shared.iter().enumerate() {
                if let Some(i) = p {
                    a[*i] = s[k];
                }
            }
            for (k, p) in self.right_shared.iter().enumerate() {
                if let Some(i) = p {
                    if a[*i] != t[k] {
                        return 0.0;
                    }
                }
            }
            let block = encode(&a, &self.shared_dims);
            let u: Vec<usize> = free_l.iter().map(|&k| s[k]).collect();
            let w: Vec<usize> = free_r.iter().map(|&k| t[k]).collect();
            evals[block][(encode(&u, &dl), encode(&w, &dr))]
        })
    }
}

/// Which factor an edge between two vertices of the middle part is sent to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeGroup {
    A,
    B,
    C,
}

/// `Z^G = Z^{G[A]} Z^{G[B]} Z^{G[C]}`, with the outer boundaries of `A` and `C`
/// listed in ascending vertex order on both sides of each product.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub part_a: LabelledDiagram,
    pub part_b: LabelledDiagram,
    pub part_c: LabelledDiagram,
    pub boundary_a: Vec<usize>,
    pub boundary_c: Vec<usize>,
}

impl Factorization {
    pub fn product(&self) -> DMatrix<f64> {
        self.part_a.eval() * self.part_b.eval() * self.part_c.eval()
    }
}

impl LabelledDiagram {
    /// Sub-diagram on `vertices` (renumbered in the given order) with the
    /// given side lists and edges, all in original vertex ids.
    fn restrict(&self, vertices: &[usize], left: &[usize], right: &[usize], edge_ids: &[usize]) -> Result<Self> {
        let pos: HashMap<usize, usize> = vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let map = |v: usize| pos[&v];
        let edges = edge_ids
            .iter()
            .map(|&i| {
                let e = &self.edges()[i];
                LabelledEdge { from: map(e.from), to: map(e.to), label: e.label.clone() }
            })
            .collect();
        Self::new(
            vertices.iter().map(|&v| self.dims()[v]).collect(),
            left.iter().map(|&v| map(v)).collect(),
            right.iter().map(|&v| map(v)).collect(),
            edges,
        )
    }

    pub fn tensorize(&self) -> Result<Tensorization> {
        let n = self.n_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for e in self.edges() {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let roots: BTreeSet<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        let mut components = Vec::new();
        let mut left_positions = Vec::new();
        let mut right_positions = Vec::new();
        for r in roots {
            let vertices: Vec<usize> = (0..n).filter(|&v| find(&mut parent, v) == r).collect();
            let left: Vec<usize> = self.left().iter().copied().filter(|v| vertices.contains(v)).collect();
            let right: Vec<usize> = self.right().iter().copied().filter(|v| vertices.contains(v)).collect();
            left_positions.extend(left.iter().map(|v| self.left().iter().position(|w| w == v).unwrap()));
            right_positions.extend(right.iter().map(|v| self.right().iter().position(|w| w == v).unwrap()));
            let edge_ids: Vec<usize> =
                (0..self.edges().len()).filter(|&i| vertices.contains(&self.edges()[i].from)).collect();
            components.push(self.restrict(&vertices, &left, &right, &edge_ids)?);
        }
        Ok(Tensorization {
            components,
            left_positions,
            right_positions,
            left_dims: self.left().iter().map(|&v| self.dims()[v]).collect(),
            right_dims: self.right().iter().map(|&v| self.dims()[v]).collect(),
        })
    }

    /// Replaces each vertex `v` on both sides by a fresh right vertex `v′`
    /// joined to `v` by an identity edge.
    pub fn split_intersection(&self) -> Result<Self> {
        let mut dims = self.dims().to_vec();
        let mut right = self.right().to_vec();
        let mut edges = self.edges().to_vec();
        for v in self.shared_vertices() {
            let fresh = dims.len();
            dims.push(self.dims()[v]);
            let k = right.iter().position(|&w| w == v).unwrap();
            right[k] = fresh;
            edges.push(LabelledEdge { from: v, to: fresh, label: DMatrix::identity(self.dims()[v], self.dims()[v]) });
        }
        Self::new(dims, self.left().to_vec(), right, edges)
    }

    /// Subdivides edge `e = (x, z)` through a new vertex, labelling the halves
    /// `a` and `b`; requires `a · b` to equal the original label.
    pub fn split_edge(&self, e: usize, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Self> {
        let edge = self
            .edges()
            .get(e)
            .ok_or_else(|| ForgeError::InvalidArgument(format!("no edge {e}")))?;
        if a.ncols() != b.nrows() {
            return Err(ForgeError::DimensionMismatch("inner dimensions of the factors differ".into()));
        }
        if a.nrows() != edge.label.nrows() || b.ncols() != edge.label.ncols() {
            return Err(ForgeError::DimensionMismatch("factors do not match the edge label".into()));
        }
        let err = (a * b - &edge.label).amax();
        if err > 1e-10 * edge.label.amax().max(1.0) {
            return Err(ForgeError::Hypothesis(format!("factors multiply to the label only up to {err:e}")));
        }
        let mut dims = self.dims().to_vec();
        let fresh = dims.len();
        dims.push(a.ncols());
        let mut edges = self.edges().to_vec();
        let old = edges.remove(e);
        edges.push(LabelledEdge { from: old.from, to: fresh, label: a.clone() });
        edges.push(LabelledEdge { from: fresh, to: old.to, label: b.clone() });
        Self::new(dims, self.left().to_vec(), self.right().to_vec(), edges)
    }

    /// Cuts a pinned internal vertex into one pinned vertex per incident edge.
    pub fn pin_cut(&self, v: usize) -> Result<Self> {
        if v >= self.n_vertices() || !self.is_internal(v) {
            return Err(ForgeError::Hypothesis(format!("vertex {v} is not internal")));
        }
        if self.dims()[v] != 1 {
            return Err(ForgeError::Hypothesis(format!("vertex {v} is not pinned")));
        }
        let renumber = |w: usize| if w > v { w - 1 } else { w };
        let mut dims: Vec<usize> = self.dims().to_vec();
        dims.remove(v);
        let mut edges = Vec::new();
        for e in self.edges() {
            if e.from == v || e.to == v {
                let fresh = dims.len();
                dims.push(1);
                if e.from == v {
                    edges.push(LabelledEdge { from: fresh, to: renumber(e.to), label: e.label.clone() });
                } else {
                    edges.push(LabelledEdge { from: renumber(e.from), to: fresh, label: e.label.clone() });
                }
            } else {
                edges.push(LabelledEdge { from: renumber(e.from), to: renumber(e.to), label: e.label.clone() });
            }
        }
        Self::new(
            dims,
            self.left().iter().map(|&w| renumber(w)).collect(),
            self.right().iter().map(|&w| renumber(w)).collect(),
            edges,
        )
    }

    /// Pins every vertex on both sides to each of its values in turn.
    pub fn direct_sum_decompose(&self) -> Result<DirectSum> {
        let shared = self.shared_vertices();
        let shared_dims: Vec<usize> = shared.iter().map(|&v| self.dims()[v]).collect();
        let count: usize = shared_dims.iter().product();
        let slot = |v: usize| shared.iter().position(|&w| w == v);
        let left: Vec<usize> = self.left().iter().copied().filter(|&v| slot(v).is_none()).collect();
        let right: Vec<usize> = self.right().iter().copied().filter(|&v| slot(v).is_none()).collect();
        let mut blocks = Vec::with_capacity(count);
        for k in 0..count {
            let a = decode(k, &shared_dims);
            let mut dims = self.dims().to_vec();
            for &v in &shared {
                dims[v] = 1;
            }
            let edges = self
                .edges()
                .iter()
                .map(|e| {
                    let mut label = e.label.clone();
                    if let Some(i) = slot(e.from) {
                        label = label.rows(a[i], 1).into_owned();
                    }
                    if let Some(i) = slot(e.to) {
                        label = label.columns(a[i], 1).into_owned();
                    }
                    LabelledEdge { from: e.from, to: e.to, label }
                })
                .collect();
            blocks.push((a, Self::new(dims, left.clone(), right.clone(), edges)?));
        }
        Ok(DirectSum {
            left_dims: self.left().iter().map(|&v| self.dims()[v]).collect(),
            right_dims: self.right().iter().map(|&v| self.dims()[v]).collect(),
            left_shared: self.left().iter().map(|&v| slot(v)).collect(),
            right_shared: self.right().iter().map(|&v| slot(v)).collect(),
            shared,
            shared_dims,
            blocks,
        })
    }

    fn outer_boundary(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for e in self.edges() {
            if set.contains(&e.from) && !set.contains(&e.to) {
                out.insert(e.to);
            }
            if set.contains(&e.to) && !set.contains(&e.from) {
                out.insert(e.from);
            }
        }
        out
    }

    /// Splits the diagram along a vertex partition `A ⊔ B ⊔ C` with `L ⊆ A`,
    /// `R ⊆ C` and both outer boundaries inside `B`. Edges inside `B` go to
    /// the middle factor unless `groups` sends them (by edge index) to the
    /// `A` or `C` factor, which requires both endpoints on that boundary.
    pub fn factorize(&self, a: &[usize], b: &[usize], c: &[usize], groups: &[(usize, EdgeGroup)]) -> Result<Factorization> {
        let (sa, sb, sc): (BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>) =
            (a.iter().copied().collect(), b.iter().copied().collect(), c.iter().copied().collect());
        if sa.len() + sb.len() + sc.len() != self.n_vertices()
            || (0..self.n_vertices()).any(|v| !(sa.contains(&v) || sb.contains(&v) || sc.contains(&v)))
        {
            return Err(ForgeError::Hypothesis("A, B, C must partition the vertices".into()));
        }
        if !self.left().iter().all(|v| sa.contains(v)) {
            return Err(ForgeError::Hypothesis("left vertices must lie in A".into()));
        }
        if !self.right().iter().all(|v| sc.contains(v)) {
            return Err(ForgeError::Hypothesis("right vertices must lie in C".into()));
        }
        let da = self.outer_boundary(&sa);
        let dc = self.outer_boundary(&sc);
        if !da.is_subset(&sb) {
            return Err(ForgeError::Hypothesis("outer boundary of A must lie in B".into()));
        }
        if !dc.is_subset(&sb) {
            return Err(ForgeError::Hypothesis("outer boundary of C must lie in B".into()));
        }
        let group: HashMap<usize, EdgeGroup> = groups.iter().copied().collect();
        let (mut ea, mut eb, mut ec) = (Vec::new(), Vec::new(), Vec::new());
        for (i, e) in self.edges().iter().enumerate() {
            let (x, y) = (e.from, e.to);
            if sa.contains(&x) || sa.contains(&y) {
                ea.push(i);
            } else if sc.contains(&x) || sc.contains(&y) {
                ec.push(i);
            } else {
                match group.get(&i).copied().unwrap_or(EdgeGroup::B) {
                    EdgeGroup::A if da.contains(&x) && da.contains(&y) => ea.push(i),
                    EdgeGroup::C if dc.contains(&x) && dc.contains(&y) => ec.push(i),
                    EdgeGroup::B => eb.push(i),
                    _ => {
                        return Err(ForgeError::Hypothesis(format!(
                            "edge {i} is assigned to an outer factor but does not join two of its boundary vertices"
                        )))
                    }
                }
            }
        }
        let boundary_a: Vec<usize> = da.iter().copied().collect();
        let boundary_c: Vec<usize> = dc.iter().copied().collect();
        let va: Vec<usize> = sa.union(&da).copied().collect();
        let vc: Vec<usize> = sc.union(&dc).copied().collect();
        let vb: Vec<usize> = sb.iter().copied().collect();
        Ok(Factorization {
            part_a: self.restrict(&va, self.left(), &boundary_a, &ea)?,
            part_b: self.restrict(&vb, &boundary_a, &boundary_c, &eb)?,
            part_c: self.restrict(&vc, &boundary_c, self.right(), &ec)?,
            boundary_a,
            boundary_c,
        })
    }
}
