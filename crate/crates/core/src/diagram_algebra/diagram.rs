use std::collections::BTreeSet;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{ForgeError, Result};
use crate::forests::RibbonDiagram;

/// An edge `{from, to}` labelled by `label ∈ R^{N(from) × N(to)}`; the reverse
/// orientation carries the transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledEdge {
    pub from: usize,
    pub to: usize,
    pub label: DMatrix<f64>,
}

/// A generalized ribbon diagram: vertices `0..dims.len()` with dimension
/// labels, ordered left and right vertex lists (which may overlap), and
/// matrix-labelled edges. Vertices outside both lists are summed over.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledDiagram {
    dims: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
    edges: Vec<LabelledEdge>,
}

/// Dense real tensor over a list of vertices, row-major in that order.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Factor {
    fn scalar(x: f64) -> Self {
        Self { vars: vec![], shape: vec![], data: vec![x] }
    }

    fn strides(shape: &[usize]) -> Vec<usize> {
        let mut s = vec![1; shape.len()];
        for k in (0..shape.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * shape[k + 1];
        }
        s
    }

    fn product(&self, other: &Factor) -> Factor {
        let mut vars = self.vars.clone();
        let mut shape = self.shape.clone();
        for (k, &v) in other.vars.iter().enumerate() {
            if !vars.contains(&v) {
                vars.push(v);
                shape.push(other.shape[k]);
            }
        }
        let total: usize = shape.iter().product();
        let sa = Self::strides(&self.shape);
        let sb = Self::strides(&other.shape);
        let pos_a: Vec<usize> = self.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
        let pos_b: Vec<usize> = other.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
        let mut idx = vec![0usize; vars.len()];
        let mut data = Vec::with_capacity(total);
        for _ in 0..total {
            let ia: usize = pos_a.iter().zip(&sa).map(|(&p, &s)| idx[p] * s).sum();
            let ib: usize = pos_b.iter().zip(&sb).map(|(&p, &s)| idx[p] * s).sum();
            data.push(self.data[ia] * other.data[ib]);
            for k in (0..vars.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Factor { vars, shape, data }
    }

    fn sum_out(&self, v: usize) -> Factor {
        let Some(p) = self.vars.iter().position(|&w| w == v) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        let mut shape = self.shape.clone();
        vars.remove(p);
        let n = shape.remove(p);
        let outer: usize = self.shape[..p].iter().product();
        let inner: usize = self.shape[p + 1..].iter().product();
        let mut data = vec![0.0; outer * inner];
        for o in 0..outer {
            for i in 0..inner {
                let vals: Vec<f64> = (0..n).map(|k| self.data[(o * n + k) * inner + i]).collect();
                data[o * inner + i] = crate::linalg::pairwise_sum(&vals);
            }
        }
        Factor { vars, shape, data }
    }
}

impl LabelledDiagram {
    pub fn new(dims: Vec<usize>, left: Vec<usize>, right: Vec<usize>, edges: Vec<LabelledEdge>) -> Result<Self> {
        let n = dims.len();
        for list in [&left, &right] {
            let set: BTreeSet<usize> = list.iter().copied().collect();
            if set.len() != list.len() || list.iter().any(|&v| v >= n) {
                return Err(ForgeError::InvalidArgument("side lists must hold distinct vertices in range".into()));
            }
        }
        if let Some(&d) = dims.iter().find(|&&d| d == 0) {
            return Err(ForgeError::InvalidArgument(format!("dimension label {d}")));
        }
        for e in &edges {
            if e.from >= n || e.to >= n || e.from == e.to {
                return Err(ForgeError::InvalidArgument(format!("bad edge ({}, {})", e.from, e.to)));
            }
            if e.label.nrows() != dims[e.from] || e.label.ncols() != dims[e.to] {
                return Err(ForgeError::DimensionMismatch(format!(
                    "edge ({}, {}) has a {}x{} label but dimensions {}x{}",
                    e.from,
                    e.to,
                    e.label.nrows(),
                    e.label.ncols(),
                    dims[e.from],
                    dims[e.to]
                )));
            }
        }
        Ok(Self { dims, left, right, edges })
    }

    /// The forest diagram with every edge labelled `m`, left leaves first.
    pub fn from_ribbon(d: &RibbonDiagram, m: &DMatrix<f64>) -> Result<Self> {
        let f = d.forest();
        let n = m.nrows();
        let edges = f.edges().iter().map(|&(a, b)| LabelledEdge { from: a, to: b, label: m.clone() }).collect();
        Self::new(
            vec![n; f.n_vertices()],
            (0..d.n_left()).collect(),
            (d.n_left()..f.n_leaves()).collect(),
            edges,
        )
    }

    pub fn n_vertices(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn edges(&self) -> &[LabelledEdge] {
        &self.edges
    }

    pub fn is_internal(&self, v: usize) -> bool {
        !self.left.contains(&v) && !self.right.contains(&v)
    }

    pub fn internal_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&v| self.is_internal(v)).collect()
    }

    pub fn shared_vertices(&self) -> Vec<usize> {
        self.left.iter().copied().filter(|v| self.right.contains(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.from == v {
                    Some(e.to)
                } else if e.to == v {
                    Some(e.from)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.left.iter().map(|&v| self.dims[v]).product()
    }

    pub fn cols(&self) -> usize {
        self.right.iter().map(|&v| self.dims[v]).product()
    }

    /// The tuple-indexed matrix: rows range over `∏_{v ∈ L} [N(v)]`, columns
    /// over `∏_{v ∈ R} [N(v)]`, both row-major in list order.
    pub fn eval(&self) -> DMatrix<f64> {
        let mut factors: Vec<Factor> = self
            .edges
            .iter()
            .map(|e| Factor {
                vars: vec![e.from, e.to],
                shape: vec![self.dims[e.from], self.dims[e.to]],
                // Row-major data of the label.
                data: (0..e.label.nrows())
                    .flat_map(|i| (0..e.label.ncols()).map(move |j| (i, j)))
                    .map(|(i, j)| e.label[(i, j)])
                    .collect(),
            })
            .collect();
        let mut remaining = self.internal_vertices();
        while !remaining.is_empty() {
            // Greedy: eliminate the vertex whose merged factor is smallest.
            let cost = |v: usize| -> usize {
                let mut vars: BTreeSet<usize> = BTreeSet::new();
                for f in factors.iter().filter(|f| f.vars.contains(&v)) {
                    vars.extend(f.vars.iter().copied());
                }
                vars.iter().map(|&w| self.dims[w]).product()
            };
            let (k, &v) = remaining.iter().enumerate().min_by_key(|(_, &v)| cost(v)).unwrap();
            remaining.remove(k);
            let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&v));
            factors = rest;
            let merged = touching.iter().fold(Factor::scalar(1.0), |acc, f| acc.product(f));
            let reduced = if merged.vars.contains(&v) {
                merged.sum_out(v)
            } else {
                Factor::scalar(self.dims[v] as f64)
            };
            factors.push(reduced);
        }
        let total = factors.iter().fold(Factor::scalar(1.0), |acc, f| acc.product(f));
        let strides = Factor::strides(&total.shape);
        let (rows, cols) = (self.rows(), self.cols());
        let left_dims: Vec<usize> = self.left.iter().map(|&v| self.dims[v]).collect();
        let right_dims: Vec<usize> = self.right.iter().map(|&v| self.dims[v]).collect();
        let decode = |mut x: usize, dims: &[usize]| -> Vec<usize> {
            let mut t = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                t[k] = x % dims[k];
                x /= dims[k];
            }
            t
        };
        DMatrix::from_fn(rows, cols, |r, c| {
            let s = decode(r, &left_dims);
            let t = decode(c, &right_dims);
            let mut value = vec![usize::MAX; self.n_vertices()];
            for (k, &v) in self.left.iter().enumerate() {
                value[v] = s[k];
            }
            for (k, &v) in self.right.iter().enumerate() {
                if value[v] != usize::MAX && value[v] != t[k] {
                    return 0.0;
                }
                value[v] = t[k];
            }
            let idx: usize = total.vars.iter().zip(&strides).map(|(&v, &st)| value[v] * st).sum();
            total.data[idx]
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph labelled {\n");
        for v in 0..self.n_vertices() {
            let role = match (self.left.contains(&v), self.right.contains(&v)) {
                (true, true) => "LR",
                (true, false) => "L",
                (false, true) => "R",
                _ => "",
            };
            let shape = if self.is_internal(v) { "box" } else { "circle" };
            let _ = writeln!(s, "  v{v} [shape={shape}, label=\"{role}{v} N={}\"];", self.dims[v]);
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -- v{} [label=\"{}x{}\"];", e.from, e.to, e.label.nrows(), e.label.ncols());
        }
        s.push_str("}\n");
        s
    }
}
