use crate::error::{ForgeError, Result};
use crate::forests::GoodForest;
use crate::linalg;

use super::input::DegreeTwoInput;
use super::maxspan::{is_tight, max_span};

fn check_labels(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize]) -> Result<()> {
    if s.len() != forest.n_leaves() {
        return Err(ForgeError::DimensionMismatch(format!(
            "{} labels for {} leaves",
            s.len(),
            forest.n_leaves()
        )));
    }
    if let Some(&bad) = s.iter().find(|&&i| i >= m.n()) {
        return Err(ForgeError::DimensionMismatch(format!("label {bad} out of range for N = {}", m.n())));
    }
    Ok(())
}

enum Message {
    Fixed(usize),
    Vector(Vec<f64>),
}

struct Eliminator<'a> {
    forest: &'a GoodForest,
    adj: Vec<Vec<usize>>,
    m: &'a DegreeTwoInput,
    s: &'a [usize],
    pins: &'a [Option<usize>],
}

impl Eliminator<'_> {
    fn message(&self, v: usize, parent: usize) -> Message {
        if self.forest.is_leaf(v) {
            return Message::Fixed(self.s[v]);
        }
        let n = self.m.n();
        let mut out = vec![1.0; n];
        if let Some(p) = self.pins[v - self.forest.n_leaves()] {
            out.iter_mut().enumerate().for_each(|(x, o)| *o = if x == p { 1.0 } else { 0.0 });
        }
        for &c in &self.adj[v] {
            if c == parent {
                continue;
            }
            match self.message(c, v) {
                Message::Fixed(j) => {
                    for (x, o) in out.iter_mut().enumerate() {
                        *o *= self.m.get(x, j);
                    }
                }
                Message::Vector(u) => {
                    for (x, o) in out.iter_mut().enumerate() {
                        if *o != 0.0 {
                            *o *= linalg::dot(self.m.row(x), &u);
                        }
                    }
                }
            }
        }
        Message::Vector(out)
    }

    fn evaluate(&self) -> f64 {
        let mut total = 1.0;
        for comp in self.forest.component_leaves() {
            let root = comp[0];
            let w = self.adj[root][0];
            let value = match self.message(w, root) {
                Message::Fixed(j) => self.m.get(self.s[root], j),
                Message::Vector(u) => linalg::dot(self.m.row(self.s[root]), &u),
            };
            total *= value;
        }
        total
    }
}

/// `Z^F(M; s)`. A set-valued index should be passed as its ascending tuple.
pub fn cgs(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    cgs_pinned(forest, m, s, &vec![None; forest.n_internal()])
}

/// `Z^F(M; s)` with some internal vertices fixed: `pins[k]` constrains the
/// `k`-th internal vertex.
pub fn cgs_pinned(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize], pins: &[Option<usize>]) -> Result<f64> {
    check_labels(forest, m, s)?;
    if pins.len() != forest.n_internal() {
        return Err(ForgeError::DimensionMismatch("one pin slot per internal vertex".into()));
    }
    let e = Eliminator { forest, adj: forest.adjacency(), m, s, pins };
    Ok(e.evaluate())
}

/// The sum restricted to tight internal assignments: every internal vertex of
/// a `MaxSpan` subtree carries that subtree's index.
pub fn cgs_tight(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    check_labels(forest, m, s)?;
    let span = max_span(forest, s);
    cgs_pinned(forest, m, s, &span.pins(forest))
}

/// `Δ^F(M; s)`: the sum over loose internal assignments.
pub fn delta(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    Ok(cgs(forest, m, s)? - cgs_tight(forest, m, s)?)
}

fn naive_sum(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize], keep: impl Fn(&[usize]) -> bool) -> Result<f64> {
    check_labels(forest, m, s)?;
    let k = forest.n_internal();
    let n = m.n();
    let count = n.checked_pow(k as u32).filter(|&c| c <= 50_000_000).ok_or_else(|| ForgeError::SizeGuard {
        what: "internal assignments".into(),
        size: (n as u128).pow(k as u32),
        limit: 50_000_000,
    })?;
    let ml = forest.n_leaves();
    let mut a = vec![0usize; k];
    let mut terms = Vec::new();
    for _ in 0..count {
        if keep(&a) {
            let label = |v: usize| if v < ml { s[v] } else { a[v - ml] };
            terms.push(forest.edges().iter().map(|&(x, y)| m.get(label(x), label(y))).product::<f64>());
        }
        for slot in a.iter_mut() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    Ok(linalg::pairwise_sum(&terms))
}

/// Direct summation over every internal assignment; for small cases only.
pub fn cgs_naive(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    naive_sum(forest, m, s, |_| true)
}

/// Direct summation over tight assignments.
pub fn cgs_tight_naive(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    let span = max_span(forest, s);
    naive_sum(forest, m, s, |a| is_tight(&span, forest, a))
}

/// Direct summation over loose assignments.
pub fn delta_naive(forest: &GoodForest, m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    let span = max_span(forest, s);
    naive_sum(forest, m, s, |a| !is_tight(&span, forest, a))
}
