use std::collections::HashMap;
use std::sync::RwLock;

use rayon::prelude::*;

use crate::cgraph::{cgs, cgs_tight, delta, DegreeTwoInput};
use crate::combinat::{enumerate_position_partitions, PartitionConstraint, SubsetIndexer};
use crate::error::{ForgeError, Result};
use crate::forests::{enumerate_good_forests, enumerate_good_trees, DEFAULT_LEAF_CAP};

use super::pseudo::{Provenance, Pseudoexpectation};

/// `Σ_{T ∈ T(|s|)} μ(T) Z^T(M; s)`: the connected part of the extension.
pub fn tree_sum(m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    let trees = enumerate_good_trees(s.len())?;
    let mut acc = 0.0;
    for t in trees.iter() {
        acc += t.mu() as f64 * cgs(t, m, s)?;
    }
    Ok(acc)
}

/// As [`tree_sum`] with only tight assignments.
fn tight_tree_sum(m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    let trees = enumerate_good_trees(s.len())?;
    let mut acc = 0.0;
    for t in trees.iter() {
        acc += t.mu() as f64 * cgs_tight(t, m, s)?;
    }
    Ok(acc)
}

/// `−Σ_{T ∈ T(|s|)} μ(T) Δ^T(M; s)`.
fn loose_tree_sum(m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    let trees = enumerate_good_trees(s.len())?;
    let mut acc = 0.0;
    for t in trees.iter() {
        acc -= t.mu() as f64 * delta(t, m, s)?;
    }
    Ok(acc)
}

fn check_input(m: &DegreeTwoInput, leaves: usize) -> Result<()> {
    m.require_unit_diagonal(1e-10)?;
    if leaves > DEFAULT_LEAF_CAP {
        return Err(ForgeError::CapExceeded { m: leaves, cap: DEFAULT_LEAF_CAP });
    }
    Ok(())
}

/// `Ẽ_M[x^S] = Σ_{F ∈ F(|S|)} μ(F) Z^F(M; S)` on every even `|S| ≤ 2d`.
///
/// Forests factor over their trees and `μ` is multiplicative, so each value
/// is assembled from cached tree sums by peeling off the block containing the
/// smallest element.
pub fn extend(m: &DegreeTwoInput, d: usize) -> Result<Pseudoexpectation> {
    check_input(m, 2 * d)?;
    let n = m.n();
    let degree = 2 * d;
    let idx = SubsetIndexer::new(n, degree);
    let trees = Pseudoexpectation::from_fn(n, degree, Provenance::Custom, |s| {
        if s.is_empty() {
            Ok(0.0)
        } else {
            tree_sum(m, s)
        }
    })?;
    let taus = trees.values();
    let mut values = vec![0.0; idx.len()];
    values[0] = 1.0;
    for k in (2..=degree).step_by(2) {
        let off = idx.offset(k);
        let computed: Vec<f64> = (0..idx.count(k))
            .into_par_iter()
            .map(|r| {
                let s = idx.unindex(off + r);
                let rest = &s[1..];
                let mut acc = 0.0;
                // Blocks containing s[0]: choose an odd-size subset of the rest.
                for mask in 0u32..(1 << rest.len()) {
                    if mask.count_ones() % 2 == 0 {
                        continue;
                    }
                    let mut block = vec![s[0]];
                    let mut other = Vec::with_capacity(rest.len());
                    for (b, &x) in rest.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            block.push(x);
                        } else {
                            other.push(x);
                        }
                    }
                    acc += taus[idx.index(&block)] * values[idx.index(&other)];
                }
                acc
            })
            .collect();
        values[off..off + computed.len()].copy_from_slice(&computed);
    }
    Pseudoexpectation::from_values(n, degree, Provenance::Extension, values)
}

fn sorted(s: &[usize]) -> Vec<usize> {
    let mut t = s.to_vec();
    t.sort_unstable();
    t
}

/// `Ẽ^main[x^S] = Σ_{F ∈ F(|S|)} μ(F) Z^F(M; S)` for a multiset, summing
/// over every forest.
pub fn main_value(m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    check_input(m, s.len())?;
    let s = sorted(s);
    let mut acc = 0.0;
    for f in enumerate_good_forests(s.len())?.iter() {
        acc += f.mu() as f64 * cgs(f, m, &s)?;
    }
    Ok(acc)
}

/// `Ẽ^err[x^S] = −Σ_{F ∈ F(|S|)} μ(F) Δ^F(M; S)`, from the loose sums.
pub fn err_value(m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    check_input(m, s.len())?;
    let s = sorted(s);
    let mut acc = 0.0;
    for f in enumerate_good_forests(s.len())?.iter() {
        acc -= f.mu() as f64 * delta(f, m, &s)?;
    }
    Ok(acc)
}

/// The error term assembled from per-tree pieces:
/// `Σ_{A ⊆ S, A ≠ ∅} Ẽ^main[x^{S−A}] Σ_{π ∈ Part(A; even)} ∏_{R ∈ π} (−Σ_T μ(T) Δ^T(M; R))`.
pub fn err_value_factorized(m: &DegreeTwoInput, s: &[usize]) -> Result<f64> {
    check_input(m, s.len())?;
    let s = sorted(s);
    let k = s.len();
    let mut acc = 0.0;
    for mask in 1u32..(1 << k) {
        let a: Vec<usize> = (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| s[b]).collect();
        if a.len() % 2 == 1 {
            continue;
        }
        let rest: Vec<usize> = (0..k).filter(|&b| mask >> b & 1 == 0).map(|b| s[b]).collect();
        let main = main_value(m, &rest)?;
        if main == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for blocks in enumerate_position_partitions(a.len(), PartitionConstraint::Even) {
            let mut term = 1.0;
            for b in &blocks {
                let values: Vec<usize> = b.iter().map(|&p| a[p]).collect();
                term *= loose_tree_sum(m, &values)?;
            }
            inner += term;
        }
        acc += main * inner;
    }
    Ok(acc)
}

/// Memoized `Ẽ^main` and its tight part on multisets, assembled from tree
/// sums over even partitions of positions.
pub struct MainEvaluator<'a> {
    m: &'a DegreeTwoInput,
    trees: RwLock<HashMap<Vec<usize>, (f64, f64)>>,
    values: RwLock<HashMap<Vec<usize>, f64>>,
}

impl<'a> MainEvaluator<'a> {
    pub fn new(m: &'a DegreeTwoInput) -> Result<Self> {
        m.require_unit_diagonal(1e-10)?;
        Ok(Self { m, trees: RwLock::new(HashMap::new()), values: RwLock::new(HashMap::new()) })
    }

    fn tree_pair(&self, s: &[usize]) -> Result<(f64, f64)> {
        let key = sorted(s);
        if let Some(&v) = self.trees.read().unwrap().get(&key) {
            return Ok(v);
        }
        let v = (tree_sum(self.m, &key)?, tight_tree_sum(self.m, &key)?);
        self.trees.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// `Ẽ^main[x^S]`.
    pub fn main(&self, s: &[usize]) -> Result<f64> {
        if s.len() > DEFAULT_LEAF_CAP {
            return Err(ForgeError::CapExceeded { m: s.len(), cap: DEFAULT_LEAF_CAP });
        }
        if s.len() % 2 == 1 {
            return Ok(0.0);
        }
        let key = sorted(s);
        if let Some(&v) = self.values.read().unwrap().get(&key) {
            return Ok(v);
        }
        let mut acc = 0.0;
        for blocks in enumerate_position_partitions(key.len(), PartitionConstraint::Even) {
            let mut term = 1.0;
            for b in &blocks {
                let values: Vec<usize> = b.iter().map(|&p| key[p]).collect();
                term *= self.tree_pair(&values)?.0;
            }
            acc += term;
        }
        self.values.write().unwrap().insert(key, acc);
        Ok(acc)
    }

    /// `Σ_F μ(F) Σ_{a tight} ∏ M`, the part of `Ẽ^main` that survives in `Ẽ`.
    pub fn tight(&self, s: &[usize]) -> Result<f64> {
        if s.len() % 2 == 1 {
            return Ok(0.0);
        }
        let key = sorted(s);
        let mut acc = 0.0;
        for blocks in enumerate_position_partitions(key.len(), PartitionConstraint::Even) {
            let mut term = 1.0;
            for b in &blocks {
                let values: Vec<usize> = b.iter().map(|&p| key[p]).collect();
                term *= self.tree_pair(&values)?.1;
            }
            acc += term;
        }
        Ok(acc)
    }
}
