use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use crate::combinat::{enumerate_position_partitions, factorial, PartitionConstraint};
use crate::error::{ForgeError, Result};

use super::forest::GoodForest;

/// Largest leaf count enumerated unless a caller raises the cap.
pub const DEFAULT_LEAF_CAP: usize = 12;

/// A rooted tree whose leaves carry labels and whose non-leaf nodes have an
/// odd number (at least three) of children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootedOddTree {
    Leaf(usize),
    Node(Vec<RootedOddTree>),
}

impl RootedOddTree {
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Self::Leaf(l) => vec![*l],
            Self::Node(c) => c.iter().flat_map(|t| t.leaves()).collect(),
        }
    }

    /// Adds the tree to an edge list, returning the vertex id of its root.
    fn attach(&self, edges: &mut Vec<(usize, usize)>, next_internal: &mut usize) -> usize {
        match self {
            Self::Leaf(l) => *l,
            Self::Node(children) => {
                let id = *next_internal;
                *next_internal += 1;
                for c in children {
                    let w = c.attach(edges, next_internal);
                    edges.push((id, w));
                }
                id
            }
        }
    }
}

/// All rooted odd trees whose leaf labels are exactly `labels`.
pub fn enumerate_rooted_odd_trees(labels: &[usize]) -> Vec<RootedOddTree> {
    if labels.len() == 1 {
        return vec![RootedOddTree::Leaf(labels[0])];
    }
    let mut out = Vec::new();
    for p in enumerate_position_partitions(labels.len(), PartitionConstraint::Odd) {
        if p.len() < 3 {
            continue;
        }
        let options: Vec<Vec<RootedOddTree>> = p
            .iter()
            .map(|b| enumerate_rooted_odd_trees(&b.iter().map(|&i| labels[i]).collect::<Vec<_>>()))
            .collect();
        for_each_product(&options, &mut |choice| {
            out.push(RootedOddTree::Node(choice.iter().map(|t| (*t).clone()).collect()));
        });
    }
    out
}

/// The good tree on leaves `0..m` obtained by hanging leaf `m - 1` from the
/// root of `tree`, whose leaves must be `0..m - 1`.
pub fn embed_rooted_tree(tree: &RootedOddTree, m: usize) -> Result<GoodForest> {
    let mut edges = Vec::new();
    let mut next = m;
    let root = tree.attach(&mut edges, &mut next);
    edges.push((root, m - 1));
    GoodForest::from_edges(m, next - m, &edges)
}

fn for_each_product<'a, T>(options: &'a [Vec<T>], f: &mut dyn FnMut(&[&'a T])) {
    fn rec<'a, T>(options: &'a [Vec<T>], acc: &mut Vec<&'a T>, f: &mut dyn FnMut(&[&'a T])) {
        if acc.len() == options.len() {
            f(acc);
            return;
        }
        for x in &options[acc.len()] {
            acc.push(x);
            rec(options, acc, f);
            acc.pop();
        }
    }
    rec(options, &mut Vec::with_capacity(options.len()), f);
}

type Cache = RwLock<HashMap<usize, Arc<Vec<GoodForest>>>>;

fn tree_cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn forest_cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn cached(cache: &'static Cache, m: usize, build: impl FnOnce() -> Result<Vec<GoodForest>>) -> Result<Arc<Vec<GoodForest>>> {
    if let Some(v) = cache.read().expect("forest cache poisoned").get(&m) {
        return Ok(v.clone());
    }
    let built = Arc::new(build()?);
    let mut w = cache.write().expect("forest cache poisoned");
    Ok(w.entry(m).or_insert(built).clone())
}

/// `T(m)`: good trees on leaves `0..m`, sorted.
pub fn enumerate_good_trees(m: usize) -> Result<Arc<Vec<GoodForest>>> {
    enumerate_good_trees_capped(m, DEFAULT_LEAF_CAP)
}

pub fn enumerate_good_trees_capped(m: usize, cap: usize) -> Result<Arc<Vec<GoodForest>>> {
    if m > cap {
        return Err(ForgeError::CapExceeded { m, cap });
    }
    cached(tree_cache(), m, || {
        let mut out = if m == 2 {
            vec![GoodForest::pair()]
        } else if m < 4 || m % 2 == 1 {
            Vec::new()
        } else {
            let labels: Vec<usize> = (0..m - 1).collect();
            enumerate_rooted_odd_trees(&labels)
                .iter()
                .map(|t| embed_rooted_tree(t, m))
                .collect::<Result<Vec<_>>>()?
        };
        out.sort();
        Ok(out)
    })
}

/// `F(m)`: good forests on leaves `0..m`, sorted. `F(0)` holds the empty forest.
pub fn enumerate_good_forests(m: usize) -> Result<Arc<Vec<GoodForest>>> {
    enumerate_good_forests_capped(m, DEFAULT_LEAF_CAP)
}

pub fn enumerate_good_forests_capped(m: usize, cap: usize) -> Result<Arc<Vec<GoodForest>>> {
    if m > cap {
        return Err(ForgeError::CapExceeded { m, cap });
    }
    cached(forest_cache(), m, || {
        let mut out = Vec::new();
        for blocks in enumerate_position_partitions(m, PartitionConstraint::Even) {
            let options: Vec<Arc<Vec<GoodForest>>> =
                blocks.iter().map(|b| enumerate_good_trees_capped(b.len(), cap)).collect::<Result<_>>()?;
            let option_refs: Vec<Vec<GoodForest>> = options.iter().map(|o| o.as_ref().clone()).collect();
            let mut err = None;
            for_each_product(&option_refs, &mut |choice| {
                let parts: Vec<(&GoodForest, &[usize])> =
                    choice.iter().zip(&blocks).map(|(t, b)| (*t, b.as_slice())).collect();
                match GoodForest::union_of(m, &parts) {
                    Ok(f) => out.push(f),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        out.sort();
        debug_assert!(out.windows(2).all(|w| w[0] != w[1]));
        Ok(out)
    })
}

/// Independent enumeration for small `m`: every labelled tree on each block
/// of a partition of the leaves, generated from Prüfer sequences, filtered by
/// the good-forest conditions and deduplicated by canonical form.
pub fn enumerate_good_forests_by_filter(m: usize) -> Result<Vec<GoodForest>> {
    if m > 6 {
        return Err(ForgeError::CapExceeded { m, cap: 6 });
    }
    let mut out = BTreeSet::new();
    for blocks in enumerate_position_partitions(m, PartitionConstraint::MinSize(2)) {
        let per_block: Vec<Vec<GoodForest>> = blocks.iter().map(|b| trees_by_filter(b.len())).collect();
        for_each_product(&per_block, &mut |choice| {
            let parts: Vec<(&GoodForest, &[usize])> =
                choice.iter().zip(&blocks).map(|(t, b)| (*t, b.as_slice())).collect();
            if let Ok(f) = GoodForest::union_of(m, &parts) {
                out.insert(f);
            }
        });
    }
    Ok(out.into_iter().collect())
}

fn trees_by_filter(b: usize) -> Vec<GoodForest> {
    let mut out = BTreeSet::new();
    if b == 2 {
        out.insert(GoodForest::pair());
        return out.into_iter().collect();
    }
    // A tree with b leaves and k internal vertices of degree >= 4 has
    // 2(b + k - 1) >= b + 4k, so k <= (b - 2) / 2.
    for k in 1..=b.saturating_sub(2) / 2 {
        let n = b + k;
        let len = n - 2;
        let mut seq = vec![0usize; len];
        loop {
            let edges = prufer_decode(&seq, n);
            if let Ok(f) = GoodForest::from_edges(b, k, &edges) {
                out.insert(f);
            }
            // Odometer increment.
            let mut i = 0;
            while i < len && seq[i] == n - 1 {
                seq[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
            seq[i] += 1;
        }
    }
    out.into_iter().collect()
}

fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("Prüfer decoding always finds a leaf");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Size bounds for `F(d)`: `(d/2)! <= |F(d)| <= 2 (3d/2)^(3d/2)`, and every
/// member has at most `3d/2` vertices, at most `3d/2` edges and at most `d/2`
/// internal vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingReport {
    pub d: usize,
    pub count: usize,
    pub lower: f64,
    pub upper: f64,
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_internal: usize,
    pub holds: bool,
}

pub fn check_counting_bounds(d: usize) -> Result<CountingReport> {
    let forests = enumerate_good_forests(d)?;
    let half = 1.5 * d as f64;
    let lower = factorial(d / 2) as f64;
    let upper = 2.0 * half.powf(half);
    let max_vertices = forests.iter().map(|f| f.n_vertices()).max().unwrap_or(0);
    let max_edges = forests.iter().map(|f| f.edges().len()).max().unwrap_or(0);
    let max_internal = forests.iter().map(|f| f.n_internal()).max().unwrap_or(0);
    let count = forests.len();
    let holds = lower <= count as f64
        && count as f64 <= upper
        && 2 * max_vertices <= 3 * d
        && 2 * max_edges <= 3 * d
        && 2 * max_internal <= d;
    Ok(CountingReport { d, count, lower, upper, max_vertices, max_edges, max_internal, holds })
}
