use std::collections::HashMap;

use num::{BigInt, BigRational, One, Zero};

use crate::combinat::{enumerate_position_partitions, nu_sequence, PartitionConstraint};
use crate::error::{ForgeError, Result};

use super::enumerate::enumerate_good_forests;
use super::forest::GoodForest;

/// Substitutes `parts[k]` (a good forest on `deg v` leaves) for the `k`-th
/// internal vertex `v` of `outer`. Leaf `j` of the substituted forest is glued
/// to the `j`-th edge at `v` in stored edge order; the resulting degree-two
/// junctions are smoothed away.
pub fn compose(outer: &GoodForest, parts: &[&GoodForest]) -> Result<GoodForest> {
    let m = outer.n_leaves();
    if parts.len() != outer.n_internal() {
        return Err(ForgeError::DimensionMismatch(format!(
            "{} substitutions for {} internal vertices",
            parts.len(),
            outer.n_internal()
        )));
    }
    let degrees = outer.degrees();
    // Node ids: outer leaves, then for each part its internal vertices, then its stubs.
    let mut next = m;
    let mut stub_base = Vec::with_capacity(parts.len());
    let mut edges = Vec::new();
    let mut is_stub = vec![false; m];
    for (k, f) in parts.iter().enumerate() {
        let v = m + k;
        if f.n_leaves() != degrees[v] {
            return Err(ForgeError::DimensionMismatch(format!(
                "substitution for a degree-{} vertex has {} leaves",
                degrees[v],
                f.n_leaves()
            )));
        }
        let internal_base = next;
        let stubs = internal_base + f.n_internal();
        next = stubs + f.n_leaves();
        is_stub.extend(std::iter::repeat_n(false, f.n_internal()));
        is_stub.extend(std::iter::repeat_n(true, f.n_leaves()));
        stub_base.push(stubs);
        let map = |x: usize| if x < f.n_leaves() { stubs + x } else { internal_base + (x - f.n_leaves()) };
        edges.extend(f.edges().iter().map(|&(a, b)| (map(a), map(b))));
    }
    let incident: Vec<Vec<usize>> = (m..outer.n_vertices()).map(|v| outer.incident_edges(v)).collect();
    for (e, &(a, b)) in outer.edges().iter().enumerate() {
        let port = |x: usize| {
            if x < m {
                x
            } else {
                let k = x - m;
                stub_base[k] + incident[k].iter().position(|&i| i == e).expect("edge is incident")
            }
        };
        edges.push((port(a), port(b)));
    }
    let mut adj = vec![Vec::new(); next];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    // Follow each edge out of a real node through stubs to the next real node.
    let mut real_id = vec![usize::MAX; next];
    let mut count = 0;
    for v in 0..next {
        if !is_stub[v] {
            real_id[v] = count;
            count += 1;
        }
    }
    let mut smoothed = Vec::new();
    for u in 0..next {
        if is_stub[u] {
            continue;
        }
        for &first in &adj[u] {
            let (mut prev, mut cur) = (u, first);
            while is_stub[cur] {
                let nxt = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                prev = cur;
                cur = nxt;
            }
            if real_id[u] < real_id[cur] {
                smoothed.push((real_id[u], real_id[cur]));
            }
        }
    }
    GoodForest::from_edges(m, count - m, &smoothed)
}

/// Every composition of `forest`: its down-set in the compositional order.
pub fn down_set(forest: &GoodForest) -> Result<Vec<GoodForest>> {
    let degrees = forest.degrees();
    let options: Vec<_> =
        forest.internal_vertices().map(|v| enumerate_good_forests(degrees[v])).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; options.len()];
    loop {
        let parts: Vec<&GoodForest> = idx.iter().zip(&options).map(|(&i, o)| &o[i]).collect();
        out.push(compose(forest, &parts)?);
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            break;
        }
    }
    Ok(out)
}

/// `lower ≤ upper` in the compositional order.
pub fn poset_leq(lower: &GoodForest, upper: &GoodForest) -> Result<bool> {
    if lower.n_leaves() != upper.n_leaves() {
        return Ok(false);
    }
    Ok(down_set(upper)?.contains(lower))
}

/// Outcome of checking that `F ↦ −μ(F)` is the Möbius function from the
/// bottom of the compositional poset on `F(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusVerification {
    pub m: usize,
    pub forests: usize,
    pub compositions: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

/// For every `F ∈ F(m)` checks that the down-set has `∏ |F(deg v)|` distinct
/// elements and that `1 − Σ_{G ≤ F} μ(G) = 0`, i.e. the defining recursion of
/// the Möbius function holds with value `−μ` on the whole poset joined with a
/// bottom element.
pub fn verify_mobius(m: usize) -> Result<MobiusVerification> {
    let forests = enumerate_good_forests(m)?;
    let mut compositions = 0;
    let mut counterexample = None;
    for f in forests.iter() {
        let down = down_set(f)?;
        compositions += down.len();
        let mut sorted = down.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != down.len() {
            counterexample = Some(format!("down-set of {f:?} has repeated compositions"));
            break;
        }
        let total: i128 = 1 - down.iter().map(GoodForest::mu).sum::<i128>();
        if total != 0 {
            counterexample = Some(format!("interval below {f:?} sums to {total}"));
            break;
        }
    }
    Ok(MobiusVerification {
        m,
        forests: forests.len(),
        compositions,
        passed: counterexample.is_none(),
        counterexample,
    })
}

/// `Σ_{T ∈ T(m)} μ(T)`.
pub fn tree_mu_sum(m: usize) -> Result<i128> {
    Ok(super::enumerate::enumerate_good_trees(m)?.iter().map(GoodForest::mu).sum())
}

/// Solves the star recursion
/// `2ν(m) = [m = 2] + Σ_{π ∈ Part([m−1]; odd)} (−μ̂(∅, S_{|π|+1})) ∏_{S ∈ π} ν(|S| + 1)`
/// for `μ̂(∅, S_m)`, `m = 2, 4, …, m_max`. Only the all-singleton partition
/// involves `S_m` itself, with coefficient `ν(2)^{m−1} = 1`.
pub fn star_mobius_via_nu(m_max: usize) -> Vec<(usize, BigRational)> {
    let nu = nu_sequence(m_max.max(2));
    let mut star: HashMap<usize, BigRational> = HashMap::new();
    let mut out = Vec::new();
    for m in (2..=m_max).step_by(2) {
        let mut known = BigRational::zero();
        for p in enumerate_position_partitions(m - 1, PartitionConstraint::Odd) {
            if p.len() == m - 1 {
                continue;
            }
            let mut term = -star[&(p.len() + 1)].clone();
            for b in &p {
                term *= nu[b.len() + 1].clone();
            }
            known += term;
        }
        let indicator = if m == 2 { BigRational::one() } else { BigRational::zero() };
        let two = BigRational::from_integer(BigInt::from(2));
        let value = known + indicator - two * nu[m].clone();
        star.insert(m, value.clone());
        out.push((m, value));
    }
    out
}
