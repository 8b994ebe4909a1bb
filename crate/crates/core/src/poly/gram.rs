use nalgebra::DMatrix;
use num::ToPrimitive;
use rayon::prelude::*;

use crate::cgraph::DegreeTwoInput;
use crate::combinat::{
    binomial, enumerate_partitions, enumerate_transport_plans, subsets_of_size, MonomialIndex, Partition,
    PartitionConstraint, SubsetIndexer, TransportPlan,
};
use crate::diagram_algebra::{LabelledDiagram, LabelledEdge};
use crate::error::{ForgeError, Result};
use crate::forests::transport_weight;

use super::harmonic::h_full;
use super::polynomial::apolar_partial;

/// `Y_{S,T} = ⟨h_S(Vᵀz), h_T(Vᵀz)⟩_∂` over all `|S|, |T| ≤ d`, with `V` the
/// Gram factor of `M`.
pub fn gram_direct(m: &DegreeTwoInput, d: usize) -> Result<DMatrix<f64>> {
    let v = m.gram_factor().ok_or_else(|| ForgeError::InvalidArgument("input has no Gram factor".into()))?;
    let mat = m.matrix();
    let idx = SubsetIndexer::new(m.n(), d);
    let sets = idx.all_sets();
    let polys: Vec<_> = sets
        .par_iter()
        .map(|s| h_full(s, &mat).and_then(|h| h.substitute_linear(v)))
        .collect::<Result<_>>()?;
    let mut y = DMatrix::zeros(sets.len(), sets.len());
    for k in 0..=d {
        let (lo, hi) = (idx.offset(k), idx.offset(k) + idx.count(k));
        for i in lo..hi {
            for j in i..hi {
                let val = apolar_partial(&polys[i], &polys[j])?;
                y[(i, j)] = val;
                y[(j, i)] = val;
            }
        }
    }
    Ok(y)
}

/// The partition transport diagram `G(σ, τ, D)` with every edge labelled `M`.
/// Vertices: left leaves `0..d`, right leaves `d..2d`, then one internal
/// vertex per block of size at least two in `σ`, then in `τ`.
pub fn build_transport_diagram(plan: &TransportPlan, m: &DMatrix<f64>) -> Result<LabelledDiagram> {
    if !plan.margins_hold() {
        return Err(ForgeError::InvalidArgument("transport plan margins do not match the partitions".into()));
    }
    let (sigma, tau) = (&plan.row_partition, &plan.col_partition);
    let d = sigma.ground().degree();
    let n = m.nrows();
    let mut next = 2 * d;
    let mut hub = |p: &Partition| -> Vec<Option<usize>> {
        p.blocks()
            .iter()
            .map(|b| {
                (b.len() >= 2).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let left_hub = hub(sigma);
    let right_hub = hub(tau);
    let mut edges = Vec::new();
    let mut push = |a: usize, b: usize| edges.push(LabelledEdge { from: a, to: b, label: m.clone() });
    for (k, b) in sigma.blocks().iter().enumerate() {
        if let Some(h) = left_hub[k] {
            b.iter().for_each(|&i| push(i, h));
        }
    }
    for (k, b) in tau.blocks().iter().enumerate() {
        if let Some(h) = right_hub[k] {
            b.iter().for_each(|&j| push(h, d + j));
        }
    }
    for (a, row) in plan.matrix.iter().enumerate() {
        for (b, &count) in row.iter().enumerate() {
            let x = left_hub[a].unwrap_or(sigma.blocks()[a][0]);
            let y = right_hub[b].unwrap_or(d + tau.blocks()[b][0]);
            for _ in 0..count {
                push(x, y);
            }
        }
    }
    LabelledDiagram::new(vec![n; next], (0..d).collect(), (d..2 * d).collect(), edges)
}

/// `Y` assembled block by block from
/// `Σ_{σ,τ} ∏_{R ∈ σ+τ} (−1)^{|R|−1}(|R|−1)!|R|! Σ_D Z^{G(σ,τ,D)} / D!`,
/// reading set-indexed entries off ascending tuples.
pub fn gram_via_transport(m: &DegreeTwoInput, d: usize) -> Result<DMatrix<f64>> {
    let n = m.n();
    let mat = m.matrix();
    let idx = SubsetIndexer::new(n, d);
    let mut y = DMatrix::zeros(idx.len(), idx.len());
    y[(0, 0)] = 1.0;
    for k in 1..=d {
        let tuple_side = (n as u128).pow(k as u32);
        if tuple_side * tuple_side > crate::cgraph::BLOCK_ENTRY_LIMIT {
            return Err(ForgeError::SizeGuard {
                what: "transport diagram entries".into(),
                size: tuple_side * tuple_side,
                limit: crate::cgraph::BLOCK_ENTRY_LIMIT,
            });
        }
        let sets = subsets_of_size(n, k);
        let rows: Vec<usize> =
            sets.iter().map(|s| s.iter().fold(0, |acc, &x| acc * n + x)).collect();
        let parts = enumerate_partitions(&MonomialIndex::new((0..k).collect()), PartitionConstraint::All);
        let mut plans = Vec::new();
        for sigma in &parts {
            for tau in &parts {
                plans.extend(enumerate_transport_plans(sigma, tau));
            }
        }
        let block = plans
            .par_iter()
            .map(|plan| -> Result<DMatrix<f64>> {
                let w = transport_weight(&plan.row_partition, &plan.col_partition, plan).to_f64().unwrap();
                let z = build_transport_diagram(plan, &mat)?.eval();
                Ok(DMatrix::from_fn(sets.len(), sets.len(), |i, j| w * z[(rows[i], rows[j])]))
            })
            .try_reduce(|| DMatrix::zeros(sets.len(), sets.len()), |a, b| Ok(a + b))?;
        let off = idx.offset(k);
        debug_assert_eq!(binomial(n, k) as usize, sets.len());
        y.view_mut((off, off), (sets.len(), sets.len())).copy_from(&block);
    }
    Ok(y)
}
