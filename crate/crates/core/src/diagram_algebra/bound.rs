use std::collections::{BTreeSet, VecDeque};

use crate::error::{ForgeError, Result};
use crate::linalg;

use super::diagram::LabelledDiagram;

/// A verified layering and the resulting bound `∏_e ‖label_e‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormBound {
    pub layers: Vec<Vec<usize>>,
    pub bound: f64,
}

/// Bounds the operator norm of the diagram's matrix by the product of its
/// edge-label norms. The layering `V_1 = L, …, V_m = R` must make every left
/// vertex reach a later layer, every right vertex an earlier one, and every
/// middle vertex both. Without a layering, internal vertices are layered by
/// breadth-first distance from `L`.
pub fn norm_bound(d: &LabelledDiagram, layering: Option<Vec<Vec<usize>>>) -> Result<NormBound> {
    let layers = match layering {
        Some(l) => l,
        None => auto_layers(d)?,
    };
    check_layers(d, &layers)?;
    let bound = d.edges().iter().map(|e| linalg::spectral_norm(&e.label)).product();
    Ok(NormBound { layers, bound })
}

fn auto_layers(d: &LabelledDiagram) -> Result<Vec<Vec<usize>>> {
    let n = d.n_vertices();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &v in d.left() {
        dist[v] = 0;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        for w in d.neighbors(v) {
            if dist[w] == usize::MAX && d.is_internal(w) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let internal = d.internal_vertices();
    if let Some(&v) = internal.iter().find(|&&v| dist[v] == usize::MAX) {
        return Err(ForgeError::Hypothesis(format!("internal vertex {v} is not reachable from the left side")));
    }
    let depth = internal.iter().map(|&v| dist[v]).max().unwrap_or(0);
    let mut layers = vec![d.left().to_vec()];
    for k in 1..=depth {
        layers.push(internal.iter().copied().filter(|&v| dist[v] == k).collect());
    }
    layers.push(d.right().to_vec());
    Ok(layers)
}

fn check_layers(d: &LabelledDiagram, layers: &[Vec<usize>]) -> Result<()> {
    let m = layers.len();
    if m < 2 {
        return Err(ForgeError::Hypothesis("need at least two layers".into()));
    }
    let n = d.n_vertices();
    let mut layer_of = vec![usize::MAX; n];
    for (k, layer) in layers.iter().enumerate() {
        for &v in layer {
            if v >= n || layer_of[v] != usize::MAX {
                return Err(ForgeError::Hypothesis(format!("vertex {v} is out of range or in two layers")));
            }
            layer_of[v] = k;
        }
    }
    if layer_of.iter().any(|&k| k == usize::MAX) {
        return Err(ForgeError::Hypothesis("layers must cover every vertex".into()));
    }
    let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<usize>>();
    if set(&layers[0]) != set(d.left()) || set(&layers[m - 1]) != set(d.right()) {
        return Err(ForgeError::Hypothesis("first layer must be L and last layer must be R".into()));
    }
    for v in 0..n {
        let k = layer_of[v];
        let nb: Vec<usize> = d.neighbors(v).iter().map(|&w| layer_of[w]).collect();
        let later = nb.iter().any(|&j| j > k);
        let earlier = nb.iter().any(|&j| j < k);
        let ok = if k == 0 {
            later
        } else if k == m - 1 {
            earlier
        } else {
            later && earlier
        };
        if !ok {
            return Err(ForgeError::Hypothesis(format!(
                "vertex {v} in layer {} lacks a neighbor in an {} layer",
                k + 1,
                if later { "earlier" } else { "later" }
            )));
        }
    }
    Ok(())
}
