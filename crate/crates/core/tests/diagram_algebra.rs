mod common;

use common::{input, random_correlation, rng};
use forge_core::cgraph::cgm_block_tuples;
use forge_core::diagram_algebra::{norm_bound, EdgeGroup, LabelledDiagram, LabelledEdge};
use forge_core::error::ForgeError;
use forge_core::forests::stretched_forests;
use forge_core::linalg::spectral_norm;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.sample::<f64, _>(StandardNormal))
}

fn edge(from: usize, to: usize, label: DMatrix<f64>) -> LabelledEdge {
    LabelledEdge { from, to, label }
}

fn assert_same(a: &DMatrix<f64>, b: &DMatrix<f64>) {
    assert_eq!(a.shape(), b.shape());
    let scale = a.amax().max(b.amax()).max(1.0);
    let err = (a - b).amax();
    assert!(err <= 1e-10 * scale, "matrices differ by {err:e}");
}

/// Random diagram with up to eight vertices, dimensions in 1..=3, possibly
/// overlapping sides and parallel edges.
fn random_diagram(seed: u64) -> LabelledDiagram {
    let mut r = rng(seed);
    let n = r.random_range(2..=8);
    let dims: Vec<usize> = (0..n).map(|_| r.random_range(1..=3)).collect();
    let left: Vec<usize> = (0..n).filter(|_| r.random_bool(0.35)).collect();
    let right: Vec<usize> = (0..n).filter(|_| r.random_bool(0.35)).collect();
    let n_edges = r.random_range(0..=n + 2);
    let mut edges = Vec::new();
    for _ in 0..n_edges {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a != b {
            edges.push(edge(a, b, gaussian(&mut r, dims[a], dims[b])));
        }
    }
    LabelledDiagram::new(dims, left, right, edges).unwrap()
}

#[test]
fn single_edge_evaluates_to_its_label() {
    let mut r = rng(1);
    let a = gaussian(&mut r, 3, 4);
    let d = LabelledDiagram::new(vec![3, 4], vec![0], vec![1], vec![edge(0, 1, a.clone())]).unwrap();
    assert_same(&d.eval(), &a);
    let nb = norm_bound(&d, None).unwrap();
    assert!((nb.bound - spectral_norm(&a)).abs() < 1e-12);
}

#[test]
fn path_through_internal_vertex_is_a_product() {
    let mut r = rng(2);
    let a = gaussian(&mut r, 2, 5);
    let b = gaussian(&mut r, 5, 3);
    let d = LabelledDiagram::new(vec![2, 5, 3], vec![0], vec![2], vec![edge(0, 1, a.clone()), edge(1, 2, b.clone())])
        .unwrap();
    assert_same(&d.eval(), &(a * b));
}

#[test]
fn shared_vertex_without_edges_is_the_identity() {
    let d = LabelledDiagram::new(vec![4], vec![0], vec![0], vec![]).unwrap();
    assert_same(&d.eval(), &DMatrix::identity(4, 4));
}

#[test]
fn isolated_internal_vertex_contributes_its_dimension() {
    let d = LabelledDiagram::new(vec![2, 3], vec![0], vec![0], vec![]).unwrap();
    assert_same(&d.eval(), &(DMatrix::identity(2, 2) * 3.0));
}

#[test]
fn mismatched_label_is_rejected() {
    let err = LabelledDiagram::new(vec![2, 3], vec![0], vec![1], vec![edge(0, 1, DMatrix::zeros(3, 2))]).unwrap_err();
    assert!(matches!(err, ForgeError::DimensionMismatch(_)));
}

#[test]
fn ribbon_diagrams_match_the_tuple_blocks() {
    let m = input(3, 3, 5);
    for (l, r) in [(1, 1), (2, 2), (1, 3), (3, 1)] {
        for d in stretched_forests(l, r).unwrap() {
            let g = LabelledDiagram::from_ribbon(&d, &m.matrix()).unwrap();
            assert_same(&g.eval(), &cgm_block_tuples(&d, &m).unwrap());
        }
    }
}

#[test]
fn split_edge_with_identity_factor_is_harmless() {
    let d = random_diagram(11);
    let m = random_correlation(3, 3, 3);
    let g = LabelledDiagram::new(vec![3, 3, 3], vec![0], vec![2], vec![edge(0, 1, m.clone()), edge(1, 2, m.clone())])
        .unwrap();
    let split = g.split_edge(0, &DMatrix::identity(3, 3), &m).unwrap();
    assert_eq!(split.n_vertices(), 4);
    assert_same(&split.eval(), &g.eval());
    if !d.edges().is_empty() {
        let label = d.edges()[0].label.clone();
        let n = label.nrows();
        assert_same(&d.split_edge(0, &DMatrix::identity(n, n), &label).unwrap().eval(), &d.eval());
    }
}

#[test]
fn split_edge_rejects_a_wrong_factorization() {
    let m = random_correlation(3, 3, 4);
    let g = LabelledDiagram::new(vec![3, 3], vec![0], vec![1], vec![edge(0, 1, m.clone())]).unwrap();
    let err = g.split_edge(0, &DMatrix::identity(3, 3), &(m * 2.0)).unwrap_err();
    assert!(matches!(err, ForgeError::Hypothesis(_)));
}

#[test]
fn pin_cut_splits_a_pinned_vertex() {
    let mut r = rng(7);
    // Star with a pinned centre joined to three outer vertices.
    let dims = vec![1, 2, 3, 2];
    let edges = vec![edge(0, 1, gaussian(&mut r, 1, 2)), edge(2, 0, gaussian(&mut r, 3, 1)), edge(0, 3, gaussian(&mut r, 1, 2))];
    let g = LabelledDiagram::new(dims, vec![1, 2], vec![3], edges).unwrap();
    let cut = g.pin_cut(0).unwrap();
    assert_eq!(cut.n_vertices(), 6);
    assert_eq!(cut.edges().len(), 3);
    assert!(cut.internal_vertices().iter().all(|&v| cut.neighbors(v).len() == 1));
    assert_same(&cut.eval(), &g.eval());
    assert!(matches!(g.pin_cut(1), Err(ForgeError::Hypothesis(_))));
}

#[test]
fn tensorization_recovers_disconnected_diagrams() {
    let mut r = rng(8);
    // Two components interleaved across the side lists.
    let dims = vec![2, 3, 2, 2, 3];
    let edges = vec![edge(0, 2, gaussian(&mut r, 2, 2)), edge(1, 4, gaussian(&mut r, 3, 3)), edge(3, 4, gaussian(&mut r, 2, 3))];
    let g = LabelledDiagram::new(dims, vec![1, 0], vec![2, 3], edges).unwrap();
    let t = g.tensorize().unwrap();
    assert_eq!(t.components.len(), 2);
    assert_same(&t.assemble(), &g.eval());
}

#[test]
fn factorize_stretched_trees_at_the_terminal_layer() {
    let m = random_correlation(3, 3, 21);
    for (l, r) in [(2, 2), (3, 3), (1, 3), (2, 4)] {
        for d in stretched_forests(l, r).unwrap() {
            let f = d.forest();
            if !f.is_tree() || f.n_internal() == 0 {
                continue;
            }
            let g = LabelledDiagram::from_ribbon(&d, &m).unwrap();
            let left: Vec<usize> = g.left().to_vec();
            let right: Vec<usize> = g.right().to_vec();
            let middle = g.internal_vertices();
            let fac = g.factorize(&left, &middle, &right, &[]).unwrap();
            assert_same(&fac.product(), &g.eval());
            // Terminal vertices are the neighbors of the leaves on each side.
            assert!(fac.boundary_a.iter().all(|v| middle.contains(v)));
        }
    }
}

#[test]
fn factorize_reports_failed_conditions() {
    let m = random_correlation(2, 2, 22);
    let g = LabelledDiagram::new(vec![2, 2, 2], vec![0], vec![2], vec![edge(0, 1, m.clone()), edge(1, 2, m.clone())])
        .unwrap();
    assert!(g.factorize(&[0], &[1], &[2], &[]).is_ok());
    let err = g.factorize(&[1], &[0], &[2], &[]).unwrap_err();
    assert_eq!(err, ForgeError::Hypothesis("left vertices must lie in A".into()));
    // A single edge between the sides leaves the boundary of A inside C.
    let h = LabelledDiagram::new(vec![2, 2], vec![0], vec![1], vec![edge(0, 1, m)]).unwrap();
    let err = h.factorize(&[0], &[], &[1], &[]).unwrap_err();
    assert_eq!(err, ForgeError::Hypothesis("outer boundary of A must lie in B".into()));
}

#[test]
fn factorize_moves_boundary_edges_to_the_outer_factors() {
    let mut r = rng(23);
    // L=0 joined to 1 and 2; 1 and 2 joined to R=3; an extra edge between 1 and 2.
    let dims = vec![2, 2, 3, 2];
    let edges = vec![
        edge(0, 1, gaussian(&mut r, 2, 2)),
        edge(0, 2, gaussian(&mut r, 2, 3)),
        edge(1, 3, gaussian(&mut r, 2, 2)),
        edge(2, 3, gaussian(&mut r, 3, 2)),
        edge(1, 2, gaussian(&mut r, 2, 3)),
    ];
    let g = LabelledDiagram::new(dims, vec![0], vec![3], edges).unwrap();
    for group in [EdgeGroup::A, EdgeGroup::B, EdgeGroup::C] {
        let fac = g.factorize(&[0], &[1, 2], &[3], &[(4, group)]).unwrap();
        assert_same(&fac.product(), &g.eval());
    }
}

#[test]
fn isolated_leaf_fails_the_norm_bound_hypothesis() {
    let m = random_correlation(3, 3, 30);
    let g = LabelledDiagram::new(vec![3, 3, 3], vec![0, 2], vec![1], vec![edge(0, 1, m)]).unwrap();
    assert!(matches!(norm_bound(&g, None), Err(ForgeError::Hypothesis(_))));
}

#[test]
fn explicit_layering_is_checked() {
    let mut r = rng(31);
    let g = LabelledDiagram::new(
        vec![2, 2, 2],
        vec![0],
        vec![2],
        vec![edge(0, 1, gaussian(&mut r, 2, 2)), edge(1, 2, gaussian(&mut r, 2, 2))],
    )
    .unwrap();
    assert!(norm_bound(&g, Some(vec![vec![0], vec![1], vec![2]])).is_ok());
    assert!(norm_bound(&g, Some(vec![vec![0, 1], vec![2]])).is_err());
    assert!(norm_bound(&g, Some(vec![vec![0], vec![2]])).is_err());
}

#[test]
fn two_layer_norm_bound_dominates_on_random_instances() {
    for seed in 0..40 {
        let mut r = rng(100 + seed);
        let nl = r.random_range(1..=3);
        let nr = r.random_range(1..=3);
        let dims: Vec<usize> = (0..nl + nr).map(|_| r.random_range(1..=3)).collect();
        let mut edges = Vec::new();
        for a in 0..nl {
            edges.push(edge(a, nl + r.random_range(0..nr), DMatrix::zeros(1, 1)));
        }
        for b in nl..nl + nr {
            edges.push(edge(r.random_range(0..nl), b, DMatrix::zeros(1, 1)));
        }
        for e in edges.iter_mut() {
            e.label = gaussian(&mut r, dims[e.from], dims[e.to]);
        }
        let g = LabelledDiagram::new(dims, (0..nl).collect(), (nl..nl + nr).collect(), edges).unwrap();
        let nb = norm_bound(&g, None).unwrap();
        assert!(nb.bound >= spectral_norm(&g.eval()) * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensorization_preserves_evaluation(seed in 0u64..10_000) {
        let g = random_diagram(seed);
        assert_same(&g.tensorize().unwrap().assemble(), &g.eval());
    }

    #[test]
    fn intersection_splitting_preserves_evaluation(seed in 0u64..10_000) {
        let g = random_diagram(seed);
        let split = g.split_intersection().unwrap();
        prop_assert!(split.shared_vertices().is_empty());
        assert_same(&split.eval(), &g.eval());
    }

    #[test]
    fn direct_sum_preserves_evaluation(seed in 0u64..10_000) {
        let g = random_diagram(seed);
        let ds = g.direct_sum_decompose().unwrap();
        for (_, block) in &ds.blocks {
            prop_assert!(block.shared_vertices().is_empty());
        }
        assert_same(&ds.assemble(), &g.eval());
    }

    #[test]
    fn svd_edge_splitting_preserves_evaluation(seed in 0u64..10_000) {
        let g = random_diagram(seed);
        for k in 0..g.edges().len() {
            let svd = g.edges()[k].label.clone().svd(true, true);
            let u = svd.u.unwrap() * DMatrix::from_diagonal(&svd.singular_values);
            let vt = svd.v_t.unwrap();
            assert_same(&g.split_edge(k, &u, &vt).unwrap().eval(), &g.eval());
        }
    }

    #[test]
    fn pin_cut_preserves_evaluation(seed in 0u64..10_000) {
        let g = random_diagram(seed);
        for v in g.internal_vertices() {
            if g.dims()[v] == 1 {
                assert_same(&g.pin_cut(v).unwrap().eval(), &g.eval());
            }
        }
    }

    #[test]
    fn norm_bound_dominates_when_hypotheses_hold(seed in 0u64..10_000) {
        let g = random_diagram(seed);
        if let Ok(nb) = norm_bound(&g, None) {
            prop_assert!(nb.bound >= spectral_norm(&g.eval()) * (1.0 - 1e-10) - 1e-12);
        }
    }
}
