mod common;

use common::{close, input, rng};
use forge_core::cgraph::DegreeTwoInput;
use forge_core::combinat::{subsets_of_size, symmetric_difference, MonomialIndex};
use forge_core::extend::{
    certify, err_value, err_value_factorized, extend, extend_degree6_lowrank, extend_degree6_with, main_value,
    monomial_matrix, multiharmonic_by_expansion, multiharmonic_matrix, pairs_pseudoexpectation, z_main_direct,
    z_main_stretched, Basis, CertifyOptions, MainEvaluator, Provenance, Pseudoexpectation, Verdict,
};
use forge_core::ForgeError;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

/// The degree-4 value written out term by term.
fn degree4_formula(m: &DMatrix<f64>, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let n = m.nrows();
    let star: f64 = (0..n).map(|a| m[(a, i)] * m[(a, j)] * m[(a, k)] * m[(a, l)]).sum();
    m[(i, j)] * m[(k, l)] + m[(i, k)] * m[(j, l)] + m[(i, l)] * m[(j, k)] - 2.0 * star
}

fn ev(e: &Pseudoexpectation, s: &[usize]) -> f64 {
    e.evaluate(&MonomialIndex::new(s.to_vec())).unwrap()
}

/// Sorted multisets of size `k` over `[n]`.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    common::tuples(n, k).into_iter().filter(|t| t.windows(2).all(|w| w[0] <= w[1])).collect()
}

#[test]
fn degree_two_values_are_the_input() {
    let m = input(6, 3, 1);
    let e = extend(&m, 1).unwrap();
    assert_eq!(e.values()[0], 1.0);
    assert_eq!(e.provenance(), Provenance::Extension);
    for i in 0..6 {
        for j in 0..i {
            assert!((ev(&e, &[j, i]) - m.get(i, j)).abs() < 1e-14);
        }
    }
    assert!((&e.second_moments() - m.matrix()).amax() < 1e-14);
}

#[test]
fn degree_four_matches_the_closed_form() {
    for seed in 0..10 {
        let m = input(7, 4, 100 + seed);
        let mat = m.matrix();
        let e = extend(&m, 2).unwrap();
        for s in subsets_of_size(7, 4) {
            let want = degree4_formula(&mat, s[0], s[1], s[2], s[3]);
            assert!((ev(&e, &s) - want).abs() < 1e-12, "{s:?}");
        }
    }
}

#[test]
fn identity_gives_the_uniform_measure() {
    let m = DegreeTwoInput::new_psd(DMatrix::identity(5, 5)).unwrap();
    let e = extend(&m, 3).unwrap();
    for (k, v) in e.values().iter().enumerate() {
        assert_eq!(*v, if k == 0 { 1.0 } else { 0.0 });
    }
    let report = certify(&e, Some(&m), &CertifyOptions::default()).unwrap();
    assert!(report.passed());
    assert!((report.min_eigenvalue - 1.0).abs() < 1e-12);
}

#[test]
fn evaluation_reduces_repeated_indices() {
    let m = input(5, 3, 2);
    let e = extend(&m, 2).unwrap();
    assert_eq!(ev(&e, &[3, 3]), 1.0);
    assert_eq!(ev(&e, &[1, 1, 2, 4]), m.get(2, 4));
    assert_eq!(ev(&e, &[1, 2, 1, 2]), 1.0);
    assert_eq!(ev(&e, &[0, 0, 0, 0, 0, 0, 1, 2]), m.get(1, 2));
    assert_eq!(ev(&e, &[0, 1, 2]), 0.0);
    assert!(matches!(
        e.evaluate(&MonomialIndex::new(vec![0, 1, 2, 3, 4, 4, 4])),
        Err(ForgeError::DegreeOverflow { .. })
    ));
}

#[test]
fn extension_rejects_bad_diagonals_and_caps() {
    let mut mat = common::random_correlation(4, 4, 3);
    mat[(2, 2)] = 1.2;
    let m = DegreeTwoInput::new_psd(mat).unwrap();
    assert!(extend(&m, 2).is_err());
    let m = input(3, 3, 3);
    assert!(matches!(extend(&m, 20), Err(ForgeError::CapExceeded { .. })));
    assert!(DegreeTwoInput::new_psd(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
}

#[test]
fn error_term_examples() {
    let m = input(5, 3, 4);
    let mat = m.matrix();
    for s in multisets(5, 4).into_iter().filter(|s| s.windows(2).all(|w| w[0] != w[1])) {
        assert_eq!(err_value(&m, &s).unwrap(), 0.0);
    }
    assert!(err_value(&m, &[2, 2]).unwrap().abs() < 1e-15);
    assert!((main_value(&m, &[2, 2]).unwrap() - 1.0).abs() < 1e-14);
    let (i, j, k) = (1, 3, 4);
    let want: f64 = 2.0 * (0..5).filter(|&a| a != i).map(|a| mat[(a, i)].powi(2) * mat[(a, j)] * mat[(a, k)]).sum::<f64>();
    let got = err_value(&m, &[i, i, j, k]).unwrap();
    assert!((got - want).abs() < 1e-13, "{got} vs {want}");
}

/// Multisets on which the greedy repetition-spanning forest breaks the
/// main-plus-error identity: a doubled index below an index of multiplicity
/// at least three.
fn identity_breaks(s: &[usize]) -> bool {
    let mult = |i: usize| s.iter().filter(|&&x| x == i).count();
    s.iter().any(|&i| mult(i) == 2 && s.iter().any(|&j| j > i && mult(j) >= 3))
}

#[test]
fn main_plus_error_is_the_extension_on_multisets() {
    for (n, seed) in [(3, 5), (4, 6), (5, 7)] {
        let m = input(n, 3, seed);
        let e = extend(&m, 3).unwrap();
        let main = MainEvaluator::new(&m).unwrap();
        for k in [2, 4, 6] {
            for s in multisets(n, k) {
                let total = ev(&e, &s);
                let mv = main_value(&m, &s).unwrap();
                let err = err_value(&m, &s).unwrap();
                let gap = (total - mv - err).abs();
                if identity_breaks(&s) {
                    assert!(gap > 1e-3, "{s:?}: expected a visible gap, got {gap}");
                } else {
                    assert!(gap < 1e-10, "{s:?}: {total} vs {mv} + {err}");
                }
                let fact = err_value_factorized(&m, &s).unwrap();
                assert!((err - fact).abs() < 1e-10, "{s:?}: {err} vs {fact}");
                assert!((main.main(&s).unwrap() - mv).abs() < 1e-10);
                assert!((main.tight(&s).unwrap() - (mv + err)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn smallest_identity_counterexample() {
    let m = DegreeTwoInput::new_psd(DMatrix::from_row_slice(
        3,
        3,
        &[1.0, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 1.0],
    ))
    .unwrap();
    // Collapsing the 0-spanning subtree of the six-leaf star leaves four
    // edges to 1-labelled leaves, more copies of 0 than the multiset has, and
    // no other forest cancels them.
    let s = [0, 0, 1, 1, 1, 1];
    let sum = main_value(&m, &s).unwrap() + err_value(&m, &s).unwrap();
    assert!((sum - 1.12864).abs() < 1e-9, "{sum}");
    let flipped = [0, 0, 0, 0, 1, 1];
    let sum = main_value(&m, &flipped).unwrap() + err_value(&m, &flipped).unwrap();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn monomial_matrix_depends_on_symmetric_difference() {
    for (n, seed) in [(4, 8), (6, 9)] {
        let m = input(n, 3, seed);
        let e = extend(&m, 2).unwrap();
        let z = monomial_matrix(&e, 2, 6000).unwrap();
        let sets = z.indexer.all_sets();
        for (a, s) in sets.iter().enumerate() {
            for (b, t) in sets.iter().enumerate() {
                let diff = symmetric_difference(s, t);
                assert_eq!(z.matrix[(a, b)], e.value_of_set(&diff));
            }
        }
        assert!((z.block(1, 1) - m.matrix()).amax() < 1e-14);
        assert!(z.block(0, 1).iter().all(|&v| v == 0.0));
    }
}

#[test]
fn multiharmonic_matrix_matches_expansion() {
    for (n, d, seed) in [(4, 2, 10), (5, 2, 11), (4, 3, 12)] {
        let m = input(n, 3, seed);
        let e = extend(&m, d).unwrap();
        let fast = multiharmonic_matrix(&e, &m, d, 6000).unwrap();
        let slow = multiharmonic_by_expansion(&e, &m, d).unwrap();
        assert!((&fast.matrix - &slow).amax() < 1e-10);
        if d == 2 {
            assert!((fast.block(1, 1) - m.matrix()).amax() < 1e-14);
        }
    }
}

#[test]
fn basis_change_preserves_positivity_verdicts() {
    let m = input(6, 4, 13);
    let e = extend(&m, 2).unwrap();
    let mono = certify(&e, Some(&m), &CertifyOptions::default()).unwrap();
    let opts = CertifyOptions { basis: Basis::Multiharmonic, ..Default::default() };
    let harm = certify(&e, Some(&m), &opts).unwrap();
    assert_eq!(mono.psd_ok, harm.psd_ok);
}

#[test]
fn stretched_forests_reproduce_the_main_term() {
    for (n, d, seed) in [(3, 2, 14), (4, 2, 15), (5, 2, 16), (3, 3, 17), (4, 3, 18)] {
        let m = input(n, 3, seed);
        let stretched = z_main_stretched(&m, d).unwrap();
        let direct = z_main_direct(&m, d).unwrap();
        let gap = (&stretched.matrix - &direct).amax();
        assert!(gap < 1e-10, "n={n} d={d}: {gap}");
        assert_eq!(stretched.block(0, 0)[(0, 0)], 1.0);
        assert!((stretched.block(1, 1) - m.matrix()).amax() < 1e-14);
    }
}

#[test]
fn certifier_accepts_genuine_distributions() {
    let mut r = rng(19);
    for n in 1..=3 {
        let points: Vec<Vec<f64>> = common::tuples(2, n)
            .into_iter()
            .map(|t| t.into_iter().map(|b| if b == 0 { -1.0 } else { 1.0 }).collect())
            .collect();
        // Sign-symmetric weights, so odd moments vanish as the store requires.
        let raw: Vec<f64> = points.iter().map(|_| r.random_range(0.0..1.0)).collect();
        let mut weights: Vec<f64> = (0..raw.len()).map(|i| raw[i] + raw[raw.len() - 1 - i]).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let degree = 2 * n.div_ceil(2);
        let e = Pseudoexpectation::from_fn(n, degree, Provenance::Custom, |s| {
            Ok(points.iter().zip(&weights).map(|(x, w)| w * s.iter().map(|&i| x[i]).product::<f64>()).sum())
        })
        .unwrap();
        let report = certify(&e, None, &CertifyOptions::default()).unwrap();
        assert!(report.passed(), "n={n}: {report:?}");
        assert!(report.ideal_exhaustive);
    }
}

#[test]
fn certifier_rejects_an_invalid_assignment() {
    let e = Pseudoexpectation::from_fn(3, 2, Provenance::Custom, |s| Ok(if s.is_empty() { 1.0 } else { -0.9 }))
        .unwrap();
    let report = certify(&e, None, &CertifyOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::NotPsd);
    assert!(!report.passed());
}

#[test]
fn degree6_examples() {
    let m = input(6, 2, 20);
    let mat = m.matrix();
    let sq = &mat * &mat;
    let (t, c) = (0.05, 0.1);
    let ext = extend_degree6_with(&m, t, c).unwrap();
    let e = &ext.expectation;
    assert_eq!(e.provenance(), Provenance::Degree6Lowrank);
    let base = extend(&m, 3).unwrap();
    for i in 0..6 {
        for j in 0..i {
            assert!((ev(e, &[j, i]) - (1.0 - c) * mat[(i, j)]).abs() < 1e-14);
        }
    }
    let (i, j, k, l) = (0, 2, 3, 5);
    let pairs = sq[(i, j)] * sq[(k, l)] + sq[(i, k)] * sq[(j, l)] + sq[(i, l)] * sq[(j, k)];
    let want = (1.0 - c) * (ev(&base, &[i, j, k, l]) + 2.0 * t * pairs);
    assert!((ev(e, &[i, j, k, l]) - want).abs() < 1e-13);
    let p = pairs_pseudoexpectation(&m).unwrap();
    assert_eq!(ev(&p, &[1, 4]), 0.0);
    assert_eq!(ev(&p, &[]), 0.0);

    let plain = extend_degree6_with(&m, 0.0, 0.0).unwrap();
    assert!(plain.expectation.values().iter().zip(base.values()).all(|(a, b)| a == b));
    assert!(extend_degree6_with(&m, t, 1.0).is_err());
    assert!(extend_degree6_lowrank(&m, -1.0, 250.0).is_err());
    // Dense low-dimensional inputs blow the adjustment budget.
    assert!(matches!(extend_degree6_lowrank(&m, 0.5, 250.0), Err(ForgeError::Construction(_))));
}

#[test]
fn json_round_trip() {
    let m = input(5, 3, 21);
    let e = extend(&m, 2).unwrap();
    let text = e.to_json().unwrap();
    let back = Pseudoexpectation::from_json(&text).unwrap();
    assert_eq!(back, e);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 5);
    assert_eq!(v["degree"], 4);
    assert_eq!(v["provenance"], "extension");
    assert!(Pseudoexpectation::from_json("{\"n\": 2}").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ideal_annihilation_is_exact(seed in 0u64..1000, extra in 0usize..4) {
        let m = input(4, 3, seed);
        let e = extend(&m, 2).unwrap();
        for s in multisets(4, 2) {
            let mut t = s.clone();
            t.extend([extra, extra]);
            prop_assert_eq!(ev(&e, &t), ev(&e, &s));
        }
    }

    #[test]
    fn extension_is_permutation_equivariant(seed in 0u64..1000) {
        let m = input(5, 3, seed);
        let mut r = rng(seed);
        let mut perm: Vec<usize> = (0..5).collect();
        for i in (1..5).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        let mat = m.matrix();
        let permuted = DegreeTwoInput::new(DMatrix::from_fn(5, 5, |i, j| mat[(perm[i], perm[j])])).unwrap();
        let e = extend(&m, 2).unwrap();
        let f = extend(&permuted, 2).unwrap();
        for s in subsets_of_size(5, 4) {
            let image: Vec<usize> = s.iter().map(|&i| perm[i]).collect();
            prop_assert!(close(ev(&f, &s), ev(&e, &image), 1e-12));
        }
    }
}
