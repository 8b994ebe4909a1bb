//! Good forests: leaf-labelled forests whose internal vertices all have even
//! degree at least four, with no isolated vertex.
//!
//! Forests are stored in a canonical form (see [`GoodForest`]) so that
//! structural equality coincides with isomorphism fixing leaf labels.
//! Enumeration is recursive through rooted odd trees and memoized per leaf
//! count; a slower filter over Prüfer sequences is kept as a cross-check.

mod enumerate;
mod forest;
mod poset;
mod ribbon;

pub use enumerate::{
    check_counting_bounds, embed_rooted_tree, enumerate_good_forests, enumerate_good_forests_by_filter,
    enumerate_good_forests_capped, enumerate_good_trees, enumerate_good_trees_capped,
    enumerate_rooted_odd_trees, CountingReport, RootedOddTree, DEFAULT_LEAF_CAP,
};
pub use forest::{ForestTerm, GoodForest};
pub use poset::{
    compose, down_set, poset_leq, star_mobius_via_nu, tree_mu_sum, verify_mobius, MobiusVerification,
};
pub(crate) use ribbon::transport_weight;
pub use ribbon::{
    stretched_forests, stretched_mu_sum, transport_coefficient_sum, verify_xi, RibbonDiagram,
    XiVerification,
};
