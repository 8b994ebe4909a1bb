//! Ribbon diagrams whose edges carry arbitrary compatible matrices, the
//! tuple-indexed matrices they evaluate to, and rewrite rules that preserve
//! that matrix (tensorization, splitting, cutting, direct sums, factorization)
//! together with the layered operator-norm bound.

mod bound;
mod diagram;
mod rewrite;

pub use bound::{norm_bound, NormBound};
pub use diagram::{LabelledDiagram, LabelledEdge};
pub use rewrite::{DirectSum, EdgeGroup, Factorization, Tensorization};
