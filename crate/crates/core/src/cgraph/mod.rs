//! Contractive graphical scalars and matrices of good forests over a fixed
//! symmetric matrix `M`.
//!
//! A forest `F` with leaves labelled by `s` evaluates to
//! `Σ_a ∏_{{v,w} ∈ E} M[f(v), f(w)]`, where leaves take their label and
//! internal vertices range over `[N]`. Evaluation eliminates internal vertices
//! from the leaves inward, at `O(N²)` per edge.

mod block;
mod eval;
mod input;
mod maxspan;

pub use block::{cgm_block, cgm_block_tuples, BLOCK_ENTRY_LIMIT};
pub use eval::{cgs, cgs_naive, cgs_pinned, cgs_tight, delta, delta_naive, cgs_tight_naive};
pub use input::DegreeTwoInput;
pub use maxspan::{is_tight, max_span, MaxSpanForest, SpanSubtree};
