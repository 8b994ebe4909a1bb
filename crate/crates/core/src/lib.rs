//! Positivity-preserving extensions of degree-2 pseudomoment matrices over the
//! hypercube `{±1}^N`, together with the forest combinatorics, contractive
//! graphical matrices, and certification routines needed to build and check them.
//!
//! Module map:
//! - [`combinat`]: multisets, partitions, poset Möbius functions, transport plans.
//! - [`forests`]: good forests, rooted odd trees, the compositional poset, ribbon diagrams.
//! - [`cgraph`]: contractive graphical scalars and matrices over a fixed `M`.
//! - [`diagram_algebra`]: matrix-labelled diagrams and their rewrite rules.
//! - [`poly`]: apolar calculus, multiharmonic basis, Gram matrices.
//! - [`extend`]: the extending pseudoexpectation and its certification.
//! - [`incoherence`]: the incoherence quantities and theorem hypotheses.
//! - [`harness`]: instance generators, experiment drivers, CLI plumbing.

pub mod cgraph;
pub mod combinat;
pub mod diagram_algebra;
pub mod error;
pub mod extend;
pub mod forests;
pub mod harness;
pub mod incoherence;
pub mod linalg;
pub mod poly;

pub use error::{ForgeError, Result};
