//! Polynomial calculus for the multiharmonic basis: apolar inner products,
//! the lowered and full basis polynomials, and the Gram matrix `Y` computed
//! both by direct differentiation and through partition transport diagrams.

mod gram;
mod harmonic;
mod polynomial;

pub use gram::{build_transport_diagram, gram_direct, gram_via_transport};
pub use harmonic::{
    build_harmonic_basis, build_q, coefficient_matrix, h_down, h_full, HarmonicElement, QVariant,
};
pub use polynomial::{apolar, apolar_partial, Polynomial};
