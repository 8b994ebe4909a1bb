//! The extending pseudoexpectation, its main/error split, pseudomoment
//! matrices in the monomial and multiharmonic bases, certification, and the
//! degree-6 low-rank variant.

mod certify;
mod degree6;
mod matrix;
mod pseudo;
mod values;

pub use certify::{certify, CertificationReport, CertifyOptions, Verdict};
pub use degree6::{
    degree6_adjustment, extend_degree6_lowrank, extend_degree6_with, pairs_pseudoexpectation, Degree6Extension,
    DEGREE6_CONSTANT,
};
pub use matrix::{
    monomial_matrix, multiharmonic_by_expansion, multiharmonic_matrix, pseudomoment_matrix, z_main_direct,
    z_main_stretched, Basis, PseudomomentMatrix, DENSE_EIG_LIMIT,
};
pub use pseudo::{Provenance, Pseudoexpectation};
pub use values::{err_value, err_value_factorized, extend, main_value, tree_sum, MainEvaluator};
