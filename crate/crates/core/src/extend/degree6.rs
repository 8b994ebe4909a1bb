use nalgebra::DMatrix;

use crate::cgraph::DegreeTwoInput;
use crate::combinat::{enumerate_position_partitions, PartitionConstraint};
use crate::error::{ForgeError, Result};
use crate::incoherence::eps_offdiag;
use crate::linalg;

use super::pseudo::{Provenance, Pseudoexpectation};
use super::values::extend;

/// Default leading constant in the adjustment `c`.
pub const DEGREE6_CONSTANT: f64 = 250.0;

/// `c = constant · t_pow (‖M‖⁶ ‖M²‖_F + N ε_offdiag(M²) + N² ε_offdiag(M²)³)`.
pub fn degree6_adjustment(m: &DegreeTwoInput, t_pow: f64, constant: f64) -> f64 {
    let mat = m.matrix();
    let sq = &mat * &mat;
    let n = m.n() as f64;
    let off = eps_offdiag(&sq);
    constant * t_pow * (m.op_norm().powi(6) * linalg::frobenius_norm(&sq) + n * off + n * n * off.powi(3))
}

/// Sum over perfect matchings of `∏ A_{s_a s_b}` (the hafnian of `A[s, s]`).
fn matching_sum(a: &DMatrix<f64>, s: &[usize]) -> f64 {
    enumerate_position_partitions(s.len(), PartitionConstraint::Even)
        .into_iter()
        .filter(|blocks| blocks.iter().all(|b| b.len() == 2))
        .map(|blocks| blocks.iter().map(|b| a[(s[b[0]], s[b[1]])]).product::<f64>())
        .sum()
}

/// `Ẽ^pairs[x^S] = 1{|S| ∈ {4, 6}} Σ_{F all pairs} Z^F(M²; S)`.
pub fn pairs_pseudoexpectation(m: &DegreeTwoInput) -> Result<Pseudoexpectation> {
    let mat = m.matrix();
    let sq = &mat * &mat;
    Pseudoexpectation::from_fn(m.n(), 6, Provenance::Custom, |s| {
        Ok(if s.len() == 4 || s.len() == 6 { matching_sum(&sq, s) } else { 0.0 })
    })
}

#[derive(Clone, Debug)]
pub struct Degree6Extension {
    pub expectation: Pseudoexpectation,
    pub t_pow: f64,
    pub c: f64,
}

/// `(1 − c)(Ẽ_M + 2 t_pow Ẽ^pairs) + c Ẽ^id` for a given `c`.
pub fn extend_degree6_with(m: &DegreeTwoInput, t_pow: f64, c: f64) -> Result<Degree6Extension> {
    if !(0.0..1.0).contains(&c) {
        return Err(ForgeError::Construction(format!("adjustment c = {c:.6e} is outside [0, 1)")));
    }
    let base = extend(m, 3)?;
    let pairs = pairs_pseudoexpectation(m)?;
    let id = Pseudoexpectation::identity(m.n(), 6);
    let expectation = Pseudoexpectation::combine(
        &[(1.0 - c, &base), (2.0 * t_pow * (1.0 - c), &pairs), (c, &id)],
        Provenance::Degree6Lowrank,
    )?;
    Ok(Degree6Extension { expectation, t_pow, c })
}

/// The degree-6 extension with `c` from [`degree6_adjustment`]; fails when
/// `c ≥ 1`.
pub fn extend_degree6_lowrank(m: &DegreeTwoInput, t_pow: f64, constant: f64) -> Result<Degree6Extension> {
    if t_pow.is_nan() || t_pow <= 0.0 {
        return Err(ForgeError::InvalidArgument(format!("t_pow must be positive, got {t_pow}")));
    }
    m.require_unit_diagonal(1e-10)?;
    let c = degree6_adjustment(m, t_pow, constant);
    if c >= 1.0 {
        return Err(ForgeError::Construction(format!("adjustment c = {c:.6e} is at least 1")));
    }
    extend_degree6_with(m, t_pow, c)
}
