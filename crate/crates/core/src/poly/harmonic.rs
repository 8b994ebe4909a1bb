use nalgebra::DMatrix;

use crate::combinat::{enumerate_position_partitions, partition_block_weight, PartitionConstraint, SubsetIndexer};
use crate::error::{ForgeError, Result};

use super::polynomial::Polynomial;

/// Which of the two families of block polynomials to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QVariant {
    /// `x_i`, `M_ij`, `Σ_a ∏ M_ia x_a` (odd), `Σ_a ∏ M_ia` (even).
    Lowered,
    /// `x_i`, or `Σ_a ∏ M_ia x_a^{|S|}` for `|S| ≥ 2`.
    Full,
}

/// The block polynomial `q_S` (full) or `q_S↓` (lowered) for a set `S`.
pub fn build_q(s: &[usize], m: &DMatrix<f64>, variant: QVariant) -> Result<Polynomial> {
    let n = m.nrows();
    if s.is_empty() {
        return Err(ForgeError::InvalidArgument("block polynomial of the empty set".into()));
    }
    if s.len() == 1 {
        return Ok(Polynomial::variable(n, s[0]));
    }
    if variant == QVariant::Lowered && s.len() == 2 {
        return Ok(Polynomial::constant(n, m[(s[0], s[1])]));
    }
    let power = match variant {
        QVariant::Full => s.len(),
        QVariant::Lowered => s.len() % 2,
    };
    let mut p = Polynomial::zero(n);
    for a in 0..n {
        let c: f64 = s.iter().map(|&i| m[(i, a)]).product();
        p.add_term(vec![a; power], c);
    }
    Ok(p)
}

fn partition_sum(s: &[usize], m: &DMatrix<f64>, variant: QVariant) -> Result<Polynomial> {
    let n = m.nrows();
    let mut out = Polynomial::zero(n);
    if s.is_empty() {
        return Ok(Polynomial::constant(n, 1.0));
    }
    for blocks in enumerate_position_partitions(s.len(), PartitionConstraint::All) {
        let mut term = Polynomial::constant(n, 1.0);
        for b in &blocks {
            let values: Vec<usize> = b.iter().map(|&k| s[k]).collect();
            let q = build_q(&values, m, variant)?;
            term = term.mul(&q).scaled(partition_block_weight(b.len()) as f64);
        }
        out.add_scaled(&term, 1.0);
    }
    Ok(out)
}

/// `h_S↓(x; M) = Σ_{σ ∈ Part(S)} ∏_{A ∈ σ} (−1)^{|A|−1}(|A|−1)! q_A↓(x)`.
pub fn h_down(s: &[usize], m: &DMatrix<f64>) -> Result<Polynomial> {
    partition_sum(s, m, QVariant::Lowered)
}

/// The homogeneous counterpart of [`h_down`] built from the full `q_A`.
pub fn h_full(s: &[usize], m: &DMatrix<f64>) -> Result<Polynomial> {
    partition_sum(s, m, QVariant::Full)
}

/// One multiharmonic basis element with both of its polynomial forms.
#[derive(Clone, Debug)]
pub struct HarmonicElement {
    pub set: Vec<usize>,
    pub lowered: Polynomial,
    pub full: Polynomial,
}

/// Basis elements for every `S` with `|S| ≤ d`, in [`SubsetIndexer`] order.
pub fn build_harmonic_basis(m: &DMatrix<f64>, d: usize) -> Result<Vec<HarmonicElement>> {
    SubsetIndexer::new(m.nrows(), d)
        .all_sets()
        .into_iter()
        .map(|s| {
            Ok(HarmonicElement { lowered: h_down(&s, m)?, full: h_full(&s, m)?, set: s })
        })
        .collect()
}

/// `C[S, U]`: coefficient of `x^U` in `h_S↓` after reduction modulo
/// `x_i² − 1`. Rows and columns follow [`SubsetIndexer`] order; `C` is unit
/// lower triangular since `x^S` is the only top-degree multilinear monomial.
pub fn coefficient_matrix(m: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
    let idx = SubsetIndexer::new(m.nrows(), d);
    let mut c = DMatrix::zeros(idx.len(), idx.len());
    for (row, s) in idx.all_sets().iter().enumerate() {
        for (mono, v) in h_down(s, m)?.multilinear_reduction().terms() {
            if mono.len() > d {
                return Err(ForgeError::Construction(format!("basis polynomial of {s:?} has degree above {d}")));
            }
            c[(row, idx.index(mono))] += v;
        }
    }
    Ok(c)
}
