use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgraph::{cgm_block, DegreeTwoInput};
use crate::combinat::{symmetric_difference, MonomialIndex, SubsetIndexer};
use crate::error::{ForgeError, Result};
use crate::forests::stretched_forests;
use crate::linalg;
use crate::poly::{coefficient_matrix, h_down, Polynomial};

use super::pseudo::Pseudoexpectation;
use super::values::MainEvaluator;

/// Largest matrix side handed to the dense eigensolver by default
/// (`N = 30, d = 3` gives 4526).
pub const DENSE_EIG_LIMIT: usize = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Monomial,
    Multiharmonic,
}

/// A symmetric matrix indexed by subsets of `[N]` of size at most `d`, in
/// [`SubsetIndexer`] order, so degree blocks are contiguous.
#[derive(Clone, Debug)]
pub struct PseudomomentMatrix {
    pub basis: Basis,
    pub d: usize,
    pub indexer: SubsetIndexer,
    pub matrix: DMatrix<f64>,
}

impl PseudomomentMatrix {
    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    /// Rows of size `k`, columns of size `l`.
    pub fn block(&self, k: usize, l: usize) -> DMatrix<f64> {
        let idx = &self.indexer;
        self.matrix.view((idx.offset(k), idx.offset(l)), (idx.count(k), idx.count(l))).into_owned()
    }

    /// `‖block(k, l)‖` for every pair of sizes.
    pub fn block_norms(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.d + 1, self.d + 1, |k, l| linalg::spectral_norm(&self.block(k, l)))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::symmetric_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }
}

fn guard(side: usize, limit: usize) -> Result<()> {
    if side > limit {
        return Err(ForgeError::SizeGuard {
            what: "pseudomoment matrix side".into(),
            size: side as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// `Z_{S,T} = Ẽ[x^{S △ T}]` over `|S|, |T| ≤ d`.
pub fn monomial_matrix(e: &Pseudoexpectation, d: usize, limit: usize) -> Result<PseudomomentMatrix> {
    if 2 * d > e.degree() {
        return Err(ForgeError::DegreeOverflow { degree: 2 * d, max: e.degree() });
    }
    let idx = SubsetIndexer::new(e.n(), d);
    guard(idx.len(), limit)?;
    let sets = idx.all_sets();
    let side = sets.len();
    let data: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % side, k / side);
            e.value_of_set(&symmetric_difference(&sets[i], &sets[j]))
        })
        .collect();
    Ok(PseudomomentMatrix { basis: Basis::Monomial, d, indexer: idx, matrix: DMatrix::from_vec(side, side, data) })
}

/// `Ẽ[h_S↓ h_T↓]` as `C Z Cᵀ`, with `C` the multilinear coefficients of the
/// basis polynomials and `Z` the monomial matrix. Agrees with
/// [`multiharmonic_by_expansion`] since `Ẽ` is linear and respects the
/// ideal exactly.
pub fn multiharmonic_matrix(
    e: &Pseudoexpectation,
    m: &DegreeTwoInput,
    d: usize,
    limit: usize,
) -> Result<PseudomomentMatrix> {
    let z = monomial_matrix(e, d, limit)?;
    let c = coefficient_matrix(&m.matrix(), d)?;
    let matrix = linalg::symmetrize(&(&c * &z.matrix * c.transpose()));
    Ok(PseudomomentMatrix { basis: Basis::Multiharmonic, d, indexer: z.indexer, matrix })
}

pub fn pseudomoment_matrix(
    e: &Pseudoexpectation,
    basis: Basis,
    m: Option<&DegreeTwoInput>,
    d: usize,
    limit: usize,
) -> Result<PseudomomentMatrix> {
    match basis {
        Basis::Monomial => monomial_matrix(e, d, limit),
        Basis::Multiharmonic => {
            let m = m.ok_or_else(|| ForgeError::InvalidArgument("the multiharmonic basis needs M".into()))?;
            multiharmonic_matrix(e, m, d, limit)
        }
    }
}

/// Applies `value` to every monomial of `p · q`.
fn expand_product(p: &Polynomial, q: &Polynomial, value: &dyn Fn(&[usize]) -> Result<f64>) -> Result<f64> {
    let mut terms = Vec::with_capacity(p.len() * q.len());
    for (a, x) in p.terms() {
        for (b, y) in q.terms() {
            let mut mono = a.clone();
            mono.extend_from_slice(b);
            terms.push(x * y * value(&mono)?);
        }
    }
    Ok(linalg::pairwise_sum(&terms))
}

fn expanded_matrix(
    m: &DegreeTwoInput,
    d: usize,
    value: &(dyn Fn(&[usize]) -> Result<f64> + Sync),
) -> Result<DMatrix<f64>> {
    let idx = SubsetIndexer::new(m.n(), d);
    let mat = m.matrix();
    let basis: Vec<Polynomial> = idx.all_sets().iter().map(|s| h_down(s, &mat)).collect::<Result<_>>()?;
    let side = basis.len();
    let pairs: Vec<(usize, usize)> = (0..side).flat_map(|i| (i..side).map(move |j| (i, j))).collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| expand_product(&basis[i], &basis[j], value))
        .collect::<Result<_>>()?;
    let mut out = DMatrix::zeros(side, side);
    for (&(i, j), v) in pairs.iter().zip(entries) {
        out[(i, j)] = v;
        out[(j, i)] = v;
    }
    Ok(out)
}

/// `Ẽ[h_S↓ h_T↓]` by expanding each product into monomials and evaluating.
pub fn multiharmonic_by_expansion(e: &Pseudoexpectation, m: &DegreeTwoInput, d: usize) -> Result<DMatrix<f64>> {
    expanded_matrix(m, d, &|mono| e.evaluate(&MonomialIndex::new(mono.to_vec())))
}

/// `Ẽ^main[h_S↓ h_T↓]` by the same expansion, applying the main term to the
/// unreduced multisets.
pub fn z_main_direct(m: &DegreeTwoInput, d: usize) -> Result<DMatrix<f64>> {
    let main = MainEvaluator::new(m)?;
    expanded_matrix(m, d, &|mono| main.main(mono))
}

/// `Σ_{F ∈ F(|S|, |T|) stretched} μ(F) Z^F_{S,T}`, block by block.
pub fn z_main_stretched(m: &DegreeTwoInput, d: usize) -> Result<PseudomomentMatrix> {
    m.require_unit_diagonal(1e-10)?;
    let idx = SubsetIndexer::new(m.n(), d);
    let mut matrix = DMatrix::zeros(idx.len(), idx.len());
    for k in 0..=d {
        for l in 0..=d {
            if (k + l) % 2 == 1 {
                continue;
            }
            let mut block = DMatrix::zeros(idx.count(k), idx.count(l));
            for f in stretched_forests(k, l)? {
                block += cgm_block(&f, m)? * f.forest().mu() as f64;
            }
            matrix.view_mut((idx.offset(k), idx.offset(l)), (idx.count(k), idx.count(l))).copy_from(&block);
        }
    }
    Ok(PseudomomentMatrix { basis: Basis::Multiharmonic, d, indexer: idx, matrix })
}
