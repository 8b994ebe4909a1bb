use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::combinat::{binomial, subsets_of_size};
use crate::error::{ForgeError, Result};
use crate::forests::RibbonDiagram;

use super::eval::cgs;
use super::input::DegreeTwoInput;

/// Largest number of entries a single block may have.
pub const BLOCK_ENTRY_LIMIT: u128 = 20_000_000;

/// `Z^D` restricted to rows `([N] choose ℓ)` and columns `([N] choose m)` in
/// colex order; entry `(S, T)` evaluates the forest on the ascending tuple of
/// `S` followed by that of `T`.
pub fn cgm_block(d: &RibbonDiagram, m: &DegreeTwoInput) -> Result<DMatrix<f64>> {
    let n = m.n();
    let (l, r) = (d.n_left(), d.n_right());
    let size = binomial(n, l) * binomial(n, r);
    if size > BLOCK_ENTRY_LIMIT {
        return Err(ForgeError::SizeGuard { what: "CGM block entries".into(), size, limit: BLOCK_ENTRY_LIMIT });
    }
    let rows = subsets_of_size(n, l);
    let cols = subsets_of_size(n, r);
    block_over(d, m, &rows, &cols)
}

/// As [`cgm_block`] with rows and columns over all tuples in `[N]^ℓ × [N]^m`
/// (row-major tuple order).
pub fn cgm_block_tuples(d: &RibbonDiagram, m: &DegreeTwoInput) -> Result<DMatrix<f64>> {
    let n = m.n();
    let (l, r) = (d.n_left(), d.n_right());
    let size = (n as u128).pow(l as u32) * (n as u128).pow(r as u32);
    if size > BLOCK_ENTRY_LIMIT {
        return Err(ForgeError::SizeGuard { what: "CGM block entries".into(), size, limit: BLOCK_ENTRY_LIMIT });
    }
    let tuples = |k: usize| -> Vec<Vec<usize>> {
        let total = n.pow(k as u32);
        (0..total)
            .map(|mut x| {
                let mut t = vec![0; k];
                for slot in t.iter_mut().rev() {
                    *slot = x % n;
                    x /= n;
                }
                t
            })
            .collect()
    };
    block_over(d, m, &tuples(l), &tuples(r))
}

fn block_over(d: &RibbonDiagram, m: &DegreeTwoInput, rows: &[Vec<usize>], cols: &[Vec<usize>]) -> Result<DMatrix<f64>> {
    let entries: Vec<f64> = (0..rows.len() * cols.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / cols.len(), k % cols.len());
            let mut s = rows[i].clone();
            s.extend_from_slice(&cols[j]);
            cgs(d.forest(), m, &s)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_row_slice(rows.len(), cols.len(), &entries))
}
