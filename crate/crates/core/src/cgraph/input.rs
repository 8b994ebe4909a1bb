use nalgebra::DMatrix;

use crate::error::{ForgeError, Result};
use crate::linalg;

/// A symmetric `N × N` matrix with cached spectral data.
#[derive(Clone, Debug)]
pub struct DegreeTwoInput {
    n: usize,
    data: Vec<f64>,
    eigenvalues: Vec<f64>,
    op_norm: f64,
    frobenius: f64,
    gram: Option<DMatrix<f64>>,
}

/// Relative tolerance for symmetry and positivity checks.
const TOL: f64 = 1e-9;

impl DegreeTwoInput {
    /// Accepts any finite symmetric matrix (asymmetry up to `1e-9` relative is
    /// averaged away).
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(ForgeError::DimensionMismatch(format!(
                "matrix is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for i in 0..matrix.nrows() {
            for j in 0..matrix.ncols() {
                if !matrix[(i, j)].is_finite() {
                    return Err(ForgeError::NonFinite { row: i, col: j });
                }
            }
        }
        let scale = matrix.amax().max(1.0);
        let asym = linalg::asymmetry(&matrix);
        if asym > TOL * scale {
            return Err(ForgeError::NotSymmetric(asym));
        }
        let matrix = linalg::symmetrize(&matrix);
        let n = matrix.nrows();
        let eigenvalues = linalg::symmetric_eigenvalues(&matrix);
        let op_norm = eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let frobenius = matrix.norm();
        let data = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| matrix[(i, j)]).collect();
        Ok(Self { n, data, eigenvalues, op_norm, frobenius, gram: None })
    }

    /// As [`new`](Self::new), additionally requiring `M ⪰ 0` and computing a
    /// Gram factor `V` (rows `r = rank`) with `VᵀV = M`.
    pub fn new_psd(matrix: DMatrix<f64>) -> Result<Self> {
        let mut out = Self::new(matrix)?;
        let lmin = out.lambda_min();
        if lmin < -TOL * out.op_norm.max(1.0) {
            return Err(ForgeError::NotPsd(lmin));
        }
        let eig = nalgebra::SymmetricEigen::new(out.matrix());
        let cutoff = TOL * out.op_norm.max(1.0);
        let keep: Vec<usize> = (0..out.n).filter(|&k| eig.eigenvalues[k] > cutoff).collect();
        let v = DMatrix::from_fn(keep.len(), out.n, |r, i| {
            let k = keep[r];
            eig.eigenvalues[k].sqrt() * eig.eigenvectors[(i, k)]
        });
        out.gram = Some(v);
        Ok(out)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(linalg::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius
    }

    /// Gram factor `V` with `VᵀV = M`; present when built by [`new_psd`](Self::new_psd).
    pub fn gram_factor(&self) -> Option<&DMatrix<f64>> {
        self.gram.as_ref()
    }

    pub fn max_diagonal_deviation(&self) -> f64 {
        (0..self.n).map(|i| (self.get(i, i) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Errors unless `|M_ii − 1| ≤ tol` for all `i`.
    pub fn require_unit_diagonal(&self, tol: f64) -> Result<()> {
        let dev = self.max_diagonal_deviation();
        if dev > tol {
            return Err(ForgeError::DiagonalViolation(dev));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_factor_reconstructs() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.2, 0.5, 1.0, 0.1, 0.2, 0.1, 1.0]);
        let input = DegreeTwoInput::new_psd(m.clone()).unwrap();
        let v = input.gram_factor().unwrap();
        assert!((v.transpose() * v - m).amax() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(DegreeTwoInput::new(m), Err(ForgeError::NotSymmetric(_))));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(DegreeTwoInput::new_psd(m), Err(ForgeError::NotPsd(_))));
    }
}
