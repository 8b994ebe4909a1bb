use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cgraph::DegreeTwoInput;
use crate::combinat::MonomialIndex;
use crate::error::Result;
use crate::linalg;

use super::matrix::{pseudomoment_matrix, Basis, DENSE_EIG_LIMIT};
use super::pseudo::Pseudoexpectation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Psd,
    NotPsd,
    /// The eigensolver met non-finite data.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub basis: Basis,
    pub n: usize,
    pub degree: usize,
    pub matrix_side: usize,
    pub normalization_ok: bool,
    pub normalization_residual: f64,
    pub ideal_ok: bool,
    pub ideal_residual: f64,
    pub ideal_checks: usize,
    pub ideal_exhaustive: bool,
    pub symmetry_ok: bool,
    pub symmetry_residual: f64,
    pub min_eigenvalue: f64,
    pub norm: f64,
    pub tolerance: f64,
    pub psd_ok: bool,
    pub verdict: Verdict,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.normalization_ok && self.ideal_ok && self.symmetry_ok && self.psd_ok
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub basis: Basis,
    /// Relative PSD tolerance: accept `λ_min ≥ −tol · ‖Z‖`.
    pub tolerance: f64,
    pub ideal_samples: usize,
    pub seed: u64,
    pub limit: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { basis: Basis::Monomial, tolerance: 1e-8, ideal_samples: 200, seed: 0, limit: DENSE_EIG_LIMIT }
    }
}

/// Multisets over `[n]` of size at most `k`.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().copied().unwrap_or(0);
            for i in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn ideal_residual(e: &Pseudoexpectation, opts: &CertifyOptions) -> Result<(f64, usize, bool)> {
    let n = e.n();
    let k = e.degree().saturating_sub(2);
    let check = |s: &[usize], i: usize| -> Result<f64> {
        let mut t = s.to_vec();
        t.extend([i, i]);
        Ok((e.evaluate(&MonomialIndex::new(t))? - e.evaluate(&MonomialIndex::new(s.to_vec()))?).abs())
    };
    let mut worst: f64 = 0.0;
    if n <= 4 {
        let all = multisets(n, k);
        for s in &all {
            for i in 0..n {
                worst = worst.max(check(s, i)?);
            }
        }
        return Ok((worst, all.len() * n, true));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.ideal_samples {
        let len = rng.random_range(0..=k);
        let s: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();
        worst = worst.max(check(&s, rng.random_range(0..n))?);
    }
    Ok((worst, opts.ideal_samples, false))
}

/// Checks normalization, ideal annihilation, symmetry, and positivity of the
/// pseudomoment matrix in the chosen basis.
pub fn certify(e: &Pseudoexpectation, m: Option<&DegreeTwoInput>, opts: &CertifyOptions) -> Result<CertificationReport> {
    let d = e.degree() / 2;
    let z = pseudomoment_matrix(e, opts.basis, m, d, opts.limit)?;
    let normalization_residual = (e.values()[0] - 1.0).abs();
    let (ideal, ideal_checks, ideal_exhaustive) = ideal_residual(e, opts)?;
    let symmetry_residual = linalg::asymmetry(&z.matrix);
    let finite = z.matrix.iter().all(|v| v.is_finite());
    let (min_eigenvalue, norm, verdict) = if finite {
        let eig = z.eigenvalues();
        let lo = eig.first().copied().unwrap_or(0.0);
        let hi = eig.last().copied().unwrap_or(0.0);
        let norm = lo.abs().max(hi.abs());
        let verdict = if lo >= -opts.tolerance * norm { Verdict::Psd } else { Verdict::NotPsd };
        (lo, norm, verdict)
    } else {
        (f64::NAN, f64::NAN, Verdict::Indeterminate)
    };
    Ok(CertificationReport {
        basis: opts.basis,
        n: e.n(),
        degree: e.degree(),
        matrix_side: z.side(),
        normalization_ok: normalization_residual <= 1e-12,
        normalization_residual,
        ideal_ok: ideal == 0.0,
        ideal_residual: ideal,
        ideal_checks,
        ideal_exhaustive,
        symmetry_ok: symmetry_residual <= 1e-12 * norm.max(1.0),
        symmetry_residual,
        min_eigenvalue,
        norm,
        tolerance: opts.tolerance,
        psd_ok: verdict == Verdict::Psd,
        verdict,
    })
}
