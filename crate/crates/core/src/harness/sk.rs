use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cgraph::DegreeTwoInput;
use crate::error::{ForgeError, Result};
use crate::extend::{certify, extend_degree6_lowrank, CertificationReport, CertifyOptions, Pseudoexpectation, DEGREE6_CONSTANT};

use super::instances::{coupled_gaussians, goe, lowrank_from_vectors};

#[derive(Clone, Debug)]
pub struct SkOptions {
    pub n: usize,
    pub seed: u64,
    pub alpha: f64,
    pub delta: f64,
    /// Defaults to [`default_t_pow`] of the built `M`.
    pub t_pow: Option<f64>,
    pub constant: f64,
    pub certify: bool,
    pub certify_options: CertifyOptions,
}

impl Default for SkOptions {
    fn default() -> Self {
        Self {
            n: 40,
            seed: 0,
            alpha: 0.1,
            delta: 0.05,
            t_pow: None,
            constant: DEGREE6_CONSTANT,
            certify: true,
            certify_options: CertifyOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "message")]
pub enum SkStatus {
    Constructed,
    ConstructionFailed(String),
    CertificationFailed(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkReport {
    pub n: usize,
    pub seed: u64,
    pub alpha: f64,
    pub delta: f64,
    pub rank: usize,
    /// `λ_r(W)`, the smallest eigenvalue kept in the top eigenspace.
    pub eigenvalue_threshold: f64,
    pub lambda_max: f64,
    /// `N λ_max(W)`.
    pub spectral_benchmark: f64,
    /// `⟨W, M0⟩`.
    pub w_dot_m0: f64,
    pub lambda_min_m: f64,
    pub t_pow: f64,
    pub c: f64,
    pub status: SkStatus,
    /// `⟨Ẽ[xxᵀ], W⟩` when the construction succeeded.
    pub objective: Option<f64>,
    pub objective_per_n: Option<f64>,
    pub certification: Option<CertificationReport>,
}

/// `⟨Ẽ[xxᵀ], W⟩`.
pub fn objective(e: &Pseudoexpectation, w: &DMatrix<f64>) -> f64 {
    e.second_moments().component_mul(w).sum()
}

/// Mean of `M_ij²` over `i ≠ j`: the constant that best matches
/// `M^{∘2} − I` off the diagonal.
pub fn default_t_pow(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n < 2 {
        return 0.0;
    }
    let total: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].powi(2)).sum();
    total / (n * (n - 1)) as f64
}

/// `M = I − D + M0` with `M0 = (1 − α/2)(1/r) Σ g gᵀ` for Gaussians coupled
/// to the top-`r` eigenspace of `w`. Also returns `M0`.
pub(super) fn sk_input(w: &DMatrix<f64>, rank: usize, alpha: f64, seed: u64) -> Result<(DegreeTwoInput, DMatrix<f64>)> {
    let n = w.nrows();
    if rank == 0 || rank > n {
        return Err(ForgeError::InvalidArgument(format!("eigenspace dimension {rank} is outside 1..={n}")));
    }
    let eig = SymmetricEigen::new(w.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let basis = DMatrix::from_fn(n, rank, |i, k| eig.eigenvectors[(i, order[k])]);
    // Separate stream from the one that drew W.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_c0u64);
    let g = coupled_gaussians(&basis, &mut rng);
    let m0 = (&g * g.transpose()) * ((1.0 - alpha / 2.0) / rank as f64);
    Ok((DegreeTwoInput::new(lowrank_from_vectors(&g, alpha))?, m0))
}

/// Runs the degree-6 low-rank construction on a GOE sample.
pub fn sk_run(opts: &SkOptions) -> Result<SkReport> {
    sk_run_with(&goe(opts.n, opts.seed), opts)
}

/// As [`sk_run`] on a given symmetric `w`.
pub fn sk_run_with(w: &DMatrix<f64>, opts: &SkOptions) -> Result<SkReport> {
    if !(0.0..1.0).contains(&opts.alpha) {
        return Err(ForgeError::InvalidArgument(format!("alpha must lie in [0, 1), got {}", opts.alpha)));
    }
    if !(opts.delta > 0.0 && opts.delta <= 1.0) {
        return Err(ForgeError::InvalidArgument(format!("delta must lie in (0, 1], got {}", opts.delta)));
    }
    let n = w.nrows();
    let rank = ((opts.delta * n as f64).floor() as usize).max(1);
    let (m, m0) = sk_input(w, rank, opts.alpha, opts.seed)?;
    let mut eigs: Vec<f64> = SymmetricEigen::new(w.clone()).eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| b.total_cmp(a));
    let mat = m.matrix();
    let t_pow = opts.t_pow.unwrap_or_else(|| default_t_pow(&mat));
    let c = crate::extend::degree6_adjustment(&m, t_pow, opts.constant);
    let mut report = SkReport {
        n,
        seed: opts.seed,
        alpha: opts.alpha,
        delta: opts.delta,
        rank,
        eigenvalue_threshold: eigs[rank - 1],
        lambda_max: eigs[0],
        spectral_benchmark: n as f64 * eigs[0],
        w_dot_m0: m0.component_mul(w).sum(),
        lambda_min_m: m.lambda_min(),
        t_pow,
        c,
        status: SkStatus::Constructed,
        objective: None,
        objective_per_n: None,
        certification: None,
    };
    let ext = match extend_degree6_lowrank(&m, t_pow, opts.constant) {
        Ok(ext) => ext,
        Err(e) => {
            report.status = SkStatus::ConstructionFailed(e.to_string());
            return Ok(report);
        }
    };
    let obj = objective(&ext.expectation, w);
    report.objective = Some(obj);
    report.objective_per_n = Some(obj / n as f64);
    if opts.certify {
        match certify(&ext.expectation, Some(&m), &opts.certify_options) {
            Ok(r) => report.certification = Some(r),
            Err(e) => report.status = SkStatus::CertificationFailed(e.to_string()),
        }
    }
    Ok(report)
}
