use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cgraph::DegreeTwoInput;
use crate::combinat::double_factorial;
use crate::error::{ForgeError, Result};
use crate::extend::{main_value, Provenance, Pseudoexpectation};

/// `(1 + (1−α)/(N−1)) I − ((1−α)/(N−1)) 11ᵀ`.
pub fn laurent_matrix(n: usize, alpha: f64) -> Result<DegreeTwoInput> {
    if n < 2 {
        return Err(ForgeError::InvalidArgument(format!("Laurent instance needs N >= 2, got {n}")));
    }
    check_alpha(alpha)?;
    let off = (1.0 - alpha) / (n as f64 - 1.0);
    DegreeTwoInput::new_psd(DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { -off }))
}

/// `(−1)^{k}(2k−1)!! / ∏_{j=1}^{k}(N−2j+1)` for `|S| = 2k`, and 0 for odd
/// `|S|`.
pub fn laurent_closed_form(n: usize, size: usize) -> f64 {
    if size % 2 == 1 {
        return 0.0;
    }
    let k = size / 2;
    let mut value = double_factorial(size.saturating_sub(1) as i64) as f64;
    for j in 1..=k {
        value /= n as f64 - 2.0 * j as f64 + 1.0;
    }
    if k % 2 == 1 {
        -value
    } else {
        value
    }
}

/// Laurent's closed-form values as a pseudoexpectation of the given degree.
pub fn laurent_pseudoexpectation(n: usize, degree: usize) -> Result<Pseudoexpectation> {
    Pseudoexpectation::from_fn(n, degree, Provenance::LaurentClosedForm, |s| Ok(laurent_closed_form(n, s.len())))
}

/// `(−1)^{k}(2k−1)!! ((1−α)/N)^{k}` for `|S| = 2k`.
pub fn laurent_leading_order(n: usize, alpha: f64, size: usize) -> f64 {
    if size % 2 == 1 {
        return 0.0;
    }
    let k = size / 2;
    let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
    sign * double_factorial(size.saturating_sub(1) as i64) as f64 * ((1.0 - alpha) / n as f64).powi(k as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentFit {
    pub n: usize,
    pub alpha: f64,
    pub size: usize,
    pub value: f64,
    pub leading: f64,
    pub relative_error: f64,
}

/// Compares the extension of the Laurent matrix on `{0, …, size−1}` with its
/// leading-order form. The instance is permutation invariant, so one set
/// stands for all.
pub fn laurent_fit(n: usize, alpha: f64, size: usize) -> Result<LaurentFit> {
    let m = laurent_matrix(n, alpha)?;
    let s: Vec<usize> = (0..size).collect();
    let value = main_value(&m, &s)?;
    let leading = laurent_leading_order(n, alpha, size);
    Ok(LaurentFit { n, alpha, size, value, leading, relative_error: ((value - leading) / leading).abs() })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(ForgeError::InvalidArgument(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    Ok(())
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// QR with the diagonal of `R` made non-negative, so `Q` is Haar when the
/// input is Gaussian.
fn signed_qr(a: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = a.qr();
    let (mut q, mut r) = (qr.q(), qr.r());
    for k in 0..r.nrows() {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
            r.row_mut(k).neg_mut();
        }
    }
    (q, r)
}

/// `r` standard Gaussian vectors in `R^N` conditioned to span the column
/// space of the orthonormal `basis` (`N × r`): `basis · O · R` with `O` Haar
/// on `O(r)` and `R` the triangular factor of an `N × r` Gaussian matrix.
pub fn coupled_gaussians(basis: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (n, r) = basis.shape();
    let (_, tri) = signed_qr(gaussian_matrix(n, r, rng));
    let (rot, _) = signed_qr(gaussian_matrix(r, r, rng));
    basis * rot * tri
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorKind {
    /// `M = I + D − M0`, `M0 = (1 − α/2)(1/N) Σ g gᵀ` over `n` vectors.
    HighRank,
    /// `M = I − D + M0`, `M0 = (1 − α/2)(1/n) Σ g gᵀ` over `n` vectors.
    LowRank,
}

/// `D` is the diagonal of `M0`, so the result has unit diagonal.
fn projector_from_vectors(g: &DMatrix<f64>, alpha: f64, scale: f64, kind: ProjectorKind) -> DMatrix<f64> {
    let n = g.nrows();
    let m0 = (g * g.transpose()) * ((1.0 - alpha / 2.0) * scale);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            match kind {
                ProjectorKind::HighRank => -m0[(i, j)],
                ProjectorKind::LowRank => m0[(i, j)],
            }
        }
    })
}

pub fn projector_instance(
    n: usize,
    rank: usize,
    alpha: f64,
    kind: ProjectorKind,
    seed: u64,
) -> Result<DegreeTwoInput> {
    if rank == 0 || rank > n {
        return Err(ForgeError::InvalidArgument(format!("need 1 <= n <= N, got n = {rank}, N = {n}")));
    }
    check_alpha(alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(n, rank, &mut rng);
    let scale = match kind {
        ProjectorKind::HighRank => 1.0 / n as f64,
        ProjectorKind::LowRank => 1.0 / rank as f64,
    };
    DegreeTwoInput::new(projector_from_vectors(&g, alpha, scale, kind))
}

pub(super) fn lowrank_from_vectors(g: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    projector_from_vectors(g, alpha, 1.0 / g.ncols() as f64, ProjectorKind::LowRank)
}

/// GOE sample: off-diagonal variance `1/N`, diagonal variance `2/N`.
pub fn goe(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = (1.0 / n as f64).sqrt();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        w[(i, i)] = std::f64::consts::SQRT_2 * sd * rng.sample::<f64, _>(StandardNormal);
        for j in i + 1..n {
            let x = sd * rng.sample::<f64, _>(StandardNormal);
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    w
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InstanceKind {
    Laurent,
    ProjectorHighRank,
    ProjectorLowRank,
    /// `M` built from the top eigenspace of a GOE sample, as in the SK driver.
    Goe,
    File { path: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    #[serde(flatten)]
    pub kind: InstanceKind,
    pub n: usize,
    pub alpha: f64,
    /// Codimension or rank; for GOE instances, `⌊δN⌋` with `δ = rank / N`.
    pub rank: usize,
    pub seed: u64,
    pub degree: usize,
    pub t_pow: Option<f64>,
}

impl InstanceConfig {
    pub fn build(&self) -> Result<DegreeTwoInput> {
        match &self.kind {
            InstanceKind::Laurent => laurent_matrix(self.n, self.alpha),
            InstanceKind::ProjectorHighRank => {
                projector_instance(self.n, self.rank, self.alpha, ProjectorKind::HighRank, self.seed)
            }
            InstanceKind::ProjectorLowRank => {
                projector_instance(self.n, self.rank, self.alpha, ProjectorKind::LowRank, self.seed)
            }
            InstanceKind::Goe => {
                let w = goe(self.n, self.seed);
                let (m, _) = super::sk::sk_input(&w, self.rank, self.alpha, self.seed)?;
                Ok(m)
            }
            InstanceKind::File { path } => DegreeTwoInput::new(super::io::read_matrix_file(path)?.matrix),
        }
    }
}

/// Normalized Gram matrix of `n` Gaussian vectors in `R^rank`: a random
/// unit-diagonal PSD matrix of rank at most `rank`.
pub fn random_correlation(n: usize, rank: usize, seed: u64) -> Result<DegreeTwoInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = gaussian_matrix(rank.max(1), n, &mut rng);
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    let mut m = v.transpose() * v;
    m.fill_diagonal(1.0);
    DegreeTwoInput::new_psd(m)
}
