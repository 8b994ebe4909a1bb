//! The incoherence quantities of a degree-2 input and the extension
//! theorems' sufficient conditions evaluated on them.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgraph::{cgs, delta, DegreeTwoInput};
use crate::error::Result;
use crate::forests::{enumerate_good_trees, GoodForest};
use crate::linalg;

/// Default largest Hadamard power examined by [`eps_pow`].
pub const DEFAULT_POW_CAP: usize = 40;
/// Exact tuple enumeration is used when `N^{2d} ≤` this.
pub const EXACT_TUPLE_LIMIT: u128 = 10_000_000;
/// Uniform random tuples added to the structured ones in sampled mode.
pub const DEFAULT_RANDOM_TUPLES: usize = 10_000;

/// `max_{i≠j} |M_ij|`.
pub fn eps_offdiag(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max(m[(i, j)].abs());
        }
    }
    worst
}

/// `(max_{i≠j} Σ_k M_ik² M_jk²)^{1/2}`.
pub fn eps_corr(m: &DMatrix<f64>) -> f64 {
    let sq = m.map(|x| x * x);
    let gram = &sq * &sq;
    eps_offdiag(&gram).sqrt()
}

/// `max_{2 ≤ k ≤ cap} ‖M^{∘k} − I‖` with the Gershgorin tail
/// `(N − 1) ε_offdiag^{cap+1}` bounding every higher power.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowBound {
    pub value: f64,
    pub cap: usize,
    pub tail_bound: f64,
}

impl PowBound {
    /// An upper bound for the supremum over all `k ≥ 2`.
    pub fn upper(&self) -> f64 {
        self.value.max(self.tail_bound)
    }
}

fn hadamard_power_gap(m: &DMatrix<f64>, k: i32, shift: f64) -> f64 {
    let n = m.nrows();
    let a = DMatrix::from_fn(n, n, |i, j| m[(i, j)].powi(k) - if i == j { 1.0 } else { 0.0 } - shift);
    linalg::symmetric_spectral_norm(&a)
}

pub fn eps_pow(m: &DMatrix<f64>, cap: usize) -> PowBound {
    let value = (2..=cap.max(2)).map(|k| hadamard_power_gap(m, k as i32, 0.0)).fold(0.0, f64::max);
    let tail_bound = (m.nrows().saturating_sub(1)) as f64 * eps_offdiag(m).powi(cap.max(2) as i32 + 1);
    PowBound { value, cap: cap.max(2), tail_bound }
}

/// `max{‖M^{∘2} − I − t 11ᵀ‖, max_{k≥3} ‖M^{∘k} − I‖}`.
pub fn eps_pow_tilde(m: &DMatrix<f64>, t: f64, cap: usize) -> PowBound {
    let second = hadamard_power_gap(m, 2, t);
    let higher = (3..=cap.max(3)).map(|k| hadamard_power_gap(m, k as i32, 0.0)).fold(0.0, f64::max);
    let tail_bound = (m.nrows().saturating_sub(1)) as f64 * eps_offdiag(m).powi(cap.max(3) as i32 + 1);
    PowBound { value: second.max(higher), cap: cap.max(3), tail_bound }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleMode {
    /// Exact when `N^{2d}` is at most [`EXACT_TUPLE_LIMIT`], sampled otherwise.
    Auto,
    Exact,
    Sampled { random: usize, seed: u64 },
}

/// How a maximum over tuples was obtained. Sampled maxima are lower bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleCoverage {
    Exact { tuples: usize },
    Sampled { tuples: usize },
}

impl TupleCoverage {
    pub fn is_exact(&self) -> bool {
        matches!(self, TupleCoverage::Exact { .. })
    }
}

/// Non-decreasing tuples of length `k` over `[n]`. Every tree family is
/// closed under leaf relabelling, so maxima over all tuples are attained on
/// these.
fn sorted_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(n: usize, pos: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur[pos] = v;
            rec(n, pos + 1, v, cur, out);
        }
    }
    rec(n, 0, 0, &mut cur, &mut out);
    out
}

/// All-equal, all-distinct, and one-repeat patterns plus uniform tuples.
fn sampled_tuples(n: usize, k: usize, random: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
    let distinct = |rng: &mut ChaCha8Rng, count: usize| -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count.min(n) {
            let j = rng.random_range(i..n);
            pool.swap(i, j);
        }
        pool.truncate(count.min(n));
        pool
    };
    let mut out = Vec::new();
    for i in 0..n {
        out.push(vec![i; k]);
    }
    let structured = 64.min(n * n);
    for _ in 0..structured {
        if k <= n {
            out.push(distinct(&mut rng, k));
        }
        if k >= 2 && k - 1 <= n {
            let mut t = distinct(&mut rng, k - 1);
            t.push(t[0]);
            out.push(t);
        }
    }
    for _ in 0..random {
        out.push((0..k).map(|_| rng.random_range(0..n)).collect());
    }
    for t in out.iter_mut() {
        t.sort_unstable();
    }
    out
}

fn tuples_for(n: usize, k: usize, degree: usize, mode: TupleMode) -> (Vec<Vec<usize>>, bool) {
    let exact = match mode {
        TupleMode::Exact => true,
        TupleMode::Auto => (n as u128).checked_pow(degree as u32).is_some_and(|c| c <= EXACT_TUPLE_LIMIT),
        TupleMode::Sampled { .. } => false,
    };
    if exact {
        (sorted_tuples(n, k), true)
    } else {
        let (random, seed) = match mode {
            TupleMode::Sampled { random, seed } => (random, seed),
            _ => (DEFAULT_RANDOM_TUPLES, 0),
        };
        (sampled_tuples(n, k, random, seed), false)
    }
}

fn tree_maximum(
    m: &DegreeTwoInput,
    degree: usize,
    mode: TupleMode,
    value: impl Fn(&GoodForest, &[usize]) -> Result<f64> + Sync,
) -> Result<(f64, TupleCoverage)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut all_exact = true;
    for k in (2..=degree).step_by(2) {
        let trees = enumerate_good_trees(k)?;
        let (tuples, exact) = tuples_for(m.n(), k, degree, mode);
        all_exact &= exact;
        count += tuples.len();
        let local = tuples
            .par_iter()
            .map(|s| {
                let mut w: f64 = 0.0;
                for t in trees.iter() {
                    w = w.max(value(t, s)?.abs());
                }
                Ok::<f64, crate::error::ForgeError>(w)
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        worst = worst.max(local);
    }
    let coverage =
        if all_exact { TupleCoverage::Exact { tuples: count } } else { TupleCoverage::Sampled { tuples: count } };
    Ok((worst, coverage))
}

/// `max_{d' ≤ d} max_{T ∈ T(2d')} max_s |Z^T(M; s) − 1{s constant}|`, over
/// trees with at most `degree = 2d` leaves.
pub fn eps_tree(m: &DegreeTwoInput, degree: usize, mode: TupleMode) -> Result<(f64, TupleCoverage)> {
    tree_maximum(m, degree, mode, |t, s| {
        let constant = s.iter().all(|&x| x == s[0]);
        Ok(cgs(t, m, s)? - if constant { 1.0 } else { 0.0 })
    })
}

/// `max N^{|set(s)|/2} |Σ_{a loose} ∏ M|` over the same trees and tuples.
pub fn eps_err(m: &DegreeTwoInput, degree: usize, mode: TupleMode) -> Result<(f64, TupleCoverage)> {
    let n = m.n() as f64;
    tree_maximum(m, degree, mode, |t, s| {
        let mut distinct = s.to_vec();
        distinct.dedup();
        Ok(n.powf(distinct.len() as f64 / 2.0) * delta(t, m, s)?)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncoherenceReport {
    pub n: usize,
    pub degree: usize,
    pub eps_offdiag: f64,
    pub eps_corr: f64,
    pub eps_pow: f64,
    pub eps_pow_cap: usize,
    pub eps_pow_tail_bound: f64,
    pub eps_tree: f64,
    pub eps_tree_mode: TupleCoverage,
    pub eps_err: f64,
    pub eps_err_mode: TupleCoverage,
    pub eps_total: f64,
    pub lambda_min: f64,
    pub op_norm: f64,
    /// `λ_min(M)`.
    pub thm_condition_lhs: f64,
    /// `(12d)^32 ‖M‖^5 ε^{1/d}`.
    pub thm_condition_rhs: f64,
    pub verdict: bool,
}

/// All quantities and the sufficient condition for extending to degree
/// `2d`. `ε_tree` ranges over trees with up to `2d` leaves.
pub fn check_theorem1(m: &DegreeTwoInput, degree: usize, mode: TupleMode) -> Result<IncoherenceReport> {
    let d = (degree / 2).max(1);
    let mat = m.matrix();
    let off = eps_offdiag(&mat);
    let corr = eps_corr(&mat);
    let pow = eps_pow(&mat, DEFAULT_POW_CAP);
    let (tree, tree_mode) = eps_tree(m, degree, mode)?;
    let (err, err_mode) = eps_err(m, degree, mode)?;
    let total = off + corr + pow.upper() + tree + err;
    let lhs = m.lambda_min();
    let rhs = (12.0 * d as f64).powi(32) * m.op_norm().powi(5) * total.powf(1.0 / d as f64);
    Ok(IncoherenceReport {
        n: m.n(),
        degree,
        eps_offdiag: off,
        eps_corr: corr,
        eps_pow: pow.value,
        eps_pow_cap: pow.cap,
        eps_pow_tail_bound: pow.tail_bound,
        eps_tree: tree,
        eps_tree_mode: tree_mode,
        eps_err: err,
        eps_err_mode: err_mode,
        eps_total: total,
        lambda_min: lhs,
        op_norm: m.op_norm(),
        thm_condition_lhs: lhs,
        thm_condition_rhs: rhs,
        verdict: lhs >= rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Degree6Report {
    pub n: usize,
    pub t_pow: f64,
    pub eps_offdiag: f64,
    pub eps_pow_tilde: f64,
    pub eps_pow_tail_bound: f64,
    pub eps_err: f64,
    pub eps_err_mode: TupleCoverage,
    /// `ε_offdiag + ε̃_pow + N^{−1/2} ε_err(M; 6)`.
    pub eps_tilde_total: f64,
    pub c: f64,
    pub lambda_min: f64,
    pub op_norm: f64,
    /// `10^50 ‖M‖^5 ε̃^{1/3}`.
    pub condition_rhs: f64,
    pub verdict: bool,
}

pub fn check_theorem_deg6(m: &DegreeTwoInput, t_pow: f64, mode: TupleMode) -> Result<Degree6Report> {
    let mat = m.matrix();
    let off = eps_offdiag(&mat);
    let pow = eps_pow_tilde(&mat, t_pow, DEFAULT_POW_CAP);
    let (err, err_mode) = eps_err(m, 6, mode)?;
    let total = off + pow.upper() + err / (m.n() as f64).sqrt();
    let rhs = 1e50 * m.op_norm().powi(5) * total.cbrt();
    Ok(Degree6Report {
        n: m.n(),
        t_pow,
        eps_offdiag: off,
        eps_pow_tilde: pow.value,
        eps_pow_tail_bound: pow.tail_bound,
        eps_err: err,
        eps_err_mode: err_mode,
        eps_tilde_total: total,
        c: crate::extend::degree6_adjustment(m, t_pow, crate::extend::DEGREE6_CONSTANT),
        lambda_min: m.lambda_min(),
        op_norm: m.op_norm(),
        condition_rhs: rhs,
        verdict: m.lambda_min() >= rhs,
    })
}
