use num::{BigInt, BigRational, One, Zero};

use super::Partition;
use crate::error::{ForgeError, Result};

pub fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// `(n)!! = n (n−2) (n−4) ⋯`, with `(−1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> i128 {
    let mut acc: i128 = 1;
    let mut k = n;
    while k > 1 {
        acc *= k as i128;
        k -= 2;
    }
    acc
}

/// `(−1)^{c−1} (c−1)!`, the partition-lattice Möbius value of a block that
/// merges `c` finer blocks.
pub fn partition_block_weight(c: usize) -> i128 {
    assert!(c >= 1);
    let f = factorial(c - 1);
    if (c - 1) % 2 == 0 {
        f
    } else {
        -f
    }
}

/// Möbius function of the partition lattice between `pi ≤ rho`.
pub fn mobius_partition(pi: &Partition, rho: &Partition) -> Result<i128> {
    if !pi.refines(rho) {
        return Err(ForgeError::NotRefinement);
    }
    let owner = rho.owner_map();
    let mut counts = vec![0usize; rho.len()];
    for b in pi.blocks() {
        counts[owner[b[0]]] += 1;
    }
    Ok(counts.into_iter().map(partition_block_weight).product())
}

/// Möbius function of the subset lattice between `s ⊆ t`.
pub fn mobius_subset(s: &[usize], t: &[usize]) -> Result<i128> {
    if !s.iter().all(|x| t.contains(x)) {
        return Err(ForgeError::NotSubset);
    }
    let mut ss = s.to_vec();
    ss.sort_unstable();
    ss.dedup();
    let mut tt = t.to_vec();
    tt.sort_unstable();
    tt.dedup();
    Ok(if (tt.len() - ss.len()) % 2 == 0 { 1 } else { -1 })
}

/// Möbius function of the even-partition poset augmented with a bottom
/// element. `pi = None` denotes the bottom; otherwise `pi ≤ rho` are both
/// partitions into even blocks.
pub fn mobius_even_partition(pi: Option<&Partition>, rho: &Partition) -> Result<BigInt> {
    if rho.blocks().iter().any(|b| b.len() % 2 == 1) {
        return Err(ForgeError::InvalidPartition("block of odd size".into()));
    }
    match pi {
        None => {
            let max = rho.blocks().iter().map(Vec::len).max().unwrap_or(0);
            let nu = nu_sequence(max.max(2));
            let mut acc = BigRational::one();
            for b in rho.blocks() {
                acc *= &nu[b.len()];
            }
            let value = -acc;
            debug_assert!(value.is_integer());
            Ok(value.to_integer())
        }
        Some(pi) => {
            if pi.blocks().iter().any(|b| b.len() % 2 == 1) {
                return Err(ForgeError::InvalidPartition("block of odd size".into()));
            }
            Ok(BigInt::from(mobius_partition(pi, rho)?))
        }
    }
}

/// `ν(k) = k! [x^k] log cosh x` for `k = 0, …, k_max`; odd entries vanish.
///
/// Computed exactly with the power-series logarithm recurrence
/// `n ℓ_n = n a_n − Σ_{k<n} k ℓ_k a_{n−k}` for `ℓ = log a`, `a = cosh`.
pub fn nu_sequence(k_max: usize) -> Vec<BigRational> {
    let fact = |n: usize| -> BigInt { (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)) };
    let a: Vec<BigRational> = (0..=k_max)
        .map(|n| {
            if n % 2 == 0 {
                BigRational::new(BigInt::one(), fact(n))
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let mut l = vec![BigRational::zero(); k_max + 1];
    for n in 1..=k_max {
        let mut acc = BigRational::from_integer(BigInt::from(n)) * &a[n];
        for k in 1..n {
            acc -= BigRational::from_integer(BigInt::from(k)) * &l[k] * &a[n - k];
        }
        l[n] = acc / BigRational::from_integer(BigInt::from(n));
    }
    l.into_iter()
        .enumerate()
        .map(|(n, c)| c * BigRational::from_integer(fact(n)))
        .collect()
}

#[cfg(test)]
fn rational_to_i128(r: &BigRational) -> Option<i128> {
    use num::ToPrimitive;
    if r.is_integer() {
        r.to_integer().to_i128()
    } else {
        None
    }
}
