use num::{BigInt, BigRational, One};

use super::Partition;

/// A nonnegative integer matrix whose row `A` sums to `|A|` and whose column
/// `B` sums to `|B|`, for `A` a block of `row_partition` and `B` a block of
/// `col_partition`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportPlan {
    pub row_partition: Partition,
    pub col_partition: Partition,
    pub matrix: Vec<Vec<usize>>,
}

impl TransportPlan {
    /// `D! = ∏ D_{A,B}!`.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for row in &self.matrix {
            for &v in row {
                for k in 2..=v {
                    acc *= BigInt::from(k);
                }
            }
        }
        acc
    }

    /// `1 / D!`.
    pub fn inverse_factorial(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.factorial())
    }

    pub fn margins_hold(&self) -> bool {
        let rows = self.row_partition.block_sizes();
        let cols = self.col_partition.block_sizes();
        self.matrix.len() == rows.len()
            && self.matrix.iter().zip(&rows).all(|(r, &s)| r.len() == cols.len() && r.iter().sum::<usize>() == s)
            && (0..cols.len()).all(|j| self.matrix.iter().map(|r| r[j]).sum::<usize>() == cols[j])
    }
}

/// Every plan between `sigma` and `tau`, each exactly once. Empty when the
/// grounds have different sizes.
pub fn enumerate_transport_plans(sigma: &Partition, tau: &Partition) -> Vec<TransportPlan> {
    let rows = sigma.block_sizes();
    let cols = tau.block_sizes();
    if rows.iter().sum::<usize>() != cols.iter().sum::<usize>() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut matrix = vec![vec![0usize; cols.len()]; rows.len()];
    let mut col_left = cols.clone();
    fill(0, 0, rows[0..].first().copied().unwrap_or(0), &rows, &mut col_left, &mut matrix, &mut |m| {
        out.push(TransportPlan {
            row_partition: sigma.clone(),
            col_partition: tau.clone(),
            matrix: m.to_vec(),
        })
    });
    out
}

fn fill(
    i: usize,
    j: usize,
    row_left: usize,
    rows: &[usize],
    col_left: &mut [usize],
    matrix: &mut [Vec<usize>],
    emit: &mut dyn FnMut(&[Vec<usize>]),
) {
    let ncols = col_left.len();
    if i == rows.len() {
        if col_left.iter().all(|&c| c == 0) {
            emit(matrix);
        }
        return;
    }
    if j + 1 >= ncols {
        // Last column takes whatever the row still needs.
        if ncols == 0 {
            if row_left == 0 {
                fill(i + 1, 0, rows.get(i + 1).copied().unwrap_or(0), rows, col_left, matrix, emit);
            }
            return;
        }
        let j = ncols - 1;
        if row_left > col_left[j] {
            return;
        }
        matrix[i][j] = row_left;
        col_left[j] -= row_left;
        fill(i + 1, 0, rows.get(i + 1).copied().unwrap_or(0), rows, col_left, matrix, emit);
        col_left[j] += row_left;
        matrix[i][j] = 0;
        return;
    }
    for v in 0..=row_left.min(col_left[j]) {
        matrix[i][j] = v;
        col_left[j] -= v;
        fill(i, j + 1, row_left - v, rows, col_left, matrix, emit);
        col_left[j] += v;
    }
    matrix[i][j] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_plans() {
        let s = Partition::singletons(3);
        let plans = enumerate_transport_plans(&s, &s);
        assert_eq!(plans.len(), 6);
        assert!(plans.iter().all(TransportPlan::margins_hold));
    }

    #[test]
    fn mismatched_sizes() {
        assert!(enumerate_transport_plans(&Partition::singletons(2), &Partition::singletons(3)).is_empty());
    }

    #[test]
    fn empty_partitions_have_one_plan() {
        let e = Partition::singletons(0);
        assert_eq!(enumerate_transport_plans(&e, &e).len(), 1);
    }
}
