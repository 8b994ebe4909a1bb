/// `C(n, k)` as `u128`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `k`-subsets of `0..n`, ascending within each subset, in colex order
/// (the order of [`SubsetIndexer::rank`]).
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    for_each_subset(n, k, |s| out.push(s.to_vec()));
    out
}

/// Visits the `k`-subsets of `0..n` in colex order without allocating.
pub fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut s: Vec<usize> = (0..k).collect();
    loop {
        visit(&s);
        // Smallest j whose entry can move up without colliding with s[j+1].
        let mut j = 0;
        loop {
            if j == k {
                return;
            }
            let limit = if j + 1 < k { s[j + 1] } else { n };
            if s[j] + 1 < limit {
                break;
            }
            j += 1;
        }
        s[j] += 1;
        for (i, v) in s.iter_mut().enumerate().take(j) {
            *v = i;
        }
    }
}

/// Dense indexing of all subsets of `0..n` with size at most `max_size`,
/// ordered by size and then colex. Ranks come from the combinatorial number
/// system, so no hashing is needed.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetIndexer {
    n: usize,
    max_size: usize,
    offsets: Vec<usize>,
    table: Vec<Vec<u128>>,
}

impl SubsetIndexer {
    pub fn new(n: usize, max_size: usize) -> Self {
        let max_size = max_size.min(n);
        let mut offsets = Vec::with_capacity(max_size + 2);
        let mut acc = 0usize;
        for k in 0..=max_size {
            offsets.push(acc);
            acc += binomial(n, k) as usize;
        }
        offsets.push(acc);
        let table = (0..=n).map(|c| (0..=max_size + 1).map(|i| binomial(c, i)).collect()).collect();
        Self { n, max_size, offsets, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// Total number of indexed subsets.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of subsets of exactly size `k` (zero past `max_size`).
    pub fn count(&self, k: usize) -> usize {
        if k > self.max_size {
            return 0;
        }
        self.offsets[k + 1] - self.offsets[k]
    }

    /// First index of the size-`k` block; `len()` past `max_size`.
    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k.min(self.max_size + 1)]
    }

    /// Colex rank of an ascending set among sets of its size.
    pub fn rank(&self, s: &[usize]) -> usize {
        s.iter().enumerate().map(|(i, &v)| self.table[v][i + 1]).sum::<u128>() as usize
    }

    /// Global index (size blocks concatenated).
    pub fn index(&self, s: &[usize]) -> usize {
        self.offsets[s.len()] + self.rank(s)
    }

    /// Inverse of [`Self::index`].
    pub fn unindex(&self, idx: usize) -> Vec<usize> {
        let k = (0..=self.max_size).rfind(|&k| self.offsets[k] <= idx).unwrap();
        let mut r = (idx - self.offsets[k]) as u128;
        let mut out = vec![0; k];
        let mut hi = self.n;
        for i in (1..=k).rev() {
            let mut c = hi;
            while c > 0 && self.table[c - 1][i] > r {
                c -= 1;
            }
            // largest c' < hi with C(c', i) <= r
            let c = c - 1;
            out[i - 1] = c;
            r -= self.table[c][i];
            hi = c;
        }
        out
    }

    /// All indexed sets in index order.
    pub fn all_sets(&self) -> Vec<Vec<usize>> {
        (0..=self.max_size).flat_map(|k| subsets_of_size(self.n, k)).collect()
    }
}
