use super::MonomialIndex;
use crate::error::{ForgeError, Result};

/// Which block sizes an enumeration may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionConstraint {
    All,
    Even,
    Odd,
    MinSize(usize),
}

impl PartitionConstraint {
    fn admits(self, size: usize) -> bool {
        match self {
            PartitionConstraint::All => size >= 1,
            PartitionConstraint::Even => size >= 2 && size % 2 == 0,
            PartitionConstraint::Odd => size % 2 == 1,
            PartitionConstraint::MinSize(k) => size >= k.max(1),
        }
    }
}

/// A partition of the positions of a ground multiset.
///
/// Blocks hold positions into `ground.entries()`, each block ascending and
/// blocks ordered by their smallest position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    ground: MonomialIndex,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(ground: MonomialIndex, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = ground.degree();
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(ForgeError::InvalidPartition("empty block".into()));
            }
            for &p in b {
                if p >= n || seen[p] {
                    return Err(ForgeError::InvalidPartition(format!(
                        "position {p} out of range or repeated"
                    )));
                }
                seen[p] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(ForgeError::InvalidPartition("blocks do not cover the ground".into()));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { ground, blocks })
    }

    /// Partition of `0..n` (ground `{0, …, n−1}`) from position blocks.
    pub fn of_range(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(MonomialIndex::new((0..n).collect()), blocks)
    }

    pub fn singletons(n: usize) -> Self {
        Self::of_range(n, (0..n).map(|i| vec![i]).collect()).expect("valid")
    }

    pub fn one_block(n: usize) -> Self {
        if n == 0 {
            return Self::of_range(0, vec![]).expect("valid");
        }
        Self::of_range(n, vec![(0..n).collect()]).expect("valid")
    }

    pub fn ground(&self) -> &MonomialIndex {
        &self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Ground values carried by block `k`.
    pub fn block_values(&self, k: usize) -> Vec<usize> {
        self.blocks[k].iter().map(|&p| self.ground.entries()[p]).collect()
    }

    /// Blocks whose size passes `keep` (the filtered views `π[even]`, `π[≥k]`, …).
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> Vec<&[usize]> {
        self.blocks.iter().filter(|b| keep(b.len())).map(|b| b.as_slice()).collect()
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.ground.degree() != coarser.ground.degree() {
            return false;
        }
        let owner = coarser.owner_map();
        self.blocks.iter().all(|b| b.iter().all(|&p| owner[p] == owner[b[0]]))
    }

    /// For each position, the index of the block containing it.
    pub fn owner_map(&self) -> Vec<usize> {
        let mut owner = vec![usize::MAX; self.ground.degree()];
        for (k, b) in self.blocks.iter().enumerate() {
            for &p in b {
                owner[p] = k;
            }
        }
        owner
    }
}

/// All partitions of the positions `0..n` whose blocks satisfy `constraint`.
pub fn enumerate_position_partitions(n: usize, constraint: PartitionConstraint) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let remaining: Vec<usize> = (0..n).collect();
    let mut current = Vec::new();
    recurse(&remaining, constraint, &mut current, &mut out);
    out
}

fn recurse(
    remaining: &[usize],
    constraint: PartitionConstraint,
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if remaining.is_empty() {
        out.push(current.clone());
        return;
    }
    let first = remaining[0];
    let rest = &remaining[1..];
    // Companions of `first` in lexicographic order of the sorted block.
    let mut chosen: Vec<usize> = Vec::new();
    companions(rest, 0, &mut chosen, &mut |comp| {
        let size = comp.len() + 1;
        if !constraint.admits(size) {
            return;
        }
        let mut block = Vec::with_capacity(size);
        block.push(first);
        block.extend(comp.iter().map(|&k| rest[k]));
        let left: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|(k, _)| !comp.contains(k))
            .map(|(_, &p)| p)
            .collect();
        current.push(block);
        recurse(&left, constraint, current, out);
        current.pop();
    });
}

/// Visits every subset of `0..pool.len()` (as ascending index lists) in
/// lexicographic order, the empty subset first.
fn companions(pool: &[usize], start: usize, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    visit(chosen);
    for k in start..pool.len() {
        chosen.push(k);
        companions(pool, k + 1, chosen, visit);
        chosen.pop();
    }
}

/// All partitions of `ground` (as a multiset of positions) under `constraint`.
/// The empty ground yields exactly the empty partition.
pub fn enumerate_partitions(ground: &MonomialIndex, constraint: PartitionConstraint) -> Vec<Partition> {
    enumerate_position_partitions(ground.degree(), constraint)
        .into_iter()
        .map(|blocks| Partition { ground: ground.clone(), blocks })
        .collect()
}
