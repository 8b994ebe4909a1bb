use serde::{Deserialize, Serialize};

/// A sorted multiset of variable indices, read as the monomial `∏ x_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonomialIndex {
    entries: Vec<usize>,
}

impl MonomialIndex {
    pub fn new(mut entries: Vec<usize>) -> Self {
        entries.sort_unstable();
        Self { entries }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<usize> {
        self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when no index repeats.
    pub fn is_set(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] != w[1])
    }

    /// Indices occurring an odd number of times; `x_i² = 1` applied until no
    /// square remains.
    pub fn reduced(&self) -> MonomialIndex {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut k = 0;
        while k < self.entries.len() {
            let v = self.entries[k];
            let mut run = 0;
            while k < self.entries.len() && self.entries[k] == v {
                run += 1;
                k += 1;
            }
            if run % 2 == 1 {
                out.push(v);
            }
        }
        MonomialIndex { entries: out }
    }

    /// Distinct indices, ascending.
    pub fn distinct(&self) -> Vec<usize> {
        let mut out = self.entries.clone();
        out.dedup();
        out
    }

    /// Multiset sum (the product of the two monomials).
    pub fn union(&self, other: &MonomialIndex) -> MonomialIndex {
        let mut out = Vec::with_capacity(self.degree() + other.degree());
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MonomialIndex { entries: out }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().copied()
    }
}

impl From<Vec<usize>> for MonomialIndex {
    fn from(v: Vec<usize>) -> Self {
        Self::new(v)
    }
}

impl From<&[usize]> for MonomialIndex {
    fn from(v: &[usize]) -> Self {
        Self::new(v.to_vec())
    }
}

impl FromIterator<usize> for MonomialIndex {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Symmetric difference of two ascending index sets.
pub fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
