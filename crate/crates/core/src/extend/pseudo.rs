use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::{MonomialIndex, SubsetIndexer};
use crate::error::{ForgeError, Result};

/// Where a pseudoexpectation's values came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Extension,
    LaurentClosedForm,
    Degree6Lowrank,
    Identity,
    Custom,
}

/// Values `Ẽ[x^S]` on every subset `S ⊆ [N]` with `|S| ≤ degree`, stored in
/// [`SubsetIndexer`] order. Odd-size subsets hold zero. Multisets are
/// evaluated by first cancelling index pairs, so `Ẽ[x_i² p] = Ẽ[p]` holds
/// exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Pseudoexpectation {
    n: usize,
    degree: usize,
    indexer: SubsetIndexer,
    values: Vec<f64>,
    provenance: Provenance,
}

/// Serialized form: `{"n", "degree", "provenance", "values": [[[i, j, ...], v], ...]}`
/// listing every even-size subset in size-then-colex order.
#[derive(Serialize, Deserialize)]
struct Record {
    n: usize,
    degree: usize,
    provenance: Provenance,
    values: Vec<(Vec<usize>, f64)>,
}

impl Pseudoexpectation {
    /// Builds values from `f` on all even subsets (in parallel); odd
    /// subsets are zero.
    pub fn from_fn<F>(n: usize, degree: usize, provenance: Provenance, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Result<f64> + Sync,
    {
        let indexer = SubsetIndexer::new(n, degree);
        let values = (0..indexer.len())
            .into_par_iter()
            .map(|k| {
                let s = indexer.unindex(k);
                if s.len() % 2 == 1 {
                    Ok(0.0)
                } else {
                    f(&s)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { n, degree, indexer, values, provenance })
    }

    /// Values supplied in [`SubsetIndexer`] order; odd entries are zeroed.
    pub fn from_values(n: usize, degree: usize, provenance: Provenance, mut values: Vec<f64>) -> Result<Self> {
        let indexer = SubsetIndexer::new(n, degree);
        if values.len() != indexer.len() {
            return Err(ForgeError::DimensionMismatch(format!(
                "{} values for {} subsets",
                values.len(),
                indexer.len()
            )));
        }
        for k in 1..=degree {
            if k % 2 == 1 {
                let off = indexer.offset(k);
                values[off..off + indexer.count(k)].iter_mut().for_each(|v| *v = 0.0);
            }
        }
        Ok(Self { n, degree, indexer, values, provenance })
    }

    /// The uniform measure on `{±1}^N`: `Ẽ[x^S] = 1{S = ∅}`.
    pub fn identity(n: usize, degree: usize) -> Self {
        let indexer = SubsetIndexer::new(n, degree);
        let mut values = vec![0.0; indexer.len()];
        values[0] = 1.0;
        Self { n, degree, indexer, values, provenance: Provenance::Identity }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn indexer(&self) -> &SubsetIndexer {
        &self.indexer
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value on an ascending set of size at most the degree.
    pub fn value_of_set(&self, s: &[usize]) -> f64 {
        self.values[self.indexer.index(s)]
    }

    /// `Ẽ[x^S]` for a multiset, after cancelling repeated pairs.
    pub fn evaluate(&self, monomial: &MonomialIndex) -> Result<f64> {
        let reduced = monomial.reduced();
        if reduced.degree() > self.degree {
            return Err(ForgeError::DegreeOverflow { degree: reduced.degree(), max: self.degree });
        }
        if let Some(&i) = reduced.entries().last() {
            if i >= self.n {
                return Err(ForgeError::InvalidArgument(format!("index {i} is out of range for N = {}", self.n)));
            }
        }
        Ok(self.value_of_set(reduced.entries()))
    }

    /// `Ẽ[x xᵀ]`.
    pub fn second_moments(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                self.values[0]
            } else if self.degree >= 2 {
                self.value_of_set(&[i.min(j), i.max(j)])
            } else {
                0.0
            }
        })
    }

    /// `Σ_k w_k Ẽ_k` over pseudoexpectations of equal `N` and degree.
    pub fn combine(terms: &[(f64, &Pseudoexpectation)], provenance: Provenance) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| ForgeError::InvalidArgument("empty combination".into()))?;
        if terms.iter().any(|(_, e)| e.n != first.n || e.degree != first.degree) {
            return Err(ForgeError::DimensionMismatch("combined pseudoexpectations differ in N or degree".into()));
        }
        let values = (0..first.values.len()).map(|k| terms.iter().map(|(w, e)| w * e.values[k]).sum()).collect();
        Ok(Self { n: first.n, degree: first.degree, indexer: first.indexer.clone(), values, provenance })
    }

    pub fn to_json(&self) -> Result<String> {
        let values = (0..self.values.len())
            .filter_map(|k| {
                let s = self.indexer.unindex(k);
                (s.len() % 2 == 0).then(|| (s, self.values[k]))
            })
            .collect();
        let rec = Record { n: self.n, degree: self.degree, provenance: self.provenance, values };
        Ok(serde_json::to_string_pretty(&rec)?)
    }

    /// Parses [`Self::to_json`] output; unlisted subsets are zero.
    pub fn from_json(text: &str) -> Result<Self> {
        let rec: Record = serde_json::from_str(text)?;
        let indexer = SubsetIndexer::new(rec.n, rec.degree);
        let mut values = vec![0.0; indexer.len()];
        for (mut s, v) in rec.values {
            s.sort_unstable();
            if s.len() > rec.degree || s.iter().any(|&i| i >= rec.n) || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(ForgeError::InvalidArgument(format!("invalid subset {s:?}")));
            }
            values[indexer.index(&s)] = v;
        }
        Self::from_values(rec.n, rec.degree, rec.provenance, values)
    }
}
