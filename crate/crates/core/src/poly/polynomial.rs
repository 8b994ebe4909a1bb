use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{ForgeError, Result};

/// A real polynomial in `n_vars` variables. Monomials are sorted multisets of
/// variable indices, so `x_0² x_3` is `[0, 0, 3]`; powers are never reduced
/// unless asked for.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

/// `∏_k α_k!` for the exponent vector of a sorted monomial.
fn exponent_factorial(mono: &[usize]) -> f64 {
    let mut acc = 1.0;
    let mut run = 0;
    for (k, &v) in mono.iter().enumerate() {
        run = if k > 0 && mono[k - 1] == v { run + 1 } else { 1 };
        acc *= run as f64;
    }
    acc
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Polynomial {
    pub fn zero(n_vars: usize) -> Self {
        Self { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(Vec::new(), c);
        p
    }

    pub fn variable(n_vars: usize, i: usize) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(vec![i], 1.0);
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Adds `c · x^mono`; `mono` need not be sorted.
    pub fn add_term(&mut self, mut mono: Vec<usize>, c: f64) {
        debug_assert!(mono.iter().all(|&v| v < self.n_vars));
        if c == 0.0 {
            return;
        }
        mono.sort_unstable();
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &[usize]) -> f64 {
        let mut key = mono.to_vec();
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Vec::len);
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut p = Self::zero(self.n_vars);
        for (k, v) in self.terms() {
            p.add_term(k.clone(), c * v);
        }
        p
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: f64) {
        for (k, v) in other.terms() {
            self.add_term(k.clone(), c * v);
        }
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        let mut p = self.clone();
        p.add_scaled(other, 1.0);
        p
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        let mut p = Self::zero(self.n_vars.max(other.n_vars));
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                let mut mono = a.clone();
                mono.extend_from_slice(b);
                p.add_term(mono, x * y);
            }
        }
        p
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::constant(self.n_vars, 1.0), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms().map(|(k, v)| v * k.iter().map(|&i| x[i]).product::<f64>()).sum()
    }

    /// Reduction modulo `x_i² − 1`: every exponent taken mod 2.
    pub fn multilinear_reduction(&self) -> Self {
        let mut p = Self::zero(self.n_vars);
        for (k, v) in self.terms() {
            let mut reduced = Vec::with_capacity(k.len());
            let mut i = 0;
            while i < k.len() {
                let mut j = i;
                while j < k.len() && k[j] == k[i] {
                    j += 1;
                }
                if (j - i) % 2 == 1 {
                    reduced.push(k[i]);
                }
                i = j;
            }
            p.add_term(reduced, v);
        }
        p
    }

    /// `p(Aᵀ z)`: substitutes `x_a = Σ_k A_{k,a} z_k`, giving a polynomial in
    /// `A.nrows()` variables.
    pub fn substitute_linear(&self, a: &DMatrix<f64>) -> Result<Self> {
        if a.ncols() != self.n_vars {
            return Err(ForgeError::DimensionMismatch(format!(
                "substitution has {} columns for {} variables",
                a.ncols(),
                self.n_vars
            )));
        }
        let r = a.nrows();
        let linear: Vec<Polynomial> = (0..self.n_vars)
            .map(|i| {
                let mut p = Self::zero(r);
                for k in 0..r {
                    p.add_term(vec![k], a[(k, i)]);
                }
                p
            })
            .collect();
        let mut out = Self::zero(r);
        for (k, v) in self.terms() {
            let term = k.iter().fold(Self::constant(r, v), |acc, &i| acc.mul(&linear[i]));
            out.add_scaled(&term, 1.0);
        }
        Ok(out)
    }

    /// `q(∂) r`: applies this polynomial as a differential operator.
    pub fn differentiate(&self, r: &Polynomial) -> Self {
        let mut out = Self::zero(r.n_vars);
        for (op, c) in self.terms() {
            for (mono, v) in r.terms() {
                // Remove `op` from `mono`, picking up falling factorials.
                let mut rest = mono.clone();
                let mut factor = c * v;
                for &var in op {
                    let power = rest.iter().filter(|&&x| x == var).count();
                    if power == 0 {
                        factor = 0.0;
                        break;
                    }
                    factor *= power as f64;
                    let pos = rest.iter().position(|&x| x == var).unwrap();
                    rest.remove(pos);
                }
                if factor != 0.0 {
                    out.add_term(rest, factor);
                }
            }
        }
        out
    }
}

fn check_pair(p: &Polynomial, q: &Polynomial) -> Result<usize> {
    if p.n_vars != q.n_vars {
        return Err(ForgeError::DimensionMismatch("polynomials have different variable counts".into()));
    }
    if !p.is_homogeneous() || !q.is_homogeneous() {
        return Err(ForgeError::InvalidArgument("apolar products need homogeneous polynomials".into()));
    }
    match (p.degree(), q.degree()) {
        (Some(a), Some(b)) if a != b => {
            Err(ForgeError::DimensionMismatch(format!("degrees {a} and {b} differ")))
        }
        (a, b) => Ok(a.or(b).unwrap_or(0)),
    }
}

/// `⟨p, q⟩_∘ = Σ_S binom(d, freq(S))^{-1} [y^S]p · [y^S]q`.
pub fn apolar(p: &Polynomial, q: &Polynomial) -> Result<f64> {
    let d = check_pair(p, q)?;
    Ok(apolar_partial(p, q)? / factorial_f64(d))
}

/// `⟨p, q⟩_∂ = p(∂) q`, by the contraction `Σ_α α! p_α q_α`.
pub fn apolar_partial(p: &Polynomial, q: &Polynomial) -> Result<f64> {
    check_pair(p, q)?;
    let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
    let terms: Vec<f64> = small
        .terms()
        .filter_map(|(k, v)| large.terms.get(k).map(|w| exponent_factorial(k) * v * w))
        .collect();
    Ok(crate::linalg::pairwise_sum(&terms))
}
