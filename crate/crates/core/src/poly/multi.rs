//! Sparse multi-indices and multivariate monomial polynomials.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A sparse multi-index `alpha`: a map coordinate -> positive exponent.
///
/// Absent coordinates have exponent 0. The total degree is the sum of the
/// stored exponents. Ordering (via the derived `Ord`) is only used to give
/// maps deterministic iteration order; enumeration code that needs graded
/// lexicographic order produces it explicitly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(BTreeMap<usize, u32>);

impl MultiIndex {
    /// The empty multi-index (degree 0, the constant monomial).
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from `(coordinate, exponent)` pairs; zero exponents are dropped.
    pub fn from_pairs(pairs: &[(usize, u32)]) -> Self {
        let mut m = BTreeMap::new();
        for &(j, e) in pairs {
            if e > 0 {
                *m.entry(j).or_insert(0) += e;
            }
        }
        Self(m)
    }

    /// Build from a dense exponent vector.
    pub fn from_dense(exps: &[u32]) -> Self {
        Self::from_pairs(
            &exps
                .iter()
                .enumerate()
                .map(|(j, &e)| (j, e))
                .collect::<Vec<_>>(),
        )
    }

    /// Exponent of coordinate `j`.
    pub fn exponent(&self, j: usize) -> u32 {
        self.0.get(&j).copied().unwrap_or(0)
    }

    /// Total degree `sum_j alpha_j`.
    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    /// Iterate stored `(coordinate, exponent)` pairs in coordinate order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&j, &e)| (j, e))
    }

    /// Product of two monomials: exponents add.
    pub fn mul(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (&j, &e) in &other.0 {
            *m.entry(j).or_insert(0) += e;
        }
        Self(m)
    }

    /// Evaluate the monomial `prod_j x_j^{alpha_j}` at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut p = 1.0;
        for (&j, &e) in &self.0 {
            p *= x[j].powi(e as i32);
        }
        p
    }

    /// Dense exponent string `"a1,a2,...,an"` for serialization.
    pub fn dense_string(&self, dim: usize) -> String {
        (0..dim)
            .map(|j| self.exponent(j).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parse the output of [`dense_string`](Self::dense_string).
    pub fn parse_dense(s: &str) -> Result<Self> {
        let exps: std::result::Result<Vec<u32>, _> =
            s.split(',').map(|t| t.trim().parse::<u32>()).collect();
        match exps {
            Ok(v) => Ok(Self::from_dense(&v)),
            Err(_) => Err(Error::InvalidParameter(format!(
                "bad exponent string: {s:?}"
            ))),
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(&j, &e)| {
                if e == 1 {
                    format!("x{}", j + 1)
                } else {
                    format!("x{}^{}", j + 1, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Enumerate all multi-indices over `n` coordinates with total degree in
/// `[min_degree, max_degree]`, in graded lexicographic order (degree
/// ascending; within a degree, dense exponent vectors in lexicographic
/// order with earlier coordinates most significant).
pub fn enumerate_multi_indices(n: usize, min_degree: u32, max_degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    for g in min_degree..=max_degree {
        compositions(&mut exps, 0, g, &mut out);
    }
    out
}

/// Recursively fill `exps[pos..]` with every composition of `remaining`,
/// emitting exponent vectors in lexicographic order (largest first
/// coordinate first).
fn compositions(exps: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos == exps.len() - 1 {
        exps[pos] = remaining;
        out.push(MultiIndex::from_dense(exps));
        exps[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        exps[pos] = e;
        compositions(exps, pos + 1, remaining - e, out);
        exps[pos] = 0;
    }
}

/// A sparse multivariate polynomial: a map monomial -> coefficient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonomialPoly {
    terms: BTreeMap<MultiIndex, f64>,
}

impl MonomialPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(MultiIndex::empty(), c);
        p
    }

    /// Add `coeff * monomial`; terms that cancel to zero are removed.
    pub fn add_term(&mut self, alpha: MultiIndex, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest total degree among stored terms (0 for the zero polynomial).
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    /// Iterate `(monomial, coefficient)` pairs in deterministic order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    /// Coefficient of a monomial (0 if absent).
    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    /// Evaluate at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(a, c)| c * a.eval(x)).sum()
    }

    /// Multiply by the linear form `sum_j v_j x_j`.
    pub fn mul_linear(&self, v: &[f64]) -> Self {
        let mut out = Self::zero();
        for (alpha, c) in self.iter() {
            for (j, &vj) in v.iter().enumerate() {
                if vj != 0.0 {
                    out.add_term(alpha.mul(&MultiIndex::from_pairs(&[(j, 1)])), c * vj);
                }
            }
        }
        out
    }

    /// `self + scale * other`.
    pub fn add_scaled(&mut self, other: &Self, scale: f64) {
        for (alpha, c) in other.iter() {
            self.add_term(alpha.clone(), scale * c);
        }
    }
}
