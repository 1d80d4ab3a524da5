//! Multi-index moments: closed-form Gaussian and uniform-cube references,
//! truncated-Gaussian 1-D moments by quadrature, empirical moment tables,
//! and table comparison.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, pairwise_sum};
use crate::poly::{enumerate_multi_indices, MultiIndex};

/// Largest single-coordinate exponent for which `(e - 1)!!` is computed
/// exactly in 64-bit integers (`33!!` fits in a `u64`; `35!!` does not).
const MAX_EXACT_EXPONENT: u32 = 33;

/// Moment of the standard Gaussian: `E[prod x_j^{alpha_j}]`, which equals
/// `prod (alpha_j - 1)!!` when every exponent is even and 0 otherwise.
pub fn gaussian_moment(alpha: &MultiIndex) -> Result<f64> {
    let mut product = 1.0_f64;
    for (_, e) in alpha.iter() {
        if e % 2 == 1 {
            return Ok(0.0);
        }
        if e > MAX_EXACT_EXPONENT {
            return Err(Error::Overflow(format!(
                "double factorial for exponent {e} exceeds exact 64-bit range"
            )));
        }
        product *= double_factorial_odd(e - 1) as f64;
    }
    Ok(product)
}

/// Moment of the uniform distribution on `{-1,+1}^n`: 1 if every exponent is
/// even, else 0.
pub fn cube_moment(alpha: &MultiIndex) -> f64 {
    if alpha.iter().all(|(_, e)| e % 2 == 0) {
        1.0
    } else {
        0.0
    }
}

/// `m!!` for odd `m` (and `(-1)!! = 0!! = 1` by convention, represented here
/// by `m = u32::MAX` never occurring: callers pass `e - 1` with even `e >= 2`,
/// or `e = 0` handled by the loop doing nothing).
fn double_factorial_odd(m: u32) -> u64 {
    let mut acc: u64 = 1;
    let mut k = m;
    while k >= 2 {
        acc = acc.checked_mul(k as u64).expect("checked by MAX_EXACT_EXPONENT");
        k -= 2;
    }
    acc
}

/// `E[x^d | |x| <= t]` for standard Gaussian `x`, by adaptive quadrature to
/// relative tolerance 1e-10. Odd `d` is exactly 0 by symmetry; requires
/// `d <= 64` and `t >= 1`.
pub fn truncated_gaussian_moment_1d(d: u32, t: f64) -> Result<f64> {
    if d > 64 {
        return Err(Error::InvalidParameter(format!(
            "truncated moment degree limited to 64, got {d}"
        )));
    }
    if t < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "truncation half-width must be >= 1, got {t}"
        )));
    }
    if d % 2 == 1 {
        return Ok(0.0);
    }
    let weight = |x: f64| (-0.5 * x * x).exp();
    let numerator = 2.0 * adaptive_simpson(&|x: f64| x.powi(d as i32) * weight(x), 0.0, t, 1e-12);
    let mass = 2.0 * adaptive_simpson(&weight, 0.0, t, 1e-12);
    Ok(numerator / mass)
}

/// A table of monomial moments up to a fixed total degree.
///
/// Entries cover every multi-index of total degree in `[1, max_degree]` over
/// `dim` coordinates, stored in a sorted map so iteration (and serialization)
/// order is deterministic. `sample_count = 0` marks an analytic table.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub max_degree: u32,
    pub dim: usize,
    pub entries: BTreeMap<MultiIndex, f64>,
    pub sample_count: usize,
    /// Per-coordinate truncation half-width of the data, when truncated.
    pub truncation: Option<f64>,
}

/// Serialized form: exponent strings `"a1,a2,...,an"` as keys.
#[derive(Serialize, Deserialize)]
struct MomentTableWire {
    max_degree: u32,
    dim: usize,
    entries: BTreeMap<String, f64>,
    sample_count: usize,
    truncation: Option<f64>,
}

impl Serialize for MomentTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = MomentTableWire {
            max_degree: self.max_degree,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(a, &v)| (a.dense_string(self.dim), v))
                .collect(),
            sample_count: self.sample_count,
            truncation: self.truncation,
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MomentTableWire::deserialize(d)?;
        let mut entries = BTreeMap::new();
        for (k, v) in wire.entries {
            let alpha = MultiIndex::parse_dense(&k).map_err(serde::de::Error::custom)?;
            entries.insert(alpha, v);
        }
        Ok(MomentTable {
            max_degree: wire.max_degree,
            dim: wire.dim,
            entries,
            sample_count: wire.sample_count,
            truncation: wire.truncation,
        })
    }
}

impl MomentTable {
    /// Analytic standard-Gaussian table of all moments of degree 1..=`delta`.
    pub fn gaussian(dim: usize, delta: u32) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for alpha in enumerate_multi_indices(dim, 1, delta) {
            let v = gaussian_moment(&alpha)?;
            entries.insert(alpha, v);
        }
        Ok(Self { max_degree: delta, dim, entries, sample_count: 0, truncation: None })
    }

    /// Analytic uniform-cube table of all moments of degree 1..=`delta`.
    pub fn cube(dim: usize, delta: u32) -> Self {
        let mut entries = BTreeMap::new();
        for alpha in enumerate_multi_indices(dim, 1, delta) {
            let v = cube_moment(&alpha);
            entries.insert(alpha, v);
        }
        Self { max_degree: delta, dim, entries, sample_count: 0, truncation: None }
    }
}

/// Empirical moment table of `examples` for all monomials of total degree in
/// `[1, delta]`.
///
/// Sums use fixed pairwise reduction, so results are deterministic for a
/// given input order and agree across permutations to ~1e-12.
pub fn empirical_moments(examples: &[Vec<f64>], delta: u32) -> Result<MomentTable> {
    let first = examples
        .first()
        .ok_or_else(|| Error::EmptyInput("empirical_moments needs at least one example".into()))?;
    let dim = first.len();
    for (i, x) in examples.iter().enumerate() {
        if x.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "example {i} has dimension {} (expected {dim})",
                x.len()
            )));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "example {i} contains a non-finite coordinate"
            )));
        }
    }
    let n = examples.len();
    let mut entries = BTreeMap::new();
    let mut values = vec![0.0; n];
    for alpha in enumerate_multi_indices(dim, 1, delta) {
        for (i, x) in examples.iter().enumerate() {
            values[i] = alpha.eval(x);
        }
        entries.insert(alpha, pairwise_sum(&values) / n as f64);
    }
    Ok(MomentTable {
        max_degree: delta,
        dim,
        entries,
        sample_count: n,
        truncation: None,
    })
}

/// Outcome of a moment-table comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TableVerdict {
    Pass,
    /// The entry with the largest absolute difference above the tolerance.
    Fail { worst: String, gap: f64 },
}

/// Compare every entry common to both tables; pass iff all differences are
/// within `tol`, otherwise report the worst violator. Tables must share
/// `max_degree`.
pub fn compare_tables(
    observed: &MomentTable,
    reference: &MomentTable,
    tol: f64,
) -> Result<TableVerdict> {
    if observed.max_degree != reference.max_degree {
        return Err(Error::InvalidParameter(format!(
            "table degree mismatch: {} vs {}",
            observed.max_degree, reference.max_degree
        )));
    }
    let mut worst: Option<(MultiIndex, f64)> = None;
    for (alpha, &v) in &observed.entries {
        if let Some(&r) = reference.entries.get(alpha) {
            let gap = (v - r).abs();
            if gap > tol && worst.as_ref().map_or(true, |(_, g)| gap > *g) {
                worst = Some((alpha.clone(), gap));
            }
        }
    }
    Ok(match worst {
        None => TableVerdict::Pass,
        Some((alpha, gap)) => TableVerdict::Fail {
            worst: alpha.dense_string(observed.dim),
            gap,
        },
    })
}

/// Directional moment `E[(v·x)^d]` implied by a moment table, via the
/// multinomial expansion over all multi-indices of total degree exactly `d`.
pub fn directional_moment(table: &MomentTable, v: &[f64], d: u32) -> Result<f64> {
    if d == 0 {
        return Ok(1.0);
    }
    if d > table.max_degree {
        return Err(Error::InvalidParameter(format!(
            "directional degree {d} exceeds table degree {}",
            table.max_degree
        )));
    }
    if v.len() != table.dim {
        return Err(Error::InvalidParameter(format!(
            "direction dimension {} != table dimension {}",
            v.len(),
            table.dim
        )));
    }
    let mut terms = Vec::new();
    for alpha in enumerate_multi_indices(table.dim, d, d) {
        let &m = table
            .entries
            .get(&alpha)
            .ok_or_else(|| Error::InvalidParameter("table missing a required entry".into()))?;
        if m == 0.0 {
            continue;
        }
        let mut coeff = multinomial(d, &alpha);
        for (j, e) in alpha.iter() {
            coeff *= v[j].powi(e as i32);
        }
        terms.push(coeff * m);
    }
    Ok(pairwise_sum(&terms))
}

/// Multinomial coefficient `d! / prod alpha_j!` as f64 (exact for the small
/// degrees used here).
fn multinomial(d: u32, alpha: &MultiIndex) -> f64 {
    let mut coeff = 1.0;
    let mut remaining = d;
    for (_, e) in alpha.iter() {
        // Multiply C(remaining, e) into the product.
        for i in 0..e {
            coeff *= (remaining - i) as f64 / (i + 1) as f64;
        }
        remaining -= e;
    }
    coeff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::standard_normal;
    use crate::rng::stream_rng;

    #[test]
    fn gaussian_moment_examples() {
        // E[x^4] = 3!! = 3.
        let a = MultiIndex::from_dense(&[4]);
        assert_eq!(gaussian_moment(&a).unwrap(), 3.0);
        // Odd exponent kills the moment.
        let b = MultiIndex::from_dense(&[1, 1]);
        assert_eq!(gaussian_moment(&b).unwrap(), 0.0);
        // E[x^2 y^2 z^2] = 1.
        let c = MultiIndex::from_dense(&[2, 2, 2]);
        assert_eq!(gaussian_moment(&c).unwrap(), 1.0);
        // E[x^6] = 5!! = 15, E[x^8] = 7!! = 105.
        assert_eq!(gaussian_moment(&MultiIndex::from_dense(&[6])).unwrap(), 15.0);
        assert_eq!(gaussian_moment(&MultiIndex::from_dense(&[8])).unwrap(), 105.0);
    }

    #[test]
    fn gaussian_moment_overflow_guard() {
        let a = MultiIndex::from_dense(&[36]);
        assert!(gaussian_moment(&a).is_err());
    }

    #[test]
    fn cube_moment_even_odd() {
        assert_eq!(cube_moment(&MultiIndex::from_dense(&[2, 4])), 1.0);
        assert_eq!(cube_moment(&MultiIndex::from_dense(&[2, 1])), 0.0);
    }

    #[test]
    fn truncated_moment_examples() {
        // Odd degree vanishes by symmetry.
        assert_eq!(truncated_gaussian_moment_1d(3, 5.0).unwrap(), 0.0);
        // Truncation negligible at t = 10 for degree 2.
        let m2 = truncated_gaussian_moment_1d(2, 10.0).unwrap();
        assert!((m2 - 1.0).abs() < 1e-6);
        // Degree 4 at t = 5: within 1e-2 of 3 (in fact far closer).
        let m4 = truncated_gaussian_moment_1d(4, 5.0).unwrap();
        assert!((m4 - 3.0).abs() < 1e-2);
    }

    #[test]
    fn truncated_matches_untruncated_at_wide_box() {
        // At t = 12, truncation changes no moment of degree <= 8 by more
        // than 1e-6.
        for d in (0..=8u32).step_by(2) {
            let expected = gaussian_moment(&MultiIndex::from_dense(&[d])).unwrap();
            let got = truncated_gaussian_moment_1d(d, 12.0).unwrap();
            assert!((got - expected).abs() < 1e-6, "degree {d}: {got} vs {expected}");
        }
    }

    #[test]
    fn empirical_single_point_of_ones() {
        let t = empirical_moments(&[vec![1.0, 1.0, 1.0]], 3).unwrap();
        for (_, &v) in &t.entries {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn empirical_two_point_example() {
        let t = empirical_moments(&[vec![1.0, 0.0], vec![-1.0, 0.0]], 2).unwrap();
        assert_eq!(t.entries[&MultiIndex::from_dense(&[2, 0])], 1.0);
        assert_eq!(t.entries[&MultiIndex::from_dense(&[1, 0])], 0.0);
        assert_eq!(t.entries[&MultiIndex::from_dense(&[0, 1])], 0.0);
    }

    #[test]
    fn empirical_permutation_invariance() {
        let mut rng = stream_rng(5, "tester");
        let data: Vec<Vec<f64>> =
            (0..501).map(|_| (0..3).map(|_| standard_normal(&mut rng)).collect()).collect();
        let mut shuffled = data.clone();
        shuffled.reverse();
        shuffled.swap(0, 250);
        let a = empirical_moments(&data, 4).unwrap();
        let b = empirical_moments(&shuffled, 4).unwrap();
        for (alpha, &v) in &a.entries {
            assert!((v - b.entries[alpha]).abs() < 1e-12);
        }
    }

    #[test]
    fn compare_identical_and_shifted() {
        let g = MomentTable::gaussian(2, 4).unwrap();
        assert_eq!(compare_tables(&g, &g, 0.0).unwrap(), TableVerdict::Pass);
        let mut shifted = g.clone();
        let key = MultiIndex::from_dense(&[4, 0]);
        *shifted.entries.get_mut(&key).unwrap() += 0.2;
        match compare_tables(&shifted, &g, 0.1).unwrap() {
            TableVerdict::Fail { worst, gap } => {
                assert_eq!(worst, "4,0");
                assert!((gap - 0.2).abs() < 1e-12);
            }
            TableVerdict::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn rademacher_coordinate_fails_at_fourth_moment() {
        // x1 in {-1,+1} exactly: E[x1^4] = 1 vs Gaussian 3, gap 2.
        let data = vec![vec![1.0], vec![-1.0]];
        let obs = empirical_moments(&data, 4).unwrap();
        let reference = MomentTable::gaussian(1, 4).unwrap();
        match compare_tables(&obs, &reference, 0.5).unwrap() {
            TableVerdict::Fail { worst, gap } => {
                assert_eq!(worst, "4");
                assert!((gap - 2.0).abs() < 1e-12);
            }
            TableVerdict::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn compare_rejects_degree_mismatch() {
        let a = MomentTable::gaussian(2, 2).unwrap();
        let b = MomentTable::gaussian(2, 4).unwrap();
        assert!(compare_tables(&a, &b, 0.1).is_err());
    }

    #[test]
    fn directional_moment_gaussian_identity() {
        // For the analytic Gaussian table, E[(v·x)^2] = ||v||^2 = 1 and
        // E[(v·x)^4] = 3 for any unit v.
        let g = MomentTable::gaussian(3, 4).unwrap();
        let v = [0.6, 0.8, 0.0];
        assert!((directional_moment(&g, &v, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((directional_moment(&g, &v, 4).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let g = MomentTable::gaussian(2, 3).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"2,0\""));
        let back: MomentTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
