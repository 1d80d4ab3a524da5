//! Tester-learner pairs on the Boolean cube `{-1,+1}^n`: a k-wise
//! independence tester based on parity biases, a halfspace learner over the
//! multilinear monomial basis, and an exhaustive decision-list pair.
//!
//! The tester estimates every nonempty parity `E[prod_{i in S} x_i]` with
//! `|S| <= k` and rejects when any estimated bias exceeds a threshold
//! calibrated so that the uniform distribution passes with probability at
//! least 0.9 while any distribution with a true bias of twice the threshold
//! fails with probability at least 0.9 (Hoeffding + union bound on both
//! sides).

use serde::{Deserialize, Serialize};

use crate::dataset::{ExampleStream, LabeledStream};
use crate::error::{Error, Result};
use crate::l1fit::{best_threshold, fit_l1, FittedModel, RegressionProblem};
use crate::poly::MultiIndex;
use crate::report::{LearnReport, Stage, Verdict};

/// Largest cube dimension for subset enumeration.
pub const MAX_CUBE_DIM: usize = 24;

/// Hard cap on (number of candidate decision lists) x (sample count).
const MAX_DL_WORK: u128 = 5_000_000_000;

/// Parameters for the cube pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubeParams {
    pub eps: f64,
    pub n: usize,
    /// Independence order tested (max parity size).
    pub k: usize,
    /// Learner monomial degree bound.
    pub degree: u32,
    /// Bias gap the tester must detect: distributions with some parity bias
    /// `>= tv_tol` are rejected w.p. >= 0.9; the accept threshold is
    /// `tv_tol / 2`.
    pub tv_tol: f64,
    /// Tester sample count (derived from `tv_tol` and the subset count).
    pub tester_samples: usize,
    /// Learner sample count.
    pub learner_samples: usize,
    pub deviations: Vec<String>,
}

/// Optional overrides of the derived cube parameters; every one is flagged.
#[derive(Debug, Clone, Default)]
pub struct CubeOverrides {
    pub k: Option<usize>,
    pub degree: Option<u32>,
    pub tv_tol: Option<f64>,
    pub tester_samples: Option<usize>,
    pub learner_samples: Option<usize>,
}

/// Derive halfspace-pair parameters:
/// `k = ceil(ln^4(1/eps) / (50 eps^4))`, `degree = ceil(20 ln^2(1/eps) / eps^4)`.
///
/// The formula values are desk-hostile for small eps (degree in the
/// hundreds), so overrides are the normal path in experiments; each one is
/// recorded. `tv_tol` defaults to 0.2. The tester sample count is
/// `ceil(8 ln(20 * #subsets) / tv_tol^2)`; the learner sample count defaults
/// to `40 *` (feature count), fixed empirically.
pub fn derive_cube_params(eps: f64, n: usize, overrides: &CubeOverrides) -> Result<CubeParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    if n == 0 || n > MAX_CUBE_DIM {
        return Err(Error::InvalidParameter(format!(
            "n must be in 1..={MAX_CUBE_DIM}, got {n}"
        )));
    }
    let mut deviations = Vec::new();
    let log_inv = (1.0 / eps).ln();

    let mut k = ((log_inv.powi(4) / (50.0 * eps.powi(4))).ceil() as usize).max(1);
    if let Some(ok) = overrides.k {
        if ok != k {
            deviations.push(format!("k overridden: {k} -> {ok}"));
            k = ok;
        }
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }

    let mut degree = ((20.0 * log_inv.powi(2) / eps.powi(4)).ceil() as u32).max(1);
    if let Some(od) = overrides.degree {
        if od != degree {
            deviations.push(format!("degree overridden: {degree} -> {od}"));
            degree = od;
        }
    }

    let mut tv_tol = 0.2;
    if let Some(ot) = overrides.tv_tol {
        if ot != tv_tol {
            deviations.push(format!("tv_tol overridden: {tv_tol} -> {ot}"));
            tv_tol = ot;
        }
    }
    if !(tv_tol > 0.0 && tv_tol <= 1.0) {
        return Err(Error::InvalidParameter(format!("tv_tol out of range: {tv_tol}")));
    }

    let num_subsets = subsets_up_to(n, k).len();
    let mut tester_samples =
        ((8.0 * (20.0 * num_subsets as f64).ln() / (tv_tol * tv_tol)).ceil() as usize).max(1);
    if let Some(om) = overrides.tester_samples {
        if om != tester_samples {
            deviations.push(format!("tester samples overridden: {tester_samples} -> {om}"));
            tester_samples = om;
        }
    }

    let feature_count: usize = multilinear_count(n, degree.min(n as u32));
    let mut learner_samples = 40 * feature_count.max(1);
    if let Some(om) = overrides.learner_samples {
        if om != learner_samples {
            deviations.push(format!("learner samples overridden: {learner_samples} -> {om}"));
            learner_samples = om;
        }
    }

    Ok(CubeParams {
        eps,
        n,
        k,
        degree,
        tv_tol,
        tester_samples,
        learner_samples,
        deviations,
    })
}

/// Number of multilinear monomials of degree <= d over n variables.
fn multilinear_count(n: usize, d: u32) -> usize {
    let mut total: usize = 0;
    let mut c: f64 = 1.0; // C(n, j)
    for j in 0..=(d as usize).min(n) {
        total = total.saturating_add(c.round() as usize);
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    total
}

/// All nonempty subsets of `{0..n-1}` of size <= k, ordered by size and then
/// colexicographically within each size.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=k.min(n) {
        colex_subsets(n, size, &mut out);
    }
    out
}

/// Append all size-`size` subsets of `{0..n-1}` in colex order: ordered by
/// largest element, recursively.
fn colex_subsets(n: usize, size: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(max_excl: usize, size: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if size == 0 {
            let mut s = acc.clone();
            s.reverse();
            out.push(s);
            return;
        }
        for top in (size - 1)..max_excl {
            acc.push(top);
            rec(top, size - 1, acc, out);
            acc.pop();
        }
    }
    let mut acc = Vec::new();
    rec(n, size, &mut acc, out);
}

/// Empirical parity biases `E[prod_{i in S} x_i]` for every nonempty subset
/// `|S| <= k`, keyed by subset.
pub fn kwise_bias_table(data: &[Vec<f64>], k: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    let first = data
        .first()
        .ok_or_else(|| Error::EmptyInput("bias table needs at least one example".into()))?;
    let n = first.len();
    if n > MAX_CUBE_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} exceeds subset-enumeration cap {MAX_CUBE_DIM}"
        )));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    // Bit-pack: bit j set iff coordinate j is +1.
    let packed: Vec<u32> = data
        .iter()
        .map(|x| {
            let mut bits = 0u32;
            for (j, &c) in x.iter().enumerate() {
                if c > 0.0 {
                    bits |= 1 << j;
                }
            }
            bits
        })
        .collect();
    let m = packed.len() as f64;
    let mut out = Vec::new();
    for s in subsets_up_to(n, k) {
        let mask: u32 = s.iter().fold(0, |acc, &j| acc | (1 << j));
        // Parity of +1 count within S decides the character value.
        let sum: i64 = packed
            .iter()
            .map(|&bits| {
                if (bits & mask).count_ones() % 2 == (s.len() as u32) % 2 {
                    1i64
                } else {
                    -1i64
                }
            })
            .sum();
        out.push((s, sum as f64 / m));
    }
    Ok(out)
}

/// k-wise independence tester: accept iff every estimated bias is below
/// `tv_tol / 2` in magnitude. Label-oblivious.
pub fn run_kwise_tester<S: ExampleStream>(stream: &mut S, params: &CubeParams) -> Result<Verdict> {
    let effective_params = serde_json::to_value(params).expect("params serialize");
    let batch = stream.take_examples(params.tester_samples)?;
    for (i, x) in batch.iter().enumerate() {
        if x.iter().any(|&c| c != 1.0 && c != -1.0) {
            return Err(Error::InvalidParameter(format!(
                "example {i} is not on the cube"
            )));
        }
    }
    let table = kwise_bias_table(&batch, params.k)?;
    let threshold = params.tv_tol / 2.0;
    let mut worst: Option<(&Vec<usize>, f64)> = None;
    for (s, bias) in &table {
        let mag = bias.abs();
        if mag > threshold && worst.map_or(true, |(_, w)| mag > w) {
            worst = Some((s, mag));
        }
    }
    Ok(match worst {
        None => Verdict {
            accept: true,
            stage: Stage::Ok,
            worst_index: None,
            gap: None,
            samples_used: params.tester_samples,
            effective_params,
            deviations: params.deviations.clone(),
        },
        Some((s, mag)) => Verdict {
            accept: false,
            stage: Stage::Moments,
            worst_index: Some(subset_string(s, params.n)),
            gap: Some(mag),
            samples_used: params.tester_samples,
            effective_params,
            deviations: params.deviations.clone(),
        },
    })
}

/// Dense exponent-string form of a parity subset (consistent with moment
/// tables: exponent 1 on each member of S).
fn subset_string(s: &[usize], n: usize) -> String {
    MultiIndex::from_pairs(&s.iter().map(|&j| (j, 1u32)).collect::<Vec<_>>()).dense_string(n)
}

/// Halfspace learner on the cube: L1 fit over all multilinear monomials of
/// degree <= `params.degree`, then threshold rounding.
pub fn run_cube_halfspace_learner<S: LabeledStream>(
    stream: &mut S,
    params: &CubeParams,
) -> Result<(FittedModel, LearnReport)> {
    let deg = params.degree.min(params.n as u32);
    let feature_count = multilinear_count(params.n, deg);
    if feature_count > crate::l1fit::MAX_FEATURES {
        return Err(Error::SizeLimit(format!(
            "{feature_count} multilinear features exceeds the cap"
        )));
    }
    let mut features = vec![MultiIndex::empty()];
    for s in subsets_up_to(params.n, deg as usize) {
        features.push(MultiIndex::from_pairs(
            &s.iter().map(|&j| (j, 1u32)).collect::<Vec<_>>(),
        ));
    }
    let data = stream.take_dataset(params.learner_samples)?;
    let problem = RegressionProblem::new(features, data.clone(), deg)?;
    let model = fit_l1(&problem)?;
    let rounded = best_threshold(&model, &data)?;
    let report = LearnReport {
        samples_drawn: params.learner_samples,
        samples_fitted: data.len(),
        discard_fraction: 0.0,
        num_features: problem.features.len(),
        train_l1: rounded.empirical_l1,
        train_01: rounded.empirical_01.unwrap_or(1.0),
        threshold: rounded.threshold.unwrap_or(f64::NAN),
        holdout_error: None,
        effective_params: serde_json::to_value(params).expect("params serialize"),
        deviations: params.deviations.clone(),
    };
    Ok((rounded, report))
}

/// A decision list over cube coordinates: scan entries in order; the first
/// entry whose coordinate matches its bit outputs its value; otherwise the
/// default applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionList {
    /// Distinct coordinates, queried in order.
    pub order: Vec<usize>,
    /// Bits `b_i` in `{-1,+1}`; entry `i` fires when `x[order[i]] == bits[i]`.
    pub bits: Vec<f64>,
    /// Values output when the corresponding entry fires.
    pub values: Vec<f64>,
    /// Output when no entry fires.
    pub default: f64,
}

impl DecisionList {
    pub fn validate(&self) -> Result<()> {
        if self.order.len() != self.bits.len() || self.order.len() != self.values.len() {
            return Err(Error::InvalidParameter("list fields have unequal lengths".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &j in &self.order {
            if !seen.insert(j) {
                return Err(Error::InvalidParameter(format!("repeated coordinate {j}")));
            }
        }
        Ok(())
    }
}

/// Evaluate a decision list at a cube point.
pub fn eval_decision_list(dl: &DecisionList, x: &[f64]) -> f64 {
    for ((&j, &b), &v) in dl.order.iter().zip(&dl.bits).zip(&dl.values) {
        if x[j] == b {
            return v;
        }
    }
    dl.default
}

/// Decision-list pair parameters: `k = ceil(log2(1/eps))`, sample count
/// `ceil((100 / eps^2) k^3 log2(n))`.
pub fn decision_list_params(eps: f64, n: usize) -> Result<(usize, usize)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    if n < 2 || n > MAX_CUBE_DIM {
        return Err(Error::InvalidParameter(format!(
            "n must be in 2..={MAX_CUBE_DIM}, got {n}"
        )));
    }
    let k = ((1.0 / eps).log2().ceil() as usize).max(1);
    if k > 4 {
        return Err(Error::SizeLimit(format!(
            "decision-list enumeration limited to k <= 4, got k = {k}"
        )));
    }
    let samples =
        ((100.0 / (eps * eps)) * (k as f64).powi(3) * (n as f64).log2()).ceil() as usize;
    Ok((k, samples))
}

/// Exhaustive agnostic decision-list learner.
///
/// Draws the derived sample count, then enumerates every decision list of
/// length 0..=k with distinct coordinates and default output -1:
/// subsets in colex order, orderings of each subset in lexicographic order,
/// then bit patterns, then value patterns (both in binary counter order,
/// low bit = entry 0, 0 -> -1). Returns the first list attaining the minimum
/// empirical error. Ties keep the earlier list in enumeration order.
pub fn run_decision_list_learner<S: LabeledStream>(
    stream: &mut S,
    eps: f64,
    n: usize,
) -> Result<(DecisionList, LearnReport)> {
    let (k, samples) = decision_list_params(eps, n)?;
    let data = stream.take_dataset(samples)?;
    if data.dim != n {
        return Err(Error::InvalidParameter(format!(
            "example dimension {} != n = {n}",
            data.dim
        )));
    }

    // Bit-pack samples: bit j set iff coordinate j is +1.
    let packed: Vec<(u32, bool)> = data
        .examples
        .iter()
        .zip(&data.labels)
        .map(|(x, &y)| {
            let mut bits = 0u32;
            for (j, &c) in x.iter().enumerate() {
                if c > 0.0 {
                    bits |= 1 << j;
                }
            }
            (bits, y > 0.0)
        })
        .collect();

    // Candidate count: sum over lengths of P(n, j) * 4^j.
    let mut candidates: u128 = 0;
    for j in 0..=k {
        let mut perms: u128 = 1;
        for i in 0..j {
            perms *= (n - i) as u128;
        }
        candidates += perms * 4u128.pow(j as u32);
    }
    if candidates * samples as u128 > MAX_DL_WORK {
        return Err(Error::SizeLimit(format!(
            "decision-list enumeration needs {candidates} x {samples} evaluations"
        )));
    }

    let mut best: Option<(usize, DecisionList)> = None;
    let mut consider = |dl: &DecisionList| {
        let errors = packed
            .iter()
            .filter(|&&(bits, label)| eval_packed(dl, bits) != label)
            .count();
        if best.as_ref().map_or(true, |(e, _)| errors < *e) {
            best = Some((errors, dl.clone()));
        }
    };

    // Empty list first (constant default).
    consider(&DecisionList { order: vec![], bits: vec![], values: vec![], default: -1.0 });
    for len in 1..=k {
        let mut sized = Vec::new();
        colex_subsets(n, len, &mut sized);
        for subset in sized {
            for order in lex_permutations(&subset) {
                for bit_pat in 0..(1u32 << len) {
                    let bits: Vec<f64> =
                        (0..len).map(|i| if (bit_pat >> i) & 1 == 1 { 1.0 } else { -1.0 }).collect();
                    for val_pat in 0..(1u32 << len) {
                        let values: Vec<f64> = (0..len)
                            .map(|i| if (val_pat >> i) & 1 == 1 { 1.0 } else { -1.0 })
                            .collect();
                        consider(&DecisionList {
                            order: order.clone(),
                            bits: bits.clone(),
                            values: values.clone(),
                            default: -1.0,
                        });
                    }
                }
            }
        }
    }

    let (errors, dl) = best.expect("at least the empty list was considered");
    let train_01 = errors as f64 / samples as f64;
    let report = LearnReport {
        samples_drawn: samples,
        samples_fitted: samples,
        discard_fraction: 0.0,
        num_features: candidates as usize,
        train_l1: 2.0 * train_01,
        train_01,
        threshold: 0.0,
        holdout_error: None,
        effective_params: serde_json::json!({ "eps": eps, "n": n, "k": k, "samples": samples }),
        deviations: vec![],
    };
    Ok((dl, report))
}

/// Decision-list evaluation on a bit-packed point; returns the label as bool
/// (true = +1).
fn eval_packed(dl: &DecisionList, bits: u32) -> bool {
    for ((&j, &b), &v) in dl.order.iter().zip(&dl.bits).zip(&dl.values) {
        let coord = (bits >> j) & 1 == 1;
        if coord == (b > 0.0) {
            return v > 0.0;
        }
    }
    dl.default > 0.0
}

/// All permutations of `items` (given sorted ascending) in lexicographic
/// order.
fn lex_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Decision-list tester: the k-wise tester at `k = ceil(log2(1/eps))`.
pub fn run_decision_list_tester<S: ExampleStream>(
    stream: &mut S,
    eps: f64,
    n: usize,
    tv_tol: Option<f64>,
) -> Result<Verdict> {
    let (k, _) = decision_list_params(eps, n)?;
    let overrides = CubeOverrides {
        k: Some(k),
        tv_tol,
        ..Default::default()
    };
    let params = derive_cube_params(eps, n, &overrides)?;
    run_kwise_tester(stream, &params)
}
