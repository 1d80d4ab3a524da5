//! Degree-bounded L1 polynomial regression and sign-threshold rounding.
//!
//! The learner engine: fit a polynomial over a fixed monomial feature basis
//! by least absolute deviations, then round to a `{-1,+1}` predictor by
//! choosing the threshold with the smallest empirical 0/1 error.

mod simplex;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::poly::{MonomialPoly, MultiIndex};

/// Hard cap on the feature-matrix column count.
pub const MAX_FEATURES: usize = 50_000;

/// An L1 regression instance: a monomial feature basis and labeled samples.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    /// Feature monomials `g_1..g_N`; all degrees must be `<= degree`.
    pub features: Vec<MultiIndex>,
    pub samples: LabeledDataset,
    /// Declared degree bound for the basis.
    pub degree: u32,
}

impl RegressionProblem {
    pub fn new(features: Vec<MultiIndex>, samples: LabeledDataset, degree: u32) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyInput("feature basis is empty".into()));
        }
        if features.len() > MAX_FEATURES {
            return Err(Error::SizeLimit(format!(
                "{} features exceeds the cap of {MAX_FEATURES}",
                features.len()
            )));
        }
        if let Some(bad) = features.iter().find(|f| f.degree() > degree) {
            return Err(Error::InvalidParameter(format!(
                "feature {bad} exceeds declared degree {degree}"
            )));
        }
        Ok(Self { features, samples, degree })
    }
}

/// A fitted polynomial model, optionally rounded to a sign predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub poly: MonomialPoly,
    /// Ambient dimension (for serialization of monomial keys).
    pub dim: usize,
    /// Rounding threshold; `None` until `best_threshold` has run.
    pub threshold: Option<f64>,
    /// Mean absolute deviation of the fit on its training samples.
    pub empirical_l1: f64,
    /// Training 0/1 error of the thresholded predictor; `None` until rounded.
    pub empirical_01: Option<f64>,
}

/// Serialized form: sparse term list keyed by dense exponent strings.
#[derive(Serialize, Deserialize)]
struct FittedModelWire {
    terms: BTreeMap<String, f64>,
    dim: usize,
    threshold: Option<f64>,
    empirical_l1: f64,
    empirical_01: Option<f64>,
}

impl Serialize for FittedModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FittedModelWire {
            terms: self
                .poly
                .iter()
                .map(|(a, c)| (a.dense_string(self.dim), c))
                .collect(),
            dim: self.dim,
            threshold: self.threshold,
            empirical_l1: self.empirical_l1,
            empirical_01: self.empirical_01,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FittedModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = FittedModelWire::deserialize(d)?;
        let mut poly = MonomialPoly::zero();
        for (k, c) in wire.terms {
            let alpha = MultiIndex::parse_dense(&k).map_err(serde::de::Error::custom)?;
            poly.add_term(alpha, c);
        }
        Ok(FittedModel {
            poly,
            dim: wire.dim,
            threshold: wire.threshold,
            empirical_l1: wire.empirical_l1,
            empirical_01: wire.empirical_01,
        })
    }
}

/// Fit coefficients minimizing the mean absolute deviation
/// `(1/m) sum_i |P(x_i) - y_i|` over the problem's feature basis.
///
/// Solved exactly (to primal tolerance 1e-7) by the simplex method on the
/// standard slack-pair reformulation; see the [`simplex`] module. The solve
/// is deterministic for a fixed problem. The returned model has no threshold
/// yet; see [`best_threshold`].
///
/// Degenerate shortcut: when every label is identical and the basis contains
/// a constant feature, the constant polynomial at that label is an exact L1
/// minimizer and is returned directly.
pub fn fit_l1(problem: &RegressionProblem) -> Result<FittedModel> {
    let data = &problem.samples;
    let m = data.len();
    let first = data.labels[0];
    let constant_in_basis = problem.features.iter().any(|f| f.degree() == 0);
    if constant_in_basis && data.labels.iter().all(|&y| y == first) {
        return Ok(FittedModel {
            poly: MonomialPoly::constant(first),
            dim: data.dim,
            threshold: None,
            empirical_l1: 0.0,
            empirical_01: None,
        });
    }

    let design: Vec<Vec<f64>> = data
        .examples
        .iter()
        .map(|x| problem.features.iter().map(|f| f.eval(x)).collect())
        .collect();
    let (coeffs, total_dev) = simplex::solve_l1(&design, &data.labels);

    let mut poly = MonomialPoly::zero();
    for (f, &c) in problem.features.iter().zip(&coeffs) {
        poly.add_term(f.clone(), c);
    }
    Ok(FittedModel {
        poly,
        dim: data.dim,
        threshold: None,
        empirical_l1: total_dev / m as f64,
        empirical_01: None,
    })
}

/// Choose the threshold minimizing the empirical 0/1 error of
/// `sign(P(x) - tau)` over the candidate set: a sentinel below the smallest
/// P-value, the P-values themselves, and the midpoints between consecutive
/// distinct P-values. Ties break toward the smaller threshold.
pub fn best_threshold(model: &FittedModel, samples: &LabeledDataset) -> Result<FittedModel> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("best_threshold needs samples".into()));
    }
    let mut scored: Vec<(f64, f64)> = samples
        .examples
        .iter()
        .zip(&samples.labels)
        .map(|(x, &y)| (model.poly.eval(x), y))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Candidate thresholds in ascending order.
    let min_p = scored[0].0;
    let mut candidates = vec![min_p - 1.0];
    for w in scored.windows(2) {
        if w[1].0 > w[0].0 {
            candidates.push(0.5 * (w[0].0 + w[1].0));
        }
    }
    candidates.extend(scored.iter().map(|&(p, _)| p));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Sweep: err(tau) = #{P_i < tau, y_i = +1} + #{P_i >= tau, y_i = -1}.
    // Walking candidates in ascending order, points cross from the
    // "predicted +1" side to the "predicted -1" side as tau passes them.
    let mut err = scored.iter().filter(|&&(_, y)| y < 0.0).count() as i64;
    let mut best = (err, candidates[0]);
    let mut next_point = 0usize;
    for &tau in &candidates {
        while next_point < scored.len() && scored[next_point].0 < tau {
            if scored[next_point].1 > 0.0 {
                err += 1;
            } else {
                err -= 1;
            }
            next_point += 1;
        }
        if err < best.0 {
            best = (err, tau);
        }
    }

    let mut out = model.clone();
    out.threshold = Some(best.1);
    out.empirical_01 = Some(best.0 as f64 / samples.len() as f64);
    Ok(out)
}

/// `sign(P(x) - tau)` with `sign(0) = +1`. Requires a set threshold.
pub fn predict(model: &FittedModel, x: &[f64]) -> Result<f64> {
    let tau = model
        .threshold
        .ok_or_else(|| Error::InvalidParameter("predict called before best_threshold".into()))?;
    Ok(if model.poly.eval(x) - tau >= 0.0 { 1.0 } else { -1.0 })
}
