//! Polynomial machinery: Chebyshev series on a window, sparse multivariate
//! monomial polynomials, and the sign-approximator construction used by the
//! Gaussian halfspace learner.
//!
//! The construction chain is: project a piecewise-linear target (ramp or
//! trapezoid) onto a degree-`d` Chebyshev series on `[-w, w]`, expand the
//! series into power-basis coefficients, then substitute the linear form
//! `v·x` to obtain a multivariate polynomial approximating `sign(v·x - θ)`.

mod cheb;
mod multi;

pub use cheb::{
    cheb_eval, expand_to_monomials_1d, project, series_eval, ChebSeries, PiecewiseRef,
    MAX_EXPAND_DEGREE,
};
pub use multi::{enumerate_multi_indices, MonomialPoly, MultiIndex};

use crate::error::{Error, Result};

/// Hard cap on the number of terms a directional substitution may produce.
const MAX_COMPOSE_TERMS: usize = 10_000_000;

/// Tolerance on `| ||v||_2 - 1 |` for direction vectors.
const UNIT_NORM_TOL: f64 = 1e-9;

/// Substitute the linear form `v·x` into a univariate power-basis polynomial:
/// returns `sum_i c_i (v·x)^i` expanded into monomials.
///
/// `v` must be a unit vector. Term count is capped at 10^7; exceeding the cap
/// is an error rather than an attempt to allocate unboundedly.
pub fn compose_direction(coeffs_1d: &[f64], v: &[f64]) -> Result<MonomialPoly> {
    let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidParameter(format!(
            "direction must be a unit vector; ||v|| = {norm}"
        )));
    }
    let mut out = MonomialPoly::zero();
    // power = (v·x)^i, built incrementally.
    let mut power = MonomialPoly::constant(1.0);
    for (i, &c) in coeffs_1d.iter().enumerate() {
        if i > 0 {
            power = power.mul_linear(v);
            if power.num_terms() > MAX_COMPOSE_TERMS {
                return Err(Error::SizeLimit(format!(
                    "directional expansion exceeds {MAX_COMPOSE_TERMS} terms at degree {i}"
                )));
            }
        }
        if c != 0.0 {
            out.add_scaled(&power, c);
        }
        if out.num_terms() > MAX_COMPOSE_TERMS {
            return Err(Error::SizeLimit(format!(
                "directional expansion exceeds {MAX_COMPOSE_TERMS} terms"
            )));
        }
    }
    Ok(out)
}

/// Polynomial approximator of `sign(v·x - theta)` for unit `v`.
///
/// Projects the ramp (slope window `eps` around `theta`) onto a Chebyshev
/// series with window half-width `w = 2 beta` and degree
/// `d = ceil(2 beta / eps^2)`, expands to the power basis, and substitutes
/// `v·x`. Requires `eps < 0.5` and `beta >= 1`.
pub fn build_sign_approximator(
    v: &[f64],
    theta: f64,
    eps: f64,
    beta: f64,
) -> Result<MonomialPoly> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "eps must be in (0, 0.5), got {eps}"
        )));
    }
    if beta < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "beta must be >= 1, got {beta}"
        )));
    }
    let w = 2.0 * beta;
    let d = (2.0 * beta / (eps * eps)).ceil() as usize;
    let quadrature_points = (8 * (d + 1)).max(16_384);
    let series = project(PiecewiseRef::Ramp { theta, eps }, w, d, quadrature_points)?;
    let coeffs = expand_to_monomials_1d(&series)?;
    compose_direction(&coeffs, v)
}
