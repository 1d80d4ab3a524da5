//! Chebyshev polynomials, windowed projections, and power-basis expansion.
//!
//! A [`ChebSeries`] represents `f_d(x) = sum_k a_k T_k(x/w)` on the window
//! `[-w, w]`. Coefficients are obtained by Gauss–Chebyshev quadrature of the
//! projection integral `a_k = (1 + 1[k>0]) / pi * integral of
//! f(w y) T_k(y) / sqrt(1 - y^2) dy`, which the Chebyshev nodes evaluate
//! exactly (the weight function cancels at the nodes).

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Largest series degree supported by exact power-basis expansion; the
/// Chebyshev coefficient triangle grows like `3^k` and loses all precision
/// (and eventually overflows) past this point.
pub const MAX_EXPAND_DEGREE: usize = 64;

/// Chebyshev polynomial `T_k(x) = cos(k arccos x)` on `[-1, 1]`, evaluated by
/// the recurrence `T_{k+1}(x) = 2 x T_k(x) - T_{k-1}(x)` with `T_0 = 1`,
/// `T_1 = x`. Outside `[-1, 1]` the same recurrence is applied (no clamping),
/// matching the polynomial's analytic continuation.
pub fn cheb_eval(k: u32, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// A piecewise-linear target bounded in `[-1, 1]`, used as the function being
/// projected onto a Chebyshev series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PiecewiseRef {
    /// 0 below `y - eps`, rises linearly to 1 at `y`, equals 1 on
    /// `[y, y + eps]`, falls linearly back to 0 at `y + 2 eps`, 0 above.
    Trapezoid { y: f64, eps: f64 },
    /// -1 below `theta - eps`, `(x - theta)/eps` in between, +1 above
    /// `theta + eps`.
    Ramp { theta: f64, eps: f64 },
}

impl PiecewiseRef {
    /// Validate `eps > 0`.
    pub fn validate(&self) -> Result<()> {
        let eps = match self {
            Self::Trapezoid { eps, .. } | Self::Ramp { eps, .. } => *eps,
        };
        if eps > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")))
        }
    }

    /// Evaluate the target at `x` (defined on all of `R`).
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Trapezoid { y, eps } => {
                if x <= y - eps || x >= y + 2.0 * eps {
                    0.0
                } else if x < y {
                    (x - (y - eps)) / eps
                } else if x <= y + eps {
                    1.0
                } else {
                    ((y + 2.0 * eps) - x) / eps
                }
            }
            Self::Ramp { theta, eps } => ((x - theta) / eps).clamp(-1.0, 1.0),
        }
    }
}

/// A truncated Chebyshev expansion on the window `[-w, w]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    /// Window half-width `w >= 1`; the series is evaluated at `x/w`.
    pub window_halfwidth: f64,
    /// Coefficients `a_0..a_d`.
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    /// Series degree `d`.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// Degree-`d` Chebyshev projection of `y -> target(w * y)`, with coefficients
/// computed by Gauss–Chebyshev quadrature at `quadrature_points` nodes.
///
/// Requires `w >= 1` and `quadrature_points >= 8 (d + 1)`. Every returned
/// coefficient satisfies `|a_k| <= 4` (the quadrature average of values in
/// `[-1, 1]` is at most 2 in magnitude).
pub fn project(
    target: PiecewiseRef,
    w: f64,
    d: usize,
    quadrature_points: usize,
) -> Result<ChebSeries> {
    target.validate()?;
    if w < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "window half-width must be >= 1, got {w}"
        )));
    }
    if quadrature_points < 8 * (d + 1) {
        return Err(Error::InvalidParameter(format!(
            "need at least {} quadrature points for degree {d}, got {quadrature_points}",
            8 * (d + 1)
        )));
    }
    let m = quadrature_points;
    // Node angles theta_j = pi (j - 1/2) / m; nodes y_j = cos(theta_j).
    let thetas: Vec<f64> = (0..m)
        .map(|j| std::f64::consts::PI * (j as f64 + 0.5) / m as f64)
        .collect();
    let fvals: Vec<f64> = thetas.iter().map(|&th| target.eval(w * th.cos())).collect();
    let mut coeffs = Vec::with_capacity(d + 1);
    let mut terms = vec![0.0; m];
    for k in 0..=d {
        for j in 0..m {
            terms[j] = fvals[j] * (k as f64 * thetas[j]).cos();
        }
        let scale = if k == 0 { 1.0 } else { 2.0 };
        coeffs.push(scale * pairwise_sum(&terms) / m as f64);
    }
    Ok(ChebSeries { window_halfwidth: w, coeffs })
}

/// Evaluate `sum_k a_k T_k(x / w)` by Clenshaw's recurrence.
pub fn series_eval(s: &ChebSeries, x: f64) -> f64 {
    let t = x / s.window_halfwidth;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in s.coeffs.iter().skip(1).rev() {
        let next = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = next;
    }
    t * b1 - b2 + s.coeffs.first().copied().unwrap_or(0.0)
}

/// Expand a Chebyshev series into power-basis coefficients `c_0..c_d` with
/// `sum_i c_i x^i` identical to the series (including the window rescaling).
///
/// Uses the Chebyshev coefficient triangle built from the defining
/// recurrence. Each `T_k` has power-basis coefficients bounded by `3^k`, so
/// with `|a_k| <= 4` every output satisfies `|c_i| <= 4 (d+1) 3^d`. Degrees
/// above [`MAX_EXPAND_DEGREE`] are rejected rather than silently losing
/// precision.
pub fn expand_to_monomials_1d(s: &ChebSeries) -> Result<Vec<f64>> {
    let d = s.degree();
    if d > MAX_EXPAND_DEGREE {
        return Err(Error::Overflow(format!(
            "power-basis expansion limited to degree {MAX_EXPAND_DEGREE}, got {d}"
        )));
    }
    let w = s.window_halfwidth;
    // rows[k][i] = coefficient of x^i in T_k(x).
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    rows.push(vec![1.0]);
    if d >= 1 {
        rows.push(vec![0.0, 1.0]);
    }
    for k in 2..=d {
        let mut next = vec![0.0; k + 1];
        for (i, &c) in rows[k - 1].iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, &c) in rows[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        rows.push(next);
    }
    // c_i = sum_k a_k * rows[k][i] / w^i.
    let mut out = vec![0.0; d + 1];
    for (k, &ak) in s.coeffs.iter().enumerate() {
        if ak == 0.0 {
            continue;
        }
        for (i, &c) in rows[k].iter().enumerate() {
            out[i] += ak * c;
        }
    }
    let mut wpow = 1.0;
    for (i, c) in out.iter_mut().enumerate() {
        if i > 0 {
            wpow *= w;
        }
        *c /= wpow;
    }
    Ok(out)
}
