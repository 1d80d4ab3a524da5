//! Small deterministic numerical helpers shared across modules.

/// Pairwise (tree) summation.
///
/// Deterministic for a fixed input order, and much less sensitive to
/// cancellation than a running sum; used wherever sums feed tolerances.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Adaptive Simpson integration of `f` on `[a, b]` to relative tolerance
/// `rel_tol` (absolute floor `1e-300` to terminate near-zero integrals).
///
/// Suitable for the smooth integrands used here (polynomials times a
/// Gaussian weight); recursion depth is capped at 50.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let scale = whole.abs().max(1e-300);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, abs_tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, abs_tol / 2.0, depth - 1)
    }
}
