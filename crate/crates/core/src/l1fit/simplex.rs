//! Dense simplex solver specialized to least-absolute-deviations regression.
//!
//! The fit  minimize (1/m) sum_i |P(x_i) - y_i|  over coefficients c is
//! solved as the linear program
//!
//!   minimize  sum_i (u_i + v_i)
//!   s.t.      sum_j A_ij (cp_j - cm_j) + u_i - v_i = y_i,   u, v, cp, cm >= 0
//!
//! with one nonnegative slack pair (u_i, v_i) per sample and the free
//! coefficients split into positive/negative parts. Rows with negative
//! right-hand side are negated so the slack pair provides an identity
//! starting basis; no phase-1 is needed.
//!
//! Pivoting: Dantzig's rule (most negative reduced cost, lowest index on
//! ties) with a Bland's-rule fallback that engages after a long stall, which
//! guarantees termination. Both rules are deterministic, so the solve is
//! reproducible bit-for-bit for a fixed input.

/// Reduced costs this close to zero count as optimal.
const COST_TOL: f64 = 1e-9;
/// Pivot elements smaller than this are treated as zero. Tight enough to
/// accept honest pivots, large enough to refuse multipliers that would
/// amplify accumulated rounding error.
const PIVOT_TOL: f64 = 1e-8;
/// Scale of the anti-degeneracy perturbation added to the targets.
const PERTURB: f64 = 1e-7;
/// Iterations without objective improvement before switching to Bland's rule.
const STALL_LIMIT: usize = 200;

/// Solve the L1 regression LP for an `m x p` design matrix and targets `y`.
///
/// Returns `(coefficients, objective)` where `objective` is the *total*
/// absolute deviation `sum_i |A_i c - y_i|` at the optimum.
///
/// Duplicate `(row, target)` pairs are merged into one weighted row first.
/// The objective is unchanged, but on discrete data (e.g. hypercube points,
/// where a large sample has few distinct rows) this shrinks the tableau by
/// orders of magnitude and removes the worst source of degenerate pivoting.
pub fn solve_l1(design: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    debug_assert!(!design.is_empty() && y.len() == design.len());

    // Merge duplicates (keyed on exact bit patterns), keeping first-seen
    // order so the solve stays deterministic.
    let mut seen: std::collections::HashMap<(Vec<u64>, u64), usize> = std::collections::HashMap::new();
    let mut rows: Vec<&[f64]> = Vec::new();
    let mut targets: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (row, &yi) in design.iter().zip(y) {
        let key = (
            row.iter().map(|c| c.to_bits()).collect::<Vec<u64>>(),
            yi.to_bits(),
        );
        match seen.entry(key) {
            std::collections::hash_map::Entry::Occupied(e) => weights[*e.get()] += 1.0,
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(rows.len());
                rows.push(row);
                targets.push(yi);
                weights.push(1.0);
            }
        }
    }
    let design = &rows;
    let exact_targets = targets.clone();
    // Anti-degeneracy: give every row a distinct tiny target offset, the
    // practical stand-in for a lexicographic ratio test. Ties in the ratio
    // test (the trigger for degenerate pivot runs and the rounding blow-ups
    // they cause on discrete designs) become generically unique. The final
    // objective is recomputed against the unperturbed targets below.
    let m = targets.len();
    for (i, t) in targets.iter_mut().enumerate() {
        *t += PERTURB * (i + 1) as f64 / m as f64;
    }
    let y = &targets;

    let m = design.len();
    let p = design.first().map_or(0, |r| r.len());

    // Column layout: [cp_0..cp_{p-1}, cm_0..cm_{p-1}, u_0..u_{m-1}, v_0..v_{m-1}].
    let ncols = 2 * p + 2 * m;
    // Slack pairs carry the multiplicity of their merged row.
    let cost = |j: usize| {
        if j < 2 * p {
            0.0
        } else {
            weights[(j - 2 * p) % m]
        }
    };

    // Tableau rows: [columns..., rhs]. Row i is negated when y_i < 0 so the
    // rhs is nonnegative; the basic variable is then u_i (coeff +1) for
    // positive rows and v_i for negated rows.
    let width = ncols + 1;
    let mut tab: Vec<f64> = vec![0.0; m * width];
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if y[i] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut tab[i * width..(i + 1) * width];
        for j in 0..p {
            row[j] = sign * design[i][j];
            row[p + j] = -sign * design[i][j];
        }
        row[2 * p + i] = sign; // u_i
        row[2 * p + m + i] = -sign; // v_i
        row[ncols] = sign * y[i];
        basis.push(if sign > 0.0 { 2 * p + i } else { 2 * p + m + i });
    }

    // Reduced costs r_j = c_j - cB' B^{-1} A_j. The starting basis is the
    // identity on the slacks, whose costs are the row weights, so
    // r_j = c_j - (weighted column sum).
    let mut red = vec![0.0; width];
    for j in 0..width {
        let mut s = 0.0;
        for i in 0..m {
            s += weights[i] * tab[i * width + j];
        }
        red[j] = if j < ncols { cost(j) } else { 0.0 } - s;
    }
    // red[ncols] now holds -(objective).

    // Entering tolerance scaled by the largest row weight: merged rows scale
    // the reduced costs, and an absolute 1e-9 would chase rounding noise.
    let cost_tol = COST_TOL * weights.iter().fold(1.0f64, |a, &w| a.max(w));
    // Hard stops against float-drift cycling: at a degenerate optimum the
    // residual reduced costs are rounding noise but can sit just below the
    // tolerance forever. Honest solves finish in a small multiple of m, and
    // honest degenerate plateaus resolve in far fewer pivots than the stall
    // cap allows.
    let max_iters = 1_000 + 20 * (m + ncols);
    let max_stall = 1_000 + 2 * (m + ncols);

    let mut bland = false;
    let mut stall = 0usize;
    let mut last_obj = f64::INFINITY;
    let mut iters = 0usize;
    loop {
        iters += 1;
        if iters > max_iters {
            break;
        }
        // Entering column.
        let mut enter = None;
        if bland {
            for (j, &r) in red[..ncols].iter().enumerate() {
                if r < -cost_tol {
                    enter = Some(j);
                    break;
                }
            }
        } else {
            let mut best = -cost_tol;
            for (j, &r) in red[..ncols].iter().enumerate() {
                if r < best {
                    best = r;
                    enter = Some(j);
                }
            }
        }
        let Some(je) = enter else { break };

        // Ratio test; ties go to the smallest basis index (anti-cycling).
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let a = tab[i * width + je];
            if a > PIVOT_TOL {
                let ratio = tab[i * width + ncols] / a;
                let better = ratio < best_ratio - 1e-12
                    || (ratio < best_ratio + 1e-12
                        && leave.map_or(true, |l| basis[i] < basis[l]));
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        // The LP is bounded (objective >= 0), so a pivot row always exists.
        let il = leave.expect("L1 regression LP cannot be unbounded");

        // Pivot.
        let piv = tab[il * width + je];
        for j in 0..width {
            tab[il * width + j] /= piv;
        }
        for i in 0..m {
            if i != il {
                let f = tab[i * width + je];
                if f != 0.0 {
                    for j in 0..width {
                        tab[i * width + j] -= f * tab[il * width + j];
                    }
                }
            }
        }
        let f = red[je];
        if f != 0.0 {
            for j in 0..width {
                red[j] -= f * tab[il * width + j];
            }
        }
        basis[il] = je;

        // Stall detection: long runs with no objective change are degenerate
        // cycling risks; fall back to Bland's rule, which cannot cycle.
        let obj = -red[ncols];
        if obj < last_obj - 1e-12 {
            last_obj = obj;
            stall = 0;
            // The degenerate plateau is over; go back to the fast rule.
            bland = false;
        } else {
            stall += 1;
            if stall > max_stall {
                break;
            }
            if stall > STALL_LIMIT {
                bland = true;
            }
        }
    }

    // Read off coefficients c_j = cp_j - cm_j.
    let mut coeffs = vec![0.0; p];
    for (i, &b) in basis.iter().enumerate() {
        let value = tab[i * width + ncols];
        if b < p {
            coeffs[b] += value;
        } else if b < 2 * p {
            coeffs[b - p] -= value;
        }
    }
    // Exact objective at the returned coefficients, against the unperturbed
    // targets (the tableau's running value carries the perturbation and any
    // accumulated elimination error).
    let objective: f64 = design
        .iter()
        .zip(&exact_targets)
        .zip(&weights)
        .map(|((row, &yi), &w)| {
            w * (row.iter().zip(&coeffs).map(|(a, c)| a * c).sum::<f64>() - yi).abs()
        })
        .sum();
    (coeffs, objective)
}
