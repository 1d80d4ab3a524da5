//! Desk-scale acceptance suite: one test per contract, each printing a
//! pass line with the measured quantity (visible under `--nocapture`).

use tlkit_core::cube::{
    derive_cube_params, eval_decision_list, run_cube_halfspace_learner, run_decision_list_learner,
    run_kwise_tester, CubeOverrides, DecisionList,
};
use tlkit_core::dist::{flip_with_probability, halfspace_label, Distribution};
use tlkit_core::fooling::{run_fooling_experiment, FoolDomain, FoolingConfig};
use tlkit_core::gauss::{
    derive_params, desk_profile, run_learner, run_tester, GaussCaps, GaussOverrides,
};
use tlkit_core::l1fit::{fit_l1, predict, RegressionProblem};
use tlkit_core::moments::{gaussian_moment, truncated_gaussian_moment_1d};
use tlkit_core::numeric::adaptive_simpson;
use tlkit_core::poly::{expand_to_monomials_1d, project, series_eval};
use tlkit_core::rng::{stream_rng, trial_seed};
use tlkit_core::{
    FnLabeledStream, FnStream, LabeledDataset, MultiIndex, PiecewiseRef, Unlabeled,
};

use rand::Rng;

#[test]
fn criterion_01_moment_identities() {
    // Closed-form 1-D Gaussian moments against adaptive quadrature. The two
    // half-ranges are integrated separately: over the full symmetric range
    // the initial Simpson estimate of an odd integrand is ~0, which turns a
    // relative tolerance into a degenerate absolute one. Mass beyond |x|=12
    // is < 1e-30 for these degrees.
    let mut worst = 0.0f64;
    for k in 0..=10u32 {
        let alpha = MultiIndex::from_dense(&[k]);
        let exact = gaussian_moment(&alpha).unwrap();
        let density = |x: f64| x.powi(k as i32) * (-x * x / 2.0).exp()
            / (2.0 * std::f64::consts::PI).sqrt();
        let quad = adaptive_simpson(&density, -12.0, 0.0, 1e-13)
            + adaptive_simpson(&density, 0.0, 12.0, 1e-13);
        worst = worst.max((exact - quad).abs());
    }
    assert!(worst <= 1e-8, "quadrature gap {worst}");

    // Truncation at t = 12 is numerically invisible for low degrees.
    let mut worst_trunc = 0.0f64;
    for k in 0..=10u32 {
        let alpha = MultiIndex::from_dense(&[k]);
        let full = gaussian_moment(&alpha).unwrap();
        let truncated = truncated_gaussian_moment_1d(k, 12.0).unwrap();
        worst_trunc = worst_trunc.max((full - truncated).abs());
    }
    assert!(worst_trunc <= 1e-6, "truncation gap {worst_trunc}");
    println!(
        "criterion 1 (moment identities): pass — quadrature gap {worst:.2e}, \
         truncation gap {worst_trunc:.2e}"
    );
}

fn ramp_sup_error(d: usize) -> (f64, f64) {
    let target = PiecewiseRef::Ramp { theta: 0.0, eps: 0.2 };
    let w = 2.0;
    let series = project(target, w, d, (8 * (d + 1)).max(16_384)).unwrap();
    let grid = 4001;
    let mut sup = 0.0f64;
    for i in 0..grid {
        let x = -w + 2.0 * w * i as f64 / (grid - 1) as f64;
        sup = sup.max((series_eval(&series, x) - target.eval(x)).abs());
    }
    let max_coeff = series.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    (sup, max_coeff)
}

#[test]
fn criterion_02_chebyshev_contract() {
    let degrees = [10usize, 20, 40, 80];
    let mut errors = Vec::new();
    for &d in &degrees {
        let (sup, max_coeff) = ramp_sup_error(d);
        assert!(max_coeff <= 4.0, "coefficient bound violated at d = {d}: {max_coeff}");
        errors.push(sup);
    }
    for pair in errors.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "sup error not monotone: {errors:?}");
    }
    // O(1/d) decay: error(d) * d stays within 1.5x of its value at d = 20.
    let base = errors[1] * 20.0;
    for (&d, &e) in degrees.iter().zip(&errors) {
        assert!(
            e * d as f64 <= 1.5 * base,
            "decay rate violated at d = {d}: {} vs base {base}",
            e * d as f64
        );
    }

    // Power-basis expansion reproduces the series to near machine precision.
    let series = project(PiecewiseRef::Ramp { theta: 0.0, eps: 0.2 }, 2.0, 20, 16_384).unwrap();
    let mono = expand_to_monomials_1d(&series).unwrap();
    let mut round_trip = 0.0f64;
    for i in 0..=400 {
        let x = -2.0 + 4.0 * i as f64 / 400.0;
        let direct = series_eval(&series, x);
        let horner = mono.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        round_trip = round_trip.max((direct - horner).abs());
    }
    assert!(round_trip <= 1e-9, "round-trip gap {round_trip}");
    println!(
        "criterion 2 (chebyshev contract): pass — errors {errors:?}, round-trip {round_trip:.2e}"
    );
}

/// Brute-force least-absolute-deviation oracle for at most 2 features: an
/// optimum exists with zero residual on (feature count) samples in general
/// position, so enumerate those interpolating solutions plus zero.
fn l1_oracle(design: &[Vec<f64>], y: &[f64]) -> f64 {
    let p = design[0].len();
    let objective = |c: &[f64]| -> f64 {
        design
            .iter()
            .zip(y)
            .map(|(row, &yi)| {
                (yi - row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>()).abs()
            })
            .sum()
    };
    let mut best = objective(&vec![0.0; p]);
    let m = design.len();
    match p {
        1 => {
            for i in 0..m {
                if design[i][0].abs() > 1e-9 {
                    best = best.min(objective(&[y[i] / design[i][0]]));
                }
            }
        }
        2 => {
            for i in 0..m {
                // Minimum-norm solution zeroing residual i alone.
                let norm2: f64 = design[i].iter().map(|a| a * a).sum();
                if norm2 > 1e-9 {
                    let c = [design[i][0] * y[i] / norm2, design[i][1] * y[i] / norm2];
                    best = best.min(objective(&c));
                }
                for j in (i + 1)..m {
                    let (a, b) = (&design[i], &design[j]);
                    let det = a[0] * b[1] - a[1] * b[0];
                    if det.abs() > 1e-9 {
                        let c = [
                            (y[i] * b[1] - y[j] * a[1]) / det,
                            (y[j] * a[0] - y[i] * b[0]) / det,
                        ];
                        best = best.min(objective(&c));
                    }
                }
            }
        }
        _ => unreachable!("oracle supports at most 2 features"),
    }
    best
}

#[test]
fn criterion_03_l1_matches_brute_force() {
    let mut rng = stream_rng(303, "tester");
    let mut worst = 0.0f64;
    for instance in 0..200 {
        let p = 1 + (instance % 2);
        let m = 1 + (instance % 6);
        let design: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..p).map(|_| tlkit_core::dist::standard_normal(&mut rng)).collect())
            .collect();
        let y: Vec<f64> = (0..m)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();

        let features: Vec<MultiIndex> =
            (0..p).map(|j| MultiIndex::from_pairs(&[(j, 1)])).collect();
        let data = LabeledDataset::new(design.clone(), y.clone(), None).unwrap();
        let problem = RegressionProblem::new(features, data, 1).unwrap();
        let model = fit_l1(&problem).unwrap();
        let fitted = model.empirical_l1 * m as f64; // mean -> total deviation
        let oracle = l1_oracle(&design, &y);
        worst = worst.max((fitted - oracle).abs());
    }
    assert!(worst <= 1e-5, "objective gap {worst}");
    println!("criterion 3 (l1 vs brute force): pass — worst objective gap {worst:.2e}");
}

fn gauss_accept_rate(dist: Distribution, seeds: u64) -> f64 {
    let params = desk_profile(0.5, 3).unwrap();
    let mut accepts = 0;
    for seed in 0..seeds {
        let mut rng = stream_rng(trial_seed(400, seed), "tester");
        let mut stream = FnStream(move || dist.sample(3, &mut rng));
        if run_tester(&mut stream, &params).unwrap().accept {
            accepts += 1;
        }
    }
    accepts as f64 / seeds as f64
}

#[test]
fn criterion_04_gaussian_completeness() {
    let rate = gauss_accept_rate(Distribution::Gaussian, 20);
    // Contract floor 0.9 minus binomial 3 sigma at 20 trials.
    assert!(rate >= 0.7, "accept rate {rate}");
    println!("criterion 4 (gaussian completeness): pass — accept rate {rate:.2}");
}

#[test]
fn criterion_05_gaussian_soundness() {
    let r1 = 1.0 - gauss_accept_rate(Distribution::RademacherCoord, 20);
    let r2 = 1.0 - gauss_accept_rate(Distribution::ScaledGaussian, 20);
    assert!(r1 >= 0.95, "rademacher-coord reject rate {r1}");
    assert!(r2 >= 0.95, "scaled-gaussian reject rate {r2}");
    println!("criterion 5 (gaussian soundness): pass — reject rates {r1:.2} / {r2:.2}");
}

#[test]
fn criterion_06_end_to_end_learning() {
    let params = desk_profile(0.5, 3).unwrap();
    let v = [0.6, -0.48, 0.64]; // unit vector
    let noise = 0.1;
    let mut errors = Vec::new();
    for seed in 0..20u64 {
        let tseed = trial_seed(600, seed);
        let mut lrng = stream_rng(tseed, "learner");
        let mut stream = FnLabeledStream(move || {
            let x = Distribution::Gaussian.sample(3, &mut lrng);
            let y = flip_with_probability(halfspace_label(&v, 0.0, &x), noise, &mut lrng);
            (x, y)
        });
        let (predictor, _) = run_learner(&mut stream, &params).unwrap();
        let mut hrng = stream_rng(tseed, "holdout");
        let holdout = 2000;
        let mut wrong = 0;
        for _ in 0..holdout {
            let x = Distribution::Gaussian.sample(3, &mut hrng);
            let y = flip_with_probability(halfspace_label(&v, 0.0, &x), noise, &mut hrng);
            if predictor.predict(&x).unwrap() != y {
                wrong += 1;
            }
        }
        errors.push(wrong as f64 / holdout as f64);
    }
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    // opt = the 10% noise floor; the contract allows opt + 0.15.
    assert!(mean <= 0.25, "mean holdout error {mean}");
    println!("criterion 6 (end-to-end learning): pass — mean holdout error {mean:.3}");
}

#[test]
fn criterion_07_cube_pair() {
    // Degree 3 puts majority-of-3 itself in the basis, so a zero-residual
    // fit exists and every L1 optimum agrees with the target on the sampled
    // points; 1200 draws cover all but ~1% of the 256-point cube.
    let overrides = CubeOverrides {
        k: Some(3),
        degree: Some(3),
        learner_samples: Some(1200),
        ..Default::default()
    };
    let params = derive_cube_params(0.5, 8, &overrides).unwrap();

    let mut accepts = 0;
    let mut rejects = 0;
    for seed in 0..20u64 {
        let mut urng = stream_rng(trial_seed(700, seed), "tester");
        let mut uniform = FnStream(move || Distribution::Cube.sample(8, &mut urng));
        if run_kwise_tester(&mut uniform, &params).unwrap().accept {
            accepts += 1;
        }
        let mut prng = stream_rng(trial_seed(701, seed), "tester");
        let mut planted = FnStream(move || Distribution::ParityPlanted.sample(8, &mut prng));
        if !run_kwise_tester(&mut planted, &params).unwrap().accept {
            rejects += 1;
        }
    }
    let accept_rate = accepts as f64 / 20.0;
    let reject_rate = rejects as f64 / 20.0;
    assert!(accept_rate >= 0.9, "uniform accept rate {accept_rate}");
    assert!(reject_rate >= 0.95, "planted-parity reject rate {reject_rate}");

    // Majority of the first three coordinates, noiseless and at 10% noise.
    let majority = |x: &[f64]| if x[0] + x[1] + x[2] > 0.0 { 1.0 } else { -1.0 };
    let mut holdout_errors = [0.0f64; 2];
    for (slot, &noise) in [0.0, 0.1].iter().enumerate() {
        let mut lrng = stream_rng(702 + slot as u64, "learner");
        let mut stream = FnLabeledStream(move || {
            let x = Distribution::Cube.sample(8, &mut lrng);
            let y = flip_with_probability(majority(&x), noise, &mut lrng);
            (x, y)
        });
        let (model, _) = run_cube_halfspace_learner(&mut stream, &params).unwrap();
        let mut hrng = stream_rng(702 + slot as u64, "holdout");
        let holdout = 2000;
        let mut wrong = 0;
        for _ in 0..holdout {
            let x = Distribution::Cube.sample(8, &mut hrng);
            let y = flip_with_probability(majority(&x), noise, &mut hrng);
            if predict(&model, &x).unwrap() != y {
                wrong += 1;
            }
        }
        holdout_errors[slot] = wrong as f64 / holdout as f64;
    }
    assert!(holdout_errors[0] <= 0.05, "noiseless error {}", holdout_errors[0]);
    assert!(holdout_errors[1] <= 0.25, "noisy error {}", holdout_errors[1]);
    println!(
        "criterion 7 (cube pair): pass — accept {accept_rate:.2}, reject {reject_rate:.2}, \
         majority errors {:.3} / {:.3}",
        holdout_errors[0], holdout_errors[1]
    );
}

#[test]
fn criterion_08_decision_lists() {
    let planted = DecisionList {
        order: vec![2, 7],
        bits: vec![1.0, -1.0],
        values: vec![1.0, -1.0],
        default: 1.0,
    };
    let noise = 0.05;
    let mut errors = Vec::new();
    for seed in 0..20u64 {
        let tseed = trial_seed(800, seed);
        let mut lrng = stream_rng(tseed, "learner");
        let target = planted.clone();
        let mut stream = FnLabeledStream(move || {
            let x = Distribution::Cube.sample(10, &mut lrng);
            let y = flip_with_probability(eval_decision_list(&target, &x), noise, &mut lrng);
            (x, y)
        });
        let (list, _) = run_decision_list_learner(&mut stream, 0.25, 10).unwrap();
        let mut hrng = stream_rng(tseed, "holdout");
        let holdout = 2000;
        let mut wrong = 0;
        for _ in 0..holdout {
            let x = Distribution::Cube.sample(10, &mut hrng);
            let y = flip_with_probability(eval_decision_list(&planted, &x), noise, &mut hrng);
            if eval_decision_list(&list, &x) != y {
                wrong += 1;
            }
        }
        errors.push(wrong as f64 / holdout as f64);
    }
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    // opt = the 5% noise floor; the contract allows opt + 0.1.
    assert!(mean <= 0.15, "mean holdout error {mean}");
    println!("criterion 8 (decision lists): pass — mean holdout error {mean:.3}");
}

fn fooling_config() -> FoolingConfig {
    FoolingConfig {
        m_support: 50_000,
        n_budget: 100,
        delta2: 0.1,
        delta_fool: 0.9,
        alpha: 0.05,
        domain: FoolDomain::GaussianRn,
        n: 20,
        seed: 901,
        trials: 12,
        holdout: 2000,
    }
}

fn run_gaussian_fooling(
    config: &FoolingConfig,
) -> tlkit_core::fooling::FoolingReport {
    // Budget split: two fifths of the draws to the tail stage, the rest to
    // the moment stage; tolerances loosened to stay honest at this scale.
    let tail = (config.n_budget * 2 / 5).max(1);
    let overrides = GaussOverrides {
        d: Some(2),
        delta: Some(2),
        moment_tol: Some(0.75),
        n1: Some(config.n_budget),
        n2: Some(config.n_budget - tail),
        tail_samples: Some(tail),
    };
    let params = derive_params(0.5, config.n, [1.0; 4], &GaussCaps::default(), &overrides)
        .unwrap();
    let tparams = params.clone();
    let lparams = params;
    run_fooling_experiment(
        config,
        move |stream| run_tester(&mut Unlabeled(stream), &tparams).map(|v| v.accept),
        move |stream| {
            let (predictor, _) = run_learner(stream, &lparams)?;
            Ok(move |x: &[f64]| predictor.predict(x))
        },
    )
    .unwrap()
}

#[test]
fn criterion_09_fooling_harness() {
    let config = fooling_config();
    let report = run_gaussian_fooling(&config);
    assert!(!report.bounds_vacuous, "bounds are vacuous: {report:?}");
    let acc_sigma = (0.25 / config.trials as f64).sqrt();
    assert!(
        report.acceptance_empirical >= report.acceptance_bound - 3.0 * acc_sigma,
        "acceptance {} below bound {}",
        report.acceptance_empirical,
        report.acceptance_bound
    );
    let adv_sigma = (0.25 / config.holdout as f64).sqrt();
    assert!(
        report.advantage_empirical <= report.advantage_bound + 3.0 * adv_sigma,
        "advantage {} above bound {}",
        report.advantage_empirical,
        report.advantage_bound
    );
    // Exact no-collision probability against an independent product.
    let mut product = 1.0f64;
    for i in 0..config.n_budget {
        product *= 1.0 - i as f64 / config.m_support as f64;
    }
    assert!((report.collision_exact - product).abs() <= 1e-12);
    println!(
        "criterion 9 (fooling harness): pass — acceptance {:.2} >= {:.2}, \
         advantage {:.3} <= {:.3}",
        report.acceptance_empirical,
        report.acceptance_bound,
        report.advantage_empirical,
        report.advantage_bound
    );
}

#[test]
fn criterion_10_determinism() {
    let run_once = || {
        let params = desk_profile(0.5, 3).unwrap();
        let mut rng = stream_rng(trial_seed(1000, 0), "tester");
        let mut stream = FnStream(move || Distribution::Gaussian.sample(3, &mut rng));
        let verdict = run_tester(&mut stream, &params).unwrap();
        let mut lrng = stream_rng(trial_seed(1000, 0), "learner");
        let v = [0.6, -0.48, 0.64];
        let mut lstream = FnLabeledStream(move || {
            let x = Distribution::Gaussian.sample(3, &mut lrng);
            let y = flip_with_probability(halfspace_label(&v, 0.0, &x), 0.1, &mut lrng);
            (x, y)
        });
        let (_, learn) = run_learner(&mut lstream, &params).unwrap();
        let fooling = run_gaussian_fooling(&fooling_config());
        (
            serde_json::to_vec(&verdict).unwrap(),
            serde_json::to_vec(&learn).unwrap(),
            serde_json::to_vec(&fooling).unwrap(),
        )
    };
    let a = run_once();
    let b = run_once();
    assert_eq!(a.0, b.0, "tester verdict differs between identical runs");
    assert_eq!(a.1, b.1, "learn report differs between identical runs");
    assert_eq!(a.2, b.2, "fooling report differs between identical runs");
    println!("criterion 10 (determinism): pass — byte-identical reports across reruns");
}


