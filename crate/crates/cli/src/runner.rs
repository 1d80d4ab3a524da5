//! Experiment orchestration: per-trial seeding, the worker pool, report
//! assembly, and exit codes.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use tlkit_core::cube::{
    derive_cube_params, eval_decision_list, run_cube_halfspace_learner,
    run_decision_list_learner, run_decision_list_tester, run_kwise_tester, CubeOverrides,
    DecisionList,
};
use tlkit_core::dist::{flip_with_probability, halfspace_label, random_unit_vector, Distribution};
use tlkit_core::fooling::{run_fooling_experiment, FoolDomain, FoolingConfig, FoolingReport};
use tlkit_core::gauss::{
    self, derive_params, desk_profile, run_learner, run_tester, GaussCaps, GaussPairParams,
};
use tlkit_core::l1fit::predict;
use tlkit_core::poly::{project, series_eval};
use tlkit_core::rng::{stream_rng, trial_seed};
use tlkit_core::{
    Error, FnLabeledStream, LabeledDataset, LabeledStream, LearnReport, PiecewiseRef, Unlabeled,
    Verdict,
};

use crate::config::{
    ApproxBenchParams, CubeModeParams, DecisionListModeParams, ExperimentConfig,
    GaussModeParams, ModeConfig,
};

/// Exit codes: tester accepted and the learner (if run) met its error
/// target; tester rejected; internal error or missed learner target.
pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_REJECTED: u8 = 2;

/// Full output of one `tlkit run` invocation.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub mode: String,
    pub seed: u64,
    pub trials: usize,
    pub threads: usize,
    /// Fraction of trials the tester accepted (testing modes only).
    pub accept_rate: Option<f64>,
    /// Mean holdout error over trials where the learner ran.
    pub mean_holdout_error: Option<f64>,
    /// The error level the exit code compares against.
    pub error_target: Option<f64>,
    pub verdicts: Vec<Verdict>,
    pub learn_reports: Vec<LearnReport>,
    pub fooling: Option<FoolingReport>,
    pub approx: Option<Vec<ApproxRow>>,
    /// Union of parameter deviations across trials, deduplicated.
    pub deviations: Vec<String>,
    /// Wall-clock stamp; excluded from determinism comparisons.
    pub timestamp_unix_secs: u64,
}

/// One row of the projection-error sweep.
#[derive(Debug, Serialize)]
pub struct ApproxRow {
    pub degree: usize,
    /// Sup error against the target on a grid over the window.
    pub sup_error: f64,
    pub max_coefficient: f64,
}

struct TrialResult {
    verdict: Verdict,
    learn: Option<LearnReport>,
}

/// Worker count: `TLKIT_THREADS` when set (must parse as a positive
/// integer), otherwise available parallelism, never more than `trials`.
pub fn thread_count(trials: usize) -> Result<usize> {
    let base = match std::env::var("TLKIT_THREADS") {
        Ok(s) => {
            let v: usize = s
                .trim()
                .parse()
                .with_context(|| format!("TLKIT_THREADS must be a positive integer, got {s:?}"))?;
            if v == 0 {
                bail!("TLKIT_THREADS must be >= 1");
            }
            v
        }
        Err(_) => std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1),
    };
    Ok(base.min(trials.max(1)))
}

/// Run `job(trial)` for each trial index, on up to `threads` workers.
/// Results come back in trial order regardless of scheduling.
fn run_trials<T, F>(trials: usize, threads: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if threads <= 1 {
        return (0..trials).map(&job).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..trials).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= trials {
                    break;
                }
                let r = job(i);
                slots.lock().expect("worker poisoned the result lock")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker poisoned the result lock")
        .into_iter()
        .map(|slot| slot.expect("every trial slot is filled"))
        .collect()
}

/// A finite stream over an in-memory dataset, consumed front to back.
struct DatasetStream<'a> {
    data: &'a LabeledDataset,
    pos: usize,
}

impl LabeledStream for DatasetStream<'_> {
    fn next_labeled(&mut self) -> tlkit_core::Result<(Vec<f64>, f64)> {
        if self.pos >= self.data.len() {
            return Err(Error::StreamExhausted { drawn: self.pos, requested: self.pos + 1 });
        }
        let i = self.pos;
        self.pos += 1;
        Ok((self.data.examples[i].clone(), self.data.labels[i]))
    }
}

/// Execute a configuration; returns the report and the process exit code.
pub fn execute(config: &ExperimentConfig, force_learn: bool) -> Result<(RunReport, u8)> {
    let threads = thread_count(config.trials)?;
    let (results, fooling, approx) = match &config.mode {
        ModeConfig::GaussPair(p) => {
            (Some(run_gauss_mode(config, p, threads, force_learn)?), None, None)
        }
        ModeConfig::CubePair(p) => {
            (Some(run_cube_mode(config, p, threads, force_learn)?), None, None)
        }
        ModeConfig::DecisionList(p) => {
            (Some(run_dl_mode(config, p, threads, force_learn)?), None, None)
        }
        ModeConfig::Fooling(p) => (None, Some(run_fooling_mode(config, p)?), None),
        ModeConfig::ApproxBench(p) => (None, None, Some(run_approx_mode(p)?)),
    };

    let mut report = RunReport {
        mode: config.mode.name().to_string(),
        seed: config.seed,
        trials: config.trials,
        threads,
        accept_rate: None,
        mean_holdout_error: None,
        error_target: error_target(&config.mode),
        verdicts: Vec::new(),
        learn_reports: Vec::new(),
        fooling,
        approx,
        deviations: Vec::new(),
        timestamp_unix_secs: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };

    let code;
    if let Some(results) = results {
        let accepts = results.iter().filter(|r| r.verdict.accept).count();
        let accept_rate = accepts as f64 / results.len() as f64;
        let holdouts: Vec<f64> = results
            .iter()
            .filter_map(|r| r.learn.as_ref().and_then(|l| l.holdout_error))
            .collect();
        let mean_holdout = if holdouts.is_empty() {
            None
        } else {
            Some(holdouts.iter().sum::<f64>() / holdouts.len() as f64)
        };
        let mut deviations: Vec<String> = results
            .iter()
            .flat_map(|r| {
                r.verdict
                    .deviations
                    .iter()
                    .chain(r.learn.iter().flat_map(|l| l.deviations.iter()))
                    .cloned()
            })
            .collect();
        deviations.sort();
        deviations.dedup();

        let learner_ran = results.iter().any(|r| r.learn.is_some());
        code = if accept_rate < 0.5 {
            EXIT_REJECTED
        } else if learner_ran {
            let measured = mean_holdout
                .or_else(|| {
                    let trains: Vec<f64> = results
                        .iter()
                        .filter_map(|r| r.learn.as_ref().map(|l| l.train_01))
                        .collect();
                    Some(trains.iter().sum::<f64>() / trains.len() as f64)
                })
                .unwrap_or(1.0);
            if measured <= report.error_target.unwrap_or(1.0) {
                EXIT_OK
            } else {
                EXIT_ERROR
            }
        } else {
            EXIT_OK
        };

        report.accept_rate = Some(accept_rate);
        report.mean_holdout_error = mean_holdout;
        report.verdicts = results.iter().map(|r| r.verdict.clone()).collect();
        report.learn_reports = results.into_iter().filter_map(|r| r.learn).collect();
        report.deviations = deviations;
    } else {
        code = EXIT_OK;
    }
    Ok((report, code))
}

fn error_target(mode: &ModeConfig) -> Option<f64> {
    match mode {
        ModeConfig::GaussPair(p) => {
            Some(p.error_target.unwrap_or(p.label_noise + 0.15))
        }
        ModeConfig::CubePair(p) => Some(p.error_target.unwrap_or(p.label_noise + 0.15)),
        ModeConfig::DecisionList(p) => Some(p.error_target.unwrap_or(p.label_noise + 0.1)),
        _ => None,
    }
}

fn parse_distribution(name: &str) -> Result<Distribution> {
    Distribution::parse(name).ok_or_else(|| {
        anyhow!(
            "unknown distribution {name:?}; expected gaussian, cube, rademacher-coord, \
             scaled-gaussian, or parity-planted"
        )
    })
}

/// The planted halfspace direction: configured, or a unit vector drawn once
/// from the run seed so every trial targets the same concept.
fn planted_direction(configured: &Option<Vec<f64>>, n: usize, seed: u64) -> Result<Vec<f64>> {
    match configured {
        Some(v) => {
            if v.len() != n {
                bail!("planted_direction has {} entries, expected n = {n}", v.len());
            }
            Ok(v.clone())
        }
        None => Ok(random_unit_vector(n, &mut stream_rng(seed, "support"))),
    }
}

fn gauss_params(p: &GaussModeParams) -> Result<GaussPairParams> {
    let params = if p.profile == "desk" {
        let mut base = desk_profile(p.eps, p.n)?;
        // Explicit overrides still win over the desk numbers.
        let o = &p.overrides;
        if o.d.is_some() || o.delta.is_some() || o.moment_tol.is_some() || o.n1.is_some()
            || o.n2.is_some() || o.tail_samples.is_some()
        {
            let merged = gauss::GaussOverrides {
                d: o.d.or(Some(base.d)),
                delta: o.delta.or(Some(base.delta)),
                moment_tol: o.moment_tol.or(Some(base.moment_tol)),
                n1: o.n1.or(Some(base.n1)),
                n2: o.n2.or(Some(base.n2)),
                tail_samples: o.tail_samples.or(Some(base.tail_samples)),
            };
            base = derive_params(p.eps, p.n, [1.0; 4], &GaussCaps::default(), &merged)?;
        }
        base
    } else {
        derive_params(p.eps, p.n, [1.0; 4], &GaussCaps::default(), &p.overrides)?
    };
    Ok(params)
}

fn run_gauss_mode(
    config: &ExperimentConfig,
    p: &GaussModeParams,
    threads: usize,
    force_learn: bool,
) -> Result<Vec<TrialResult>> {
    let params = gauss_params(p)?;
    let dataset = match &p.dataset {
        Some(path) => Some(crate::io::ingest_dataset(Path::new(path), p.zero_one_labels)?),
        None => None,
    };
    if let Some(data) = &dataset {
        if data.dim != p.n {
            bail!("dataset dimension {} != configured n = {}", data.dim, p.n);
        }
    }
    let dist = parse_distribution(&p.distribution)?;
    let v = planted_direction(&p.planted_direction, p.n, config.seed)?;

    run_trials(config.trials, threads, |trial| {
        let tseed = trial_seed(config.seed, trial as u64);
        let verdict = match &dataset {
            Some(data) => {
                let mut stream = DatasetStream { data, pos: 0 };
                run_tester(&mut Unlabeled(&mut stream), &params)?
            }
            None => {
                let mut rng = stream_rng(tseed, "tester");
                let mut stream =
                    tlkit_core::FnStream(move || dist.sample(p.n, &mut rng));
                run_tester(&mut stream, &params)?
            }
        };
        let learn = if verdict.accept || force_learn {
            match &dataset {
                Some(data) => {
                    // Finite data: the learner rereads the file's rows; no
                    // fresh holdout exists, so holdout_error stays empty.
                    let mut stream = DatasetStream { data, pos: 0 };
                    let (_, report) = run_learner(&mut stream, &params)?;
                    Some(report)
                }
                None => {
                    let mut lrng = stream_rng(tseed, "learner");
                    let v_l = v.clone();
                    let theta = p.planted_threshold;
                    let noise = p.label_noise;
                    let mut stream = FnLabeledStream(move || {
                        let x = dist.sample(p.n, &mut lrng);
                        let y = flip_with_probability(
                            halfspace_label(&v_l, theta, &x),
                            noise,
                            &mut lrng,
                        );
                        (x, y)
                    });
                    let (predictor, mut report) = run_learner(&mut stream, &params)?;
                    let mut hrng = stream_rng(tseed, "holdout");
                    let mut wrong = 0usize;
                    for _ in 0..p.holdout {
                        let x = dist.sample(p.n, &mut hrng);
                        let y = flip_with_probability(
                            halfspace_label(&v, theta, &x),
                            noise,
                            &mut hrng,
                        );
                        if predictor.predict(&x)? != y {
                            wrong += 1;
                        }
                    }
                    report.holdout_error = Some(wrong as f64 / p.holdout as f64);
                    Some(report)
                }
            }
        } else {
            None
        };
        Ok(TrialResult { verdict, learn })
    })
}

fn run_cube_mode(
    config: &ExperimentConfig,
    p: &CubeModeParams,
    threads: usize,
    force_learn: bool,
) -> Result<Vec<TrialResult>> {
    let overrides = CubeOverrides {
        k: p.k,
        degree: p.degree,
        tv_tol: p.tv_tol,
        tester_samples: p.tester_samples,
        learner_samples: p.learner_samples,
    };
    let params = derive_cube_params(p.eps, p.n, &overrides)?;
    let dist = parse_distribution(&p.distribution)?;
    let v = planted_direction(&p.planted_direction, p.n, config.seed)?;

    run_trials(config.trials, threads, |trial| {
        let tseed = trial_seed(config.seed, trial as u64);
        let mut trng = stream_rng(tseed, "tester");
        let mut tstream = tlkit_core::FnStream(move || dist.sample(p.n, &mut trng));
        let verdict = run_kwise_tester(&mut tstream, &params)?;
        let learn = if verdict.accept || force_learn {
            let mut lrng = stream_rng(tseed, "learner");
            let v_l = v.clone();
            let theta = p.planted_threshold;
            let noise = p.label_noise;
            let mut stream = FnLabeledStream(move || {
                let x = dist.sample(p.n, &mut lrng);
                let y =
                    flip_with_probability(halfspace_label(&v_l, theta, &x), noise, &mut lrng);
                (x, y)
            });
            let (model, mut report) = run_cube_halfspace_learner(&mut stream, &params)?;
            let mut hrng = stream_rng(tseed, "holdout");
            let mut wrong = 0usize;
            for _ in 0..p.holdout {
                let x = dist.sample(p.n, &mut hrng);
                let y = flip_with_probability(
                    halfspace_label(&v, p.planted_threshold, &x),
                    p.label_noise,
                    &mut hrng,
                );
                if predict(&model, &x)? != y {
                    wrong += 1;
                }
            }
            report.holdout_error = Some(wrong as f64 / p.holdout as f64);
            Some(report)
        } else {
            None
        };
        Ok(TrialResult { verdict, learn })
    })
}

fn run_dl_mode(
    config: &ExperimentConfig,
    p: &DecisionListModeParams,
    threads: usize,
    force_learn: bool,
) -> Result<Vec<TrialResult>> {
    let planted = p.planted.clone().unwrap_or(DecisionList {
        order: vec![0, 1],
        bits: vec![1.0, 1.0],
        values: vec![1.0, -1.0],
        default: -1.0,
    });
    planted
        .validate()
        .map_err(|e| anyhow!("validation error in planted list: {e}"))?;
    if planted.order.iter().any(|&j| j >= p.n) {
        bail!("planted list uses a coordinate >= n = {}", p.n);
    }
    let dist = Distribution::Cube;

    run_trials(config.trials, threads, |trial| {
        let tseed = trial_seed(config.seed, trial as u64);
        let mut trng = stream_rng(tseed, "tester");
        let mut tstream = tlkit_core::FnStream(move || dist.sample(p.n, &mut trng));
        let verdict = run_decision_list_tester(&mut tstream, p.eps, p.n, p.tv_tol)?;
        let learn = if verdict.accept || force_learn {
            let mut lrng = stream_rng(tseed, "learner");
            let target = planted.clone();
            let noise = p.label_noise;
            let mut stream = FnLabeledStream(move || {
                let x = dist.sample(p.n, &mut lrng);
                let y =
                    flip_with_probability(eval_decision_list(&target, &x), noise, &mut lrng);
                (x, y)
            });
            let (list, mut report) = run_decision_list_learner(&mut stream, p.eps, p.n)?;
            let mut hrng = stream_rng(tseed, "holdout");
            let mut wrong = 0usize;
            for _ in 0..p.holdout {
                let x = dist.sample(p.n, &mut hrng);
                let y = flip_with_probability(
                    eval_decision_list(&planted, &x),
                    p.label_noise,
                    &mut hrng,
                );
                if eval_decision_list(&list, &x) != y {
                    wrong += 1;
                }
            }
            report.holdout_error = Some(wrong as f64 / p.holdout as f64);
            Some(report)
        } else {
            None
        };
        Ok(TrialResult { verdict, learn })
    })
}

/// Budget split for the fooling tester/learner: the algorithms run with
/// sample counts overridden to fit inside `n_budget` draws, with loose
/// tolerances so the tiny sample sizes remain honest on the assumed
/// distribution.
pub fn run_fooling_mode(
    _config: &ExperimentConfig,
    p: &FoolingConfig,
) -> Result<FoolingReport> {
    match p.domain {
        FoolDomain::GaussianRn => {
            let tail = (p.n_budget * 2 / 5).max(1);
            let n2 = (p.n_budget - tail).max(1);
            let overrides = gauss::GaussOverrides {
                d: Some(2),
                delta: Some(2),
                moment_tol: Some(0.75),
                n1: Some(p.n_budget),
                n2: Some(n2),
                tail_samples: Some(tail),
            };
            let params = derive_params(0.5, p.n, [1.0; 4], &GaussCaps::default(), &overrides)?;
            let tparams = params.clone();
            let lparams = params;
            let report = run_fooling_experiment(
                p,
                move |stream| {
                    run_tester(&mut Unlabeled(stream), &tparams).map(|v| v.accept)
                },
                move |stream| {
                    let (predictor, _) = run_learner(stream, &lparams)?;
                    Ok(move |x: &[f64]| predictor.predict(x))
                },
            )?;
            Ok(report)
        }
        FoolDomain::Cube => {
            let overrides = CubeOverrides {
                k: Some(2),
                degree: Some(1),
                tv_tol: Some(0.75),
                tester_samples: Some(p.n_budget),
                learner_samples: Some(p.n_budget),
            };
            let params = derive_cube_params(0.5, p.n, &overrides)?;
            let tparams = params.clone();
            let lparams = params;
            let report = run_fooling_experiment(
                p,
                move |stream| {
                    run_kwise_tester(&mut Unlabeled(stream), &tparams).map(|v| v.accept)
                },
                move |stream| {
                    let (model, _) = run_cube_halfspace_learner(stream, &lparams)?;
                    Ok(move |x: &[f64]| predict(&model, x))
                },
            )?;
            Ok(report)
        }
    }
}

fn run_approx_mode(p: &ApproxBenchParams) -> Result<Vec<ApproxRow>> {
    let target = match p.target.as_str() {
        "ramp" => PiecewiseRef::Ramp { theta: 0.0, eps: p.eps },
        "trapezoid" => PiecewiseRef::Trapezoid { y: 0.0, eps: p.eps },
        other => bail!("unknown approximation target {other:?}"),
    };
    let mut rows = Vec::new();
    for &d in &p.degrees {
        let series = project(target.clone(), p.w, d, (8 * (d + 1)).max(16_384))?;
        let grid = 4001;
        let mut sup = 0.0f64;
        for i in 0..grid {
            let x = -p.w + 2.0 * p.w * i as f64 / (grid - 1) as f64;
            sup = sup.max((series_eval(&series, x) - target.eval(x)).abs());
        }
        let max_coefficient = series.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        rows.push(ApproxRow { degree: d, sup_error: sup, max_coefficient });
    }
    Ok(rows)
}
