//! Fooling harness: hard distributions that look like the assumed
//! distribution to any low-budget tester.
//!
//! The construction: draw a support multiset `S` of `M` i.i.d. points from
//! the assumed distribution `D` (Gaussian on `R^n` or uniform cube), then
//! label points deterministically outside a thin norm band (Gaussian) or
//! Hamming-weight band (cube) and by independent fair coin flips inside it.
//! A tester or learner that sees only `N << sqrt(M)` uniform draws from `S`
//! almost never sees a repeated point, so the stream is indistinguishable
//! from fresh draws from `D` — the harness measures exactly that, against
//! the two closed-form bounds:
//!
//! - acceptance: `1 - delta2 - N^2/M - N / sqrt(delta_fool * M)`
//! - learner advantage: `(3/2) (phi + N/M) + 5 sqrt(ln M / M)`,
//!
//! where `phi` is the out-of-band mass of `S` (the only labels carrying
//! signal).

use serde::{Deserialize, Serialize};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{BudgetedStream, LabeledStream};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Domain of the fooling construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoolDomain {
    GaussianRn,
    Cube,
}

/// Configuration of one fooling experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoolingConfig {
    /// Support size `M`.
    pub m_support: usize,
    /// Sample budget `N` given to the tester and to the learner.
    pub n_budget: usize,
    /// Base tester failure probability entering the acceptance bound.
    pub delta2: f64,
    /// Confidence parameter of the acceptance bound.
    pub delta_fool: f64,
    /// Band mass parameter; the band holds all but ~alpha of `D`.
    pub alpha: f64,
    pub domain: FoolDomain,
    /// Ambient dimension.
    pub n: usize,
    pub seed: u64,
    /// Tester acceptance trials.
    pub trials: usize,
    /// Fresh uniform-from-support points for the advantage measurement.
    pub holdout: usize,
}

impl FoolingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_budget > self.m_support {
            return Err(Error::InvalidParameter(format!(
                "budget N = {} exceeds support M = {}",
                self.n_budget, self.m_support
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.125) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0, 1/8), got {}",
                self.alpha
            )));
        }
        if self.m_support == 0 || self.trials == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("M, trials, n must be positive".into()));
        }
        if !(self.delta_fool > 0.0 && self.delta_fool < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_fool must be in (0,1), got {}",
                self.delta_fool
            )));
        }
        Ok(())
    }
}

/// Band-randomized labeler.
///
/// Gaussian domain: points with `|x| > b` get +1, points with `|x| < a` get
/// -1, and the band in between gets i.i.d. fair labels keyed by a hash of
/// the point and `label_seed`. Cube domain: +1 above the Hamming-weight band
/// `[n/2 - h, n/2 + h]`, -1 below it, hashed coins inside.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandLabeler {
    pub domain: FoolDomain,
    /// Gaussian inner radius (0 when the band formula bottoms out).
    pub a: f64,
    /// Gaussian outer radius.
    pub b: f64,
    /// Cube Hamming half-width.
    pub h: f64,
    pub n: usize,
    pub label_seed: u64,
}

impl BandLabeler {
    /// Construct the band for dimension `n` and mass parameter `alpha`.
    pub fn new(domain: FoolDomain, n: usize, alpha: f64, label_seed: u64) -> Self {
        let nf = n as f64;
        let spread = (nf * (2.0 / alpha).ln()).sqrt();
        let a = (nf - 2.0 * spread).max(0.0).sqrt();
        let b = (nf + 2.0 * spread + 2.0 * (2.0 / alpha).ln()).sqrt();
        let h = (nf / 2.0 * (2.0 / alpha).ln()).sqrt();
        Self { domain, a, b, h, n, label_seed }
    }

    /// Is the point inside the randomized band?
    pub fn in_band(&self, x: &[f64]) -> bool {
        match self.domain {
            FoolDomain::GaussianRn => {
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                r >= self.a && r <= self.b
            }
            FoolDomain::Cube => {
                let w = x.iter().filter(|&&c| c > 0.0).count() as f64;
                (w - self.n as f64 / 2.0).abs() <= self.h
            }
        }
    }

    /// Label a point: deterministic outside the band, a hashed fair coin
    /// inside it. Same point + seed always gives the same label.
    pub fn label(&self, x: &[f64]) -> f64 {
        match self.domain {
            FoolDomain::GaussianRn => {
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                if r > self.b {
                    1.0
                } else if r < self.a {
                    -1.0
                } else {
                    self.coin(x)
                }
            }
            FoolDomain::Cube => {
                let w = x.iter().filter(|&&c| c > 0.0).count() as f64;
                let mid = self.n as f64 / 2.0;
                if w > mid + self.h {
                    1.0
                } else if w < mid - self.h {
                    -1.0
                } else {
                    self.coin(x)
                }
            }
        }
    }

    fn coin(&self, x: &[f64]) -> f64 {
        // FNV-1a over the coordinate bit patterns, keyed by the label seed.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ self.label_seed;
        for &c in x {
            for byte in c.to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        // Final avalanche so low-entropy points do not bias the coin.
        h ^= h >> 33;
        h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
        h ^= h >> 33;
        if h & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Draw the support multiset `S` of `M` i.i.d. points from the domain
/// distribution, plus the band labeler keyed to the config seed.
pub fn build_support(config: &FoolingConfig) -> Result<(Vec<Vec<f64>>, BandLabeler)> {
    config.validate()?;
    let dist = match config.domain {
        FoolDomain::GaussianRn => Distribution::Gaussian,
        FoolDomain::Cube => Distribution::Cube,
    };
    let mut rng = stream_rng(config.seed, "support");
    let points: Vec<Vec<f64>> =
        (0..config.m_support).map(|_| dist.sample(config.n, &mut rng)).collect();
    let labeler = BandLabeler::new(
        config.domain,
        config.n,
        config.alpha,
        stream_rng(config.seed, "labels").gen(),
    );
    Ok((points, labeler))
}

/// A labeled stream of uniform draws (with replacement) from a support set.
pub struct SupportStream<'a> {
    points: &'a [Vec<f64>],
    labeler: &'a BandLabeler,
    rng: ChaCha8Rng,
}

impl<'a> SupportStream<'a> {
    pub fn new(points: &'a [Vec<f64>], labeler: &'a BandLabeler, rng: ChaCha8Rng) -> Self {
        Self { points, labeler, rng }
    }
}

impl LabeledStream for SupportStream<'_> {
    fn next_labeled(&mut self) -> Result<(Vec<f64>, f64)> {
        let i = self.rng.gen_range(0..self.points.len());
        let x = self.points[i].clone();
        let y = self.labeler.label(&x);
        Ok((x, y))
    }
}

/// Result of one fooling experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoolingReport {
    /// Fraction of trials in which the tester accepted the fooled stream.
    pub acceptance_empirical: f64,
    /// Closed-form acceptance lower bound
    /// `1 - delta2 - N^2/M - N/sqrt(delta_fool M)`.
    pub acceptance_bound: f64,
    /// Measured learner advantage `|Pr[fhat != g] - 1/2|` on fresh
    /// uniform-from-support points.
    pub advantage_empirical: f64,
    /// Closed-form advantage upper bound
    /// `(3/2)(phi + N/M) + 5 sqrt(ln M / M)`.
    pub advantage_bound: f64,
    /// Exact no-collision probability among N uniform draws from M.
    pub collision_exact: f64,
    /// The cruder `1 - N^2/M` lower bound on the same.
    pub collision_lower_bound: f64,
    /// Measured out-of-band mass `phi` of the support.
    pub out_of_band_mass: f64,
    /// True when either bound carries no information (<= 0 acceptance or
    /// >= 1 advantage slack), e.g. in the degenerate M = N case.
    pub bounds_vacuous: bool,
    pub config_echo: serde_json::Value,
}

/// Run the experiment: acceptance rate of `tester` over `config.trials`
/// budgeted streams from the fooled distribution, advantage of the predictor
/// produced by `learner` from one budgeted stream, both against the
/// closed-form bounds.
///
/// The tester and learner receive a [`BudgetedStream`] holding exactly
/// `config.n_budget` draws; drawing more is an error that propagates out.
pub fn run_fooling_experiment<T, L, P>(
    config: &FoolingConfig,
    mut tester: T,
    mut learner: L,
) -> Result<FoolingReport>
where
    T: FnMut(&mut BudgetedStream<SupportStream<'_>>) -> Result<bool>,
    L: FnMut(&mut BudgetedStream<SupportStream<'_>>) -> Result<P>,
    P: FnMut(&[f64]) -> Result<f64>,
{
    let (points, labeler) = build_support(config)?;
    let m = config.m_support as f64;
    let n_budget = config.n_budget as f64;

    // Tester acceptance over independent trials.
    let mut accepts = 0usize;
    for trial in 0..config.trials {
        let rng = stream_rng(crate::rng::trial_seed(config.seed, trial as u64), "tester");
        let mut stream =
            BudgetedStream::new(SupportStream::new(&points, &labeler, rng), config.n_budget);
        if tester(&mut stream)? {
            accepts += 1;
        }
    }
    let acceptance_empirical = accepts as f64 / config.trials as f64;

    // One learner run, then advantage on fresh uniform-from-support points.
    let lrng = stream_rng(config.seed, "learner");
    let mut lstream =
        BudgetedStream::new(SupportStream::new(&points, &labeler, lrng), config.n_budget);
    let mut predictor = learner(&mut lstream)?;
    let hrng = stream_rng(config.seed, "holdout");
    let mut holdout = SupportStream::new(&points, &labeler, hrng);
    let mut wrong = 0usize;
    for _ in 0..config.holdout {
        let (x, y) = holdout.next_labeled()?;
        if predictor(&x)? != y {
            wrong += 1;
        }
    }
    let advantage_empirical = (wrong as f64 / config.holdout as f64 - 0.5).abs();

    let phi = points.iter().filter(|x| !labeler.in_band(x)).count() as f64 / m;
    let acceptance_bound = 1.0
        - config.delta2
        - n_budget * n_budget / m
        - n_budget / (config.delta_fool * m).sqrt();
    let advantage_bound = 1.5 * (phi + n_budget / m) + 5.0 * (m.ln() / m).sqrt();
    let (collision_exact, collision_lower_bound) =
        collision_probability(config.n_budget, config.m_support)?;

    Ok(FoolingReport {
        acceptance_empirical,
        acceptance_bound,
        advantage_empirical,
        advantage_bound,
        collision_exact,
        collision_lower_bound,
        out_of_band_mass: phi,
        bounds_vacuous: acceptance_bound <= 0.0 || advantage_bound >= 1.0,
        config_echo: serde_json::to_value(config).expect("config serialize"),
    })
}

/// Exact probability that `N` uniform draws from a support of size `M` are
/// all distinct: `prod_{i<N} (1 - i/M)`. Also returns the `1 - N^2/M` lower
/// bound for comparison.
pub fn collision_probability(n_draws: usize, m_support: usize) -> Result<(f64, f64)> {
    if n_draws > m_support {
        return Err(Error::InvalidParameter(format!(
            "N = {n_draws} exceeds M = {m_support}"
        )));
    }
    let m = m_support as f64;
    let mut exact = 1.0;
    for i in 0..n_draws {
        exact *= 1.0 - i as f64 / m;
    }
    let bound = 1.0 - (n_draws as f64).powi(2) / m;
    Ok((exact, bound))
}
