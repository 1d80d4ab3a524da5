//! Example distributions used by experiments and the CLI generator.
//!
//! These are the "zoo" of sources the testers are exercised against: the two
//! assumed distributions (standard Gaussian, uniform hypercube) plus planted
//! defects that the testers must reject (a Rademacher coordinate, a rescaled
//! Gaussian, a planted parity constraint).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A named example distribution over `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Standard Gaussian `N(0, I_n)`.
    Gaussian,
    /// Uniform over the hypercube `{-1,+1}^n`.
    Cube,
    /// First coordinate Rademacher (`±1` fair), remaining coordinates
    /// standard Gaussian. Matches Gaussian moments up to degree 3 but has
    /// fourth moment 1 instead of 3 in the first coordinate.
    RademacherCoord,
    /// Gaussian scaled by 1.5 in every coordinate (second moment 2.25).
    ScaledGaussian,
    /// Uniform cube with the constraint `x_3 = x_1 * x_2` planted
    /// (requires `n >= 3`); the `{1,2,3}` parity has bias 1.
    ParityPlanted,
}

impl Distribution {
    /// Parse the CLI spelling of a distribution name.
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "gaussian" => Some(Self::Gaussian),
            "cube" => Some(Self::Cube),
            "rademacher-coord" => Some(Self::RademacherCoord),
            "scaled-gaussian" => Some(Self::ScaledGaussian),
            "parity-planted" => Some(Self::ParityPlanted),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Cube => "cube",
            Self::RademacherCoord => "rademacher-coord",
            Self::ScaledGaussian => "scaled-gaussian",
            Self::ParityPlanted => "parity-planted",
        }
    }

    /// Draw one example of dimension `n`.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Self::Gaussian => (0..n).map(|_| standard_normal(rng)).collect(),
            Self::ScaledGaussian => (0..n).map(|_| 1.5 * standard_normal(rng)).collect(),
            Self::Cube => (0..n).map(|_| rademacher(rng)).collect(),
            Self::RademacherCoord => {
                let mut x = Vec::with_capacity(n);
                x.push(rademacher(rng));
                for _ in 1..n {
                    x.push(standard_normal(rng));
                }
                x
            }
            Self::ParityPlanted => {
                assert!(n >= 3, "parity-planted requires n >= 3");
                let mut x: Vec<f64> = (0..n).map(|_| rademacher(rng)).collect();
                x[2] = x[0] * x[1];
                x
            }
        }
    }
}

/// One standard-normal draw (Box–Muller; uses two uniforms per call for
/// simplicity and determinism).
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Guard the log: gen::<f64>() is in [0,1); flip to (0,1].
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// One fair `±1` draw.
pub fn rademacher(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// `sign(v·x - theta)` with `sign(0) = +1`.
pub fn halfspace_label(v: &[f64], theta: f64, x: &[f64]) -> f64 {
    let s: f64 = v.iter().zip(x).map(|(a, b)| a * b).sum();
    if s - theta >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Flip a label with probability `noise`.
pub fn flip_with_probability(y: f64, noise: f64, rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<f64>() < noise {
        -y
    } else {
        y
    }
}

/// A uniformly random unit vector in `R^n`.
pub fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}
