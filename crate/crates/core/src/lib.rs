//! Distribution testers paired with agnostic learners, plus the machinery
//! they are built from and a fooling harness probing their sample-budget
//! limits.
//!
//! A tester-learner pair couples a distribution tester `T` with a learner
//! `A` so that (completeness) `T` accepts the assumed distribution with high
//! probability, and (composability) whenever `T` accepts, `A`'s agnostic
//! error guarantee is safe to trust. Two pairs are implemented:
//!
//! - [`gauss`]: halfspaces under the standard Gaussian — a label-oblivious
//!   tester (coordinate tail check + low-degree moment matching against the
//!   closed-form Gaussian moments) and a learner doing truncated degree-`d`
//!   L1 polynomial regression with threshold rounding.
//! - [`cube`]: the Boolean-cube analogues — a k-wise independence tester
//!   built on parity biases, a multilinear-basis halfspace learner, and an
//!   exhaustive decision-list pair.
//!
//! Supporting layers: [`poly`] (Chebyshev projections and the polynomial
//! sign-approximator construction), [`moments`] (multi-index moment tables),
//! [`l1fit`] (least-absolute-deviations regression by simplex),
//! and [`fooling`] (support-based hard distributions with band-randomized
//! labels that defeat any low-budget tester/learner, measured against
//! closed-form bounds).
//!
//! Everything is deterministic given a seed: randomized routines draw from
//! named [`rng`] streams, reports serialize with stable ordering, and
//! repeated runs produce byte-identical JSON.

pub mod cube;
pub mod dataset;
pub mod dist;
pub mod error;
pub mod fooling;
pub mod gauss;
pub mod l1fit;
pub mod moments;
pub mod numeric;
pub mod poly;
pub mod report;
pub mod rng;

pub use dataset::{
    BudgetedStream, ExampleStream, FnLabeledStream, FnStream, LabeledDataset, LabeledStream,
    Unlabeled,
};
pub use error::{Error, Result};
pub use l1fit::FittedModel;
pub use moments::MomentTable;
pub use poly::{ChebSeries, MonomialPoly, MultiIndex, PiecewiseRef};
pub use report::{LearnReport, Stage, Verdict};
