//! In-memory labeled datasets and sample streams.

use crate::error::{Error, Result};

/// A finite set of examples in `R^n` with `{-1,+1}` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// Row-major examples; all rows have length `dim`.
    pub examples: Vec<Vec<f64>>,
    /// Labels in `{-1.0, +1.0}`, one per example.
    pub labels: Vec<f64>,
    /// Ambient dimension.
    pub dim: usize,
    /// Seed used to generate the data, when known (provenance only).
    pub seed: Option<u64>,
}

impl LabeledDataset {
    /// Build a dataset, validating shapes and label values.
    pub fn new(examples: Vec<Vec<f64>>, labels: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyInput("dataset has no examples".into()));
        }
        if examples.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} examples but {} labels",
                examples.len(),
                labels.len()
            )));
        }
        let dim = examples[0].len();
        for (i, x) in examples.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "example {i} has dimension {} (expected {dim})",
                    x.len()
                )));
            }
            if x.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "example {i} contains a non-finite coordinate"
                )));
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::InvalidParameter(format!(
                    "label {i} is {y}, expected -1 or +1"
                )));
            }
        }
        Ok(Self { examples, labels, dim, seed })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }
}

/// A source of unlabeled examples. Testers consume these.
pub trait ExampleStream {
    /// Draw the next example, or `Err(StreamExhausted)` when the source is dry.
    fn next_example(&mut self) -> Result<Vec<f64>>;

    /// Draw `count` examples.
    fn take_examples(&mut self, count: usize) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(count);
        for drawn in 0..count {
            match self.next_example() {
                Ok(x) => out.push(x),
                Err(Error::StreamExhausted { .. }) => {
                    return Err(Error::StreamExhausted { drawn, requested: count })
                }
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}

/// A source of labeled examples. Learners consume these.
pub trait LabeledStream {
    /// Draw the next `(example, label)` pair.
    fn next_labeled(&mut self) -> Result<(Vec<f64>, f64)>;

    /// Draw `count` pairs into a dataset.
    fn take_dataset(&mut self, count: usize) -> Result<LabeledDataset> {
        let mut examples = Vec::with_capacity(count);
        let mut labels = Vec::with_capacity(count);
        for drawn in 0..count {
            match self.next_labeled() {
                Ok((x, y)) => {
                    examples.push(x);
                    labels.push(y);
                }
                Err(Error::StreamExhausted { .. }) => {
                    return Err(Error::StreamExhausted { drawn, requested: count })
                }
                Err(e) => return Err(e),
            }
        }
        LabeledDataset::new(examples, labels, None)
    }
}

/// Any infinite closure producing examples is an `ExampleStream`.
pub struct FnStream<F: FnMut() -> Vec<f64>>(pub F);

impl<F: FnMut() -> Vec<f64>> ExampleStream for FnStream<F> {
    fn next_example(&mut self) -> Result<Vec<f64>> {
        Ok((self.0)())
    }
}

/// Any infinite closure producing labeled pairs is a `LabeledStream`.
pub struct FnLabeledStream<F: FnMut() -> (Vec<f64>, f64)>(pub F);

impl<F: FnMut() -> (Vec<f64>, f64)> LabeledStream for FnLabeledStream<F> {
    fn next_labeled(&mut self) -> Result<(Vec<f64>, f64)> {
        Ok((self.0)())
    }
}

/// Adapter exposing the example half of a labeled stream (labels dropped).
pub struct Unlabeled<'a, S: LabeledStream>(pub &'a mut S);

impl<S: LabeledStream> ExampleStream for Unlabeled<'_, S> {
    fn next_example(&mut self) -> Result<Vec<f64>> {
        self.0.next_labeled().map(|(x, _)| x)
    }
}

/// A stream that yields at most `budget` draws, then errors.
///
/// Used by the fooling harness to enforce the tester/learner sample budget.
pub struct BudgetedStream<S> {
    inner: S,
    budget: usize,
    drawn: usize,
}

impl<S> BudgetedStream<S> {
    pub fn new(inner: S, budget: usize) -> Self {
        Self { inner, budget, drawn: 0 }
    }

    /// Number of draws made so far.
    pub fn drawn(&self) -> usize {
        self.drawn
    }

    fn charge(&mut self) -> Result<()> {
        if self.drawn >= self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        self.drawn += 1;
        Ok(())
    }
}

impl<S: ExampleStream> ExampleStream for BudgetedStream<S> {
    fn next_example(&mut self) -> Result<Vec<f64>> {
        self.charge()?;
        self.inner.next_example()
    }
}

impl<S: LabeledStream> LabeledStream for BudgetedStream<S> {
    fn next_labeled(&mut self) -> Result<(Vec<f64>, f64)> {
        self.charge()?;
        self.inner.next_labeled()
    }
}
