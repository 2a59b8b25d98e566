//! Shared domain types: labelled data, weight vectors and the combined
//! confidence-rated classifier.

use crate::error::{invalid, BoostError, Result};
use crate::learners::Partitioner;
use crate::scalar::Real;

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    #[inline]
    pub fn sign<T: Real>(self) -> T {
        match self {
            Label::Positive => T::one(),
            Label::Negative => -T::one(),
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn from_i8(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => invalid(format!("label {other} is not in {{-1, +1}}")),
        }
    }

    /// Sign of a real score; zero resolves to `Positive`.
    #[inline]
    pub fn from_score<T: Real>(score: T) -> Self {
        if score < T::zero() {
            Label::Negative
        } else {
            Label::Positive
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    /// 0 for `Positive`, 1 for `Negative`; column order of weight tables.
    #[inline]
    pub(crate) fn column(self) -> usize {
        match self {
            Label::Positive => 0,
            Label::Negative => 1,
        }
    }
}

/// Feature vectors with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    samples: Vec<Vec<T>>,
    labels: Vec<Label>,
    dim: usize,
    /// How raw labels were mapped onto ±1, if they were not ±1 already.
    pub label_mapping: Option<String>,
}

impl<T: Real> LabeledDataset<T> {
    pub fn new(samples: Vec<Vec<T>>, labels: Vec<Label>) -> Result<Self> {
        if samples.is_empty() {
            return invalid("dataset must contain at least one sample");
        }
        if samples.len() != labels.len() {
            return invalid(format!("{} samples but {} labels", samples.len(), labels.len()));
        }
        let dim = samples[0].len();
        if dim == 0 {
            return invalid("feature dimension must be at least 1");
        }
        if let Some(i) = samples.iter().position(|s| s.len() != dim) {
            return invalid(format!(
                "sample {i} has dimension {} (expected {dim})",
                samples[i].len()
            ));
        }
        if let Some(i) = samples.iter().position(|s| s.iter().any(|v| !v.is_finite())) {
            return invalid(format!("sample {i} has a non-finite feature"));
        }
        Ok(Self {
            samples,
            labels,
            dim,
            label_mapping: None,
        })
    }

    /// Convenience constructor from ±1 integers.
    pub fn from_signs(samples: Vec<Vec<T>>, labels: &[i8]) -> Result<Self> {
        let labels = labels.iter().map(|&l| Label::from_i8(l)).collect::<Result<Vec<_>>>()?;
        Self::new(samples, labels)
    }

    pub fn with_label_mapping(mut self, mapping: impl Into<String>) -> Self {
        self.label_mapping = Some(mapping.into());
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn sample(&self, i: usize) -> &[T] {
        &self.samples[i]
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn samples(&self) -> &[Vec<T>] {
        &self.samples
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], Label)> + '_ {
        self.samples.iter().map(Vec::as_slice).zip(self.labels.iter().copied())
    }

    /// Rows at `indices`, in the given order (duplicates allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return invalid(format!("index {bad} out of range for {} samples", self.len()));
        }
        let mut out = Self::new(
            indices.iter().map(|&i| self.samples[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
        )?;
        out.label_mapping = self.label_mapping.clone();
        Ok(out)
    }

    /// Same samples with every label negated.
    pub fn with_flipped_labels(&self) -> Self {
        Self {
            samples: self.samples.clone(),
            labels: self.labels.iter().map(|l| l.flipped()).collect(),
            dim: self.dim,
            label_mapping: self.label_mapping.clone(),
        }
    }
}

/// Nonnegative per-sample weights, possibly sub-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    weights: Vec<T>,
    /// Relative-error parameter under which the vector was produced (0 for
    /// exact classical updates).
    pub epsilon: T,
}

impl<T: Real> WeightVector<T> {
    pub fn new(weights: Vec<T>, epsilon: T) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return invalid(format!("weight {i} is negative or not finite"));
        }
        Ok(Self { weights, epsilon })
    }

    pub(crate) fn from_raw(weights: Vec<T>, epsilon: T) -> Self {
        Self { weights, epsilon }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    /// Compensated sum.
    pub fn sum(&self) -> T {
        neumaier_sum(self.weights.iter().copied())
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            weights: self.weights.iter().map(|&w| w * c).collect(),
            epsilon: self.epsilon,
        }
    }

    /// Copy rescaled to sum to one.
    pub fn normalized(&self) -> Result<Self> {
        let s = self.sum();
        if !(s > T::zero()) {
            return Err(BoostError::InvalidState("cannot normalize a zero weight vector".into()));
        }
        Ok(self.scaled(T::one() / s))
    }
}

pub(crate) fn neumaier_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let (mut sum, mut comp) = (T::zero(), T::zero());
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// All weights equal to `1/m`.
pub fn uniform_distribution<T: Real>(m: usize) -> Result<WeightVector<T>> {
    if m == 0 {
        return invalid("uniform distribution needs at least one sample");
    }
    let w = T::one() / T::from_usize_lossy(m);
    Ok(WeightVector::from_raw(vec![w; m], T::zero()))
}

/// One boosting round as stored in the final classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRound<T> {
    pub hypothesis: Partitioner<T>,
    /// Confidence per partition; its sign is the partition's predicted label.
    pub margins: Vec<T>,
    pub normalizer: T,
}

/// Sum of per-round partition margins, thresholded at zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnsembleModel<T> {
    rounds: Vec<EnsembleRound<T>>,
}

impl<T: Real> EnsembleModel<T> {
    pub fn new() -> Self {
        Self { rounds: Vec::new() }
    }

    pub fn push(&mut self, hypothesis: Partitioner<T>, margins: Vec<T>, normalizer: T) -> Result<()> {
        if margins.len() != hypothesis.num_partitions() {
            return invalid(format!(
                "margin table has {} entries for {} partitions",
                margins.len(),
                hypothesis.num_partitions()
            ));
        }
        if margins.iter().any(|m| !m.is_finite()) {
            return Err(BoostError::InvalidState("non-finite margin".into()));
        }
        self.rounds.push(EnsembleRound {
            hypothesis,
            margins,
            normalizer,
        });
        Ok(())
    }

    pub fn rounds(&self) -> &[EnsembleRound<T>] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Real-valued score `Σ_t β_{j_t(x), t}`.
    pub fn score(&self, x: &[T]) -> Result<T> {
        if self.rounds.is_empty() {
            return Err(BoostError::InvalidState("model has no rounds".into()));
        }
        Ok(self.rounds.iter().map(|r| r.margins[r.hypothesis.assign(x)]).sum())
    }

    pub fn predict(&self, x: &[T]) -> Result<Label> {
        self.score(x).map(Label::from_score)
    }

    /// Fraction of `data` classified correctly.
    pub fn accuracy(&self, data: &LabeledDataset<T>) -> Result<f64> {
        let mut correct = 0usize;
        for (x, y) in data.iter() {
            if self.predict(x)? == y {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }
}

pub fn ensemble_predict<T: Real>(model: &EnsembleModel<T>, x: &[T]) -> Result<Label> {
    model.predict(x)
}

/// Weighted misclassification rate of a partition hypothesis whose
/// partitions carry the labels in `partition_labels`. The weights are
/// normalized internally, so sub-normalized vectors still give a rate.
pub fn weighted_error<T: Real>(
    h: &Partitioner<T>,
    partition_labels: &[Label],
    data: &LabeledDataset<T>,
    w: &WeightVector<T>,
) -> Result<T> {
    if w.len() != data.len() {
        return invalid(format!("{} weights for {} samples", w.len(), data.len()));
    }
    if partition_labels.len() != h.num_partitions() {
        return invalid(format!(
            "{} partition labels for {} partitions",
            partition_labels.len(),
            h.num_partitions()
        ));
    }
    let total = w.sum();
    if !(total > T::zero()) {
        return invalid("weight vector sums to zero");
    }
    let wrong: T = data
        .iter()
        .zip(w.as_slice())
        .filter(|((x, y), _)| partition_labels[h.assign(x)] != *y)
        .map(|(_, &wi)| wi)
        .sum();
    Ok(wrong / total)
}
