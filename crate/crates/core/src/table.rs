//! Partition-label weight tables and the margin / normalizer arithmetic
//! shared by RealBoost and QRealBoost.

use crate::error::{invalid, BoostError, Result};
use crate::learners::Partitioner;
use crate::model::{Label, LabeledDataset, WeightVector};
use crate::scalar::Real;

/// `plus[j]` and `minus[j]` hold the weight of partition `j` carrying label
/// `+1` and `-1` respectively.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionWeightTable<T> {
    pub plus: Vec<T>,
    pub minus: Vec<T>,
}

impl<T: Real> PartitionWeightTable<T> {
    pub fn new(plus: Vec<T>, minus: Vec<T>) -> Result<Self> {
        if plus.len() != minus.len() || plus.is_empty() {
            return invalid("weight table columns must be nonempty and of equal length");
        }
        if plus.iter().chain(&minus).any(|v| !(*v >= T::zero())) {
            return invalid("weight table entries must be nonnegative");
        }
        Ok(Self { plus, minus })
    }

    pub fn zeros(c: usize) -> Self {
        Self {
            plus: vec![T::zero(); c],
            minus: vec![T::zero(); c],
        }
    }

    #[inline]
    pub fn partitions(&self) -> usize {
        self.plus.len()
    }

    #[inline]
    pub fn get(&self, j: usize, label: Label) -> T {
        match label {
            Label::Positive => self.plus[j],
            Label::Negative => self.minus[j],
        }
    }

    #[inline]
    pub fn get_mut(&mut self, j: usize, label: Label) -> &mut T {
        match label {
            Label::Positive => &mut self.plus[j],
            Label::Negative => &mut self.minus[j],
        }
    }

    pub fn total(&self) -> T {
        self.plus.iter().chain(&self.minus).copied().sum()
    }

    pub fn has_empty_cell(&self) -> bool {
        self.plus.iter().chain(&self.minus).any(|&v| v <= T::zero())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            plus: self.plus.iter().map(|&v| f(v)).collect(),
            minus: self.minus.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Majority label per partition (ties go to `Positive`).
    pub fn majority_labels(&self) -> Vec<Label> {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(&p, &n)| if p >= n { Label::Positive } else { Label::Negative })
            .collect()
    }

    /// Weight on the minority side of each partition: the error of the
    /// majority labelling, unnormalized.
    pub fn minority_mass(&self) -> T {
        self.plus.iter().zip(&self.minus).map(|(&p, &n)| p.min(n)).sum()
    }

    /// `2 Σ_j sqrt(W+_j W-_j)` of the table as is.
    pub fn z(&self) -> T {
        let two = T::lit(2.0);
        two * self
            .plus
            .iter()
            .zip(&self.minus)
            .map(|(&p, &n)| (p * n).sqrt())
            .sum::<T>()
    }
}

/// Accumulates `w` into partition/label cells of `h`.
pub fn partition_weights<T: Real>(
    data: &LabeledDataset<T>,
    w: &WeightVector<T>,
    h: &Partitioner<T>,
) -> Result<PartitionWeightTable<T>> {
    if w.len() != data.len() {
        return invalid(format!("{} weights for {} samples", w.len(), data.len()));
    }
    let mut table = PartitionWeightTable::zeros(h.num_partitions());
    for ((x, y), &wi) in data.iter().zip(w.as_slice()) {
        let cell = table.get_mut(h.assign(x), y);
        *cell = *cell + wi;
    }
    Ok(table)
}

/// When to smooth a weight table before taking log-ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    /// Every round.
    Always,
    /// Only rounds whose table has an empty cell.
    WhenDegenerate,
}

impl Smoothing {
    pub fn applies<T: Real>(self, table: &PartitionWeightTable<T>) -> bool {
        match self {
            Smoothing::Always => true,
            Smoothing::WhenDegenerate => table.has_empty_cell(),
        }
    }
}

/// Laplace correction: each entry `w` becomes `(w·M + 1) / (M + 2C)`.
pub fn laplace_correct<T: Real>(table: &PartitionWeightTable<T>, m: usize, c: usize) -> PartitionWeightTable<T> {
    let mm = T::from_usize_lossy(m);
    let denom = mm + T::from_usize_lossy(2 * c);
    table.map(|w| (w * mm + T::one()) / denom)
}

/// Margins `½ ln(W+/W-)` and `Z = 2 Σ sqrt(W+ W-)`. Every entry must be
/// strictly positive, i.e. smoothing has already happened where needed.
pub fn margins_and_z<T: Real>(table: &PartitionWeightTable<T>) -> Result<(Vec<T>, T)> {
    if table.has_empty_cell() {
        return Err(BoostError::InvalidState(
            "weight table has an empty cell; smooth it before computing margins".into(),
        ));
    }
    let half = T::lit(0.5);
    let margins = table
        .plus
        .iter()
        .zip(&table.minus)
        .map(|(&p, &n)| half * (p / n).ln())
        .collect();
    Ok((margins, table.z()))
}

/// `Σ_j (W+_j e^{-β_j} + W-_j e^{β_j})`: the total weight after multiplying
/// by `exp(-β y)`. Equals `table.z()` when the margins are the table's own
/// log-ratios.
pub fn normalizer<T: Real>(table: &PartitionWeightTable<T>, margins: &[T]) -> T {
    table
        .plus
        .iter()
        .zip(&table.minus)
        .zip(margins)
        .map(|((&p, &n), &b)| p * (-b).exp() + n * b.exp())
        .sum()
}
