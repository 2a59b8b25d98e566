//! Domain-partitioning weak learners.
//!
//! A learner looks at a plain batch of labelled samples and returns a
//! [`Partitioner`] that maps every point of the input space to one of `C`
//! blocks. Distribution weights reach the learner only through which samples
//! end up in the batch.

mod kmeans;
mod stump;

pub use kmeans::train_kmeans_partitioner;
pub use stump::{stump_batch_error, train_stump};

use crate::error::{invalid, Result};
use crate::model::LabeledDataset;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Stump,
    Kmeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    /// Cluster count, k-means only.
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn stump() -> Self {
        Self {
            kind: LearnerKind::Stump,
            k: 2,
            max_iters: 1,
            seed: 0,
        }
    }

    pub fn kmeans(k: usize, seed: u64) -> Self {
        Self {
            kind: LearnerKind::Kmeans,
            k,
            max_iters: 100,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return invalid("max_iters must be at least 1");
        }
        if self.kind == LearnerKind::Kmeans && self.k < 2 {
            return invalid("k-means needs k >= 2");
        }
        Ok(())
    }

    /// Worst-case partition count this learner can produce.
    pub fn max_partitions(&self) -> usize {
        match self.kind {
            LearnerKind::Stump => 2,
            LearnerKind::Kmeans => self.k,
        }
    }

    pub fn fit<T: Real>(&self, batch: &LabeledDataset<T>) -> Result<Partitioner<T>> {
        self.validate()?;
        match self.kind {
            LearnerKind::Stump => train_stump(batch),
            LearnerKind::Kmeans => train_kmeans_partitioner(batch, self),
        }
    }
}

/// A total, deterministic map from feature vectors to partition indices
/// `0..num_partitions()`.
#[derive(Debug, Clone, PartialEq)]
pub enum Partitioner<T> {
    /// Partition 0 holds `x[feature] < threshold`, partition 1 the rest.
    Stump { feature: usize, threshold: T },
    /// Nearest centroid in Euclidean distance, lowest index on ties.
    Centroids {
        centroids: Vec<Vec<T>>,
        /// Fewer distinct batch points than requested clusters.
        collapsed: bool,
    },
}

impl<T: Real> Partitioner<T> {
    pub fn stump(feature: usize, threshold: T) -> Self {
        Partitioner::Stump { feature, threshold }
    }

    pub fn kind(&self) -> LearnerKind {
        match self {
            Partitioner::Stump { .. } => LearnerKind::Stump,
            Partitioner::Centroids { .. } => LearnerKind::Kmeans,
        }
    }

    pub fn num_partitions(&self) -> usize {
        match self {
            Partitioner::Stump { .. } => 2,
            Partitioner::Centroids { centroids, .. } => centroids.len(),
        }
    }

    pub fn is_collapsed(&self) -> bool {
        matches!(self, Partitioner::Centroids { collapsed: true, .. })
    }

    #[inline]
    pub fn assign(&self, x: &[T]) -> usize {
        match self {
            Partitioner::Stump { feature, threshold } => {
                if x[*feature] < *threshold {
                    0
                } else {
                    1
                }
            }
            Partitioner::Centroids { centroids, .. } => nearest(centroids, x).0,
        }
    }

    /// Partition index of every sample in `data`.
    pub fn assign_all(&self, data: &LabeledDataset<T>) -> Vec<usize> {
        data.samples().iter().map(|x| self.assign(x)).collect()
    }
}

pub(crate) fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum()
}

/// Index and squared distance of the closest centroid.
pub(crate) fn nearest<T: Real>(centroids: &[Vec<T>], x: &[T]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(c, x);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}
