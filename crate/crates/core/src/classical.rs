//! Reference AdaBoost and RealBoost. Both train the weak learner on a batch
//! resampled from the current distribution, so the learner interface is the
//! same one the quantum-style loop feeds with measured samples.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::learners::{LearnerConfig, Partitioner};
use crate::model::{uniform_distribution, weighted_error, EnsembleModel, Label, LabeledDataset, WeightVector};
use crate::quantum::{sample_indices, SamplingMode};
use crate::record::{Algorithm, RoundRecord, RunRecord};
use crate::rng::{stream, Purpose};
use crate::scalar::Real;
use crate::table::{laplace_correct, margins_and_z, partition_weights, Smoothing};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConfig {
    pub rounds: usize,
    /// Batch size handed to the learner; `None` means the training set size.
    pub batch_size: Option<usize>,
    pub sampling: SamplingMode,
    pub smoothing: Smoothing,
    pub seed: u64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            rounds: 25,
            batch_size: None,
            sampling: SamplingMode::Proportional,
            smoothing: Smoothing::WhenDegenerate,
            seed: 0,
        }
    }
}

impl ClassicalConfig {
    pub fn with_rounds(rounds: usize, seed: u64) -> Self {
        Self {
            rounds,
            seed,
            ..Self::default()
        }
    }
}

/// Draws the learner's batch for `round` from `weights`. The stream depends
/// only on `(seed, round)`, so runs that hold equal weights see equal
/// batches.
pub(crate) fn sample_batch<T: Real>(
    data: &LabeledDataset<T>,
    weights: &WeightVector<T>,
    size: usize,
    mode: SamplingMode,
    seed: u64,
    round: usize,
) -> Result<LabeledDataset<T>> {
    let mut rng = stream(seed, Purpose::Sampling, &[round as u64]);
    let drawn = sample_indices(weights.as_slice(), size, mode, &mut rng)?;
    data.select(&drawn.indices)
}

/// `(D_i exp(-β_{j(i)} y_i))_i` and its sum.
pub(crate) fn reweight<T: Real>(
    data: &LabeledDataset<T>,
    weights: &WeightVector<T>,
    h: &Partitioner<T>,
    margins: &[T],
) -> (Vec<T>, T) {
    let out: Vec<T> = data
        .iter()
        .zip(weights.as_slice())
        .map(|((x, y), &w)| w * (-margins[h.assign(x)] * y.sign::<T>()).exp())
        .collect();
    let sum = crate::model::neumaier_sum(out.iter().copied());
    (out, sum)
}

pub(crate) fn sign_labels<T: Real>(margins: &[T]) -> Vec<Label> {
    margins.iter().map(|&b| Label::from_score(b)).collect()
}

/// Running per-sample training scores, for per-round accuracy.
#[derive(Debug, Clone)]
pub(crate) struct ScoreTracker<T> {
    scores: Vec<T>,
}

impl<T: Real> ScoreTracker<T> {
    pub fn new(m: usize) -> Self {
        Self {
            scores: vec![T::zero(); m],
        }
    }

    pub fn add_round(&mut self, data: &LabeledDataset<T>, h: &Partitioner<T>, margins: &[T]) -> f64 {
        let mut correct = 0usize;
        for (i, (x, y)) in data.iter().enumerate() {
            self.scores[i] = self.scores[i] + margins[h.assign(x)];
            if Label::from_score(self.scores[i]) == y {
                correct += 1;
            }
        }
        correct as f64 / data.len() as f64
    }
}

/// Loop state for RealBoost.
#[derive(Debug, Clone)]
pub struct BoostState<T> {
    pub t: usize,
    pub weights: WeightVector<T>,
    pub model: EnsembleModel<T>,
    pub record: RunRecord,
    tracker: ScoreTracker<T>,
}

impl<T: Real> BoostState<T> {
    pub fn new(data: &LabeledDataset<T>, algorithm: Algorithm, config: serde_json::Value, seed: u64) -> Result<Self> {
        let mut record = RunRecord::new(algorithm, seed, 0.0, data.len(), config);
        record.header.label_mapping = data.label_mapping.clone();
        Ok(Self {
            t: 0,
            weights: uniform_distribution(data.len())?,
            model: EnsembleModel::new(),
            record,
            tracker: ScoreTracker::new(data.len()),
        })
    }
}

fn check_inputs<T: Real>(data: &LabeledDataset<T>, learner: &LearnerConfig, rounds: usize) -> Result<()> {
    if rounds == 0 {
        return invalid("at least one round is required");
    }
    if data.is_empty() {
        return invalid("empty training set");
    }
    learner.validate()
}

fn run_config(learner: &LearnerConfig, cfg: &ClassicalConfig) -> serde_json::Value {
    serde_json::json!({ "learner": learner, "boost": cfg })
}

/// One RealBoost round: learn a partition, take exact partition weights,
/// compute `β_j = ½ ln(W+/W-)` and reweight by `exp(-β y) / Z`.
///
/// Rounds whose table has an empty cell (or every round, with
/// `Smoothing::Always`) take their margins from the Laplace-corrected table;
/// the update still divides by the exact total so the weights stay a
/// distribution.
pub fn realboost_round<T: Real>(
    mut state: BoostState<T>,
    data: &LabeledDataset<T>,
    learner: &LearnerConfig,
    cfg: &ClassicalConfig,
) -> Result<BoostState<T>> {
    let m = data.len();
    let round = state.t + 1;
    let batch = sample_batch(
        data,
        &state.weights,
        cfg.batch_size.unwrap_or(m),
        cfg.sampling,
        cfg.seed,
        round,
    )?;
    let h = learner.fit(&batch)?;
    let table = partition_weights(data, &state.weights, &h)?;
    let smoothed = cfg.smoothing.applies(&table);
    let used = if smoothed {
        laplace_correct(&table, m, h.num_partitions())
    } else {
        table.clone()
    };
    let (margins, z) = margins_and_z(&used)?;
    let err = weighted_error(&h, &sign_labels(&margins), data, &state.weights)?;
    let (next, norm) = reweight(data, &state.weights, &h, &margins);
    let next = WeightVector::new(next.into_iter().map(|v| v / norm).collect(), T::zero())?;

    let train_accuracy = state.tracker.add_round(data, &h, &margins);
    state.record.rounds.push(RoundRecord {
        round,
        partitions: h.num_partitions(),
        margins: margins.iter().map(|b| b.as_f64()).collect(),
        z: z.as_f64(),
        normalizer: norm.as_f64(),
        kappa: 1.0,
        z_raw: table.z().as_f64(),
        weighted_error: err.as_f64(),
        gamma: 0.5 - err.as_f64(),
        weight_sum: next.sum().as_f64(),
        smoothed,
        clamped: false,
        unreliable_estimates: 0,
        oracle_calls: 0,
        train_accuracy,
        test_accuracy: None,
        shadow: None,
    });
    state.model.push(h, margins, z)?;
    state.weights = next;
    state.t = round;
    Ok(state)
}

pub fn realboost_train<T: Real>(
    data: &LabeledDataset<T>,
    learner: &LearnerConfig,
    cfg: &ClassicalConfig,
) -> Result<(EnsembleModel<T>, RunRecord)> {
    check_inputs(data, learner, cfg.rounds)?;
    let mut state = BoostState::new(data, Algorithm::RealBoost, run_config(learner, cfg), cfg.seed)?;
    for _ in 0..cfg.rounds {
        state = realboost_round(state, data, learner, cfg)?;
    }
    Ok((state.model, state.record))
}

/// `α = ½ ln((1-ε)/ε)`.
pub fn adaboost_alpha<T: Real>(eps: T) -> T {
    T::lit(0.5) * ((T::one() - eps) / eps).ln()
}

/// Keeps an AdaBoost error estimate inside `[1/(2M), 1 - 1/(2M)]`.
pub fn clamp_error<T: Real>(eps: T, m: usize) -> (T, bool) {
    let lo = T::one() / T::from_usize_lossy(2 * m);
    if eps < lo {
        (lo, true)
    } else if eps > T::one() - lo {
        (T::one() - lo, true)
    } else {
        (eps, false)
    }
}

/// AdaBoost with a binary base classifier: the learner's partition with each
/// block labelled by its weighted majority under the current distribution.
pub fn adaboost_train<T: Real>(
    data: &LabeledDataset<T>,
    learner: &LearnerConfig,
    cfg: &ClassicalConfig,
) -> Result<(EnsembleModel<T>, RunRecord)> {
    check_inputs(data, learner, cfg.rounds)?;
    let m = data.len();
    let mut state = BoostState::new(data, Algorithm::AdaBoost, run_config(learner, cfg), cfg.seed)?;
    for round in 1..=cfg.rounds {
        let batch = sample_batch(
            data,
            &state.weights,
            cfg.batch_size.unwrap_or(m),
            cfg.sampling,
            cfg.seed,
            round,
        )?;
        let h = learner.fit(&batch)?;
        let table = partition_weights(data, &state.weights, &h)?;
        let labels = table.majority_labels();
        let eps = weighted_error(&h, &labels, data, &state.weights)?;
        let (eps_used, clamped) = clamp_error(eps, m);
        let alpha = adaboost_alpha(eps_used);
        let margins: Vec<T> = labels.iter().map(|l| alpha * l.sign::<T>()).collect();

        let (next, z) = reweight(data, &state.weights, &h, &margins);
        let next = WeightVector::new(next.into_iter().map(|v| v / z).collect(), T::zero())?;
        let train_accuracy = state.tracker.add_round(data, &h, &margins);
        let two = T::lit(2.0);
        state.record.rounds.push(RoundRecord {
            round,
            partitions: h.num_partitions(),
            margins: margins.iter().map(|b| b.as_f64()).collect(),
            z: z.as_f64(),
            normalizer: z.as_f64(),
            kappa: 1.0,
            z_raw: (two * (eps * (T::one() - eps)).sqrt()).as_f64(),
            weighted_error: eps.as_f64(),
            gamma: 0.5 - eps.as_f64(),
            weight_sum: next.sum().as_f64(),
            smoothed: false,
            clamped,
            unreliable_estimates: 0,
            oracle_calls: 0,
            train_accuracy,
            test_accuracy: None,
            shadow: None,
        });
        state.model.push(h, margins, z)?;
        state.weights = next;
        state.t = round;
    }
    Ok((state.model, state.record))
}
