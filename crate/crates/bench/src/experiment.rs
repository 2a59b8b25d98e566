//! The benchmark protocol: one seeded training subset, every requested
//! algorithm run for a number of seeded repeats, held-out accuracy on the
//! remaining rows, and claim checks on every finished record.

use std::path::PathBuf;

use qboost_core::classical::{adaboost_train, realboost_train, ClassicalConfig};
use qboost_core::qboost::{qadaboost_sim_train, qrealboost_train, Estimator, QBoostConfig};
use qboost_core::quantum::SamplingMode;
use qboost_core::rng::{derive_seed, stream, Purpose};
use qboost_core::verify::{check_claims, ClaimReport};
use qboost_core::{Algorithm, Dataset, LearnerConfig, LearnerKind, Model, RunRecord};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{load_csv_dataset, load_idx_subset, CsvOptions, DataError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Idx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub format: DataFormat,
    /// IDX label file; required for `DataFormat::Idx`.
    pub labels: Option<PathBuf>,
    pub label_column: String,
    pub positive_label: String,
    pub ignore_columns: Vec<String>,
    /// Upper bound on IDX rows read before subset selection.
    pub idx_limit: usize,
    pub subset: usize,
    pub digits: (u8, u8),
    pub algorithms: Vec<Algorithm>,
    pub rounds: usize,
    pub repeats: usize,
    pub q: usize,
    pub k: usize,
    pub learner: LearnerKind,
    pub epsilon: Option<f64>,
    pub estimator: Estimator,
    pub sampling: SamplingMode,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: PathBuf::from("data/wdbc.csv"),
            format: DataFormat::Csv,
            labels: None,
            label_column: "diagnosis".into(),
            positive_label: "M".into(),
            ignore_columns: vec!["id".into()],
            idx_limit: 10_000,
            subset: 32,
            digits: (4, 5),
            algorithms: Algorithm::ALL.to_vec(),
            rounds: 25,
            repeats: 5,
            q: 8,
            k: 3,
            learner: LearnerKind::Kmeans,
            epsilon: None,
            estimator: Estimator::Noisy,
            sampling: SamplingMode::Proportional,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::InvalidArgument(m.to_string()));
        if self.subset == 0 {
            return bad("subset size must be positive");
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1");
        }
        if self.rounds == 0 {
            return bad("rounds must be at least 1");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected");
        }
        if self.q == 0 {
            return bad("Q must be positive");
        }
        if self.format == DataFormat::Idx && self.labels.is_none() {
            return bad("IDX input needs a label file");
        }
        self.learner_config(0).validate()?;
        Ok(())
    }

    pub fn learner_config(&self, seed: u64) -> LearnerConfig {
        match self.learner {
            LearnerKind::Stump => LearnerConfig::stump(),
            LearnerKind::Kmeans => LearnerConfig::kmeans(self.k, seed),
        }
    }

    pub fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            label_column: self.label_column.clone(),
            positive_label: self.positive_label.clone(),
            ignore_columns: self.ignore_columns.clone(),
        }
    }

    pub fn load(&self) -> Result<Dataset, DataError> {
        match self.format {
            DataFormat::Csv => load_csv_dataset(&self.dataset, &self.csv_options()),
            DataFormat::Idx => {
                let labels = self
                    .labels
                    .as_ref()
                    .ok_or_else(|| DataError::InvalidArgument("IDX input needs a label file".into()))?;
                load_idx_subset(&self.dataset, labels, self.digits, self.idx_limit)
            }
        }
    }

    pub fn repeat_seed(&self, repeat: usize) -> u64 {
        derive_seed(self.seed, Purpose::Repeat, &[repeat as u64])
    }

    pub fn qboost_config(&self, seed: u64) -> QBoostConfig {
        QBoostConfig {
            rounds: self.rounds,
            q: Some(self.q),
            epsilon: self.epsilon,
            estimator: self.estimator,
            sampling: self.sampling,
            seed,
            ..QBoostConfig::default()
        }
    }

    pub fn classical_config(&self, seed: u64) -> ClassicalConfig {
        ClassicalConfig {
            sampling: self.sampling,
            ..ClassicalConfig::with_rounds(self.rounds, seed)
        }
    }
}

/// Indices of the training subset: the first `size` entries of a seeded
/// shuffle, in ascending order.
pub fn select_subset(total: usize, size: usize, seed: u64) -> Result<Vec<usize>, DataError> {
    if size == 0 || size > total {
        return Err(DataError::InvalidArgument(format!(
            "subset size {size} must lie in 1..={total}"
        )));
    }
    let mut idx: Vec<usize> = (0..total).collect();
    idx.shuffle(&mut stream(seed, Purpose::Subset, &[total as u64]));
    idx.truncate(size);
    idx.sort_unstable();
    Ok(idx)
}

/// Splits `data` into the seeded training subset and the remaining rows.
pub fn split(data: &Dataset, size: usize, seed: u64) -> Result<(Dataset, Option<Dataset>), DataError> {
    let train_idx = select_subset(data.len(), size, seed)?;
    let mut in_train = vec![false; data.len()];
    for &i in &train_idx {
        in_train[i] = true;
    }
    let test_idx: Vec<usize> = (0..data.len()).filter(|&i| !in_train[i]).collect();
    let train = data.select(&train_idx)?;
    let test = if test_idx.is_empty() {
        None
    } else {
        Some(data.select(&test_idx)?)
    };
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    pub repeat: usize,
    /// On failure the header carries the error and there are no rounds.
    pub record: RunRecord,
    pub claims: Option<Vec<ClaimReport>>,
}

impl RunOutcome {
    pub fn failed(&self) -> bool {
        self.record.header.error.is_some()
    }

    /// Any applicable claim check failed.
    pub fn claim_failure(&self) -> bool {
        self.claims
            .as_ref()
            .is_some_and(|c| c.iter().any(|r| !r.skipped && !r.passed))
    }
}

pub fn train_one(
    algorithm: Algorithm,
    train: &Dataset,
    learner: &LearnerConfig,
    cfg: &ExperimentConfig,
    seed: u64,
) -> qboost_core::Result<(Model, RunRecord)> {
    match algorithm {
        Algorithm::AdaBoost => adaboost_train(train, learner, &cfg.classical_config(seed)),
        Algorithm::RealBoost => realboost_train(train, learner, &cfg.classical_config(seed)),
        Algorithm::QAdaBoostSim => qadaboost_sim_train(train, learner, &cfg.qboost_config(seed)),
        Algorithm::QRealBoost => qrealboost_train(train, learner, &cfg.qboost_config(seed)),
    }
}

/// Runs one algorithm for one repeat; errors end up in the record header.
pub fn run_single(
    algorithm: Algorithm,
    repeat: usize,
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &ExperimentConfig,
) -> RunOutcome {
    let seed = cfg.repeat_seed(repeat);
    let learner = cfg.learner_config(seed);
    match train_one(algorithm, train, &learner, cfg, seed) {
        Ok((model, mut record)) => {
            if let Some(test) = test {
                record.fill_test_accuracy(&model, test);
            }
            let claims = check_claims(&record, record.header.epsilon).ok();
            RunOutcome {
                algorithm,
                repeat,
                record,
                claims,
            }
        }
        Err(e) => {
            let mut record = RunRecord::new(algorithm, seed, 0.0, train.len(), serde_json::Value::Null);
            record.header.error = Some(e.to_string());
            RunOutcome {
                algorithm,
                repeat,
                record,
                claims: None,
            }
        }
    }
}

/// Every algorithm × repeat, in that order. Repeats run in parallel.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunOutcome>, DataError> {
    cfg.validate()?;
    let data = cfg.load()?;
    let (train, test) = split(&data, cfg.subset, cfg.seed)?;
    Ok(run_on_split(cfg, &train, test.as_ref()))
}

pub fn run_on_split(cfg: &ExperimentConfig, train: &Dataset, test: Option<&Dataset>) -> Vec<RunOutcome> {
    let jobs: Vec<(Algorithm, usize)> = cfg
        .algorithms
        .iter()
        .flat_map(|&a| (0..cfg.repeats).map(move |r| (a, r)))
        .collect();
    jobs.par_iter()
        .map(|&(a, r)| run_single(a, r, train, test, cfg))
        .collect()
}
