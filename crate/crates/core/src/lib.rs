//! Boosting with confidence-rated domain-partitioning hypotheses: classical
//! AdaBoost and RealBoost, a QRealBoost simulation driven by estimated
//! weights, a small statevector backend for amplitude amplification and
//! estimation, and checks of the convergence bounds over run records.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod learners;
pub mod model;
pub mod qboost;
pub mod quantum;
pub mod record;
pub mod rng;
pub mod scalar;
pub mod table;
pub mod verify;

pub use classical::{adaboost_train, realboost_round, realboost_train, BoostState, ClassicalConfig};
pub use error::{BoostError, Result};
pub use learners::{LearnerConfig, LearnerKind, Partitioner};
pub use model::{
    ensemble_predict, uniform_distribution, weighted_error, EnsembleModel, Label, LabeledDataset, WeightVector,
};
pub use qboost::{
    estimate_weight_table, kappa, qadaboost_sim_train, qreal_update, qrealboost_train, qrealboost_train_observed,
    EstimatedWeightTable, Estimator, IqaeSettings, KappaScaling, QBoostConfig,
};
pub use quantum::SamplingMode;
pub use record::{Algorithm, RoundRecord, RunRecord};
pub use scalar::Real;
pub use table::{laplace_correct, margins_and_z, normalizer, partition_weights, PartitionWeightTable, Smoothing};
pub use verify::{check_claims, iteration_threshold, query_cost_estimate, sample_size_bound, ClaimId, ClaimReport};

pub type Dataset = LabeledDataset<f64>;
pub type Weights = WeightVector<f64>;
pub type Model = EnsembleModel<f64>;
pub type Hypothesis = Partitioner<f64>;
pub type WeightTable = PartitionWeightTable<f64>;
