//! QRealBoost: RealBoost driven by estimated partition weights and a
//! sub-normalized, κ-scaled distribution update, plus a QAdaBoost stand-in
//! used as a benchmark baseline.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{adaboost_alpha, clamp_error, reweight, sample_batch, sign_labels, ScoreTracker};
use crate::error::{invalid, BoostError, Result};
use crate::learners::{LearnerConfig, Partitioner};
use crate::model::{uniform_distribution, weighted_error, EnsembleModel, Label, LabeledDataset, WeightVector};
use crate::quantum::{
    iqae_estimate, EstimationConfig, SamplingMode, StatevectorOracle, WeightedStatePrep, MAX_STATEVECTOR_SAMPLES,
};
use crate::record::{Algorithm, RoundRecord, RunRecord, Shadow};
use crate::rng::{stream, Purpose};
use crate::scalar::Real;
use crate::table::{laplace_correct, margins_and_z, normalizer, partition_weights, PartitionWeightTable, Smoothing};

/// Source of the partition-weight table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// The exact table.
    Exact,
    /// Each exact entry times an independent uniform factor in `[1-ε, 1+ε]`.
    Noisy,
    /// Amplitude estimation on a simulated register.
    Statevector,
}

impl Estimator {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Estimator::Exact),
            "noisy" => Some(Estimator::Noisy),
            "statevector" => Some(Estimator::Statevector),
            _ => None,
        }
    }
}

/// What the update divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaScaling {
    /// `κ(C, ε) / C`. Keeps every weight sum inside
    /// `[((1-ε)/(1+ε))^{3/2}, sqrt((1-ε)/(1+ε))]` and reduces to the exact
    /// RealBoost update at `ε = 0`.
    PerPartition,
    /// `κ(C, ε)` itself. Weight sums then sit near `1/C`; the sum contract
    /// is not enforced in this mode.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IqaeSettings {
    pub delta: f64,
    pub shots_per_round: usize,
    pub max_grover_depth: usize,
    pub floor: f64,
    pub max_total_shots: u64,
}

impl Default for IqaeSettings {
    fn default() -> Self {
        Self {
            delta: 0.01,
            shots_per_round: 100,
            max_grover_depth: 16_384,
            floor: 1e-6,
            max_total_shots: 2_000_000,
        }
    }
}

impl IqaeSettings {
    pub fn config(&self, epsilon: f64) -> EstimationConfig {
        EstimationConfig {
            epsilon,
            delta: self.delta,
            max_grover_depth: self.max_grover_depth,
            shots_per_round: self.shots_per_round,
            mode: crate::quantum::EstimationMode::Relative,
            floor: self.floor,
            max_total_shots: self.max_total_shots,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QBoostConfig {
    pub rounds: usize,
    /// Learner sample complexity; `None` means the training set size.
    pub q: Option<usize>,
    /// Worst-case partition count; `None` takes the learner's maximum.
    pub c: Option<usize>,
    /// Worst-case edge, carried into the record for reference only.
    pub gamma_guess: Option<f64>,
    /// `None` means `min(0.1, 1/(Q·T²))`.
    pub epsilon: Option<f64>,
    pub estimator: Estimator,
    pub sampling: SamplingMode,
    pub smoothing: Smoothing,
    pub kappa_scaling: KappaScaling,
    pub iqae: IqaeSettings,
    pub seed: u64,
}

impl Default for QBoostConfig {
    fn default() -> Self {
        Self {
            rounds: 25,
            q: None,
            c: None,
            gamma_guess: None,
            epsilon: None,
            estimator: Estimator::Noisy,
            sampling: SamplingMode::Proportional,
            smoothing: Smoothing::Always,
            kappa_scaling: KappaScaling::PerPartition,
            iqae: IqaeSettings::default(),
            seed: 0,
        }
    }
}

impl QBoostConfig {
    pub fn new(rounds: usize, estimator: Estimator, epsilon: f64, seed: u64) -> Self {
        Self {
            rounds,
            estimator,
            epsilon: Some(epsilon),
            seed,
            ..Self::default()
        }
    }

    pub fn sample_complexity(&self, m: usize) -> usize {
        self.q.unwrap_or(m)
    }

    pub fn partitions(&self, learner: &LearnerConfig) -> usize {
        self.c.unwrap_or_else(|| learner.max_partitions())
    }

    pub fn resolved_epsilon(&self, m: usize) -> f64 {
        self.epsilon.unwrap_or_else(|| {
            let q = self.sample_complexity(m) as f64;
            let t = self.rounds.max(1) as f64;
            (1.0 / (q * t * t)).min(0.1)
        })
    }

    pub fn validate(&self, m: usize, learner: &LearnerConfig) -> Result<()> {
        if self.rounds == 0 {
            return invalid("at least one round is required");
        }
        if self.sample_complexity(m) == 0 {
            return invalid("sample complexity Q must be positive");
        }
        let c = self.partitions(learner);
        if c == 0 {
            return invalid("partition count C must be positive");
        }
        if c < learner.max_partitions() {
            return invalid(format!(
                "C = {c} is below the learner's {} partitions",
                learner.max_partitions()
            ));
        }
        let eps = self.resolved_epsilon(m);
        if !(0.0..1.0).contains(&eps) {
            return invalid(format!("epsilon {eps} must lie in [0, 1)"));
        }
        if self.estimator == Estimator::Statevector {
            if eps <= 0.0 {
                return invalid("the statevector estimator needs epsilon > 0");
            }
            if m > MAX_STATEVECTOR_SAMPLES {
                return Err(BoostError::Unsupported(format!(
                    "statevector estimator supports at most {MAX_STATEVECTOR_SAMPLES} samples, got {m}"
                )));
            }
        }
        learner.validate()
    }
}

/// `κ = C/(1-ε) · sqrt((1+ε)/(1-ε))`.
pub fn kappa(c: usize, epsilon: f64) -> Result<f64> {
    if c == 0 {
        return invalid("C must be at least 1");
    }
    if !(0.0..1.0).contains(&epsilon) {
        return invalid(format!("epsilon {epsilon} must lie in [0, 1)"));
    }
    Ok(c as f64 / (1.0 - epsilon) * ((1.0 + epsilon) / (1.0 - epsilon)).sqrt())
}

/// Lower end of the admissible weight-sum interval, `1 - 4ε/(1+ε)`.
pub fn weight_sum_lower_bound(epsilon: f64) -> f64 {
    1.0 - 4.0 * epsilon / (1.0 + epsilon)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedWeightTable<T> {
    pub table: PartitionWeightTable<T>,
    /// Every entry is within this relative error of the exact one (when the
    /// estimator kept its guarantee).
    pub epsilon_actual: f64,
    pub laplace_applied: bool,
    pub unreliable: usize,
    pub oracle_calls: u64,
}

impl<T: Real> EstimatedWeightTable<T> {
    pub fn laplace_corrected(&self, m: usize, c: usize) -> Self {
        Self {
            table: laplace_correct(&self.table, m, c),
            laplace_applied: true,
            ..self.clone()
        }
    }
}

fn noise_factor<T: Real>(epsilon: f64, seed: u64, coords: &[u64]) -> T {
    if epsilon == 0.0 {
        return T::one();
    }
    let mut rng = stream(seed, Purpose::Estimation, coords);
    T::lit(rng.random_range(1.0 - epsilon..=1.0 + epsilon))
}

struct MassEstimate {
    value: f64,
    reliable: bool,
    calls: u64,
}

/// Estimates `Σ_i masked_i` by amplitude estimation on the padded register.
fn statevector_mass<T: Real>(masked: &[T], cfg: &EstimationConfig, rng: &mut impl Rng) -> Result<MassEstimate> {
    let padded = masked.len().next_power_of_two().max(2);
    let prep = WeightedStatePrep::new(masked, padded)?;
    let est = iqae_estimate(&mut StatevectorOracle::new(prep), cfg, rng)?;
    Ok(MassEstimate {
        value: est.value * padded as f64,
        reliable: est.reliable,
        calls: est.oracle_calls,
    })
}

/// Estimates every partition/label cell of `h` under `w` for `round`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_weight_table<T: Real>(
    data: &LabeledDataset<T>,
    w: &WeightVector<T>,
    h: &Partitioner<T>,
    estimator: Estimator,
    epsilon: f64,
    iqae: &IqaeSettings,
    seed: u64,
    round: usize,
) -> Result<EstimatedWeightTable<T>> {
    let exact = partition_weights(data, w, h)?;
    let c = h.num_partitions();
    match estimator {
        Estimator::Exact => Ok(EstimatedWeightTable {
            table: exact,
            epsilon_actual: 0.0,
            laplace_applied: false,
            unreliable: 0,
            oracle_calls: 0,
        }),
        Estimator::Noisy => {
            let mut table = exact;
            for j in 0..c {
                for b in [Label::Positive, Label::Negative] {
                    let f: T = noise_factor(epsilon, seed, &[round as u64, j as u64, b.column() as u64]);
                    let cell = table.get_mut(j, b);
                    *cell = *cell * f;
                }
            }
            Ok(EstimatedWeightTable {
                table,
                epsilon_actual: epsilon,
                laplace_applied: false,
                unreliable: 0,
                oracle_calls: 0,
            })
        }
        Estimator::Statevector => {
            if data.len() > MAX_STATEVECTOR_SAMPLES {
                return Err(BoostError::Unsupported(format!(
                    "statevector estimator supports at most {MAX_STATEVECTOR_SAMPLES} samples, got {}",
                    data.len()
                )));
            }
            let cfg = iqae.config(epsilon);
            let parts = h.assign_all(data);
            let mut table = PartitionWeightTable::zeros(c);
            let (mut unreliable, mut calls) = (0usize, 0u64);
            for j in 0..c {
                for b in [Label::Positive, Label::Negative] {
                    let masked: Vec<T> = (0..data.len())
                        .map(|i| {
                            if parts[i] == j && data.label(i) == b {
                                w.as_slice()[i].min(T::one())
                            } else {
                                T::zero()
                            }
                        })
                        .collect();
                    let mut rng = stream(seed, Purpose::Estimation, &[round as u64, j as u64, b.column() as u64]);
                    let est = statevector_mass(&masked, &cfg, &mut rng)?;
                    *table.get_mut(j, b) = T::lit(est.value);
                    unreliable += usize::from(!est.reliable);
                    calls += est.calls;
                }
            }
            Ok(EstimatedWeightTable {
                table,
                epsilon_actual: epsilon,
                laplace_applied: false,
                unreliable,
                oracle_calls: calls,
            })
        }
    }
}

/// `D̃'_i = D̃_i · exp(-β'_{h(x_i)} y_i) / (κ Z')`.
pub fn qreal_update<T: Real>(
    data: &LabeledDataset<T>,
    w: &WeightVector<T>,
    h: &Partitioner<T>,
    margins: &[T],
    z_prime: T,
    kappa: T,
) -> Result<WeightVector<T>> {
    if margins.len() != h.num_partitions() {
        return invalid(format!(
            "{} margins for {} partitions",
            margins.len(),
            h.num_partitions()
        ));
    }
    if !(z_prime > T::zero()) || !(kappa > T::zero()) {
        return Err(BoostError::InvalidState(format!(
            "update divisor must be positive (Z' = {z_prime}, kappa = {kappa})"
        )));
    }
    let (next, _) = reweight(data, w, h, margins);
    let div = kappa * z_prime;
    WeightVector::new(next.into_iter().map(|v| v / div).collect(), w.epsilon)
}

/// Fails when `sum` leaves `[1 - 4ε/(1+ε), 1]` by more than `1e-9`.
pub fn check_weight_sum(round: usize, sum: f64, epsilon: f64) -> Result<()> {
    let lower = weight_sum_lower_bound(epsilon);
    let upper = 1.0;
    if sum < lower - 1e-9 || sum > upper + 1e-9 || !sum.is_finite() {
        return Err(BoostError::ContractViolation {
            round,
            sum,
            lower,
            upper,
        });
    }
    Ok(())
}

fn run_config(learner: &LearnerConfig, cfg: &QBoostConfig, epsilon: f64, c: usize, q: usize) -> serde_json::Value {
    serde_json::json!({
        "learner": learner,
        "boost": cfg,
        "resolved": { "epsilon": epsilon, "C": c, "Q": q },
    })
}

fn new_record<T: Real>(
    data: &LabeledDataset<T>,
    algorithm: Algorithm,
    config: serde_json::Value,
    seed: u64,
    epsilon: f64,
) -> RunRecord {
    let mut record = RunRecord::new(algorithm, seed, epsilon, data.len(), config);
    record.header.label_mapping = data.label_mapping.clone();
    record
}

pub fn qrealboost_train<T: Real>(
    data: &LabeledDataset<T>,
    learner: &LearnerConfig,
    cfg: &QBoostConfig,
) -> Result<(EnsembleModel<T>, RunRecord)> {
    qrealboost_train_observed(data, learner, cfg, |_, _| {})
}

/// As [`qrealboost_train`], calling `observe(round, weights)` with the
/// sub-normalized weights produced by every round.
pub fn qrealboost_train_observed<T: Real>(
    data: &LabeledDataset<T>,
    learner: &LearnerConfig,
    cfg: &QBoostConfig,
    mut observe: impl FnMut(usize, &WeightVector<T>),
) -> Result<(EnsembleModel<T>, RunRecord)> {
    let m = data.len();
    cfg.validate(m, learner)?;
    let eps = cfg.resolved_epsilon(m);
    let c_cfg = cfg.partitions(learner);
    let q = cfg.sample_complexity(m);
    let kappa_full = kappa(c_cfg, eps)?;
    let kappa_used = match cfg.kappa_scaling {
        KappaScaling::PerPartition => kappa_full / c_cfg as f64,
        KappaScaling::Literal => kappa_full,
    };
    let kappa_t = T::lit(kappa_used);

    let mut record = new_record(
        data,
        Algorithm::QRealBoost,
        run_config(learner, cfg, eps, c_cfg, q),
        cfg.seed,
        eps,
    );
    let mut model = EnsembleModel::new();
    let mut tracker = ScoreTracker::new(m);
    let mut weights = uniform_distribution::<T>(m)?;
    weights.epsilon = T::lit(eps);

    for round in 1..=cfg.rounds {
        let batch = sample_batch(data, &weights, q, cfg.sampling, cfg.seed, round)?;
        let h = learner.fit(&batch)?;
        let c_round = h.num_partitions();
        let est = estimate_weight_table(data, &weights, &h, cfg.estimator, eps, &cfg.iqae, cfg.seed, round)?;
        let smoothed = cfg.smoothing.applies(&est.table);
        let used = if smoothed {
            est.laplace_corrected(m, c_round)
        } else {
            est.clone()
        };
        let (margins, z_prime) = margins_and_z(&used.table)?;
        let u_prime = normalizer(&est.table, &margins);
        let next = qreal_update(data, &weights, &h, &margins, u_prime, kappa_t)?;
        let sum = next.sum().as_f64();
        if cfg.kappa_scaling == KappaScaling::PerPartition {
            check_weight_sum(round, sum, eps)?;
        }

        // noiseless quantities for the same starting weights and hypothesis
        let exact = partition_weights(data, &weights, &h)?;
        let exact_used = if smoothed {
            laplace_correct(&exact, m, c_round)
        } else {
            exact.clone()
        };
        let (shadow_margins, shadow_z) = margins_and_z(&exact_used)?;
        let (shadow_next, shadow_norm) = reweight(data, &weights, &h, &shadow_margins);
        let overlap: T = next
            .as_slice()
            .iter()
            .zip(&shadow_next)
            .map(|(&a, &b)| (a * b / shadow_norm).sqrt())
            .sum();

        let total = weights.sum();
        let err = weighted_error(&h, &sign_labels(&margins), data, &weights)?;
        let train_accuracy = tracker.add_round(data, &h, &margins);
        record.rounds.push(RoundRecord {
            round,
            partitions: c_round,
            margins: margins.iter().map(|b| b.as_f64()).collect(),
            z: z_prime.as_f64(),
            normalizer: u_prime.as_f64(),
            kappa: kappa_used,
            z_raw: (exact.z() / total).as_f64(),
            weighted_error: err.as_f64(),
            gamma: 0.5 - err.as_f64(),
            weight_sum: sum,
            smoothed,
            clamped: false,
            unreliable_estimates: est.unreliable,
            oracle_calls: est.oracle_calls,
            train_accuracy,
            test_accuracy: None,
            shadow: Some(Shadow {
                margins: shadow_margins.iter().map(|b| b.as_f64()).collect(),
                z: shadow_z.as_f64(),
                normalizer: shadow_norm.as_f64(),
                overlap: overlap.as_f64(),
            }),
        });
        model.push(h, margins, z_prime)?;
        observe(round, &next);
        weights = next;
    }
    Ok((model, record))
}

/// AdaBoost on measured batches with an ε-relative estimate of each round's
/// error. A benchmark stand-in, not a reconstruction of any published
/// quantum AdaBoost.
pub fn qadaboost_sim_train<T: Real>(
    data: &LabeledDataset<T>,
    learner: &LearnerConfig,
    cfg: &QBoostConfig,
) -> Result<(EnsembleModel<T>, RunRecord)> {
    let m = data.len();
    cfg.validate(m, learner)?;
    let eps = cfg.resolved_epsilon(m);
    let q = cfg.sample_complexity(m);
    let c_cfg = cfg.partitions(learner);
    let mut record = new_record(
        data,
        Algorithm::QAdaBoostSim,
        run_config(learner, cfg, eps, c_cfg, q),
        cfg.seed,
        eps,
    );
    let mut model = EnsembleModel::new();
    let mut tracker = ScoreTracker::new(m);
    let mut weights = uniform_distribution::<T>(m)?;

    for round in 1..=cfg.rounds {
        let batch = sample_batch(data, &weights, q, cfg.sampling, cfg.seed, round)?;
        let h = learner.fit(&batch)?;
        let est = estimate_weight_table(data, &weights, &h, cfg.estimator, eps, &cfg.iqae, cfg.seed, round)?;
        let labels = est.table.majority_labels();
        let exact_err = weighted_error(&h, &labels, data, &weights)?;
        let (err_est, unreliable, calls) = match cfg.estimator {
            Estimator::Exact => (exact_err, 0, 0),
            Estimator::Noisy => (
                exact_err * noise_factor::<T>(eps, cfg.seed, &[round as u64, u64::MAX]),
                0,
                0,
            ),
            Estimator::Statevector => {
                let parts = h.assign_all(data);
                let masked: Vec<T> = (0..m)
                    .map(|i| {
                        if labels[parts[i]] != data.label(i) {
                            weights.as_slice()[i]
                        } else {
                            T::zero()
                        }
                    })
                    .collect();
                let mut rng = stream(cfg.seed, Purpose::Estimation, &[round as u64, u64::MAX]);
                let mass = statevector_mass(&masked, &cfg.iqae.config(eps), &mut rng)?;
                (T::lit(mass.value), usize::from(!mass.reliable), mass.calls)
            }
        };
        let (err_used, clamped) = clamp_error(err_est, m);
        let alpha = adaboost_alpha(err_used);
        let margins: Vec<T> = labels.iter().map(|l| alpha * l.sign::<T>()).collect();
        let (next, z) = reweight(data, &weights, &h, &margins);
        let next = WeightVector::new(next.into_iter().map(|v| v / z).collect(), T::zero())?;
        let train_accuracy = tracker.add_round(data, &h, &margins);
        let two = T::lit(2.0);
        record.rounds.push(RoundRecord {
            round,
            partitions: h.num_partitions(),
            margins: margins.iter().map(|b| b.as_f64()).collect(),
            z: z.as_f64(),
            normalizer: z.as_f64(),
            kappa: 1.0,
            z_raw: (two * (exact_err * (T::one() - exact_err)).sqrt()).as_f64(),
            weighted_error: exact_err.as_f64(),
            gamma: 0.5 - exact_err.as_f64(),
            weight_sum: next.sum().as_f64(),
            smoothed: false,
            clamped,
            unreliable_estimates: unreliable + est.unreliable,
            oracle_calls: calls + est.oracle_calls,
            train_accuracy,
            test_accuracy: None,
            shadow: None,
        });
        model.push(h, margins, z)?;
        weights = next;
    }
    Ok((model, record))
}
