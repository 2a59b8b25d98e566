//! Per-run diagnostics and their line-delimited JSON form.
//!
//! A record file starts with one header line (carrying the format version)
//! followed by one line per completed round.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{BoostError, Result};
use crate::model::{EnsembleModel, LabeledDataset};
use crate::scalar::Real;

pub const RECORD_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(rename = "ada")]
    AdaBoost,
    #[serde(rename = "real")]
    RealBoost,
    /// AdaBoost loop with sampled batches and noisy error estimates; a
    /// benchmark stand-in, not a quantum algorithm implementation.
    #[serde(rename = "qada")]
    QAdaBoostSim,
    #[serde(rename = "qreal")]
    QRealBoost,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::AdaBoost,
        Algorithm::RealBoost,
        Algorithm::QAdaBoostSim,
        Algorithm::QRealBoost,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Algorithm::AdaBoost => "ada",
            Algorithm::RealBoost => "real",
            Algorithm::QAdaBoostSim => "qada",
            Algorithm::QRealBoost => "qreal",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::AdaBoost => "AdaBoost",
            Algorithm::RealBoost => "RealBoost",
            Algorithm::QAdaBoostSim => "QAdaBoost (stand-in)",
            Algorithm::QRealBoost => "QRealBoost",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.short_name() == s)
    }

    pub fn is_stand_in(self) -> bool {
        self == Algorithm::QAdaBoostSim
    }

    /// Runs whose weights are produced by estimated tables.
    pub fn is_quantum(self) -> bool {
        matches!(self, Algorithm::QAdaBoostSim | Algorithm::QRealBoost)
    }
}

/// Noiseless quantities computed next to an estimated round, used only for
/// checking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shadow {
    pub margins: Vec<f64>,
    pub z: f64,
    /// Exact `Σ_i D_i exp(-β y_i)` for the shadow margins.
    pub normalizer: f64,
    /// `Σ_i sqrt(D̃^{t+1}_i D^{t+1}_i)` against the exact update of the same
    /// starting weights.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub partitions: usize,
    pub margins: Vec<f64>,
    /// `2 Σ sqrt(W+ W-)` of the table the margins came from.
    pub z: f64,
    /// Divisor applied in the update, before any κ scaling.
    pub normalizer: f64,
    /// Extra scale the update divides by (1 on classical runs).
    pub kappa: f64,
    /// `2 Σ sqrt(W+ W-)` of the exact, unsmoothed table.
    pub z_raw: f64,
    /// Weighted error of the sign labelling under the normalized weights.
    pub weighted_error: f64,
    pub gamma: f64,
    pub weight_sum: f64,
    pub smoothed: bool,
    /// AdaBoost error clamp fired.
    pub clamped: bool,
    pub unreliable_estimates: usize,
    pub oracle_calls: u64,
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
    pub shadow: Option<Shadow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub version: u32,
    pub algorithm: Algorithm,
    pub stand_in: bool,
    pub seed: u64,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub epsilon: f64,
    pub train_size: usize,
    pub label_mapping: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub header: RecordHeader,
    pub rounds: Vec<RoundRecord>,
}

impl RunRecord {
    pub fn new(algorithm: Algorithm, seed: u64, epsilon: f64, train_size: usize, config: serde_json::Value) -> Self {
        let config_hash = config_digest(&config);
        Self {
            header: RecordHeader {
                version: RECORD_VERSION,
                algorithm,
                stand_in: algorithm.is_stand_in(),
                seed,
                config_hash,
                config,
                epsilon,
                train_size,
                label_mapping: None,
                error: None,
            },
            rounds: Vec::new(),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.header.algorithm
    }

    pub fn final_train_error(&self) -> Option<f64> {
        self.rounds.last().map(|r| 1.0 - r.train_accuracy)
    }

    /// Fills `test_accuracy` of every round with the accuracy of the
    /// ensemble truncated to that round.
    pub fn fill_test_accuracy<T: Real>(&mut self, model: &EnsembleModel<T>, test: &LabeledDataset<T>) {
        let acc = prefix_accuracies(model, test);
        for (r, a) in self.rounds.iter_mut().zip(acc) {
            r.test_accuracy = Some(a);
        }
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let line = serde_json::to_string(&self.header).map_err(|e| BoostError::Format(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| BoostError::Format(e.to_string()))?;
        for r in &self.rounds {
            let line = serde_json::to_string(r).map_err(|e| BoostError::Format(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| BoostError::Format(e.to_string()))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
            Ok(s) => !s.trim().is_empty(),
            Err(_) => true,
        });
        let (_, first) = lines.next().ok_or_else(|| BoostError::Format("empty record".into()))?;
        let first = first.map_err(|e| BoostError::Format(e.to_string()))?;
        let header: RecordHeader =
            serde_json::from_str(&first).map_err(|e| BoostError::Format(format!("line 1: {e}")))?;
        if header.version != RECORD_VERSION {
            return Err(BoostError::Format(format!(
                "unsupported record version {} (expected {RECORD_VERSION})",
                header.version
            )));
        }
        let mut rounds = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| BoostError::Format(e.to_string()))?;
            let r: RoundRecord =
                serde_json::from_str(&line).map_err(|e| BoostError::Format(format!("line {}: {e}", i + 1)))?;
            rounds.push(r);
        }
        Ok(Self { header, rounds })
    }
}

/// Hex SHA-256 prefix of the compact JSON encoding.
pub fn config_digest(config: &serde_json::Value) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(config).unwrap_or_default();
    let digest = Sha256::digest(&bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Accuracy on `data` of every prefix of the ensemble.
pub fn prefix_accuracies<T: Real>(model: &EnsembleModel<T>, data: &LabeledDataset<T>) -> Vec<f64> {
    let mut scores = vec![T::zero(); data.len()];
    model
        .rounds()
        .iter()
        .map(|round| {
            let mut correct = 0usize;
            for (i, (x, y)) in data.iter().enumerate() {
                scores[i] = scores[i] + round.margins[round.hypothesis.assign(x)];
                if crate::model::Label::from_score(scores[i]) == y {
                    correct += 1;
                }
            }
            correct as f64 / data.len() as f64
        })
        .collect()
}
