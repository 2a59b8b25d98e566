//! Independent reimplementations checked against the library. The
//! references use plain loops over `f64` and share no helpers with the
//! code under test.

#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use qboost_core::classical::{adaboost_train, realboost_train, ClassicalConfig};
use qboost_core::quantum::{iqae_estimate, ClosedFormOracle, EstimationConfig};
use qboost_core::rng::{stream, Purpose};
use qboost_core::{partition_weights, Dataset, Hypothesis, LearnerConfig, Model, Smoothing, Weights};

fn dataset(xs: &[(f64, f64)], ys: &[bool]) -> Dataset {
    let samples = xs.iter().map(|&(a, b)| vec![a, b]).collect();
    let signs: Vec<i8> = ys.iter().map(|&p| if p { 1 } else { -1 }).collect();
    Dataset::from_signs(samples, &signs).unwrap()
}

fn points() -> impl Strategy<Value = (Vec<(f64, f64)>, Vec<bool>)> {
    (2usize..20).prop_flat_map(|m| {
        (
            prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), m),
            prop::collection::vec(any::<bool>(), m),
        )
    })
}

/// `[j][0]` is the positive mass of partition `j`, `[j][1]` the negative.
fn ref_table(data: &Dataset, w: &[f64], h: &Hypothesis) -> Vec<[f64; 2]> {
    let c = h.num_partitions();
    let mut out = vec![[0.0; 2]; c];
    for (j, cell) in out.iter_mut().enumerate() {
        for (b, slot) in cell.iter_mut().enumerate() {
            for i in 0..data.len() {
                let positive = data.label(i).as_i8() == 1;
                if h.assign(data.sample(i)) == j && positive == (b == 0) {
                    *slot += w[i];
                }
            }
        }
    }
    out
}

/// Replays RealBoost over the model's own hypotheses. Returns the margins
/// and normalizers of every round.
fn ref_realboost(data: &Dataset, model: &Model, smoothing: Smoothing) -> Vec<(Vec<f64>, f64)> {
    let m = data.len();
    let mut d = vec![1.0 / m as f64; m];
    let mut out = Vec::new();
    for round in model.rounds() {
        let h = &round.hypothesis;
        let c = h.num_partitions();
        let mut t = ref_table(data, &d, h);
        let degenerate = t.iter().any(|cell| cell[0] == 0.0 || cell[1] == 0.0);
        if smoothing == Smoothing::Always || degenerate {
            for cell in &mut t {
                for v in cell.iter_mut() {
                    *v = (*v * m as f64 + 1.0) / (m + 2 * c) as f64;
                }
            }
        }
        let beta: Vec<f64> = t.iter().map(|cell| 0.5 * (cell[0] / cell[1]).ln()).collect();
        let mut next = vec![0.0; m];
        let mut z = 0.0;
        for i in 0..m {
            let y = data.label(i).as_i8() as f64;
            next[i] = d[i] * (-beta[h.assign(data.sample(i))] * y).exp();
            z += next[i];
        }
        for v in &mut next {
            *v /= z;
        }
        d = next;
        out.push((beta, z));
    }
    out
}

/// Replays AdaBoost over the model's hypotheses; returns the weighted error
/// and α of every round.
fn ref_adaboost(data: &Dataset, model: &Model) -> Vec<(f64, f64)> {
    let m = data.len();
    let mut d = vec![1.0 / m as f64; m];
    let mut out = Vec::new();
    for round in model.rounds() {
        let h = &round.hypothesis;
        let t = ref_table(data, &d, h);
        // near ties are decided by rounding, so follow the library there
        let labels: Vec<f64> = t
            .iter()
            .zip(&round.margins)
            .map(|(cell, &b)| {
                let positive = if (cell[0] - cell[1]).abs() < 1e-12 {
                    b >= 0.0
                } else {
                    cell[0] >= cell[1]
                };
                if positive {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let mut err = 0.0;
        for i in 0..m {
            if labels[h.assign(data.sample(i))] != data.label(i).as_i8() as f64 {
                err += d[i];
            }
        }
        let e = err.clamp(1.0 / (2.0 * m as f64), 1.0 - 1.0 / (2.0 * m as f64));
        let alpha = 0.5 * ((1.0 - e) / e).ln();
        let mut z = 0.0;
        for i in 0..m {
            let y = data.label(i).as_i8() as f64;
            d[i] *= (-alpha * labels[h.assign(data.sample(i))] * y).exp();
            z += d[i];
        }
        for v in &mut d {
            *v /= z;
        }
        out.push((err, alpha));
    }
    out
}

proptest! {
    #[test]
    fn partition_weights_match_triple_loop(
        (xs, ys) in points(),
        feature in 0usize..2,
        threshold in -5.0f64..5.0,
        raw in prop::collection::vec(0.0f64..1.0, 20),
    ) {
        let data = dataset(&xs, &ys);
        let w = Weights::new(raw[..data.len()].to_vec(), 0.0).unwrap();
        let h = Hypothesis::stump(feature, threshold);
        let got = partition_weights(&data, &w, &h).unwrap();
        let want = ref_table(&data, w.as_slice(), &h);
        for j in 0..2 {
            prop_assert!((got.plus[j] - want[j][0]).abs() < 1e-12);
            prop_assert!((got.minus[j] - want[j][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn realboost_matches_reference((xs, ys) in points(), seed in 0u64..1000, kmeans in any::<bool>(), always in any::<bool>()) {
        let data = dataset(&xs, &ys);
        let learner = if kmeans && data.len() >= 3 { LearnerConfig::kmeans(3, seed) } else { LearnerConfig::stump() };
        let smoothing = if always { Smoothing::Always } else { Smoothing::WhenDegenerate };
        let cfg = ClassicalConfig { smoothing, ..ClassicalConfig::with_rounds(8, seed) };
        let (model, rec) = realboost_train(&data, &learner, &cfg).unwrap();
        let reference = ref_realboost(&data, &model, smoothing);
        for ((round, r), (beta, z)) in model.rounds().iter().zip(&rec.rounds).zip(&reference) {
            for (a, b) in round.margins.iter().zip(beta) {
                prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
            prop_assert!((r.normalizer - z).abs() < 1e-9);
            prop_assert!((r.weight_sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn adaboost_matches_reference((xs, ys) in points(), seed in 0u64..1000) {
        let data = dataset(&xs, &ys);
        let (model, rec) = adaboost_train(&data, &LearnerConfig::stump(), &ClassicalConfig::with_rounds(8, seed)).unwrap();
        let reference = ref_adaboost(&data, &model);
        for ((round, r), (err, alpha)) in model.rounds().iter().zip(&rec.rounds).zip(&reference) {
            prop_assert!((r.weighted_error - err).abs() < 1e-9);
            let max = round.margins.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            prop_assert!((max - alpha.abs()).abs() < 1e-9);
            prop_assert!(alpha.is_finite());
        }
    }
}

#[test]
fn iqae_interval_covers_truth() {
    let cfg = EstimationConfig::relative(0.1, 0.05);
    for (n, a) in [0.03, 0.2, 0.45, 0.7, 0.95].into_iter().enumerate() {
        let mut covered = 0;
        for t in 0..200u64 {
            let mut rng = stream(t, Purpose::Calibration, &[n as u64]);
            let est = iqae_estimate(&mut ClosedFormOracle::new(a), &cfg, &mut rng).unwrap();
            assert!(est.lower <= est.value && est.value <= est.upper);
            if est.lower <= a && a <= est.upper {
                covered += 1;
            }
        }
        assert!(covered >= 190, "a={a}: {covered}/200");
    }
}
