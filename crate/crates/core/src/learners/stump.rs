use super::Partitioner;
use crate::error::{invalid, Result};
use crate::model::{Label, LabeledDataset};
use crate::scalar::Real;

/// Batch error of a stump when each side predicts its majority label.
pub fn stump_batch_error<T: Real>(batch: &LabeledDataset<T>, feature: usize, threshold: T) -> usize {
    let mut counts = [[0usize; 2]; 2];
    for (x, y) in batch.iter() {
        let side = usize::from(x[feature] >= threshold);
        counts[side][y.column()] += 1;
    }
    counts.iter().map(|c| c[0].min(c[1])).sum()
}

/// Exhaustive single-feature threshold search. Candidate cuts are midpoints
/// between consecutive distinct values; the winner minimizes the batch error
/// under per-side majority labels, ties going to the lowest feature and then
/// the lowest threshold.
pub fn train_stump<T: Real>(batch: &LabeledDataset<T>) -> Result<Partitioner<T>> {
    if batch.is_empty() {
        return invalid("cannot train a stump on an empty batch");
    }
    let m = batch.len();
    let two = T::lit(2.0);
    let mut best: Option<(usize, usize, T)> = None;

    let mut order: Vec<usize> = (0..m).collect();
    for f in 0..batch.dim() {
        order.sort_by(|&a, &b| {
            batch.sample(a)[f]
                .partial_cmp(&batch.sample(b)[f])
                .expect("finite features")
        });
        let total_pos = batch.labels().iter().filter(|&&l| l == Label::Positive).count();
        let total_neg = m - total_pos;
        let (mut left_pos, mut left_neg) = (0usize, 0usize);
        for w in 0..m - 1 {
            match batch.label(order[w]) {
                Label::Positive => left_pos += 1,
                Label::Negative => left_neg += 1,
            }
            let lo = batch.sample(order[w])[f];
            let hi = batch.sample(order[w + 1])[f];
            if hi <= lo {
                continue;
            }
            let err = left_pos.min(left_neg) + (total_pos - left_pos).min(total_neg - left_neg);
            let threshold = lo + (hi - lo) / two;
            // strictly better only: earlier features and lower cuts keep ties
            if best.is_none_or(|(e, _, _)| err < e) {
                best = Some((err, f, threshold));
            }
        }
    }

    Ok(match best {
        Some((_, feature, threshold)) => Partitioner::stump(feature, threshold),
        // every feature constant: one occupied side
        None => Partitioner::stump(0, batch.sample(0)[0]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64], ys: &[i8]) -> LabeledDataset<f64> {
        LabeledDataset::from_signs(xs.iter().map(|&x| vec![x]).collect(), ys).unwrap()
    }

    /// Every possible cut, including ones outside the data range.
    fn brute_force_best_error(batch: &LabeledDataset<f64>) -> usize {
        let mut cuts: Vec<f64> = vec![f64::NEG_INFINITY, f64::INFINITY];
        for f in 0..batch.dim() {
            for i in 0..batch.len() {
                let v = batch.sample(i)[f];
                cuts.extend([v, v + 1e-9, v - 1e-9]);
            }
        }
        let mut best = usize::MAX;
        for f in 0..batch.dim() {
            for &c in &cuts {
                best = best.min(stump_batch_error(batch, f, c));
            }
        }
        best
    }

    #[test]
    fn separable_line_cuts_at_zero() {
        let batch = line(&[-1.0, -0.5, 0.5, 1.0], &[-1, -1, 1, 1]);
        let h = train_stump(&batch).unwrap();
        assert_eq!(h, Partitioner::stump(0, 0.0));
        assert_eq!(stump_batch_error(&batch, 0, 0.0), 0);
    }

    #[test]
    fn constant_labels_zero_error() {
        let batch = line(&[0.0, 1.0, 2.0], &[1, 1, 1]);
        let h = train_stump(&batch).unwrap();
        let Partitioner::Stump { feature, threshold } = h else {
            panic!()
        };
        assert_eq!(stump_batch_error(&batch, feature, threshold), 0);
        assert_eq!(threshold, 0.5);
    }

    #[test]
    fn alternating_labels_best_error_quarter() {
        let batch = line(&[1.0, 2.0, 3.0, 4.0], &[-1, 1, -1, 1]);
        let oracle = brute_force_best_error(&batch);
        assert_eq!(oracle, 1);
        let Partitioner::Stump { feature, threshold } = train_stump(&batch).unwrap() else {
            panic!()
        };
        let err = stump_batch_error(&batch, feature, threshold);
        assert_eq!(err, oracle);
        assert_eq!(err as f64 / 4.0, 0.25);
        // lowest threshold wins the tie
        assert_eq!(threshold, 1.5);
    }

    #[test]
    fn matches_brute_force_on_small_grids() {
        // all 2^6 labelings of a fixed 2-D point set
        let pts = [[0.0, 3.0], [1.0, 1.0], [2.0, 5.0], [3.0, 0.0], [4.0, 4.0], [5.0, 2.0]];
        for mask in 0u32..64 {
            let ys: Vec<i8> = (0..6).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
            let batch = LabeledDataset::from_signs(pts.iter().map(|p| p.to_vec()).collect(), &ys).unwrap();
            let Partitioner::Stump { feature, threshold } = train_stump(&batch).unwrap() else {
                panic!()
            };
            assert_eq!(
                stump_batch_error(&batch, feature, threshold),
                brute_force_best_error(&batch),
                "mask {mask}"
            );
        }
    }

    #[test]
    fn constant_features_fall_back() {
        let batch = line(&[2.0, 2.0], &[1, -1]);
        let h = train_stump(&batch).unwrap();
        assert_eq!(h.num_partitions(), 2);
        assert_eq!(h.assign(&[2.0]), 1);
    }
}
