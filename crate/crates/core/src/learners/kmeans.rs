use rand::seq::SliceRandom;

use super::{nearest, LearnerConfig, Partitioner};
use crate::error::{invalid, Result};
use crate::model::LabeledDataset;
use crate::rng::{stream, Purpose};
use crate::scalar::Real;

/// Unweighted Lloyd's iterations on the batch. The first centroid is a
/// seeded pick from the batch and each further one is the point farthest
/// from those chosen so far; an empty cluster is re-seeded the same way.
pub fn train_kmeans_partitioner<T: Real>(batch: &LabeledDataset<T>, cfg: &LearnerConfig) -> Result<Partitioner<T>> {
    let k = cfg.k;
    if k < 2 {
        return invalid("k-means needs k >= 2");
    }
    if batch.len() < k {
        return invalid(format!("batch of {} samples is smaller than k = {k}", batch.len()));
    }

    let mut order: Vec<usize> = (0..batch.len()).collect();
    order.shuffle(&mut stream(cfg.seed, Purpose::Learner, &[batch.len() as u64]));
    let points = batch.samples();
    let mut centroids: Vec<Vec<T>> = vec![points[order[0]].clone()];
    while centroids.len() < k {
        let far = farthest_point(points, &centroids);
        if nearest(&centroids, &points[far]).1 == T::zero() {
            break;
        }
        centroids.push(points[far].clone());
    }
    let collapsed = centroids.len() < k;
    let c = centroids.len();

    let mut assignment: Vec<usize> = points.iter().map(|x| nearest(&centroids, x).0).collect();
    for _ in 0..cfg.max_iters {
        let dim = batch.dim();
        let mut sums = vec![vec![T::zero(); dim]; c];
        let mut counts = vec![0usize; c];
        for (x, &j) in points.iter().zip(&assignment) {
            counts[j] += 1;
            for (s, &v) in sums[j].iter_mut().zip(x) {
                *s = *s + v;
            }
        }
        for j in 0..c {
            if counts[j] > 0 {
                let n = T::from_usize_lossy(counts[j]);
                centroids[j] = sums[j].iter().map(|&s| s / n).collect();
            } else {
                let far = farthest_point(points, &centroids);
                centroids[j] = points[far].clone();
            }
        }
        let next: Vec<usize> = points.iter().map(|x| nearest(&centroids, x).0).collect();
        let stable = next == assignment;
        assignment = next;
        if stable && counts.iter().all(|&n| n > 0) {
            break;
        }
    }

    Ok(Partitioner::Centroids { centroids, collapsed })
}

fn farthest_point<T: Real>(points: &[Vec<T>], centroids: &[Vec<T>]) -> usize {
    let mut best = (0, -T::one());
    for (i, x) in points.iter().enumerate() {
        let d = nearest(centroids, x).1;
        if d > best.1 {
            best = (i, d);
        }
    }
    best.0
}
