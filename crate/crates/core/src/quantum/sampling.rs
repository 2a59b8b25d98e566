use rand::Rng;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// How a measured batch is drawn from a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SamplingMode {
    /// `q` i.i.d. draws with probability `w_i / Σw`.
    Proportional,
    /// `q · shots_per_sample` draws; the `q` most frequent indices win.
    TopFrequency { shots_per_sample: usize },
}

impl SamplingMode {
    pub fn top() -> Self {
        SamplingMode::TopFrequency { shots_per_sample: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleOutcome {
    pub indices: Vec<usize>,
    /// Top-frequency request asked for more indices than exist.
    pub truncated: bool,
}

fn draw<R: Rng + ?Sized>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().expect("nonempty");
    let u = rng.random::<f64>() * total;
    // first index whose cumulative weight exceeds u
    let i = cumulative.partition_point(|&c| c <= u);
    i.min(cumulative.len() - 1)
}

/// Simulates measuring the index register of `Σ_i sqrt(w_i)|i>`.
pub fn sample_indices<T: Real, R: Rng + ?Sized>(
    weights: &[T],
    q: usize,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<SampleOutcome> {
    if q == 0 {
        return invalid("sample count must be positive");
    }
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0f64;
    for &w in weights {
        let w = w.as_f64();
        if !(w >= 0.0) {
            return invalid("weights must be nonnegative");
        }
        acc += w;
        cumulative.push(acc);
    }
    if !(acc > 0.0) {
        return invalid("cannot sample from a zero weight vector");
    }

    match mode {
        SamplingMode::Proportional => Ok(SampleOutcome {
            indices: (0..q).map(|_| draw(&cumulative, rng)).collect(),
            truncated: false,
        }),
        SamplingMode::TopFrequency { shots_per_sample } => {
            if shots_per_sample == 0 {
                return invalid("shots_per_sample must be positive");
            }
            let mut counts = vec![0usize; weights.len()];
            for _ in 0..q * shots_per_sample {
                counts[draw(&cumulative, rng)] += 1;
            }
            let mut order: Vec<usize> = (0..weights.len()).collect();
            order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
            let truncated = q > weights.len();
            order.truncate(q);
            Ok(SampleOutcome {
                indices: order,
                truncated,
            })
        }
    }
}
