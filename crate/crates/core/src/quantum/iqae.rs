//! Iterative amplitude estimation with Chernoff–Hoeffding confidence
//! intervals. Each round picks the largest admissible Grover power, measures
//! shots on the amplified state and intersects the resulting interval for
//! the rotation angle `θ = asin(sqrt(a))` with the current one.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use super::amplify::WeightedStatePrep;
use super::state::StateVector;
use crate::error::{invalid, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimationMode {
    /// Stop once the interval width is at most `epsilon · lower`.
    Relative,
    /// Stop once the interval width is at most `epsilon`.
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EstimationConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub max_grover_depth: usize,
    pub shots_per_round: usize,
    pub mode: EstimationMode,
    /// Smallest amplitude the relative-error guarantee is claimed for.
    pub floor: f64,
    pub max_total_shots: u64,
}

impl EstimationConfig {
    pub fn relative(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            max_grover_depth: 4096,
            shots_per_round: 100,
            mode: EstimationMode::Relative,
            floor: 1e-4,
            max_total_shots: 20_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return invalid(format!("epsilon {} must lie in (0, 1)", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return invalid(format!("delta {} must lie in (0, 1)", self.delta));
        }
        if self.shots_per_round == 0 {
            return invalid("shots_per_round must be positive");
        }
        if !(self.floor > 0.0 && self.floor <= 1.0) {
            return invalid("floor must lie in (0, 1]");
        }
        Ok(())
    }
}

/// Success probability of the Grover-powered state `Q^k A|0>`.
pub trait AmplitudeOracle {
    fn good_probability(&mut self, k: usize) -> f64;
}

/// `sin²((2k+1)θ)` directly.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormOracle {
    theta: f64,
}

impl ClosedFormOracle {
    pub fn new(a: f64) -> Self {
        Self {
            theta: a.clamp(0.0, 1.0).sqrt().asin(),
        }
    }
}

impl AmplitudeOracle for ClosedFormOracle {
    fn good_probability(&mut self, k: usize) -> f64 {
        ((2 * k + 1) as f64 * self.theta).sin().powi(2)
    }
}

/// Runs the Grover iterate on an explicit statevector, caching every depth
/// reached so far.
#[derive(Debug, Clone)]
pub struct StatevectorOracle<T: Real> {
    prep: WeightedStatePrep<T>,
    state: StateVector<T>,
    probs: Vec<f64>,
}

impl<T: Real> StatevectorOracle<T> {
    pub fn new(prep: WeightedStatePrep<T>) -> Self {
        let state = prep.prepare();
        let p0 = WeightedStatePrep::good_probability(&state).as_f64();
        Self {
            prep,
            state,
            probs: vec![p0],
        }
    }
}

impl<T: Real> AmplitudeOracle for StatevectorOracle<T> {
    fn good_probability(&mut self, k: usize) -> f64 {
        while self.probs.len() <= k {
            self.prep.grover_iterate(&mut self.state);
            let p = WeightedStatePrep::good_probability(&self.state).as_f64();
            self.probs.push(p);
        }
        self.probs[k].clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AmplitudeEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// False when the interval fell below the floor or a budget ran out
    /// before the width target was met.
    pub reliable: bool,
    pub shots: u64,
    /// Applications of `A` or `A†`, counting `2k+1` per shot at depth `k`.
    pub oracle_calls: u64,
    pub max_depth: usize,
    pub rounds: usize,
}

/// Picks the next Grover power: the largest `K = 4k+2` (at least twice the
/// current one) for which `K·θ_l` and `K·θ_u` fall in the same half-circle.
fn find_next_k(k: usize, up: bool, theta_l: f64, theta_u: f64, max_depth: usize) -> (usize, bool) {
    let k_i = (4 * k + 2) as f64;
    let width = theta_u - theta_l;
    if width <= 0.0 {
        return (k, up);
    }
    let k_cap = (4 * max_depth + 2) as f64;
    let mut big_k = (PI / width).floor().min(k_cap);
    big_k -= (big_k - 2.0).rem_euclid(4.0);
    while big_k >= 2.0 * k_i {
        let lo = (big_k * theta_l).rem_euclid(TAU);
        let hi = (big_k * theta_u).rem_euclid(TAU);
        if lo <= PI && hi <= PI && lo <= hi {
            return (((big_k - 2.0) / 4.0) as usize, true);
        }
        if lo >= PI && hi >= PI && lo <= hi {
            return (((big_k - 2.0) / 4.0) as usize, false);
        }
        big_k -= 4.0;
    }
    (k, up)
}

struct Tally {
    k: usize,
    hits: u64,
    shots: u64,
}

fn log_likelihood(tallies: &[Tally], theta: f64) -> f64 {
    tallies
        .iter()
        .map(|t| {
            let p = ((2 * t.k + 1) as f64 * theta).sin().powi(2);
            let miss = t.shots - t.hits;
            let a = if t.hits > 0 { t.hits as f64 * p.ln() } else { 0.0 };
            let b = if miss > 0 { miss as f64 * (1.0 - p).ln() } else { 0.0 };
            a + b
        })
        .sum()
}

/// Maximum-likelihood angle restricted to `[lo, hi]`.
fn mle_theta(tallies: &[Tally], lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    const GRID: usize = 400;
    let mut best = (lo, log_likelihood(tallies, lo));
    for i in 1..=GRID {
        let th = lo + (hi - lo) * i as f64 / GRID as f64;
        let ll = log_likelihood(tallies, th);
        if ll > best.1 {
            best = (th, ll);
        }
    }
    // golden-section refinement around the grid winner
    let step = (hi - lo) / GRID as f64;
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if log_likelihood(tallies, c) >= log_likelihood(tallies, d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mid = 0.5 * (a + b);
    if log_likelihood(tallies, mid) > best.1 {
        mid
    } else {
        best.0
    }
}

/// Estimates the good-state probability `a` of the oracle's preparation.
///
/// The returned value is the likelihood maximizer inside the final
/// confidence interval, so `|value - a| <= upper - lower` whenever `a` is
/// covered; the stopping rule makes that width at most `epsilon · lower`
/// (relative mode) or `epsilon` (additive mode).
pub fn iqae_estimate<O: AmplitudeOracle, R: Rng + ?Sized>(
    oracle: &mut O,
    cfg: &EstimationConfig,
    rng: &mut R,
) -> Result<AmplitudeEstimate> {
    cfg.validate()?;
    let eps_abs = match cfg.mode {
        EstimationMode::Additive => cfg.epsilon,
        EstimationMode::Relative => cfg.epsilon * cfg.floor,
    };
    let max_rounds = (PI / (8.0 * eps_abs)).log2().ceil().max(1.0);
    let ln_term = (2.0 * max_rounds / cfg.delta).ln();

    let (mut theta_l, mut theta_u) = (0.0f64, FRAC_PI_2);
    let (mut k, mut up) = (0usize, true);
    let mut tallies: Vec<Tally> = Vec::new();
    let mut shots_total = 0u64;
    let mut calls = 0u64;
    let mut rounds = 0usize;
    let mut max_depth = 0usize;

    let reliable = loop {
        let (a_l, a_u) = (theta_l.sin().powi(2), theta_u.sin().powi(2));
        let width = a_u - a_l;
        let done = match cfg.mode {
            EstimationMode::Additive => width <= cfg.epsilon,
            EstimationMode::Relative => width <= cfg.epsilon * a_l,
        };
        if done {
            break true;
        }
        if a_u < cfg.floor || shots_total >= cfg.max_total_shots {
            break false;
        }

        let (next_k, next_up) = find_next_k(k, up, theta_l, theta_u, cfg.max_grover_depth);
        let same_depth = next_k == k && !tallies.is_empty();
        k = next_k;
        up = next_up;
        max_depth = max_depth.max(k);
        rounds += 1;

        let p = oracle.good_probability(k);
        let n = cfg.shots_per_round as u64;
        let hits = (0..n).filter(|_| rng.random::<f64>() < p).count() as u64;
        shots_total += n;
        calls += n * (2 * k as u64 + 1);
        if same_depth {
            let last = tallies.last_mut().expect("nonempty");
            last.hits += hits;
            last.shots += n;
        } else {
            tallies.push(Tally { k, hits, shots: n });
        }

        let last = tallies.last().expect("nonempty");
        let a_hat = last.hits as f64 / last.shots as f64;
        let eps_a = (ln_term / (2.0 * last.shots as f64)).sqrt();
        let a_max = (a_hat + eps_a).min(1.0);
        let a_min = (a_hat - eps_a).max(0.0);
        let (lo_i, hi_i) = if up {
            ((1.0 - 2.0 * a_min).acos(), (1.0 - 2.0 * a_max).acos())
        } else {
            (TAU - (1.0 - 2.0 * a_max).acos(), TAU - (1.0 - 2.0 * a_min).acos())
        };
        let big_k = (4 * k + 2) as f64;
        let base = TAU * (big_k * theta_l / TAU).floor();
        let new_l = (base + lo_i) / big_k;
        let new_u = (base + hi_i) / big_k;
        let (l, u) = (theta_l.max(new_l), theta_u.min(new_u));
        if l <= u {
            theta_l = l;
            theta_u = u;
        } else {
            theta_l = new_l.clamp(0.0, FRAC_PI_2);
            theta_u = new_u.clamp(theta_l, FRAC_PI_2);
        }
    };

    let theta = if tallies.is_empty() {
        0.5 * (theta_l + theta_u)
    } else {
        mle_theta(&tallies, theta_l, theta_u)
    };
    Ok(AmplitudeEstimate {
        value: theta.sin().powi(2),
        lower: theta_l.sin().powi(2),
        upper: theta_u.sin().powi(2),
        reliable,
        shots: shots_total,
        oracle_calls: calls,
        max_depth,
        rounds,
    })
}
