//! Executable checks of the convergence and approximation bounds over run
//! records, and closed-form calculators for iteration count, sample size
//! and query cost.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, BoostError, Result};
use crate::qboost::weight_sum_lower_bound;
use crate::record::{Algorithm, RoundRecord, RunRecord};

/// Additive slack on every analytic bound.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    /// Sub-normalized weight sum interval.
    C1,
    /// Margin deviation.
    C3,
    /// Normalizer deviation.
    C4,
    /// Zero training error past the iteration threshold.
    C5,
    /// Training error bounded by the product of normalizers.
    TA5,
    /// Overlap with the exact update.
    Overlap,
}

impl ClaimId {
    pub const ALL: [ClaimId; 6] = [
        ClaimId::C1,
        ClaimId::C3,
        ClaimId::C4,
        ClaimId::C5,
        ClaimId::TA5,
        ClaimId::Overlap,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClaimId::C1 => "C1",
            ClaimId::C3 => "C3",
            ClaimId::C4 => "C4",
            ClaimId::C5 => "C5",
            ClaimId::TA5 => "T-A5",
            ClaimId::Overlap => "overlap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub id: ClaimId,
    pub passed: bool,
    /// Rounds (or prefixes) the inequality was evaluated on.
    pub checked: usize,
    /// Not applicable to this record.
    pub skipped: bool,
    /// Smallest `bound - value` seen; negative means violated.
    pub worst_slack: f64,
    pub worst_round: Option<usize>,
    pub notes: String,
}

impl ClaimReport {
    fn new(id: ClaimId) -> Self {
        Self {
            id,
            passed: true,
            checked: 0,
            skipped: false,
            worst_slack: f64::INFINITY,
            worst_round: None,
            notes: String::new(),
        }
    }

    fn skipped(id: ClaimId, notes: impl Into<String>) -> Self {
        Self {
            skipped: true,
            notes: notes.into(),
            ..Self::new(id)
        }
    }

    /// Records `bound - value` for `round`.
    fn observe(&mut self, round: usize, slack: f64) {
        self.checked += 1;
        let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        if slack < self.worst_slack || self.worst_round.is_none() {
            self.worst_slack = slack;
            self.worst_round = Some(round);
        }
        if slack < -SLACK {
            self.passed = false;
        }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes = s.into();
        self
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.skipped {
            "SKIP"
        } else if self.passed {
            "PASS"
        } else {
            "FAIL"
        };
        write!(f, "{:<8}{status} checked={}", self.id.label(), self.checked)?;
        if let Some(r) = self.worst_round {
            write!(f, " worst_slack={:.3e} round={r}", self.worst_slack)?;
        }
        if !self.notes.is_empty() {
            write!(f, " notes=\"{}\"", self.notes)?;
        }
        Ok(())
    }
}

pub fn all_passed(reports: &[ClaimReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

fn literal_kappa(record: &RunRecord) -> bool {
    record.header.config["boost"]["kappa_scaling"].as_str() == Some("literal")
}

fn check_c1(record: &RunRecord, eps: f64) -> ClaimReport {
    if literal_kappa(record) {
        return ClaimReport::skipped(ClaimId::C1, "literal kappa scaling keeps sums near 1/C");
    }
    let lower = weight_sum_lower_bound(eps);
    let mut rep = ClaimReport::new(ClaimId::C1);
    for r in &record.rounds {
        rep.observe(r.round, (r.weight_sum - lower).min(1.0 - r.weight_sum));
    }
    rep
}

fn shadow_claims(record: &RunRecord, eps: f64) -> Result<[ClaimReport; 3]> {
    let mut c3 = ClaimReport::new(ClaimId::C3);
    let mut c4 = ClaimReport::new(ClaimId::C4);
    let mut ov = ClaimReport::new(ClaimId::Overlap);
    let margin_bound = 0.5 * ((1.0 + eps) / (1.0 - eps)).ln();
    let overlap_bound = ((1.0 - eps) / (1.0 + eps)).powf(0.75);
    for r in &record.rounds {
        let s = r
            .shadow
            .as_ref()
            .ok_or_else(|| BoostError::IncompleteRecord(format!("round {} has no exact shadow", r.round)))?;
        if s.margins.len() != r.margins.len() {
            return Err(BoostError::IncompleteRecord(format!(
                "round {}: {} shadow margins for {} partitions",
                r.round,
                s.margins.len(),
                r.margins.len()
            )));
        }
        let dev = r
            .margins
            .iter()
            .zip(&s.margins)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c3.observe(r.round, margin_bound - dev);
        c4.observe(r.round, eps * s.z - (r.z - s.z).abs());
        ov.observe(r.round, s.overlap - overlap_bound);
    }
    Ok([c3, c4, ov])
}

fn check_c5(record: &RunRecord) -> Result<ClaimReport> {
    let m = record.header.train_size.max(1);
    let mut rep = ClaimReport::new(ClaimId::C5)
        .note("zero training error once t >= ceil(ln M / (2 gamma_min^2)); the C^T factor is not used");
    let mut gamma_min = f64::INFINITY;
    let mut last_threshold = None;
    for r in &record.rounds {
        gamma_min = gamma_min.min(r.gamma);
        if !(gamma_min > 0.0) {
            continue;
        }
        let threshold = iteration_threshold(m, gamma_min.min(0.5))?;
        last_threshold = Some(threshold);
        if r.round >= threshold {
            rep.observe(r.round, -(1.0 - r.train_accuracy));
        }
    }
    if rep.checked == 0 {
        rep.skipped = true;
        rep.notes = match last_threshold {
            Some(t) => format!("threshold {t} not reached in {} rounds", record.rounds.len()),
            None => "no round with a positive edge".into(),
        };
    }
    Ok(rep)
}

fn check_ta5(rounds: &[RoundRecord]) -> ClaimReport {
    let mut rep = ClaimReport::new(ClaimId::TA5);
    let mut prod_norm = 1.0f64;
    for r in rounds {
        prod_norm *= r.kappa * r.normalizer;
        let err = 1.0 - r.train_accuracy;
        let edge = (1.0 - 4.0 * r.gamma * r.gamma).max(0.0).sqrt();
        let per_round = [
            prod_norm * (1.0 + SLACK) - err,
            edge - r.z_raw,
            (-2.0 * r.gamma * r.gamma).exp() - edge,
        ];
        let worst = per_round.iter().copied().fold(f64::INFINITY, f64::min);
        rep.observe(r.round, worst);
    }
    rep.note("err <= prod(kappa*normalizer); z <= sqrt(1-4g^2) <= exp(-2g^2) per round")
}

/// Evaluates every applicable bound on `record` at relative error
/// `epsilon`.
pub fn check_claims(record: &RunRecord, epsilon: f64) -> Result<Vec<ClaimReport>> {
    if !(0.0..1.0).contains(&epsilon) {
        return invalid(format!("epsilon {epsilon} must lie in [0, 1)"));
    }
    if record.rounds.is_empty() {
        return Err(BoostError::IncompleteRecord("record has no rounds".into()));
    }
    let mut out = vec![check_c1(record, epsilon)];
    if record.algorithm() == Algorithm::QRealBoost {
        out.extend(shadow_claims(record, epsilon)?);
    } else {
        for id in [ClaimId::C3, ClaimId::C4, ClaimId::Overlap] {
            out.push(ClaimReport::skipped(id, "no estimated margins in this algorithm"));
        }
    }
    out.push(check_c5(record)?);
    out.push(check_ta5(&record.rounds));
    out.sort_by_key(|r| ClaimId::ALL.iter().position(|&c| c == r.id));
    Ok(out)
}

/// `⌈ln M / (2γ²)⌉`.
pub fn iteration_threshold(m: usize, gamma: f64) -> Result<usize> {
    if m == 0 {
        return invalid("M must be at least 1");
    }
    if !(gamma > 0.0 && gamma <= 0.5) {
        return invalid(format!("gamma {gamma} must lie in (0, 1/2]"));
    }
    Ok(((m as f64).ln() / (2.0 * gamma * gamma)).ceil() as usize)
}

/// `d_H / (γ² η²)`, the dominant term up to polylog factors.
pub fn sample_size_bound(d_h: usize, gamma: f64, eta: f64) -> Result<f64> {
    if d_h == 0 || !(gamma > 0.0) || !(eta > 0.0) {
        return invalid("d_H, gamma and eta must be positive");
    }
    Ok(d_h as f64 / (gamma * gamma * eta * eta))
}

/// `sqrt(M) · C · Q · T⁴ · ln T`, the dominant query-count term.
pub fn query_cost_estimate(m: usize, c: usize, q: usize, t: usize) -> Result<f64> {
    if m == 0 || c == 0 || q == 0 {
        return invalid("M, C and Q must be positive");
    }
    if t < 2 {
        return invalid("T must be at least 2");
    }
    let t = t as f64;
    Ok((m as f64).sqrt() * c as f64 * q as f64 * t.powi(4) * t.ln())
}

/// The query cost written in terms of the edge: `sqrt(M)·C·Q/γ⁸` with `M`
/// fixed, and `sqrt(d_H)·C·Q/γ⁹` once `M` itself is set from the sample
/// size bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCostForms {
    pub fixed_m: f64,
    pub via_sample_size: f64,
}

pub fn query_cost_gamma_forms(m: usize, d_h: usize, c: usize, q: usize, gamma: f64) -> Result<GammaCostForms> {
    if m == 0 || d_h == 0 || c == 0 || q == 0 || !(gamma > 0.0) {
        return invalid("M, d_H, C, Q and gamma must be positive");
    }
    let cq = c as f64 * q as f64;
    Ok(GammaCostForms {
        fixed_m: (m as f64).sqrt() * cq / gamma.powi(8),
        via_sample_size: (d_h as f64).sqrt() * cq / gamma.powi(9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{realboost_train, ClassicalConfig};
    use crate::learners::LearnerConfig;
    use crate::model::LabeledDataset;
    use crate::qboost::{qrealboost_train, Estimator, QBoostConfig};

    fn line(m: usize) -> LabeledDataset<f64> {
        let xs: Vec<Vec<f64>> = (0..m).map(|i| vec![i as f64, ((i * 5) % 7) as f64]).collect();
        let ys: Vec<i8> = (0..m).map(|i| if (i * 3 + 1) % 5 < 2 { 1 } else { -1 }).collect();
        LabeledDataset::from_signs(xs, &ys).unwrap()
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(iteration_threshold(32, 0.2).unwrap(), 44);
        assert_eq!(iteration_threshold(1024, 0.1).unwrap(), 347);
        assert_eq!(iteration_threshold(1, 0.3).unwrap(), 0);
        assert!(iteration_threshold(8, 0.0).is_err());
        assert!(iteration_threshold(8, -0.1).is_err());
    }

    #[test]
    fn sample_size_examples() {
        assert!((sample_size_bound(10, 0.1, 0.1).unwrap() - 1e5).abs() < 1e-6);
        assert_eq!(sample_size_bound(1, 1.0, 1.0).unwrap(), 1.0);
        let a = sample_size_bound(7, 0.2, 0.3).unwrap();
        let b = sample_size_bound(7, 0.2, 0.15).unwrap();
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn query_cost_examples() {
        let v = query_cost_estimate(64, 3, 8, 10).unwrap();
        assert!((v - 8.0 * 3.0 * 8.0 * 1e4 * 10f64.ln()).abs() < 1e-6);
        assert!((v - 4.420e6).abs() / 4.420e6 < 1e-3);
        let d = query_cost_estimate(64, 3, 16, 10).unwrap();
        assert!((d / v - 2.0).abs() < 1e-12);
        assert!(query_cost_estimate(64, 3, 8, 1).is_err());
    }

    #[test]
    fn gamma_forms() {
        let g = query_cost_gamma_forms(64, 10, 3, 8, 0.5).unwrap();
        assert!((g.fixed_m - 8.0 * 24.0 * 256.0).abs() < 1e-9);
        assert!((g.via_sample_size - 10f64.sqrt() * 24.0 * 512.0).abs() < 1e-9);
    }

    #[test]
    fn exact_run_has_zero_deviation() {
        let cfg = QBoostConfig::new(10, Estimator::Exact, 0.0, 1);
        let (_, rec) = qrealboost_train(&line(12), &LearnerConfig::stump(), &cfg).unwrap();
        let reps = check_claims(&rec, 0.0).unwrap();
        assert!(all_passed(&reps), "{reps:?}");
        for r in reps.iter().filter(|r| matches!(r.id, ClaimId::C3 | ClaimId::C4)) {
            assert!(r.worst_slack.abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_run_passes() {
        let cfg = QBoostConfig::new(20, Estimator::Noisy, 0.05, 2);
        let (_, rec) = qrealboost_train(&line(14), &LearnerConfig::stump(), &cfg).unwrap();
        let reps = check_claims(&rec, 0.05).unwrap();
        assert!(all_passed(&reps), "{reps:?}");
        let min_sum = rec.rounds.iter().map(|r| r.weight_sum).fold(1.0, f64::min);
        assert!(min_sum >= 1.0 - 0.2 / 1.05);
    }

    #[test]
    fn forced_sum_violation_fails_c1() {
        let cfg = QBoostConfig::new(5, Estimator::Noisy, 0.01, 3);
        let (_, mut rec) = qrealboost_train(&line(10), &LearnerConfig::stump(), &cfg).unwrap();
        rec.rounds[2].weight_sum = 0.5;
        let reps = check_claims(&rec, 0.01).unwrap();
        let c1 = reps.iter().find(|r| r.id == ClaimId::C1).unwrap();
        assert!(!c1.passed);
        assert_eq!(c1.worst_round, Some(3));
    }

    #[test]
    fn missing_shadow_is_incomplete() {
        let cfg = QBoostConfig::new(3, Estimator::Noisy, 0.01, 3);
        let (_, mut rec) = qrealboost_train(&line(10), &LearnerConfig::stump(), &cfg).unwrap();
        rec.rounds[1].shadow = None;
        assert!(matches!(check_claims(&rec, 0.01), Err(BoostError::IncompleteRecord(_))));
    }

    #[test]
    fn classical_chain_holds() {
        let (_, rec) =
            realboost_train(&line(16), &LearnerConfig::stump(), &ClassicalConfig::with_rounds(15, 0)).unwrap();
        let reps = check_claims(&rec, 0.0).unwrap();
        assert!(all_passed(&reps), "{reps:?}");
    }

    #[test]
    fn report_line_format() {
        let mut r = ClaimReport::new(ClaimId::C4);
        r.observe(3, 0.25);
        let s = r.to_string();
        assert!(s.starts_with("C4"));
        assert!(s.contains("PASS"));
        assert!(s.contains("round=3"));
    }
}
