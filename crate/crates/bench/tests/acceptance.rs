//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances are pinned below.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qboost_bench::report::mean_std;
use qboost_core::classical::{adaboost_train, realboost_round, realboost_train, BoostState, ClassicalConfig};
use qboost_core::qboost::{qrealboost_train, qrealboost_train_observed, Estimator, QBoostConfig};
use qboost_core::quantum::{grover_amplify, iqae_estimate, EstimationConfig, StatevectorOracle, WeightedStatePrep};
use qboost_core::rng::{stream, Purpose};
use qboost_core::verify::{check_claims, iteration_threshold, query_cost_estimate, sample_size_bound, ClaimId};
use qboost_core::{Algorithm, Dataset, LearnerConfig, RunRecord, Smoothing};
use rand::Rng;

const TOL: f64 = 1e-9;
const AMP_TOL: f64 = 1e-8;
const EQUIV_BUDGET: Duration = Duration::from_secs(10);
const IQAE_BUDGET: Duration = Duration::from_secs(120);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Random 2-D data with a noisy linear signal; both labels present.
fn random_dataset(seed: u64, m: usize) -> Dataset {
    let mut rng = stream(seed, Purpose::Subset, &[m as u64, 77]);
    loop {
        let xs: Vec<Vec<f64>> = (0..m).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
        let ys: Vec<i8> = xs
            .iter()
            .map(|x| {
                if x[0] + x[1] + 0.6 * (rng.random::<f64>() - 0.5) > 1.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        if ys.contains(&1) && ys.contains(&-1) {
            return Dataset::from_signs(xs, &ys).unwrap();
        }
    }
}

/// Learner with at most three partitions, varied by `i`.
fn small_learner(i: u64) -> LearnerConfig {
    match i % 3 {
        0 => LearnerConfig::stump(),
        1 => LearnerConfig::kmeans(2, i),
        _ => LearnerConfig::kmeans(3, i),
    }
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut max_d, mut max_b) = (0.0f64, 0.0f64);
    for i in 0..10u64 {
        let mut rng = stream(i, Purpose::Calibration, &[1]);
        let m = rng.random_range(6..=16);
        let data = random_dataset(100 + i, m);
        let learner = small_learner(i);
        for smoothing in [Smoothing::WhenDegenerate, Smoothing::Always] {
            let ccfg = ClassicalConfig {
                smoothing,
                ..ClassicalConfig::with_rounds(20, i)
            };
            let mut state = BoostState::new(&data, Algorithm::RealBoost, serde_json::Value::Null, i).unwrap();
            let mut classical = Vec::new();
            for _ in 0..20 {
                state = realboost_round(state, &data, &learner, &ccfg).unwrap();
                classical.push(state.weights.as_slice().to_vec());
            }
            let qcfg = QBoostConfig {
                smoothing,
                q: Some(m),
                ..QBoostConfig::new(20, Estimator::Exact, 0.0, i)
            };
            let mut quantum = Vec::new();
            let (qmodel, _) =
                qrealboost_train_observed(&data, &learner, &qcfg, |_, w| quantum.push(w.as_slice().to_vec())).unwrap();
            for (a, b) in classical.iter().zip(&quantum) {
                for (x, y) in a.iter().zip(b) {
                    max_d = max_d.max((x - y).abs());
                }
            }
            for (a, b) in state.model.rounds().iter().zip(qmodel.rounds()) {
                for (x, y) in a.margins.iter().zip(&b.margins) {
                    max_b = max_b.max((x - y).abs());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        max_d <= TOL && max_b <= TOL && elapsed < EQUIV_BUDGET,
        format!(
            "10 datasets x 2 smoothing policies, T=20: max|dD|={max_d:.2e} max|dbeta|={max_b:.2e} in {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// 100 noisy runs shared by criteria 2 to 5.
fn noisy_suite() -> Vec<(f64, RunRecord)> {
    (0..100u64)
        .map(|i| {
            let eps = [0.01, 0.05, 0.1][(i % 3) as usize];
            let mut rng = stream(i, Purpose::Calibration, &[2]);
            let m = rng.random_range(4..=16);
            let data = random_dataset(500 + i, m);
            let cfg = QBoostConfig::new(20, Estimator::Noisy, eps, i);
            let (_, rec) = qrealboost_train(&data, &small_learner(i), &cfg).unwrap();
            (eps, rec)
        })
        .collect()
}

fn claim_suite(runs: &[(f64, RunRecord)], id: ClaimId) -> Outcome {
    let mut passed = 0;
    let mut worst = f64::INFINITY;
    for (eps, rec) in runs {
        let reps = check_claims(rec, *eps).unwrap();
        let r = reps.iter().find(|r| r.id == id).unwrap();
        if r.passed && !r.skipped {
            passed += 1;
        }
        worst = worst.min(r.worst_slack);
    }
    let extra = match id {
        ClaimId::C1 => {
            let min_sum = runs
                .iter()
                .flat_map(|(_, r)| r.rounds.iter().map(|x| x.weight_sum))
                .fold(f64::INFINITY, f64::min);
            format!(", min weight sum {min_sum:.5}")
        }
        ClaimId::C3 => format!(", bound at eps=0.1 is {:.5}", 0.5 * (1.1f64 / 0.9).ln()),
        _ => String::new(),
    };
    outcome(
        passed == runs.len(),
        format!("{passed}/{} runs pass, worst slack {worst:.3e}{extra}", runs.len()),
    )
}

fn separable8(seed: u64) -> Dataset {
    let mut rng = stream(seed, Purpose::Subset, &[8, 6]);
    let mut xs: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = rng.random_range(1..8);
    let ys: Vec<i8> = (0..8).map(|i| if i >= cut { 1 } else { -1 }).collect();
    Dataset::from_signs(xs.into_iter().map(|x| vec![x]).collect(), &ys).unwrap()
}

/// The first round `t` with `t >= iteration_threshold(M, γ_min(1..t))`,
/// the edge at that point, and whether training error is zero there.
/// The run passes when that edge is at least 0.2 and the error is zero.
fn converges(rec: &RunRecord) -> (bool, f64, usize) {
    let m = rec.header.train_size;
    let mut gamma_min = f64::INFINITY;
    for r in &rec.rounds {
        gamma_min = gamma_min.min(r.gamma);
        if gamma_min <= 0.0 {
            return (false, gamma_min, 0);
        }
        let t = iteration_threshold(m, gamma_min.min(0.5)).unwrap();
        if r.round >= t {
            return (gamma_min >= 0.2 && r.train_accuracy == 1.0, gamma_min, r.round);
        }
    }
    (false, gamma_min, rec.rounds.len())
}

fn c6_convergence() -> Outcome {
    const T: usize = 30;
    // learner sample complexity: enough draws that a batch almost never
    // holds a single class, which is what makes the stump 0.2-weak here
    const Q: usize = 32;
    let learner = LearnerConfig::stump();
    let (mut real, mut exact, mut noisy) = (0, 0, 0);
    let mut gmin = f64::INFINITY;
    let mut tmax = 0;
    for seed in 0..20u64 {
        let data = separable8(seed);
        let ccfg = ClassicalConfig {
            batch_size: Some(Q),
            ..ClassicalConfig::with_rounds(T, seed)
        };
        let qcfg = |est, eps| QBoostConfig {
            q: Some(Q),
            ..QBoostConfig::new(T, est, eps, seed)
        };
        let (_, r) = realboost_train(&data, &learner, &ccfg).unwrap();
        let (_, e) = qrealboost_train(&data, &learner, &qcfg(Estimator::Exact, 0.0)).unwrap();
        let (_, n) = qrealboost_train(&data, &learner, &qcfg(Estimator::Noisy, 0.01)).unwrap();
        for (rec, count) in [(&r, &mut real), (&e, &mut exact), (&n, &mut noisy)] {
            let (ok, g, t) = converges(rec);
            *count += usize::from(ok);
            gmin = gmin.min(g);
            tmax = tmax.max(t);
        }
    }
    outcome(
        real == 20 && exact == 20 && noisy >= 18,
        format!(
            "Q={Q}: RealBoost {real}/20, exact QRealBoost {exact}/20, noisy eps=0.01 {noisy}/20 (need 20, 20, 18); \
             smallest gamma_min up to the threshold {gmin:.3}, latest threshold round {tmax}"
        ),
    )
}

fn c7_chain() -> Outcome {
    let mut runs = 0;
    let mut violations = 0;
    let mut smoothed_rounds = 0;
    for i in 0..40u64 {
        let mut rng = stream(i, Purpose::Calibration, &[7]);
        let m = rng.random_range(6..=24);
        let data = random_dataset(900 + i, m);
        let cfg = ClassicalConfig::with_rounds(25, i);
        let learner = small_learner(i);
        for rec in [
            realboost_train(&data, &learner, &cfg).unwrap().1,
            adaboost_train(&data, &learner, &cfg).unwrap().1,
        ] {
            runs += 1;
            let (mut prod_z, mut prod_edge, mut sum_g2) = (1.0f64, 1.0f64, 0.0f64);
            let (mut prod_zraw, mut ok) = (1.0f64, true);
            for r in &rec.rounds {
                smoothed_rounds += usize::from(r.smoothed);
                prod_z *= r.normalizer;
                prod_zraw *= r.z_raw;
                let edge = (1.0 - 4.0 * r.gamma * r.gamma).max(0.0).sqrt();
                prod_edge *= edge;
                sum_g2 += r.gamma * r.gamma;
                let err = 1.0 - r.train_accuracy;
                ok &= err <= prod_z + TOL;
                ok &= r.z_raw <= edge + TOL;
                ok &= prod_zraw <= prod_edge + TOL;
                ok &= prod_edge <= (-2.0 * sum_g2).exp() + TOL;
                if !r.smoothed {
                    ok &= (r.normalizer - r.z_raw).abs() <= TOL || rec.algorithm() == Algorithm::AdaBoost;
                }
            }
            let reps = check_claims(&rec, 0.0).unwrap();
            ok &= reps.iter().find(|r| r.id == ClaimId::TA5).unwrap().passed;
            violations += usize::from(!ok);
        }
    }
    outcome(
        violations == 0,
        format!(
            "{runs} classical runs, {violations} violations; err <= prod Z, prod Z_raw <= prod sqrt(1-4g^2) <= \
             exp(-2 sum g^2) ({smoothed_rounds} smoothed rounds use Z_raw for the middle link)"
        ),
    )
}

fn c8_amplification() -> Outcome {
    let quarter = WeightedStatePrep::new(&[1.0f64, 0.0, 0.0, 0.0], 4).unwrap();
    let p = grover_amplify(&quarter, 1).good_probability;
    let mut worst = (p - 1.0).abs();
    let mut ok = worst <= AMP_TOL;
    for i in 0..=16usize {
        let w: Vec<f64> = (0..16).map(|j| if j < i { 1.0 } else { 0.0 }).collect();
        let prep = WeightedStatePrep::new(&w, 16).unwrap();
        let theta = (i as f64 / 16.0).sqrt().asin();
        for k in 0..=5 {
            let expect = ((2 * k + 1) as f64 * theta).sin().powi(2);
            let got = grover_amplify(&prep, k).good_probability;
            worst = worst.max((got - expect).abs());
            ok &= (got - expect).abs() <= AMP_TOL;
        }
    }
    outcome(
        ok,
        format!("a=1/4,k=1 -> {p:.12}; grid a=i/16, k<=5 worst deviation {worst:.2e}"),
    )
}

fn c9_iqae() -> Outcome {
    let start = Instant::now();
    let eps = 0.05;
    let cfg = EstimationConfig::relative(eps, 0.05);
    let mut rates = Vec::new();
    for (n, a) in [1.0 / 16.0, 1.0 / 8.0, 0.25, 0.5].into_iter().enumerate() {
        let mut hits = 0;
        for t in 0..1000u64 {
            // a = mass / 2 on a two-index register
            let prep = WeightedStatePrep::new(&[2.0 * a, 0.0], 2).unwrap();
            let mut rng = stream(t, Purpose::Calibration, &[9, n as u64]);
            let est = iqae_estimate(&mut StatevectorOracle::new(prep), &cfg, &mut rng).unwrap();
            if (est.value - a).abs() <= eps * a {
                hits += 1;
            }
        }
        rates.push((a, hits));
    }
    let elapsed = start.elapsed();
    let ok = rates.iter().all(|&(_, h)| h >= 950) && elapsed < IQAE_BUDGET;
    let list: Vec<String> = rates.iter().map(|(a, h)| format!("a={a}: {h}/1000")).collect();
    outcome(ok, format!("{} in {:.1}s", list.join(", "), elapsed.as_secs_f64()))
}

fn c10_protocol() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let dataset = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/wdbc.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_qboost"))
        .args(["bench", "--dataset", dataset, "--subset", "32", "--q", "8", "--k", "3"])
        .args(["--rounds", "25", "--repeats", "5", "--seed", "0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    if !status.status.success() {
        return outcome(
            false,
            format!(
                "bench exited with {:?}: {}",
                status.status.code(),
                String::from_utf8_lossy(&status.stderr)
            ),
        );
    }
    let mut rows_ok = true;
    let mut qreal = Vec::new();
    for a in Algorithm::ALL {
        let text = std::fs::read_to_string(dir.path().join(format!("{}.csv", a.short_name()))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        rows_ok &= lines[0] == "iteration,mean_train,std_train,mean_test,std_test" && lines.len() == 26;
        rows_ok &= lines[1..].iter().all(|l| l.split(',').all(|f| !f.is_empty()));
        if a == Algorithm::QRealBoost {
            qreal = lines[1..]
                .iter()
                .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
                .collect();
        }
    }
    let (first, last) = (qreal[0], *qreal.last().unwrap());
    let half = qreal.len() / 2;
    let early = mean_std(&qreal[..half]).unwrap().0;
    let late = mean_std(&qreal[half..]).unwrap().0;
    outcome(
        rows_ok && last >= first + 0.1 - TOL && late >= early,
        format!(
            "4 CSVs x 25 rows: {rows_ok}; QRealBoost mean train accuracy {first:.4} -> {last:.4} \
             (gain {:.4}, need 0.1), first-half mean {early:.4} <= second-half mean {late:.4}",
            last - first
        ),
    )
}

fn c11_calculators() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let t1 = iteration_threshold(32, 0.2).unwrap();
    let t2 = iteration_threshold(1024, 0.1).unwrap();
    let s = sample_size_bound(10, 0.1, 0.1).unwrap();
    let q = query_cost_estimate(64, 3, 8, 10).unwrap();
    let q_hand = 8.0 * 3.0 * 8.0 * 1e4 * 10f64.ln();
    let ok = t1 == 44 && t2 == 347 && rel(s, 1e5) <= 1e-6 && rel(q, q_hand) <= 1e-6;
    outcome(
        ok,
        format!("threshold(32,0.2)={t1}, threshold(1024,0.1)={t2}, sample_size(10,0.1,0.1)={s:.1}, query_cost(64,3,8,10)={q:.6e}"),
    )
}

fn main() -> ExitCode {
    println!("acceptance suite");
    let noisy = noisy_suite();
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("1  oracle equivalence at eps=0", Box::new(c1_oracle_equivalence)),
        ("2  weight-sum interval", Box::new(|| claim_suite(&noisy, ClaimId::C1))),
        ("3  margin deviation", Box::new(|| claim_suite(&noisy, ClaimId::C3))),
        ("4  normalizer deviation", Box::new(|| claim_suite(&noisy, ClaimId::C4))),
        ("5  overlap bound", Box::new(|| claim_suite(&noisy, ClaimId::Overlap))),
        ("6  convergence on separable data", Box::new(c6_convergence)),
        ("7  training-error chain", Box::new(c7_chain)),
        ("8  amplification closed form", Box::new(c8_amplification)),
        ("9  amplitude-estimation calibration", Box::new(c9_iqae)),
        ("10 protocol smoke run", Box::new(c10_protocol)),
        ("11 calculators", Box::new(c11_calculators)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let o = run();
        failed += usize::from(!o.passed);
        println!(
            "[{}] criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
