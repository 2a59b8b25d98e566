use qboost_bench::{emit_report, run_experiment, run_on_split, select_subset, ExperimentConfig};
use qboost_core::{Algorithm, Dataset, LearnerKind};
use tempfile::TempDir;

fn wdbc_config() -> ExperimentConfig {
    ExperimentConfig {
        dataset: concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/wdbc.csv").into(),
        rounds: 5,
        repeats: 2,
        ..ExperimentConfig::default()
    }
}

#[test]
fn subset_selection_is_pure() {
    let a = select_subset(569, 32, 9).unwrap();
    assert_eq!(a, select_subset(569, 32, 9).unwrap());
    assert_ne!(a, select_subset(569, 32, 10).unwrap());
    assert_eq!(a.len(), 32);
    assert!(a.windows(2).all(|w| w[0] < w[1]) && a[31] < 569);
    assert!(select_subset(10, 11, 0).is_err());
    assert!(select_subset(10, 0, 0).is_err());
}

#[test]
fn report_files_are_reproducible() {
    let cfg = wdbc_config();
    let dirs = [TempDir::new().unwrap(), TempDir::new().unwrap()];
    let mut contents = Vec::new();
    for dir in &dirs {
        let outcomes = run_experiment(&cfg).unwrap();
        let mut files = emit_report(&outcomes, dir.path(), &[]).unwrap();
        files.sort();
        contents.push(
            files
                .iter()
                .map(|f| (f.file_name().unwrap().to_owned(), std::fs::read(f).unwrap()))
                .collect::<Vec<_>>(),
        );
    }
    assert!(!contents[0].is_empty());
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn every_repeat_of_every_algorithm_is_run() {
    let cfg = ExperimentConfig {
        repeats: 5,
        algorithms: vec![Algorithm::RealBoost, Algorithm::QRealBoost],
        ..wdbc_config()
    };
    let outcomes = run_experiment(&cfg).unwrap();
    assert_eq!(outcomes.len(), 10);
    assert!(outcomes.iter().all(|o| !o.failed() && o.record.rounds.len() == 5));
    for algo in [Algorithm::RealBoost, Algorithm::QRealBoost] {
        let mut reps: Vec<usize> = outcomes
            .iter()
            .filter(|o| o.algorithm == algo)
            .map(|o| o.repeat)
            .collect();
        reps.sort_unstable();
        assert_eq!(reps, vec![0, 1, 2, 3, 4]);
    }
}

#[test]
fn separable_data_is_learned() {
    let xs = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0];
    let data = Dataset::from_signs(xs.iter().map(|&x| vec![x]).collect(), &[-1, -1, -1, -1, 1, 1, 1, 1]).unwrap();
    let cfg = ExperimentConfig {
        algorithms: vec![Algorithm::RealBoost],
        learner: LearnerKind::Stump,
        repeats: 1,
        rounds: 3,
        ..ExperimentConfig::default()
    };
    let outcomes = run_on_split(&cfg, &data, None);
    let last = outcomes[0].record.rounds.last().unwrap();
    assert_eq!(last.train_accuracy, 1.0);
    assert_eq!(last.test_accuracy, None);
}
