use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qboost_bench::data::DataError;
use qboost_bench::experiment::{run_on_split, split, DataFormat, ExperimentConfig};
use qboost_bench::report::{emit_report, read_records, write_curves};
use qboost_core::quantum::{
    iqae_estimate, ClosedFormOracle, EstimationConfig, SamplingMode, StatevectorOracle, WeightedStatePrep,
};
use qboost_core::rng::{stream, Purpose};
use qboost_core::verify::check_claims;
use qboost_core::{Algorithm, BoostError, Estimator, LearnerKind, RunRecord};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CLAIM: u8 = 3;

#[derive(Parser)]
#[command(name = "qboost", version, about = "Classical and quantum-style boosting benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a single algorithm once and store its run record.
    Train {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "qreal", value_parser = parse_algo)]
        algo: Algorithm,
    },
    /// Run the four-way benchmark and write the report.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "ada,real,qada,qreal", value_parser = parse_algos)]
        algos: AlgoList,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Re-check the bounds on a stored run record.
    Verify {
        #[arg(long)]
        record: PathBuf,
        /// Defaults to the epsilon stored in the record.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Amplitude-estimation calibration on a known amplitude.
    Estimate {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Backend::Closed)]
        backend: Backend,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-render accuracy CSVs from stored run records.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Debug)]
struct AlgoList(Vec<Algorithm>);

#[derive(Copy, Clone, ValueEnum)]
enum Backend {
    Closed,
    Statevector,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Idx,
}

#[derive(Copy, Clone, ValueEnum)]
enum EstimatorArg {
    Exact,
    Noisy,
    Statevector,
}

#[derive(Copy, Clone, ValueEnum)]
enum SamplingArg {
    Proportional,
    Top,
}

#[derive(Copy, Clone, ValueEnum)]
enum LearnerArg {
    Stump,
    Kmeans,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "data/wdbc.csv")]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// IDX label file.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value = "diagnosis")]
    label_column: String,
    #[arg(long, default_value = "M")]
    positive_label: String,
    /// Comma-separated CSV columns to drop.
    #[arg(long, default_value = "id", value_delimiter = ',')]
    ignore_columns: Vec<String>,
    #[arg(long, default_value_t = 32)]
    subset: usize,
    #[arg(long, default_value = "4,5", value_parser = parse_digits)]
    digits: (u8, u8),
    #[arg(long, default_value_t = 25)]
    rounds: usize,
    #[arg(long, default_value_t = 8)]
    q: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, value_enum, default_value_t = LearnerArg::Kmeans)]
    learner: LearnerArg,
    /// Defaults to min(0.1, 1/(Q·T²)).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Noisy)]
    estimator: EstimatorArg,
    #[arg(long, value_enum, default_value_t = SamplingArg::Proportional)]
    sampling: SamplingArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s.trim()).ok_or_else(|| format!("unknown algorithm `{s}` (expected ada, real, qada or qreal)"))
}

fn parse_algos(s: &str) -> Result<AlgoList, String> {
    let v = s.split(',').map(parse_algo).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("no algorithms given".into());
    }
    Ok(AlgoList(v))
}

fn parse_digits(s: &str) -> Result<(u8, u8), String> {
    let (a, b) = s.split_once(',').ok_or("expected two digits as `a,b`")?;
    let d = |x: &str| {
        x.trim()
            .parse::<u8>()
            .ok()
            .filter(|&v| v <= 9)
            .ok_or_else(|| format!("`{x}` is not a digit"))
    };
    Ok((d(a)?, d(b)?))
}

impl RunArgs {
    fn config(&self, algorithms: Vec<Algorithm>, repeats: usize) -> ExperimentConfig {
        ExperimentConfig {
            dataset: self.dataset.clone(),
            format: match self.format {
                Format::Csv => DataFormat::Csv,
                Format::Idx => DataFormat::Idx,
            },
            labels: self.labels.clone(),
            label_column: self.label_column.clone(),
            positive_label: self.positive_label.clone(),
            ignore_columns: self.ignore_columns.iter().filter(|c| !c.is_empty()).cloned().collect(),
            subset: self.subset,
            digits: self.digits,
            algorithms,
            rounds: self.rounds,
            repeats,
            q: self.q,
            k: self.k,
            learner: match self.learner {
                LearnerArg::Stump => LearnerKind::Stump,
                LearnerArg::Kmeans => LearnerKind::Kmeans,
            },
            epsilon: self.epsilon,
            estimator: match self.estimator {
                EstimatorArg::Exact => Estimator::Exact,
                EstimatorArg::Noisy => Estimator::Noisy,
                EstimatorArg::Statevector => Estimator::Statevector,
            },
            sampling: match self.sampling {
                SamplingArg::Proportional => SamplingMode::Proportional,
                SamplingArg::Top => SamplingMode::top(),
            },
            seed: self.seed,
            out: self.out.clone(),
            ..ExperimentConfig::default()
        }
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        match e {
            DataError::InvalidArgument(_) | DataError::Dataset(BoostError::InvalidArgument(_)) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<BoostError> for Failure {
    fn from(e: BoostError) -> Self {
        match e {
            BoostError::InvalidArgument(_) | BoostError::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn run_notes(cfg: &ExperimentConfig, train: usize, test: Option<usize>) -> Vec<String> {
    vec![
        format!("dataset {} ({:?})", cfg.dataset.display(), cfg.format),
        format!(
            "training subset {train} rows chosen by seed {}; test set = remaining {} rows",
            cfg.seed,
            test.unwrap_or(0)
        ),
        format!(
            "rounds {} repeats {} Q {} k {} learner {:?} estimator {:?} epsilon {}",
            cfg.rounds,
            cfg.repeats,
            cfg.q,
            cfg.k,
            cfg.learner,
            cfg.estimator,
            cfg.epsilon.map_or("default".to_string(), |e| e.to_string())
        ),
        "qada is a stand-in baseline, not a reconstruction of a published algorithm".into(),
    ]
}

fn run_bench(args: &RunArgs, algos: Vec<Algorithm>, repeats: usize) -> Result<bool, Failure> {
    let cfg = args.config(algos, repeats);
    cfg.validate()?;
    let data = cfg.load()?;
    let (train, test) = split(&data, cfg.subset, cfg.seed)?;
    let outcomes = run_on_split(&cfg, &train, test.as_ref());
    let notes = run_notes(&cfg, train.len(), test.as_ref().map(|t| t.len()));
    let csvs = emit_report(&outcomes, &cfg.out, &notes)?;
    for o in &outcomes {
        let status = match (&o.record.header.error, o.claim_failure()) {
            (Some(e), _) => format!("error: {e}"),
            (None, true) => "claims FAIL".into(),
            (None, false) => "ok".into(),
        };
        let final_acc = o.record.rounds.last().map_or(f64::NAN, |r| r.train_accuracy);
        println!(
            "{:<6} repeat {} train_acc {:.4} {status}",
            o.algorithm.short_name(),
            o.repeat,
            final_acc
        );
    }
    for p in csvs {
        println!("wrote {}", p.display());
    }
    Ok(outcomes.iter().any(|o| o.claim_failure()))
}

fn run_train(args: &RunArgs, algo: Algorithm) -> Result<bool, Failure> {
    let cfg = args.config(vec![algo], 1);
    cfg.validate()?;
    let data = cfg.load()?;
    let (train, test) = split(&data, cfg.subset, cfg.seed)?;
    let o = qboost_bench::experiment::run_single(algo, 0, &train, test.as_ref(), &cfg);
    if let Some(e) = &o.record.header.error {
        return Err(Failure::Usage(e.clone()));
    }
    fs::create_dir_all(&cfg.out).map_err(|e| io_failure(&cfg.out, e))?;
    let path = cfg.out.join(format!("{}.jsonl", algo.short_name()));
    let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
    o.record.write_jsonl(BufWriter::new(file))?;
    for r in &o.record.rounds {
        let test = r.test_accuracy.map_or(String::new(), |t| format!(" test_acc {t:.4}"));
        println!("round {:>3} train_acc {:.4}{test}", r.round, r.train_accuracy);
    }
    for c in o.claims.iter().flatten() {
        println!("{c}");
    }
    println!("wrote {}", path.display());
    Ok(o.claim_failure())
}

fn run_verify(path: &PathBuf, epsilon: Option<f64>) -> Result<bool, Failure> {
    let file = fs::File::open(path).map_err(|e| io_failure(path, e))?;
    let record = RunRecord::read_jsonl(std::io::BufReader::new(file))?;
    let eps = epsilon.unwrap_or(record.header.epsilon);
    let reports = check_claims(&record, eps).map_err(|e| match e {
        BoostError::InvalidArgument(_) => Failure::Usage(e.to_string()),
        _ => Failure::Data(e.to_string()),
    })?;
    println!(
        "record {} seed {} rounds {} epsilon {eps}",
        record.algorithm().short_name(),
        record.header.seed,
        record.rounds.len()
    );
    for r in &reports {
        println!("{r}");
    }
    Ok(reports.iter().any(|r| !r.skipped && !r.passed))
}

fn run_estimate(a: f64, epsilon: f64, delta: f64, trials: usize, backend: Backend, seed: u64) -> Result<bool, Failure> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Failure::Usage(format!("amplitude {a} must lie in [0, 1]")));
    }
    if trials == 0 {
        return Err(Failure::Usage("trials must be positive".into()));
    }
    let cfg = EstimationConfig::relative(epsilon, delta);
    cfg.validate()?;
    let (mut hits, mut unreliable, mut calls, mut depth) = (0usize, 0usize, 0u64, 0usize);
    for t in 0..trials {
        let mut rng = stream(seed, Purpose::Calibration, &[t as u64]);
        let est = match backend {
            Backend::Closed => iqae_estimate(&mut ClosedFormOracle::new(a), &cfg, &mut rng)?,
            Backend::Statevector => {
                let w = [(2.0 * a).min(1.0), (2.0 * a - 1.0).max(0.0)];
                let prep = WeightedStatePrep::new(&w, 2)?;
                iqae_estimate(&mut StatevectorOracle::new(prep), &cfg, &mut rng)?
            }
        };
        if (est.value - a).abs() <= epsilon * a {
            hits += 1;
        }
        unreliable += usize::from(!est.reliable);
        calls += est.oracle_calls;
        depth = depth.max(est.max_depth);
    }
    println!(
        "a {a} epsilon {epsilon} delta {delta} trials {trials}: within relative error {hits}/{trials} ({:.3}), \
         unreliable {unreliable}, mean oracle calls {:.0}, max depth {depth}",
        hits as f64 / trials as f64,
        calls as f64 / trials as f64
    );
    Ok(false)
}

fn run_report(records: &Path, out: &Path) -> Result<bool, Failure> {
    let recs = read_records(records)?;
    let refs: Vec<&RunRecord> = recs.iter().collect();
    for p in write_curves(&refs, out)? {
        println!("wrote {}", p.display());
    }
    Ok(false)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Train { run, algo } => run_train(run, *algo),
        Command::Bench { run, algos, repeats } => run_bench(run, algos.0.clone(), *repeats),
        Command::Verify { record, epsilon } => run_verify(record, *epsilon),
        Command::Estimate {
            a,
            epsilon,
            delta,
            trials,
            backend,
            seed,
        } => run_estimate(*a, *epsilon, *delta, *trials, *backend, *seed),
        Command::Report { records, out } => run_report(records, out),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("claim check failed");
            ExitCode::from(EXIT_CLAIM)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
