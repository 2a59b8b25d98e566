//! Report files: per-algorithm accuracy curves (mean and population std over
//! repeats), a claims summary, a gnuplot script and the raw run records.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use qboost_core::{Algorithm, RunRecord};

use crate::data::DataError;
use crate::experiment::RunOutcome;

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub iteration: usize,
    pub train: (f64, f64),
    pub test: Option<(f64, f64)>,
}

/// Per-iteration mean/std over the successful records of one algorithm.
pub fn accuracy_curve(records: &[&RunRecord]) -> Vec<CurveRow> {
    let ok: Vec<&&RunRecord> = records.iter().filter(|r| r.header.error.is_none()).collect();
    let rounds = ok.iter().map(|r| r.rounds.len()).max().unwrap_or(0);
    (0..rounds)
        .filter_map(|t| {
            let train: Vec<f64> = ok
                .iter()
                .filter_map(|r| r.rounds.get(t).map(|x| x.train_accuracy))
                .collect();
            let test: Vec<f64> = ok
                .iter()
                .filter_map(|r| r.rounds.get(t).and_then(|x| x.test_accuracy))
                .collect();
            Some(CurveRow {
                iteration: t + 1,
                train: mean_std(&train)?,
                test: mean_std(&test),
            })
        })
        .collect()
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut s = String::from("iteration,mean_train,std_train,mean_test,std_test\n");
    for r in rows {
        let (mt, st) = r.test.map_or((String::new(), String::new()), |(m, d)| {
            (format!("{m:.6}"), format!("{d:.6}"))
        });
        let _ = writeln!(s, "{},{:.6},{:.6},{mt},{st}", r.iteration, r.train.0, r.train.1);
    }
    s
}

fn claims_summary(outcomes: &[RunOutcome], notes: &[String]) -> String {
    let mut s = String::new();
    for n in notes {
        let _ = writeln!(s, "# {n}");
    }
    for o in outcomes {
        let tag = if o.algorithm.is_stand_in() { " (stand-in)" } else { "" };
        let _ = writeln!(s, "[{}{tag} repeat={}]", o.algorithm.short_name(), o.repeat);
        if let Some(e) = &o.record.header.error {
            let _ = writeln!(s, "error: {e}");
            continue;
        }
        match &o.claims {
            Some(claims) => {
                for c in claims {
                    let _ = writeln!(s, "{c}");
                }
            }
            None => {
                let _ = writeln!(s, "claims: not evaluated");
            }
        }
    }
    s
}

fn gnuplot_script(algos: &[Algorithm]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset key bottom right\nset xlabel 'iteration'\nset ylabel 'accuracy'\n\
         set yrange [0:1.05]\nset terminal pngcairo size 900,600\n",
    );
    for (what, col) in [("train", 2), ("test", 4)] {
        let _ = writeln!(s, "set output '{what}.png'");
        let parts: Vec<String> = algos
            .iter()
            .map(|a| {
                format!(
                    "'{}.csv' using 1:{col}:{} with yerrorlines title '{}'",
                    a.short_name(),
                    col + 1,
                    a.display_name()
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    s
}

fn write(path: &Path, contents: &str) -> Result<(), DataError> {
    fs::write(path, contents).map_err(|e| DataError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes `<algo>.csv` per algorithm, `claims.txt`, `plot.gp` and
/// `records/<algo>_r<repeat>.jsonl`. Returns the CSV paths.
pub fn emit_report(outcomes: &[RunOutcome], out_dir: &Path, notes: &[String]) -> Result<Vec<PathBuf>, DataError> {
    if outcomes.is_empty() {
        return Err(DataError::InvalidArgument("no run records to report".into()));
    }
    let rec_dir = out_dir.join("records");
    fs::create_dir_all(&rec_dir).map_err(|e| DataError::Io {
        path: rec_dir.clone(),
        message: e.to_string(),
    })?;
    for o in outcomes {
        let path = rec_dir.join(format!("{}_r{}.jsonl", o.algorithm.short_name(), o.repeat));
        let file = fs::File::create(&path).map_err(|e| DataError::Io {
            path: path.clone(),
            message: e.to_string(),
        })?;
        o.record.write_jsonl(BufWriter::new(file))?;
    }
    let records: Vec<&RunRecord> = outcomes.iter().map(|o| &o.record).collect();
    let paths = write_curves(&records, out_dir)?;
    write(&out_dir.join("claims.txt"), &claims_summary(outcomes, notes))?;
    Ok(paths)
}

/// Writes one curve CSV per algorithm present in `records`, plus the
/// gnuplot script.
pub fn write_curves(records: &[&RunRecord], out_dir: &Path) -> Result<Vec<PathBuf>, DataError> {
    fs::create_dir_all(out_dir).map_err(|e| DataError::Io {
        path: out_dir.to_path_buf(),
        message: e.to_string(),
    })?;
    let algos: Vec<Algorithm> = Algorithm::ALL
        .into_iter()
        .filter(|a| records.iter().any(|r| r.algorithm() == *a))
        .collect();
    let mut paths = Vec::new();
    for &a in &algos {
        let mine: Vec<&RunRecord> = records.iter().copied().filter(|r| r.algorithm() == a).collect();
        let path = out_dir.join(format!("{}.csv", a.short_name()));
        write(&path, &curve_csv(&accuracy_curve(&mine)))?;
        paths.push(path);
    }
    write(&out_dir.join("plot.gp"), &gnuplot_script(&algos))?;
    Ok(paths)
}

/// Reads every `*.jsonl` record under `dir`, sorted by file name.
pub fn read_records(dir: &Path) -> Result<Vec<RunRecord>, DataError> {
    let io = |e: std::io::Error| DataError::Io {
        path: dir.to_path_buf(),
        message: e.to_string(),
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(DataError::Empty {
            path: dir.to_path_buf(),
        });
    }
    files
        .iter()
        .map(|p| {
            let f = fs::File::open(p).map_err(|e| DataError::Io {
                path: p.clone(),
                message: e.to_string(),
            })?;
            Ok(RunRecord::read_jsonl(std::io::BufReader::new(f))?)
        })
        .collect()
}
