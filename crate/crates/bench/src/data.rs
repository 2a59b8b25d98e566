//! Dataset loaders: headered CSV with a named label column, and IDX image
//! and label pairs.

use std::fs;
use std::io::{Cursor, Read};
use std::path::{Path, PathBuf};

use byteorder::{BigEndian, ReadBytesExt};
use qboost_core::{BoostError, Dataset, Label};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: file has no data rows")]
    Empty { path: PathBuf },
    #[error("{path}: no column named `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: line {line}, column `{column}`: `{value}` is not a number")]
    NonNumeric {
        path: PathBuf,
        line: u64,
        column: String,
        value: String,
    },
    #[error("{path}: line {line}: malformed row ({message})")]
    Malformed { path: PathBuf, line: u64, message: String },
    #[error("{path}: bad magic number {found:#010x}, expected {expected:#010x}")]
    Magic { path: PathBuf, expected: u32, found: u32 },
    #[error("{path}: file is truncated")]
    Truncated { path: PathBuf },
    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Dataset(#[from] BoostError),
}

/// Column choices for a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub label_column: String,
    /// Label value mapped to +1; every other value maps to -1.
    pub positive_label: String,
    /// Columns dropped before parsing features.
    pub ignore_columns: Vec<String>,
}

impl CsvOptions {
    pub fn new(label_column: impl Into<String>, positive_label: impl Into<String>) -> Self {
        Self {
            label_column: label_column.into(),
            positive_label: positive_label.into(),
            ignore_columns: Vec::new(),
        }
    }

    pub fn ignoring(mut self, columns: &[&str]) -> Self {
        self.ignore_columns = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    /// The layout of the Wisconsin diagnostic breast cancer file.
    pub fn wdbc() -> Self {
        Self::new("diagnosis", "M").ignoring(&["id"])
    }
}

fn io_err(path: &Path, e: impl ToString) -> DataError {
    DataError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads a headered CSV file; every column except the label and ignored
/// ones must be numeric.
pub fn load_csv_dataset(path: &Path, opts: &CsvOptions) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let headers = reader.headers().map_err(|e| io_err(path, e))?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == opts.label_column)
        .ok_or_else(|| DataError::MissingColumn {
            path: path.to_path_buf(),
            column: opts.label_column.clone(),
        })?;
    for c in &opts.ignore_columns {
        if !headers.iter().any(|h| h == c) {
            return Err(DataError::MissingColumn {
                path: path.to_path_buf(),
                column: c.clone(),
            });
        }
    }
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != label_idx && !opts.ignore_columns.iter().any(|c| c == &headers[i]))
        .collect();
    if feature_cols.is_empty() {
        return Err(DataError::InvalidArgument("no feature columns left".into()));
    }

    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DataError::Malformed {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            }
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != headers.len() {
            return Err(DataError::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("{} fields, header has {}", row.len(), headers.len()),
            });
        }
        let mut x = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let v: f64 = row[c].parse().map_err(|_| DataError::NonNumeric {
                path: path.to_path_buf(),
                line,
                column: headers[c].to_string(),
                value: row[c].to_string(),
            })?;
            if !v.is_finite() {
                return Err(DataError::NonNumeric {
                    path: path.to_path_buf(),
                    line,
                    column: headers[c].to_string(),
                    value: row[c].to_string(),
                });
            }
            x.push(v);
        }
        samples.push(x);
        labels.push(if row[label_idx] == opts.positive_label {
            Label::Positive
        } else {
            Label::Negative
        });
    }
    if samples.is_empty() {
        return Err(DataError::Empty {
            path: path.to_path_buf(),
        });
    }
    let mapping = format!("{}={} -> +1, otherwise -1", opts.label_column, opts.positive_label);
    Ok(Dataset::new(samples, labels)?.with_label_mapping(mapping))
}

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_file(path: &Path) -> Result<Vec<u8>, DataError> {
    fs::read(path).map_err(|e| io_err(path, e))
}

fn header(cur: &mut Cursor<Vec<u8>>, path: &Path, expected: u32, dims: usize) -> Result<Vec<usize>, DataError> {
    let truncated = || DataError::Truncated {
        path: path.to_path_buf(),
    };
    let magic = cur.read_u32::<BigEndian>().map_err(|_| truncated())?;
    if magic != expected {
        return Err(DataError::Magic {
            path: path.to_path_buf(),
            expected,
            found: magic,
        });
    }
    (0..dims)
        .map(|_| cur.read_u32::<BigEndian>().map(|d| d as usize).map_err(|_| truncated()))
        .collect()
}

/// Reads an IDX image file and its label file, keeping the two digits in
/// `digits` (the first maps to +1) and at most `limit` samples in file
/// order. Pixels are scaled to `[0, 1]`.
pub fn load_idx_subset(
    images_path: &Path,
    labels_path: &Path,
    digits: (u8, u8),
    limit: usize,
) -> Result<Dataset, DataError> {
    if digits.0 == digits.1 {
        return Err(DataError::InvalidArgument(format!(
            "digit pair ({}, {}) must name two different digits",
            digits.0, digits.1
        )));
    }
    if limit == 0 {
        return Err(DataError::InvalidArgument("limit must be positive".into()));
    }

    let mut img = Cursor::new(read_file(images_path)?);
    let dims = header(&mut img, images_path, IMAGES_MAGIC, 3)?;
    let (n_img, pixels) = (dims[0], dims[1] * dims[2]);
    let mut lab = Cursor::new(read_file(labels_path)?);
    let n_lab = header(&mut lab, labels_path, LABELS_MAGIC, 1)?[0];
    if n_img != n_lab {
        return Err(DataError::CountMismatch {
            images: n_img,
            labels: n_lab,
        });
    }
    let mut label_bytes = vec![0u8; n_lab];
    lab.read_exact(&mut label_bytes).map_err(|_| DataError::Truncated {
        path: labels_path.to_path_buf(),
    })?;
    let image_start = img.position() as usize;
    let bytes = img.get_ref();
    if bytes.len() < image_start + n_img * pixels {
        return Err(DataError::Truncated {
            path: images_path.to_path_buf(),
        });
    }

    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (i, &d) in label_bytes.iter().enumerate() {
        if samples.len() == limit {
            break;
        }
        let label = if d == digits.0 {
            Label::Positive
        } else if d == digits.1 {
            Label::Negative
        } else {
            continue;
        };
        let off = image_start + i * pixels;
        samples.push(bytes[off..off + pixels].iter().map(|&p| p as f64 / 255.0).collect());
        labels.push(label);
    }
    if samples.is_empty() {
        return Err(DataError::Empty {
            path: labels_path.to_path_buf(),
        });
    }
    let mapping = format!("digit {} -> +1, digit {} -> -1", digits.0, digits.1);
    Ok(Dataset::new(samples, labels)?.with_label_mapping(mapping))
}
