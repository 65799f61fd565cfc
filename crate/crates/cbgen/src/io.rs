//! File formats: sample CSV, the JSON metadata sidecar, and numeric CSV
//! inputs (marginals, correlation matrices).
//!
//! Sample CSV is comma-separated 0/1 with `\n` line endings, one sample per
//! row, and a `x1,...,xm` header unless disabled. JSON numbers are written
//! by `serde_json`'s shortest-round-trip formatter, so parsing a value back
//! recovers the exact double.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use cbgen_core::types::{AlgorithmId, SampleMatrix, SquareMatrix};

use crate::AppError;

/// The sidecar record that makes a sample file reproducible post hoc.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Metadata {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub algorithm: AlgorithmId,
    pub structure: String,
    pub spec_digest: String,
}

impl Metadata {
    pub fn of(samples: &SampleMatrix, structure: &str) -> Self {
        Metadata {
            seed: samples.seed(),
            n: samples.n(),
            m: samples.m(),
            algorithm: samples.algorithm(),
            structure: structure.to_string(),
            spec_digest: samples.spec_digest().to_string(),
        }
    }
}

/// Sidecar path for a data file: `samples.csv` -> `samples.meta.json`.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    data_path.with_extension("meta.json")
}

/// Writes samples as CSV with an optional `x1,...,xm` header.
pub fn write_samples_csv(path: &Path, samples: &SampleMatrix, header: bool) -> Result<(), AppError> {
    let mut out = BufWriter::new(File::create(path)?);
    let m = samples.m();
    if header {
        let names: Vec<String> = (1..=m).map(|j| format!("x{j}")).collect();
        writeln!(out, "{}", names.join(","))?;
    }
    // rows are plain 0/1 bytes; build each line manually
    let mut line = Vec::with_capacity(2 * m);
    for i in 0..samples.n() {
        line.clear();
        for (j, &v) in samples.row(i).iter().enumerate() {
            if j > 0 {
                line.push(b',');
            }
            line.push(b'0' + v);
        }
        line.push(b'\n');
        out.write_all(&line)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes samples as a single JSON document with the metadata inlined.
pub fn write_samples_json(path: &Path, samples: &SampleMatrix, structure: &str) -> Result<(), AppError> {
    #[derive(serde::Serialize)]
    struct Doc<'a> {
        #[serde(flatten)]
        metadata: Metadata,
        data: Vec<&'a [u8]>,
    }
    let doc = Doc {
        metadata: Metadata::of(samples, structure),
        data: (0..samples.n()).map(|i| samples.row(i)).collect(),
    };
    let out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(out, &doc).map_err(|e| AppError::Io(e.to_string()))?;
    Ok(())
}

pub fn write_metadata(path: &Path, metadata: &Metadata) -> Result<(), AppError> {
    let out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(out, metadata).map_err(|e| AppError::Io(e.to_string()))?;
    Ok(())
}

pub fn read_metadata(path: &Path) -> Result<Metadata, AppError> {
    let file = BufReader::new(File::open(path)?);
    serde_json::from_reader(file).map_err(|e| AppError::Io(e.to_string()))
}

/// Reads a sample CSV back into flat 0/1 data, skipping a header row when
/// present. Returns `(data, n, m)`.
pub fn read_samples_csv(path: &Path) -> Result<(Vec<u8>, usize, usize), AppError> {
    let reader = BufReader::new(File::open(path)?);
    let mut data = Vec::new();
    let mut m = 0usize;
    let mut n = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if lineno == 0 && trimmed.starts_with('x') {
            continue; // header
        }
        let mut width = 0usize;
        for field in trimmed.split(',') {
            let v = match field.trim() {
                "0" => 0u8,
                "1" => 1u8,
                other => {
                    return Err(AppError::Io(format!(
                        "line {}: entry {other:?} is not 0/1",
                        lineno + 1
                    )))
                }
            };
            data.push(v);
            width += 1;
        }
        if m == 0 {
            m = width;
        } else if width != m {
            return Err(AppError::Io(format!(
                "line {}: {} fields, expected {}",
                lineno + 1,
                width,
                m
            )));
        }
        n += 1;
    }
    if n == 0 {
        return Err(AppError::Io("no data rows".into()));
    }
    Ok((data, n, m))
}

/// Reads a square numeric CSV (no header) as a matrix.
pub fn read_matrix_csv(path: &Path) -> Result<SquareMatrix, AppError> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = trimmed.split(',').map(|f| f.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| AppError::Io(format!("line {}: {e}", lineno + 1)))?);
    }
    let n = rows.len();
    if n == 0 {
        return Err(AppError::Io("empty matrix file".into()));
    }
    let mut flat = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(AppError::Io(format!(
                "row {} has {} entries, expected {n} (matrix must be square)",
                i + 1,
                row.len()
            )));
        }
        flat.extend_from_slice(row);
    }
    SquareMatrix::from_rows(n, flat).map_err(|e| AppError::Io(e.to_string()))
}

/// Parses a comma-separated list of floats.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, AppError> {
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| AppError::Usage(format!("bad number {f:?}: {e}")))
        })
        .collect()
}

/// Reads marginals from a file: newline- or comma-separated floats.
pub fn read_marginals_file(path: &Path) -> Result<Vec<f64>, AppError> {
    let body = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for token in body.split([',', '\n', '\r', ' ', '\t']) {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        out.push(
            token
                .parse::<f64>()
                .map_err(|e| AppError::Io(format!("bad marginal {token:?}: {e}")))?,
        );
    }
    Ok(out)
}
