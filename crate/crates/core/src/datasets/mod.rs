//! Benchmark data: synthetic symbolic-regression sets, exhaustive circuit
//! truth tables, CSV ingestion/export and the seeded train/test split.

mod circuits;
mod csv_io;
mod synthetic;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use circuits::{gen_circuit, CircuitId};
pub use csv_io::{load_csv, read_csv, write_csv, CsvOptions, Target};
pub use synthetic::{gen_synthetic_sr, SrBenchmark};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("unknown benchmark `{id}`; valid ids: {valid}")]
    UnknownBenchmark { id: String, valid: String },
    #[error("unknown circuit `{id}`; valid ids: {valid}")]
    UnknownCircuit { id: String, valid: String },
    #[error("dataset has no cases")]
    Empty,
    #[error("case {row} has {found} values where {expected} were expected")]
    ArityMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("train fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
    #[error("split of {cases} cases leaves an empty side")]
    TooSmall { cases: usize },
    #[error("row {row}, column {column}: `{value}` is not numeric")]
    NonNumericCell {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("row {row}, column {column}: circuit values must be 0 or 1")]
    NonBinary { row: usize, column: usize },
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("target column `{0}` not found")]
    MissingTarget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    RealSr,
    Circuit,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::RealSr => "sr",
            Domain::Circuit => "circuit",
        })
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sr" | "real_sr" | "real" => Ok(Domain::RealSr),
            "circuit" | "bits" => Ok(Domain::Circuit),
            other => Err(format!("unknown domain `{other}` (expected sr or circuit)")),
        }
    }
}

/// One input/expected-output pair. `id` is the row number in the dataset the
/// case was first generated or loaded into, and survives splits and subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: usize,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    name: String,
    domain: Domain,
    feature_count: usize,
    output_count: usize,
    cases: Vec<TestCase>,
}

impl Dataset {
    /// Build a dataset, checking that every case has the arity of the first
    /// and that circuit values are bits.
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        cases: Vec<TestCase>,
    ) -> Result<Self, DatasetError> {
        let first = cases.first().ok_or(DatasetError::Empty)?;
        let (feature_count, output_count) = (first.inputs.len(), first.outputs.len());
        for (row, case) in cases.iter().enumerate() {
            for (found, expected) in [
                (case.inputs.len(), feature_count),
                (case.outputs.len(), output_count),
            ] {
                if found != expected {
                    return Err(DatasetError::ArityMismatch {
                        row,
                        expected,
                        found,
                    });
                }
            }
            if domain == Domain::Circuit {
                let values = case.inputs.iter().chain(&case.outputs);
                if let Some(column) = values.clone().position(|&v| v != 0.0 && v != 1.0) {
                    return Err(DatasetError::NonBinary { row, column });
                }
            }
        }
        Ok(Dataset {
            name: name.into(),
            domain,
            feature_count,
            output_count,
            cases,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn output_count(&self) -> usize {
        self.output_count
    }

    pub fn cases(&self) -> &[TestCase] {
        &self.cases
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn inputs(&self) -> Vec<&[f64]> {
        self.cases.iter().map(|c| c.inputs.as_slice()).collect()
    }

    /// Cases at `indices`, in that order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> Result<Self, DatasetError> {
        let cases = indices.iter().map(|&i| self.cases[i].clone()).collect();
        Dataset::new(name, self.domain, cases)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Shuffle with `seed` and split. The test side gets
/// `floor((1 - train_fraction) * N)` cases and the train side the rest.
pub fn split_train_test(
    dataset: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(train_fraction));
    }
    let n = dataset.len();
    let test_len = ((1.0 - train_fraction) * n as f64 + 1e-9).floor() as usize;
    let train_len = n - test_len;
    if test_len == 0 || train_len == 0 {
        return Err(DatasetError::TooSmall { cases: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let train = dataset.subset(format!("{}-train", dataset.name), &order[..train_len])?;
    let test = dataset.subset(format!("{}-test", dataset.name), &order[train_len..])?;
    Ok((train, test))
}

/// Every benchmark id the generators know, synthetic first.
pub fn known_benchmark_ids() -> Vec<&'static str> {
    SrBenchmark::ALL
        .iter()
        .map(|b| b.id())
        .chain(CircuitId::ALL.iter().map(|c| c.id()))
        .collect()
}

/// Generate a synthetic SR set or a circuit truth table by id.
pub fn generate(id: &str, seed: u64) -> Result<Dataset, DatasetError> {
    if let Ok(b) = id.parse::<SrBenchmark>() {
        return Ok(gen_synthetic_sr(b, seed));
    }
    match id.parse::<CircuitId>() {
        Ok(c) => Ok(gen_circuit(c)),
        Err(_) => Err(DatasetError::UnknownBenchmark {
            id: id.to_string(),
            valid: known_benchmark_ids().join(", "),
        }),
    }
}
