//! Fitness for both domains: RMSE of arithmetic phenotypes and hit counts of
//! boolean circuits. The engine minimizes, so circuit fitness is the
//! negated hit count.

mod circuit;
mod sr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use circuit::CircuitExpression;
pub use sr::{pdiv, Func, SrExpression};

use crate::datasets::{Dataset, Domain};
use crate::ge::PENALTY;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FitnessError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no observations")]
    EmptyInput,
    #[error("row {row} has width {found}, expected {expected}")]
    ShapeMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot parse phenotype at offset {offset}: {message}")]
    PhenotypeParse { offset: usize, message: String },
    #[error("`{name}` is not one of the {input_count} input bits")]
    UnknownInputBit { name: String, input_count: usize },
    #[error("`{name}` is not one of the {feature_count} features")]
    UnknownVariable { name: String, feature_count: usize },
    #[error("circuit has {found} outputs, dataset has {expected}")]
    OutputArity { expected: usize, found: usize },
}

impl FitnessError {
    fn parse(offset: usize, message: impl Into<String>) -> Self {
        FitnessError::PhenotypeParse {
            offset,
            message: message.into(),
        }
    }

    fn shifted(self, by: usize) -> Self {
        match self {
            FitnessError::PhenotypeParse { offset, message } => FitnessError::PhenotypeParse {
                offset: offset + by,
                message,
            },
            other => other,
        }
    }
}

/// Whether smaller or larger test scores are better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    LowerBetter,
    HigherBetter,
}

impl Orientation {
    pub fn for_domain(domain: Domain) -> Self {
        match domain {
            Domain::RealSr => Orientation::LowerBetter,
            Domain::Circuit => Orientation::HigherBetter,
        }
    }
}

pub fn rmse(predicted: &[f64], observed: &[f64]) -> Result<f64, FitnessError> {
    if predicted.len() != observed.len() {
        return Err(FitnessError::LengthMismatch {
            left: predicted.len(),
            right: observed.len(),
        });
    }
    if predicted.is_empty() {
        return Err(FitnessError::EmptyInput);
    }
    let sum: f64 = predicted
        .iter()
        .zip(observed)
        .map(|(p, o)| (p - o) * (p - o))
        .sum();
    Ok((sum / predicted.len() as f64).sqrt())
}

/// Rows whose every bit matches.
pub fn hit_count(predicted: &[Vec<bool>], observed: &[Vec<bool>]) -> Result<usize, FitnessError> {
    if predicted.len() != observed.len() {
        return Err(FitnessError::LengthMismatch {
            left: predicted.len(),
            right: observed.len(),
        });
    }
    let mut hits = 0;
    for (row, (p, o)) in predicted.iter().zip(observed).enumerate() {
        if p.len() != o.len() {
            return Err(FitnessError::ShapeMismatch {
                row,
                expected: o.len(),
                found: p.len(),
            });
        }
        hits += usize::from(p == o);
    }
    Ok(hits)
}

/// RMSE of `phenotype` over the dataset's first output, or [`PENALTY`] when
/// any prediction is non-finite or the error reaches the penalty.
pub fn eval_sr(phenotype: &str, dataset: &Dataset) -> Result<f64, FitnessError> {
    let expr = SrExpression::parse(phenotype, dataset.feature_count())?;
    let mut stack = Vec::new();
    let mut sum = 0.0;
    for case in dataset.cases() {
        let p = expr.eval_with(&case.inputs, &mut stack);
        if !p.is_finite() {
            return Ok(PENALTY);
        }
        let r = p - case.outputs[0];
        sum += r * r;
    }
    let score = (sum / dataset.len() as f64).sqrt();
    Ok(if score.is_finite() && score < PENALTY {
        score
    } else {
        PENALTY
    })
}

fn bits(values: &[f64]) -> Vec<bool> {
    values.iter().map(|&v| v != 0.0).collect()
}

/// Number of rows on which the circuit reproduces every output bit.
pub fn eval_circuit(phenotype: &str, dataset: &Dataset) -> Result<usize, FitnessError> {
    let circuit = CircuitExpression::parse(phenotype, dataset.feature_count())?;
    if circuit.output_count() != dataset.output_count() {
        return Err(FitnessError::OutputArity {
            expected: dataset.output_count(),
            found: circuit.output_count(),
        });
    }
    let mut stack = Vec::new();
    Ok(dataset
        .cases()
        .iter()
        .filter(|case| {
            circuit.eval_row_with(&bits(&case.inputs), &mut stack) == bits(&case.outputs)
        })
        .count())
}

/// Engine fitness (minimized) of a phenotype on `dataset`: RMSE for
/// regression, negated hits for circuits, [`PENALTY`] if it fails to parse.
pub fn training_fitness(phenotype: &str, dataset: &Dataset) -> f64 {
    match dataset.domain() {
        Domain::RealSr => eval_sr(phenotype, dataset).unwrap_or(PENALTY),
        Domain::Circuit => match eval_circuit(phenotype, dataset) {
            Ok(hits) => -(hits as f64),
            Err(_) => PENALTY,
        },
    }
}

/// Reported test score: RMSE (penalty when invalid) or hit count (zero when
/// invalid).
pub fn test_score(phenotype: Option<&str>, dataset: &Dataset) -> f64 {
    match (dataset.domain(), phenotype) {
        (Domain::RealSr, Some(p)) => eval_sr(p, dataset).unwrap_or(PENALTY),
        (Domain::RealSr, None) => PENALTY,
        (Domain::Circuit, Some(p)) => eval_circuit(p, dataset).map_or(0.0, |h| h as f64),
        (Domain::Circuit, None) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{gen_circuit, CircuitId, TestCase};

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[0.0], &[3.0]).unwrap(), 3.0);
        assert_eq!(rmse(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(rmse(&[], &[]), Err(FitnessError::EmptyInput));
        assert!(matches!(
            rmse(&[1.0], &[]),
            Err(FitnessError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn hit_examples() {
        let rows: Vec<Vec<bool>> = (0..32).map(|i| vec![i % 2 == 0, i % 3 == 0]).collect();
        assert_eq!(hit_count(&rows, &rows).unwrap(), 32);
        let flipped: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|b| !b).collect())
            .collect();
        assert_eq!(hit_count(&flipped, &rows).unwrap(), 0);
        let mut one_off = rows[..10].to_vec();
        one_off[4][1] = !one_off[4][1];
        assert_eq!(hit_count(&one_off, &rows[..10]).unwrap(), 9);
        assert!(matches!(
            hit_count(&[vec![true]], &[vec![true, false]]),
            Err(FitnessError::ShapeMismatch { row: 0, .. })
        ));
    }

    #[test]
    fn sr_identity_and_penalty() {
        let cases = (0..5)
            .map(|i| TestCase {
                id: i,
                inputs: vec![i as f64],
                outputs: vec![i as f64],
            })
            .collect();
        let d = Dataset::new("id", Domain::RealSr, cases).unwrap();
        assert_eq!(eval_sr("x0", &d).unwrap(), 0.0);
        assert_eq!(eval_sr("log(x0-10)", &d).unwrap(), PENALTY);
        assert_eq!(eval_sr("exp(exp(exp(x0*100)))", &d).unwrap(), PENALTY);
        assert!(eval_sr("x0 +", &d).is_err());
        assert_eq!(training_fitness("x0 +", &d), PENALTY);
    }

    #[test]
    fn parity_examples() {
        let d = gen_circuit(CircuitId::Parity5);
        assert_eq!(
            eval_circuit("i0 XOR i1 XOR i2 XOR i3 XOR i4", &d).unwrap(),
            32
        );
        assert_eq!(eval_circuit("0", &d).unwrap(), 16);
        assert!(matches!(
            eval_circuit("i9", &d),
            Err(FitnessError::UnknownInputBit { .. })
        ));
        assert_eq!(
            training_fitness("i0 XOR i1 XOR i2 XOR i3 XOR i4", &d),
            -32.0
        );
        assert_eq!(test_score(None, &d), 0.0);
    }

    #[test]
    fn output_arity_checked() {
        let d = gen_circuit(CircuitId::Comparator5);
        assert!(matches!(
            eval_circuit("i0", &d),
            Err(FitnessError::OutputArity {
                expected: 3,
                found: 1
            })
        ));
        assert_eq!(eval_circuit("0; 0; 0", &d).unwrap(), 0);
    }
}
