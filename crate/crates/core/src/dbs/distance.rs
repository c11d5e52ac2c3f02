use serde::{Deserialize, Serialize};

use super::DbsError;

/// Packed bit-string for Hamming distances over circuit inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        BitString {
            words,
            len: bits.len(),
        }
    }

    /// Nonzero values count as set bits.
    pub fn from_values(values: &[f64]) -> Self {
        let bits: Vec<bool> = values.iter().map(|&v| v != 0.0).collect();
        Self::from_bools(&bits)
    }

    /// Parse a string of `0`/`1` characters.
    pub fn parse(text: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = text
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Self::from_bools(&b))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Hamming,
}

pub fn distance_euclidean(p: &[f64], q: &[f64]) -> Result<f64, DbsError> {
    if p.len() != q.len() {
        return Err(DbsError::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(euclidean(p, q))
}

pub(crate) fn euclidean(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt()
}

pub fn distance_hamming(p: &BitString, q: &BitString) -> Result<u32, DbsError> {
    if p.len != q.len {
        return Err(DbsError::LengthMismatch {
            left: p.len,
            right: q.len,
        });
    }
    Ok(hamming(p, q))
}

pub(crate) fn hamming(p: &BitString, q: &BitString) -> u32 {
    p.words
        .iter()
        .zip(&q.words)
        .map(|(a, b)| (a ^ b).count_ones())
        .sum()
}

/// Input vectors prepared for one metric.
#[derive(Debug, Clone)]
pub enum Points {
    Real(Vec<Vec<f64>>),
    Bits(Vec<BitString>),
}

impl Points {
    /// Prepare `inputs` for `metric`, checking they share one dimension.
    pub fn new(inputs: &[&[f64]], metric: Metric) -> Result<Self, DbsError> {
        if let Some(first) = inputs.first() {
            if let Some(bad) = inputs.iter().find(|p| p.len() != first.len()) {
                return Err(match metric {
                    Metric::Euclidean => DbsError::DimensionMismatch {
                        left: first.len(),
                        right: bad.len(),
                    },
                    Metric::Hamming => DbsError::LengthMismatch {
                        left: first.len(),
                        right: bad.len(),
                    },
                });
            }
        }
        Ok(match metric {
            Metric::Euclidean => Points::Real(inputs.iter().map(|p| p.to_vec()).collect()),
            Metric::Hamming => {
                Points::Bits(inputs.iter().map(|p| BitString::from_values(p)).collect())
            }
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Points::Real(p) => p.len(),
            Points::Bits(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self {
            Points::Real(p) => euclidean(&p[i], &p[j]),
            Points::Bits(p) => hamming(&p[i], &p[j]) as f64,
        }
    }
}

/// Strict lower triangle of a symmetric distance matrix, stored row by row:
/// entry `(j, k)` with `k < j` lives at `j(j-1)/2 + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn pair_index(j: usize, k: usize) -> usize {
        debug_assert!(k < j);
        j * (j - 1) / 2 + k
    }

    /// Inverse of [`pair_index`](Self::pair_index): the `(j, k)` pair stored at `index`.
    pub fn pair_at(index: usize) -> (usize, usize) {
        let mut j = ((1.0 + (1.0 + 8.0 * index as f64).sqrt()) / 2.0) as usize;
        while j * (j - 1) / 2 > index {
            j -= 1;
        }
        while (j + 1) * j / 2 <= index {
            j += 1;
        }
        (j, index - j * (j - 1) / 2)
    }

    /// Symmetric lookup; the diagonal is zero.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => self.entries[Self::pair_index(a, b)],
            std::cmp::Ordering::Less => self.entries[Self::pair_index(b, a)],
        }
    }
}

pub fn build_distance_matrix(
    inputs: &[&[f64]],
    metric: Metric,
) -> Result<DistanceMatrix, DbsError> {
    let points = Points::new(inputs, metric)?;
    let n = points.len();
    let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for k in 0..j {
            entries.push(points.distance(j, k));
        }
    }
    Ok(DistanceMatrix { n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_examples() {
        assert_eq!(distance_euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(
            distance_euclidean(&[1.0, 2.0, 3.0], &[4.0, 6.0, 3.0]).unwrap(),
            5.0
        );
        assert_eq!(distance_euclidean(&[2.5], &[2.5]).unwrap(), 0.0);
        assert!(matches!(
            distance_euclidean(&[1.0], &[1.0, 2.0]),
            Err(DbsError::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn hamming_examples() {
        let b = |s| BitString::parse(s).unwrap();
        assert_eq!(distance_hamming(&b("10110"), &b("10011")).unwrap(), 2);
        assert_eq!(distance_hamming(&b("1111"), &b("0000")).unwrap(), 4);
        assert_eq!(distance_hamming(&b("0110"), &b("0110")).unwrap(), 0);
        assert!(distance_hamming(&b("0110"), &b("01101")).is_err());
        let long: String = (0..130)
            .map(|i| if i % 3 == 0 { '1' } else { '0' })
            .collect();
        assert_eq!(
            distance_hamming(&b(&long), &BitString::from_bools(&[false; 130])).unwrap(),
            44
        );
    }

    #[test]
    fn matrix_layout() {
        let pts: [&[f64]; 3] = [&[0.0], &[1.0], &[3.0]];
        let m = build_distance_matrix(&pts, Metric::Euclidean).unwrap();
        assert_eq!(m.entries(), [1.0, 3.0, 2.0]);
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(2, 1), 2.0);
        let one: [&[f64]; 1] = [&[7.0]];
        assert!(build_distance_matrix(&one, Metric::Euclidean)
            .unwrap()
            .entries()
            .is_empty());
    }

    #[test]
    fn pair_index_round_trip() {
        for j in 1..60 {
            for k in 0..j {
                assert_eq!(
                    DistanceMatrix::pair_at(DistanceMatrix::pair_index(j, k)),
                    (j, k)
                );
            }
        }
    }
}
