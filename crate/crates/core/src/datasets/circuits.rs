//! Exhaustive truth tables for the digital-circuit benchmarks.
//!
//! Rows run over every input combination in ascending order with `i0` as the
//! most significant bit of the row number. Multi-bit words are read MSB
//! first from their lowest-numbered input.

use std::str::FromStr;

use super::{Dataset, DatasetError, Domain, TestCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircuitId {
    /// Two 5-bit words A = i0..i4, B = i5..i9; outputs (A > B, A = B, A < B).
    Comparator5,
    /// Odd parity of five inputs.
    Parity5,
    /// Select lines i0..i2 pick one of the data lines i3..i10 (i3 is line 0).
    Mux11,
    /// Control i0 i1 picks add, subtract, AND, OR over A = i2..i6 and
    /// B = i7..i11; the 5-bit result wraps and is output MSB first.
    Alu,
}

impl CircuitId {
    pub const ALL: [CircuitId; 4] = [
        CircuitId::Comparator5,
        CircuitId::Parity5,
        CircuitId::Mux11,
        CircuitId::Alu,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CircuitId::Comparator5 => "comparator5",
            CircuitId::Parity5 => "parity5",
            CircuitId::Mux11 => "mux11",
            CircuitId::Alu => "alu",
        }
    }

    pub fn input_count(self) -> usize {
        match self {
            CircuitId::Comparator5 => 10,
            CircuitId::Parity5 => 5,
            CircuitId::Mux11 => 11,
            CircuitId::Alu => 12,
        }
    }

    pub fn output_count(self) -> usize {
        match self {
            CircuitId::Comparator5 => 3,
            CircuitId::Parity5 | CircuitId::Mux11 => 1,
            CircuitId::Alu => 5,
        }
    }

    /// Expected outputs for one input row.
    pub fn outputs(self, bits: &[bool]) -> Vec<bool> {
        let word = |range: std::ops::Range<usize>| {
            bits[range]
                .iter()
                .fold(0u32, |acc, &b| (acc << 1) | b as u32)
        };
        match self {
            CircuitId::Comparator5 => {
                let (a, b) = (word(0..5), word(5..10));
                vec![a > b, a == b, a < b]
            }
            CircuitId::Parity5 => vec![bits.iter().filter(|&&b| b).count() % 2 == 1],
            CircuitId::Mux11 => vec![bits[3 + word(0..3) as usize]],
            CircuitId::Alu => {
                let (a, b) = (word(2..7), word(7..12));
                let r = match word(0..2) {
                    0 => a.wrapping_add(b),
                    1 => a.wrapping_sub(b),
                    2 => a & b,
                    _ => a | b,
                } & 0b11111;
                (0..5).rev().map(|k| (r >> k) & 1 == 1).collect()
            }
        }
    }
}

impl FromStr for CircuitId {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let found = match norm.as_str() {
            "comparator5" | "comparator" | "5bitcomparator" => Some(CircuitId::Comparator5),
            "parity5" | "parity" | "5bitparity" => Some(CircuitId::Parity5),
            "mux11" | "multiplexer11" | "11bitmultiplexer" | "multiplexer" => {
                Some(CircuitId::Mux11)
            }
            "alu" | "alu4" | "4bitalu" => Some(CircuitId::Alu),
            _ => None,
        };
        found.ok_or_else(|| DatasetError::UnknownCircuit {
            id: s.to_string(),
            valid: CircuitId::ALL.map(|c| c.id()).join(", "),
        })
    }
}

pub fn gen_circuit(circuit: CircuitId) -> Dataset {
    let n = circuit.input_count();
    let bit = |b: bool| if b { 1.0 } else { 0.0 };
    let cases = (0..1usize << n)
        .map(|row| {
            let bits: Vec<bool> = (0..n).map(|i| (row >> (n - 1 - i)) & 1 == 1).collect();
            TestCase {
                id: row,
                inputs: bits.iter().map(|&b| bit(b)).collect(),
                outputs: circuit.outputs(&bits).into_iter().map(bit).collect(),
            }
        })
        .collect();
    Dataset::new(circuit.id(), Domain::Circuit, cases).expect("truth tables are binary")
}
