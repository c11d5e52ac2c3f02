//! Synthetic symbolic-regression benchmarks.
//!
//! Each benchmark is a target function plus a list of sampling blocks. A
//! block is either `n` independent uniform draws per variable (`U[a, b, n]`)
//! or a full mesh of evenly spaced points (`E[a, b, step]` per axis). The
//! blocks of a benchmark are concatenated in order; the experiment protocol
//! re-splits them 70/30, so the original train/test roles are not kept.
//!
//! | id | target | blocks |
//! |----|--------|--------|
//! | keijzer-4 | x³e⁻ˣ cos x sin x (sin²x cos x − 1) | E[0,10,0.05]; E[0.05,10.05,0.05] |
//! | keijzer-5 | 30xz / ((x − 10)y²) | x,z U[−1,1], y U[1,2]: 1000; 10000 |
//! | keijzer-9 | arcsinh x | E[0,100,1]; E[0,100,0.1] |
//! | keijzer-10 | xʸ | U[0,1,100]; E[0,1,0.01]² |
//! | keijzer-14 | 8 / (2 + x² + y²) | U[−3,3,20]; E[−3,3,0.1]² |
//! | nguyen-9 | sin x + sin y² | U[−1,1,20]; U[−1,1,1000] |
//! | nguyen-10 | 2 sin x cos y | U[−1,1,20]; U[−1,1,1000] |
//! | vladislavleva-5 | 30(x₁−1)(x₃−1) / (x₂²(x₁−10)) | U 300 on [0.05,2]×[1,2]×[0.05,2]; E[−0.05,2.1,0.15]×E[0.95,2.05,0.1]×E[−0.05,2.1,0.15] |
//! | korns-11 | 6.87 + 11 cos(7.23 x₀³) | U[−50,50,10000]⁵ twice |
//! | korns-12 | 2 − 2.1 cos(9.8 x₀) sin(1.3 x₄) | U[−50,50,10000]⁵ twice |

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetError, Domain, TestCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SrBenchmark {
    Keijzer4,
    Keijzer5,
    Keijzer9,
    Keijzer10,
    Keijzer14,
    Nguyen9,
    Nguyen10,
    Vladislavleva5,
    Korns11,
    Korns12,
}

enum Block {
    Uniform { ranges: Vec<(f64, f64)>, n: usize },
    Mesh { axes: Vec<(f64, f64, f64)> },
}

fn axis(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}

impl Block {
    fn points(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        match self {
            Block::Uniform { ranges, n } => (0..*n)
                .map(|_| {
                    ranges
                        .iter()
                        .map(|&(lo, hi)| rng.random_range(lo..hi))
                        .collect()
                })
                .collect(),
            Block::Mesh { axes } => {
                let mut points = vec![Vec::new()];
                for &(start, stop, step) in axes {
                    let values = axis(start, stop, step);
                    points = points
                        .into_iter()
                        .flat_map(|p| {
                            values.iter().map(move |&v| {
                                let mut q = p.clone();
                                q.push(v);
                                q
                            })
                        })
                        .collect();
                }
                points
            }
        }
    }
}

impl SrBenchmark {
    pub const ALL: [SrBenchmark; 10] = [
        SrBenchmark::Keijzer4,
        SrBenchmark::Keijzer9,
        SrBenchmark::Keijzer10,
        SrBenchmark::Keijzer14,
        SrBenchmark::Nguyen9,
        SrBenchmark::Nguyen10,
        SrBenchmark::Keijzer5,
        SrBenchmark::Vladislavleva5,
        SrBenchmark::Korns11,
        SrBenchmark::Korns12,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SrBenchmark::Keijzer4 => "keijzer-4",
            SrBenchmark::Keijzer5 => "keijzer-5",
            SrBenchmark::Keijzer9 => "keijzer-9",
            SrBenchmark::Keijzer10 => "keijzer-10",
            SrBenchmark::Keijzer14 => "keijzer-14",
            SrBenchmark::Nguyen9 => "nguyen-9",
            SrBenchmark::Nguyen10 => "nguyen-10",
            SrBenchmark::Vladislavleva5 => "vladislavleva-5",
            SrBenchmark::Korns11 => "korns-11",
            SrBenchmark::Korns12 => "korns-12",
        }
    }

    pub fn feature_count(self) -> usize {
        match self {
            SrBenchmark::Keijzer4 | SrBenchmark::Keijzer9 => 1,
            SrBenchmark::Keijzer10
            | SrBenchmark::Keijzer14
            | SrBenchmark::Nguyen9
            | SrBenchmark::Nguyen10 => 2,
            SrBenchmark::Keijzer5 | SrBenchmark::Vladislavleva5 => 3,
            SrBenchmark::Korns11 | SrBenchmark::Korns12 => 5,
        }
    }

    /// Target value at `x`.
    pub fn target(self, x: &[f64]) -> f64 {
        match self {
            SrBenchmark::Keijzer4 => {
                let v = x[0];
                v.powi(3) * (-v).exp() * v.cos() * v.sin() * (v.sin().powi(2) * v.cos() - 1.0)
            }
            SrBenchmark::Keijzer5 => 30.0 * x[0] * x[2] / ((x[0] - 10.0) * x[1] * x[1]),
            SrBenchmark::Keijzer9 => x[0].asinh(),
            SrBenchmark::Keijzer10 => x[0].powf(x[1]),
            SrBenchmark::Keijzer14 => 8.0 / (2.0 + x[0] * x[0] + x[1] * x[1]),
            SrBenchmark::Nguyen9 => x[0].sin() + (x[1] * x[1]).sin(),
            SrBenchmark::Nguyen10 => 2.0 * x[0].sin() * x[1].cos(),
            SrBenchmark::Vladislavleva5 => {
                30.0 * (x[0] - 1.0) * (x[2] - 1.0) / (x[1] * x[1] * (x[0] - 10.0))
            }
            SrBenchmark::Korns11 => 6.87 + 11.0 * (7.23 * x[0].powi(3)).cos(),
            SrBenchmark::Korns12 => 2.0 - 2.1 * (9.8 * x[0]).cos() * (1.3 * x[4]).sin(),
        }
    }

    fn blocks(self) -> Vec<Block> {
        let uniform = |ranges: &[(f64, f64)], n| Block::Uniform {
            ranges: ranges.to_vec(),
            n,
        };
        let mesh = |axes: &[(f64, f64, f64)]| Block::Mesh {
            axes: axes.to_vec(),
        };
        match self {
            SrBenchmark::Keijzer4 => vec![mesh(&[(0.0, 10.0, 0.05)]), mesh(&[(0.05, 10.05, 0.05)])],
            SrBenchmark::Keijzer5 => {
                let r = [(-1.0, 1.0), (1.0, 2.0), (-1.0, 1.0)];
                vec![uniform(&r, 1000), uniform(&r, 10000)]
            }
            SrBenchmark::Keijzer9 => vec![mesh(&[(0.0, 100.0, 1.0)]), mesh(&[(0.0, 100.0, 0.1)])],
            SrBenchmark::Keijzer10 => {
                vec![uniform(&[(0.0, 1.0); 2], 100), mesh(&[(0.0, 1.0, 0.01); 2])]
            }
            SrBenchmark::Keijzer14 => {
                vec![uniform(&[(-3.0, 3.0); 2], 20), mesh(&[(-3.0, 3.0, 0.1); 2])]
            }
            SrBenchmark::Nguyen9 | SrBenchmark::Nguyen10 => vec![
                uniform(&[(-1.0, 1.0); 2], 20),
                uniform(&[(-1.0, 1.0); 2], 1000),
            ],
            SrBenchmark::Vladislavleva5 => vec![
                uniform(&[(0.05, 2.0), (1.0, 2.0), (0.05, 2.0)], 300),
                mesh(&[(-0.05, 2.1, 0.15), (0.95, 2.05, 0.1), (-0.05, 2.1, 0.15)]),
            ],
            SrBenchmark::Korns11 | SrBenchmark::Korns12 => vec![
                uniform(&[(-50.0, 50.0); 5], 10000),
                uniform(&[(-50.0, 50.0); 5], 10000),
            ],
        }
    }
}

impl FromStr for SrBenchmark {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        SrBenchmark::ALL
            .into_iter()
            .find(|b| b.id().replace('-', "") == norm)
            .ok_or_else(|| DatasetError::UnknownBenchmark {
                id: s.to_string(),
                valid: SrBenchmark::ALL.map(|b| b.id()).join(", "),
            })
    }
}

/// Sample a synthetic benchmark. Pure in `(benchmark, seed)`.
pub fn gen_synthetic_sr(benchmark: SrBenchmark, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = benchmark
        .blocks()
        .iter()
        .flat_map(|b| b.points(&mut rng))
        .enumerate()
        .map(|(id, inputs)| {
            let y = benchmark.target(&inputs);
            TestCase {
                id,
                inputs,
                outputs: vec![y],
            }
        })
        .collect();
    Dataset::new(benchmark.id(), Domain::RealSr, cases).expect("generators produce uniform arity")
}
