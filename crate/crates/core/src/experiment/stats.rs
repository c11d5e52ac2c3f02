//! Rank-sum test, Shapiro-Wilk normality test and significance marks.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::fitness::Orientation;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("need at least 3 observations, got {0}")]
    SampleTooSmall(usize),
    #[error("at most 5000 observations are supported, got {0}")]
    SampleTooLarge(usize),
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("exact test needs tie-free samples")]
    TiesPresent,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

/// Outcome of a rank-sum comparison of `a` against `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumResult {
    /// Sum of the (mid)ranks of `a` in the pooled sample.
    pub rank_sum: f64,
    /// Evidence that `a` tends to be smaller than `b`.
    pub p_less: f64,
    /// Evidence that `a` tends to be larger than `b`.
    pub p_greater: f64,
    pub p_two_sided: f64,
    pub exact: bool,
}

fn check(sample: &[f64]) -> Result<(), StatsError> {
    if sample.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Midranks of the pooled sample plus the tie-group sizes.
fn midranks(a: &[f64], b: &[f64]) -> (f64, Vec<usize>) {
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut rank_sum = 0.0;
    let mut ties = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + 1 + j) as f64 / 2.0;
        rank_sum += rank * pooled[i..j].iter().filter(|p| p.1).count() as f64;
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (rank_sum, ties)
}

fn two_sided(p_less: f64, p_greater: f64) -> f64 {
    (2.0 * p_less.min(p_greater)).min(1.0)
}

/// Exact null distribution of the rank sum by counting rank subsets.
pub fn rank_sum_exact(a: &[f64], b: &[f64]) -> Result<RankSumResult, StatsError> {
    check(a)?;
    check(b)?;
    let (rank_sum, ties) = midranks(a, b);
    if !ties.is_empty() {
        return Err(StatsError::TiesPresent);
    }
    let (m, n) = (a.len(), a.len() + b.len());
    let max_sum = n * (n + 1) / 2;
    // ways[k][s]: subsets of the ranks seen so far with k members summing to s
    let mut ways = vec![vec![0f64; max_sum + 1]; m + 1];
    ways[0][0] = 1.0;
    for r in 1..=n {
        for k in (1..=m.min(r)).rev() {
            for s in (r..=max_sum).rev() {
                ways[k][s] += ways[k - 1][s - r];
            }
        }
    }
    let total: f64 = ways[m].iter().sum();
    let w = rank_sum.round() as usize;
    let p_less = ways[m][..=w].iter().sum::<f64>() / total;
    let p_greater = ways[m][w..].iter().sum::<f64>() / total;
    Ok(RankSumResult {
        rank_sum,
        p_less,
        p_greater,
        p_two_sided: two_sided(p_less, p_greater),
        exact: true,
    })
}

/// Normal approximation with tie and continuity corrections.
pub fn rank_sum_normal(a: &[f64], b: &[f64]) -> Result<RankSumResult, StatsError> {
    check(a)?;
    check(b)?;
    let (rank_sum, ties) = midranks(a, b);
    let (m, n2) = (a.len() as f64, b.len() as f64);
    let n = m + n2;
    let u = rank_sum - m * (m + 1.0) / 2.0;
    let mean = m * n2 / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = m * n2 / 12.0 * ((n + 1.0) - tie_term);
    let (p_less, p_greater) = if var > 0.0 {
        let sd = var.sqrt();
        let normal = std_normal();
        (
            normal.cdf((u - mean + 0.5) / sd).min(1.0),
            normal.sf((u - mean - 0.5) / sd).min(1.0),
        )
    } else {
        (1.0, 1.0)
    };
    Ok(RankSumResult {
        rank_sum,
        p_less,
        p_greater,
        p_two_sided: two_sided(p_less, p_greater),
        exact: false,
    })
}

/// Exact when the pooled size is at most 20 and there are no ties,
/// otherwise the normal approximation.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumResult, StatsError> {
    if a.len() + b.len() <= 20 {
        match rank_sum_exact(a, b) {
            Err(StatsError::TiesPresent) => {}
            other => return other,
        }
    }
    rank_sum_normal(a, b)
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Shapiro-Wilk W and p-value (Royston's approximation).
pub fn shapiro_wilk(sample: &[f64]) -> Result<(f64, f64), StatsError> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    const G: [f64; 2] = [-2.273, 0.459];

    let n = sample.len();
    if n < 3 {
        return Err(StatsError::SampleTooSmall(n));
    }
    if n > 5000 {
        return Err(StatsError::SampleTooLarge(n));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    if x[n - 1] - x[0] <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let nf = n as f64;
    let half = n / 2;
    let normal = std_normal();

    let mut a = vec![0.0; half];
    if n == 3 {
        a[0] = 0.5f64.sqrt();
    } else {
        let m: Vec<f64> = (1..=half)
            .map(|i| normal.inverse_cdf((i as f64 - 0.375) / (nf + 0.25)))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / nf.sqrt();
        let a1 = poly(&C1, rsn) - m[0] / ssumm2;
        let (first, fac) = if n > 5 {
            let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            a[1] = a2;
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        a[0] = a1;
        for i in first..half {
            a[i] = -m[i] / fac;
        }
    }

    let mean = x.iter().sum::<f64>() / nf;
    let ssq: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = (0..half).map(|i| a[i] * (x[n - 1 - i] - x[i])).sum();
    let w = (num * num / ssq).min(1.0);

    if n == 3 {
        let p = 6.0 / std::f64::consts::PI * (w.sqrt().asin() - std::f64::consts::FRAC_PI_3);
        return Ok((w, p.max(0.0)));
    }
    let w1 = (1.0 - w).ln();
    let (z, m, s) = if n <= 11 {
        let gamma = poly(&G, nf);
        if w1 >= gamma {
            return Ok((w, 1e-99));
        }
        (-(gamma - w1).ln(), poly(&C3, nf), poly(&C4, nf).exp())
    } else {
        let ln_n = nf.ln();
        (w1, poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    Ok((w, normal.sf((z - m) / s)))
}

/// Outcome of comparing a treatment with the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mark {
    #[serde(rename = "+")]
    Better,
    #[serde(rename = "=")]
    Same,
    #[serde(rename = "-")]
    Worse,
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Better => "+",
            Mark::Same => "=",
            Mark::Worse => "-",
        })
    }
}

/// `=` when the two-sided rank-sum p-value is at least `alpha`; otherwise
/// `+` if the one-sided test in the treatment's favour is significant and
/// `-` if not.
pub fn mark_significance(
    baseline: &[f64],
    treatment: &[f64],
    orientation: Orientation,
    alpha: f64,
) -> Result<(Mark, RankSumResult), StatsError> {
    let r = wilcoxon_rank_sum(treatment, baseline)?;
    let favourable = match orientation {
        Orientation::LowerBetter => r.p_less,
        Orientation::HigherBetter => r.p_greater,
    };
    let mark = if r.p_two_sided >= alpha {
        Mark::Same
    } else if favourable < alpha {
        Mark::Better
    } else {
        Mark::Worse
    };
    Ok((mark, r))
}

/// Mean of best-of-run effective sizes; `None` for no runs.
pub fn effective_size_summary(sizes: &[usize]) -> Option<f64> {
    if sizes.is_empty() {
        None
    } else {
        Some(sizes.iter().sum::<usize>() as f64 / sizes.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_small_case() {
        let r = rank_sum_exact(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert!((r.p_less - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.p_greater, 1.0);
        assert!((r.p_two_sided - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.rank_sum, 3.0);
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(wilcoxon_rank_sum(&a, &a).unwrap().p_two_sided, 1.0);
        let c = [2.0; 12];
        assert_eq!(wilcoxon_rank_sum(&c, &c).unwrap().p_two_sided, 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(wilcoxon_rank_sum(&[], &[1.0]), Err(StatsError::EmptySample));
        assert_eq!(
            rank_sum_exact(&[1.0, 1.0], &[2.0]),
            Err(StatsError::TiesPresent)
        );
        assert_eq!(
            shapiro_wilk(&[1.0, 2.0]),
            Err(StatsError::SampleTooSmall(2))
        );
        assert_eq!(shapiro_wilk(&[3.0; 10]), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn shapiro_three_points() {
        // equally spaced: W = 1, p = 1
        let (w, p) = shapiro_wilk(&[1.0, 2.0, 3.0]).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn marks() {
        let base: Vec<f64> = (0..30).map(|i| 10.0 + i as f64 * 0.1).collect();
        let better: Vec<f64> = base.iter().map(|v| v - 100.0).collect();
        let worse: Vec<f64> = base.iter().map(|v| v + 100.0).collect();
        let lb = Orientation::LowerBetter;
        assert_eq!(
            mark_significance(&base, &base, lb, 0.05).unwrap().0,
            Mark::Same
        );
        assert_eq!(
            mark_significance(&base, &better, lb, 0.05).unwrap().0,
            Mark::Better
        );
        assert_eq!(
            mark_significance(&base, &worse, lb, 0.05).unwrap().0,
            Mark::Worse
        );
        let hb = Orientation::HigherBetter;
        assert_eq!(
            mark_significance(&base, &worse, hb, 0.05).unwrap().0,
            Mark::Better
        );
    }

    #[test]
    fn effective_sizes() {
        assert_eq!(effective_size_summary(&[40]), Some(40.0));
        assert_eq!(effective_size_summary(&[10, 20, 30]), Some(20.0));
        assert_eq!(effective_size_summary(&[]), None);
    }
}
