//! Distance-based selection: within each cluster, keep the cases that
//! appear earliest when pairs are walked from most to least distant.

pub mod distance;

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::ClusterAssignment;
use crate::datasets::{Dataset, DatasetError, Domain};
pub use distance::{
    build_distance_matrix, distance_euclidean, distance_hamming, BitString, DistanceMatrix, Metric,
    Points,
};

#[derive(Debug, Error)]
pub enum DbsError {
    #[error("vectors have dimensions {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("bit-strings have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("budget {0}% is outside (0, 100]")]
    InvalidBudget(f64),
    #[error("assignment covers {labels} cases but the dataset has {cases}")]
    AssignmentMismatch { labels: usize, cases: usize },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Training budgets evaluated against the baseline, in percent.
pub const BUDGET_SCHEDULE: [f64; 6] = [70.0, 65.0, 60.0, 55.0, 50.0, 45.0];

pub fn budget_schedule() -> Vec<f64> {
    BUDGET_SCHEDULE.to_vec()
}

pub fn metric_for(domain: Domain) -> Metric {
    match domain {
        Domain::RealSr => Metric::Euclidean,
        Domain::Circuit => Metric::Hamming,
    }
}

/// Cases to keep from a cluster of `n`: `ceil(budget * n / 100)`, at least
/// one and at most `n`.
pub fn selection_count(budget_percent: f64, n: usize) -> usize {
    let raw = (budget_percent * n as f64 / 100.0 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPlan {
    pub budget_percent: f64,
    /// Target count per cluster, already capped at the cluster size.
    pub per_cluster_counts: Vec<usize>,
    /// Selected case indices per cluster, in selection order.
    pub per_cluster: Vec<Vec<usize>>,
    /// Concatenation of `per_cluster` in cluster order.
    pub selected_indices: Vec<usize>,
}

impl SelectionPlan {
    pub fn len(&self) -> usize {
        self.selected_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected_indices.is_empty()
    }

    /// The selected cases as a dataset.
    pub fn training_set(&self, dataset: &Dataset) -> Result<Dataset, DbsError> {
        let name = format!("{}-dbs{}", dataset.name(), self.budget_percent);
        Ok(dataset.subset(name, &self.selected_indices)?)
    }

    /// `cluster,rank,case_index` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), DbsError> {
        writeln!(w, "cluster,rank,case_index")?;
        for (cluster, cases) in self.per_cluster.iter().enumerate() {
            for (rank, case) in cases.iter().enumerate() {
                writeln!(w, "{cluster},{rank},{case}")?;
            }
        }
        Ok(())
    }
}

/// Walk order for pairs: larger distance first, then smaller pair index.
fn pair_order(a: (f64, usize), b: (f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Local indices of the first `count` cases reached by the pair walk.
///
/// Sorting every pair is quadratic in memory. Instead, note that a case
/// enters the walk at the first pair that contains it, so the walk order of
/// cases is the order of each case's own best pair, with the smaller index
/// of a shared pair first. Finding each case's best pair is a linear scan.
pub fn select_in_cluster(points: &Points, count: usize) -> Vec<usize> {
    let n = points.len();
    if n <= 1 {
        return (0..n.min(count)).collect();
    }
    let best: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    (points.distance(hi, lo), DistanceMatrix::pair_index(hi, lo))
                })
                .min_by(|&a, &b| pair_order(a, b))
                .expect("n >= 2")
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pair_order(best[a], best[b]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

/// Apply the distance-based selection to every cluster of `assignment`.
/// Distances use the dataset inputs only: Euclidean for regression data,
/// Hamming for circuits.
pub fn dbs_select(
    dataset: &Dataset,
    assignment: &ClusterAssignment,
    budget_percent: f64,
) -> Result<SelectionPlan, DbsError> {
    if !(budget_percent > 0.0 && budget_percent <= 100.0) {
        return Err(DbsError::InvalidBudget(budget_percent));
    }
    if assignment.len() != dataset.len() {
        return Err(DbsError::AssignmentMismatch {
            labels: assignment.len(),
            cases: dataset.len(),
        });
    }
    let metric = metric_for(dataset.domain());
    let clusters = assignment.members();
    let per_cluster: Vec<(usize, Vec<usize>)> = clusters
        .par_iter()
        .map(|members| {
            let inputs: Vec<&[f64]> = members
                .iter()
                .map(|&i| dataset.cases()[i].inputs.as_slice())
                .collect();
            let points = Points::new(&inputs, metric)?;
            let count = selection_count(budget_percent, members.len());
            let local = select_in_cluster(&points, count);
            Ok((count, local.into_iter().map(|l| members[l]).collect()))
        })
        .collect::<Result<_, DbsError>>()?;
    let (per_cluster_counts, per_cluster): (Vec<_>, Vec<_>) = per_cluster.into_iter().unzip();
    Ok(SelectionPlan {
        budget_percent,
        selected_indices: per_cluster.concat(),
        per_cluster_counts,
        per_cluster,
    })
}
