//! Partitioning of input test cases before selection: K-Means++ with an
//! elbow-chosen `k` for real inputs, complete-linkage agglomerative
//! clustering under Hamming distance for bit inputs.

mod ahc;
mod kmeans;

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ahc::{ahc_complete, cut_dendrogram, dendrogram, Dendrogram, Merge};
pub use kmeans::{choose_k_elbow, default_k_range, distinct_count, kmeans_pp, knee, KMeansResult};

use crate::datasets::{Dataset, Domain};
use crate::dbs::BitString;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} but only {distinct} distinct points")]
    KTooLarge { k: usize, distinct: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("no points to cluster")]
    Empty,
    #[error("bit-strings have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("points have dimensions {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("label {label} is out of range or leaves a cluster empty")]
    InvalidLabels { label: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMethod {
    Kmeans,
    Ahc,
    /// Everything in one cluster.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
    method: ClusterMethod,
}

impl ClusterAssignment {
    /// Labels must cover `0..k` with no gaps, where `k` is one past the
    /// largest label.
    pub fn new(labels: Vec<usize>, method: ClusterMethod) -> Result<Self, ClusterError> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(label) = seen.iter().position(|s| !s) {
            return Err(ClusterError::InvalidLabels { label });
        }
        Ok(ClusterAssignment { labels, k, method })
    }

    pub fn single(n: usize) -> Self {
        ClusterAssignment {
            labels: vec![0; n],
            k: usize::from(n > 0),
            method: ClusterMethod::None,
        }
    }

    /// Relabel so clusters are numbered by their smallest member.
    pub(crate) fn canonical(labels: &[usize], method: ClusterMethod) -> Self {
        let mut map = std::collections::HashMap::new();
        let relabeled = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        ClusterAssignment {
            labels: relabeled,
            k: map.len(),
            method,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn method(&self) -> ClusterMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Case indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members().iter().map(Vec::len).collect()
    }

    /// `case_index,cluster_label` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "case_index,cluster_label")?;
        for (i, l) in self.labels.iter().enumerate() {
            writeln!(w, "{i},{l}")?;
        }
        Ok(())
    }
}

/// Cluster a dataset's inputs the way the experiment does: elbow-chosen
/// K-Means++ for regression data, complete-linkage AHC for circuits.
pub fn cluster_dataset(dataset: &Dataset, seed: u64) -> Result<ClusterAssignment, ClusterError> {
    match dataset.domain() {
        Domain::RealSr => {
            let points: Vec<Vec<f64>> = dataset.cases().iter().map(|c| c.inputs.clone()).collect();
            let range = default_k_range(&points)?;
            let k = choose_k_elbow(&points, range, seed)?;
            Ok(kmeans_pp(&points, k, kmeans::DEFAULT_MAX_ITERS, seed)?.assignment)
        }
        Domain::Circuit => {
            let bits: Vec<BitString> = dataset
                .cases()
                .iter()
                .map(|c| BitString::from_values(&c.inputs))
                .collect();
            Ok(ahc_complete(&bits)?.0)
        }
    }
}
