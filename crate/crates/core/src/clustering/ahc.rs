use serde::{Deserialize, Serialize};

use super::{ClusterAssignment, ClusterError, ClusterMethod};
use crate::dbs::distance::hamming;
use crate::dbs::BitString;

/// One agglomeration step. Clusters are named by their smallest member, so
/// `a < b` and the merged cluster keeps the name `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

/// Condensed strict upper triangle of pairwise distances between cluster slots.
struct Linkage {
    n: usize,
    d: Vec<u32>,
}

impl Linkage {
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    fn get(&self, i: usize, j: usize) -> u32 {
        self.d[self.idx(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: u32) {
        let k = self.idx(i, j);
        self.d[k] = v;
    }
}

/// Closest active slot after `i`, ties to the smaller slot.
fn row_min(link: &Linkage, active: &[bool], i: usize) -> Option<(u32, usize)> {
    let mut best: Option<(u32, usize)> = None;
    for (j, _) in active.iter().enumerate().skip(i + 1).filter(|(_, a)| **a) {
        let d = link.get(i, j);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, j));
        }
    }
    best
}

fn check_lengths(points: &[BitString]) -> Result<(), ClusterError> {
    let first = points.first().ok_or(ClusterError::Empty)?;
    match points.iter().find(|p| p.len() != first.len()) {
        Some(bad) => Err(ClusterError::LengthMismatch {
            left: first.len(),
            right: bad.len(),
        }),
        None => Ok(()),
    }
}

/// Full complete-linkage merge sequence under Hamming distance. At each step
/// the closest pair of clusters merges; ties go to the lexicographically
/// smallest `(a, b)`.
pub fn dendrogram(points: &[BitString]) -> Result<Dendrogram, ClusterError> {
    check_lengths(points)?;
    let n = points.len();
    let mut link = Linkage {
        n,
        d: Vec::with_capacity(n * n.saturating_sub(1) / 2),
    };
    for i in 0..n {
        for j in i + 1..n {
            link.d.push(hamming(&points[i], &points[j]));
        }
    }
    let mut active = vec![true; n];
    let mut mins: Vec<Option<(u32, usize)>> = (0..n).map(|i| row_min(&link, &active, i)).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while merges.len() + 1 < n {
        let (a, (height, b)) = mins
            .iter()
            .enumerate()
            .filter(|(i, _)| active[*i])
            .filter_map(|(i, m)| m.map(|m| (i, m)))
            .min_by_key(|&(i, (d, j))| (d, i, j))
            .expect("two active clusters remain");
        merges.push(Merge { a, b, height });
        active[b] = false;
        mins[b] = None;
        for x in (0..n).filter(|&x| active[x] && x != a) {
            let merged = link.get(a, x).max(link.get(b, x));
            link.set(a, x, merged);
        }
        mins[a] = row_min(&link, &active, a);
        // Distances only grow under complete linkage, so a row minimum stays
        // valid unless it pointed at one of the merged slots.
        for x in 0..b {
            if active[x] && x != a && matches!(mins[x], Some((_, j)) if j == a || j == b) {
                mins[x] = row_min(&link, &active, x);
            }
        }
    }
    Ok(Dendrogram { n, merges })
}

/// Cut below the largest jump between consecutive merge heights; on ties
/// the later jump wins. With no positive jump everything is one cluster.
pub fn cut_dendrogram(dendrogram: &Dendrogram) -> ClusterAssignment {
    let heights: Vec<u32> = dendrogram.merges.iter().map(|m| m.height).collect();
    let mut applied = heights.len();
    let mut largest = 0;
    for (t, w) in heights.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if gap > 0 && gap >= largest {
            largest = gap;
            applied = t + 1;
        }
    }
    let mut slot: Vec<usize> = (0..dendrogram.n).collect();
    for m in &dendrogram.merges[..applied] {
        for s in slot.iter_mut() {
            if *s == m.b {
                *s = m.a;
            }
        }
    }
    ClusterAssignment::canonical(&slot, ClusterMethod::Ahc)
}

/// Complete-linkage clustering of bit-strings, cut at the largest gap.
pub fn ahc_complete(points: &[BitString]) -> Result<(ClusterAssignment, Dendrogram), ClusterError> {
    let tree = dendrogram(points)?;
    Ok((cut_dendrogram(&tree), tree))
}
