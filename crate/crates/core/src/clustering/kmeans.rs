use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ClusterAssignment, ClusterError, ClusterMethod};

pub(crate) const DEFAULT_MAX_ITERS: usize = 300;
const KNEE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Labels numbered by each cluster's smallest member.
    pub assignment: ClusterAssignment,
    /// Centroids in label order.
    pub centroids: Vec<Vec<f64>>,
    pub sse: f64,
    /// SSE after every assignment step, starting with the seeding.
    pub sse_history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_points(points: &[Vec<f64>]) -> Result<usize, ClusterError> {
    let first = points.first().ok_or(ClusterError::Empty)?;
    if let Some(bad) = points.iter().find(|p| p.len() != first.len()) {
        return Err(ClusterError::DimensionMismatch {
            left: first.len(),
            right: bad.len(),
        });
    }
    Ok(first.len())
}

/// Number of distinct points (`-0.0` and `0.0` count as equal).
pub fn distinct_count(points: &[Vec<f64>]) -> usize {
    let mut keys: Vec<Vec<u64>> = points
        .iter()
        .map(|p| {
            p.iter()
                .map(|&v| if v == 0.0 { 0 } else { v.to_bits() })
                .collect()
        })
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, sq_dist(point, &centroids[0]));
    for (c, centroid) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut sse = 0.0;
    let labels = points
        .iter()
        .map(|p| {
            let (c, d) = nearest(p, centroids);
            sse += d;
            c
        })
        .collect();
    (labels, sse)
}

fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut pick = d2
            .iter()
            .rposition(|&d| d > 0.0)
            .expect("k <= distinct points");
        for (i, &d) in d2.iter().enumerate() {
            if d > 0.0 && target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        let chosen = points[pick].clone();
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &chosen));
        }
        centroids.push(chosen);
    }
    centroids
}

fn update_centroids(points: &[Vec<f64>], labels: &[usize], centroids: &mut [Vec<f64>]) {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    for (c, (sum, count)) in sums.into_iter().zip(counts).enumerate() {
        if count > 0 {
            centroids[c] = sum.into_iter().map(|s| s / count as f64).collect();
        }
    }
}

/// Give each empty cluster the point farthest from the centroid of the
/// currently largest cluster.
fn repair_empty(points: &[Vec<f64>], labels: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let largest = (0..k)
            .max_by_key(|&c| (counts[c], std::cmp::Reverse(c)))
            .unwrap();
        let far = (0..points.len())
            .filter(|&i| labels[i] == largest)
            .max_by(|&a, &b| {
                sq_dist(&points[a], &centroids[largest])
                    .total_cmp(&sq_dist(&points[b], &centroids[largest]))
                    .then(b.cmp(&a))
            })
            .expect("largest cluster is non-empty");
        labels[far] = empty;
        centroids[empty] = points[far].clone();
        update_centroids(points, labels, centroids);
    }
}

/// K-Means++ seeding followed by Lloyd iterations until the assignment stops
/// changing or `max_iters` updates have run.
pub fn kmeans_pp(
    points: &[Vec<f64>],
    k: usize,
    max_iters: usize,
    seed: u64,
) -> Result<KMeansResult, ClusterError> {
    check_points(points)?;
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    let distinct = distinct_count(points);
    if k > distinct {
        return Err(ClusterError::KTooLarge { k, distinct });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(points, k, &mut rng);
    let (mut labels, sse) = assign(points, &centroids);
    let mut history = vec![sse];
    for _ in 0..max_iters {
        update_centroids(points, &labels, &mut centroids);
        repair_empty(points, &mut labels, &mut centroids);
        let (next, sse) = assign(points, &centroids);
        let prev = *history.last().expect("seeded");
        debug_assert!(
            sse <= prev + 1e-9 * prev.abs().max(1.0),
            "SSE rose from {prev} to {sse}"
        );
        history.push(sse);
        if next == labels {
            break;
        }
        labels = next;
    }
    repair_empty(points, &mut labels, &mut centroids);
    update_centroids(points, &labels, &mut centroids);

    let assignment = ClusterAssignment::canonical(&labels, ClusterMethod::Kmeans);
    let mut ordered = vec![Vec::new(); k];
    for (old, new) in labels.iter().zip(assignment.labels()) {
        if ordered[*new].is_empty() {
            ordered[*new] = centroids[*old].clone();
        }
    }
    let sse = points
        .iter()
        .zip(assignment.labels())
        .map(|(p, &l)| sq_dist(p, &ordered[l]))
        .sum();
    Ok(KMeansResult {
        assignment,
        centroids: ordered,
        sse,
        sse_history: history,
    })
}

/// `1..=min(10, ceil(sqrt(N)), distinct points)`.
pub fn default_k_range(points: &[Vec<f64>]) -> Result<RangeInclusive<usize>, ClusterError> {
    check_points(points)?;
    let root = (points.len() as f64).sqrt().ceil() as usize;
    Ok(1..=10.min(root).min(distinct_count(points)).max(1))
}

/// Knee of a decreasing curve: the point farthest below the chord joining
/// its normalized endpoints. `None` when no point sits measurably below it.
pub fn knee(ks: &[usize], sse: &[f64]) -> Option<usize> {
    if ks.len() < 3 || ks.len() != sse.len() {
        return None;
    }
    let (k_lo, k_hi) = (ks[0] as f64, ks[ks.len() - 1] as f64);
    let lo = sse.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sse.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 || hi.is_nan() || lo.is_nan() || k_hi <= k_lo {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for (&k, &s) in ks.iter().zip(sse) {
        let x = (k as f64 - k_lo) / (k_hi - k_lo);
        let y = (s - lo) / (hi - lo);
        let gap = (1.0 - x) - y;
        if best.is_none_or(|(_, g)| gap > g) {
            best = Some((k, gap));
        }
    }
    best.filter(|&(_, g)| g > KNEE_TOLERANCE).map(|(k, _)| k)
}

/// Run K-Means++ for every `k` in `k_range` and pick the knee of the SSE
/// curve, falling back to the smallest `k`.
pub fn choose_k_elbow(
    points: &[Vec<f64>],
    k_range: RangeInclusive<usize>,
    seed: u64,
) -> Result<usize, ClusterError> {
    let ks: Vec<usize> = k_range.collect();
    let Some(&first) = ks.first() else {
        return Err(ClusterError::ZeroK);
    };
    let sse: Vec<f64> = ks
        .par_iter()
        .map(|&k| kmeans_pp(points, k, DEFAULT_MAX_ITERS, seed).map(|r| r.sse))
        .collect::<Result<_, _>>()?;
    Ok(knee(&ks, &sse).unwrap_or(first))
}
