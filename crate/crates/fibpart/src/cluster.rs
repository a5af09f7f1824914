//! One-dimensional clustering of slope data.
//!
//! Entries of a matrix row grow linearly, so the slopes `q[j] / j` over a
//! window of late columns concentrate around a small set of limits.  Two
//! clusterers are provided: complete-linkage agglomeration (which on
//! sorted 1-d data only ever merges adjacent clusters) and Lloyd-style
//! k-means with quantile seeding plus seeded random restarts.  Model
//! order is picked by silhouette score.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClusterError {
    #[error("no data points")]
    Empty,
    #[error("window {window} exceeds the {cols} available columns")]
    WindowTooLarge { window: usize, cols: usize },
    #[error("{points} points cannot form {k} clusters")]
    TooFewPoints { points: usize, k: usize },
    #[error("cluster count {0} must be at least 2")]
    BadK(usize),
    #[error("input contains a non-finite value")]
    NonFinite,
}

/// Slopes `row[j] / j` for the last `window` columns.  When the window
/// spans the whole row the undefined `j = 0` term is skipped.
pub fn extract_slopes(row: &[i64], window: usize) -> Result<Vec<f64>, ClusterError> {
    let cols = row.len();
    if window == 0 || cols == 0 {
        return Err(ClusterError::Empty);
    }
    if window > cols {
        return Err(ClusterError::WindowTooLarge { window, cols });
    }
    let start = (cols - window).max(1);
    Ok((start..cols).map(|j| row[j] as f64 / j as f64).collect())
}

/// A flat clustering of 1-d data.
#[derive(Debug, Clone, Serialize)]
pub struct Clustering {
    /// Cluster means, ascending.
    pub centers: Vec<f64>,
    /// Per-point cluster index, parallel to the input.
    pub labels: Vec<usize>,
    pub counts: Vec<usize>,
    /// Sum of squared distances to the assigned centers.
    pub wcss: f64,
}

fn finalize(values: &[f64], labels: Vec<usize>, k: usize) -> Clustering {
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&v, &l) in values.iter().zip(&labels) {
        sums[l] += v;
        counts[l] += 1;
    }
    let centers: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
        .collect();
    // relabel so that centers come out ascending
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centers[a].total_cmp(&centers[b]));
    let mut rank = vec![0usize; k];
    for (r, &old) in order.iter().enumerate() {
        rank[old] = r;
    }
    let labels: Vec<usize> = labels.into_iter().map(|l| rank[l]).collect();
    let centers: Vec<f64> = order.iter().map(|&o| centers[o]).collect();
    let counts: Vec<usize> = order.iter().map(|&o| counts[o]).collect();
    let wcss = values
        .iter()
        .zip(&labels)
        .map(|(&v, &l)| (v - centers[l]) * (v - centers[l]))
        .sum();
    Clustering {
        centers,
        labels,
        counts,
        wcss,
    }
}

fn validate(values: &[f64], k: usize) -> Result<(), ClusterError> {
    if values.is_empty() {
        return Err(ClusterError::Empty);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }
    if k < 2 {
        return Err(ClusterError::BadK(k));
    }
    if values.len() < k {
        return Err(ClusterError::TooFewPoints {
            points: values.len(),
            k,
        });
    }
    Ok(())
}

/// Complete-linkage agglomerative clustering into `k` clusters.  The
/// linkage distance of two clusters is the diameter of their union, so on
/// sorted data only adjacent clusters are ever merged; ties break toward
/// the left.
pub fn complete_linkage(values: &[f64], k: usize) -> Result<Clustering, ClusterError> {
    validate(values, k)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    // clusters are intervals [start, end] of the sorted sequence
    let mut bounds: Vec<(usize, usize)> = (0..sorted.len()).map(|i| (i, i)).collect();
    while bounds.len() > k {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for i in 0..bounds.len() - 1 {
            let d = sorted[bounds[i + 1].1] - sorted[bounds[i].0];
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        bounds[best].1 = bounds[best + 1].1;
        bounds.remove(best + 1);
    }
    let mut labels = vec![0usize; values.len()];
    for (c, &(s, e)) in bounds.iter().enumerate() {
        for i in s..=e {
            labels[order[i]] = c;
        }
    }
    Ok(finalize(values, labels, k))
}

fn nearest(centers: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, &center) in centers.iter().enumerate() {
        let d = (v - center).abs();
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// One Lloyd run from the given initial centers.  Returns the labels and
/// the per-iteration objective values, which never increase.
fn lloyd(values: &[f64], mut centers: Vec<f64>) -> (Vec<usize>, Vec<f64>) {
    let k = centers.len();
    let mut labels = vec![usize::MAX; values.len()];
    let mut history = Vec::new();
    for _ in 0..200 {
        let new_labels: Vec<usize> = values.iter().map(|&v| nearest(&centers, v)).collect();
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&v, &l) in values.iter().zip(&new_labels) {
            sums[l] += v;
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c] / counts[c] as f64;
            } else {
                // revive an empty cluster at the worst-fit point
                let (far, _) = values
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| {
                        let da = (**a - centers[nearest(&centers, **a)]).abs();
                        let db = (**b - centers[nearest(&centers, **b)]).abs();
                        da.total_cmp(&db)
                    })
                    .unwrap();
                centers[c] = values[far];
            }
        }
        let wcss: f64 = values
            .iter()
            .zip(&new_labels)
            .map(|(&v, &l)| (v - centers[l]) * (v - centers[l]))
            .sum();
        history.push(wcss);
        if new_labels == labels {
            break;
        }
        labels = new_labels;
    }
    (labels, history)
}

/// Seeded k-means: one quantile-initialized run plus `restarts` random
/// restarts, keeping the labeling with the least within-cluster sum of
/// squares.  Deterministic for a fixed seed.
pub fn kmeans(values: &[f64], k: usize, restarts: usize, seed: u64) -> Result<Clustering, ClusterError> {
    validate(values, k)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantile_centers: Vec<f64> = (0..k)
        .map(|i| sorted[((2 * i + 1) * sorted.len() / (2 * k)).min(sorted.len() - 1)])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Clustering> = None;
    for r in 0..=restarts {
        let centers = if r == 0 {
            quantile_centers.clone()
        } else {
            let mut picks: Vec<f64> = sample(&mut rng, values.len(), k)
                .iter()
                .map(|i| values[i])
                .collect();
            picks.sort_by(f64::total_cmp);
            picks
        };
        let (labels, _) = lloyd(values, centers);
        let candidate = finalize(values, labels, k);
        if best.as_ref().is_none_or(|b| candidate.wcss < b.wcss) {
            best = Some(candidate);
        }
    }
    Ok(best.unwrap())
}

/// Mean silhouette score of a labeling.  Points in singleton clusters
/// score 0; at least two clusters must be present.
pub fn silhouette(values: &[f64], labels: &[usize]) -> Result<f64, ClusterError> {
    if values.is_empty() || values.len() != labels.len() {
        return Err(ClusterError::Empty);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }
    let k = labels.iter().max().unwrap() + 1;
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); k];
    for (&v, &l) in values.iter().zip(labels) {
        members[l].push(v);
    }
    if members.iter().filter(|m| !m.is_empty()).count() < 2 {
        return Err(ClusterError::TooFewPoints {
            points: values.len(),
            k: 2,
        });
    }
    let mut total = 0.0;
    for (&v, &l) in values.iter().zip(labels) {
        if members[l].len() == 1 {
            continue;
        }
        let a: f64 = members[l].iter().map(|&u| (v - u).abs()).sum::<f64>()
            / (members[l].len() - 1) as f64;
        let b = members
            .iter()
            .enumerate()
            .filter(|(c, m)| *c != l && !m.is_empty())
            .map(|(_, m)| m.iter().map(|&u| (v - u).abs()).sum::<f64>() / m.len() as f64)
            .min_by(f64::total_cmp)
            .unwrap();
        total += (b - a) / a.max(b);
    }
    Ok(total / values.len() as f64)
}

/// Full slope analysis of one matrix row: silhouette scores for each
/// cluster count in `2..=k_max`, the winning count, and its clustering.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub row: usize,
    pub window: usize,
    pub points: usize,
    pub silhouette_by_k: Vec<(usize, f64)>,
    pub chosen_k: usize,
    pub silhouette: f64,
    pub centers: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn analyze_row(
    row_index: usize,
    row: &[i64],
    window: usize,
    k_max: usize,
    seed: u64,
) -> Result<ClusterReport, ClusterError> {
    let slopes = extract_slopes(row, window)?;
    if k_max < 2 {
        return Err(ClusterError::BadK(k_max));
    }
    let mut silhouette_by_k = Vec::new();
    let mut best: Option<(usize, f64, Clustering)> = None;
    for k in 2..=k_max.min(slopes.len().saturating_sub(1)) {
        let clustering = kmeans(&slopes, k, 4, seed ^ k as u64)?;
        let s = silhouette(&slopes, &clustering.labels)?;
        silhouette_by_k.push((k, s));
        if best.as_ref().is_none_or(|&(_, bs, _)| s > bs) {
            best = Some((k, s, clustering));
        }
    }
    let (chosen_k, s, clustering) = best.ok_or(ClusterError::TooFewPoints {
        points: slopes.len(),
        k: 2,
    })?;
    Ok(ClusterReport {
        row: row_index,
        window,
        points: slopes.len(),
        silhouette_by_k,
        chosen_k,
        silhouette: s,
        centers: clustering.centers,
        counts: clustering.counts,
    })
}
