//! Lloyd k-means with restart selection and order-independent seeding.
//!
//! Seeding follows the usual distance-squared weighting, but draws are keyed
//! by point content instead of input position: each point's selection key
//! derives from a hash of its coordinates, so permuting the input permutes
//! the clustering without changing its structure.

use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::Real;
use crate::walk::splitmix64;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("k must lie in 1..={1}, got {0}")]
    BadK(usize, usize),
    #[error("no points to cluster")]
    EmptyInput,
    #[error("point {0} has {1} coordinates, expected {2}")]
    RaggedInput(usize, usize, usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalize {
    None,
    /// Scale each point to unit length first; zero points are left alone.
    L2,
}

#[derive(Debug, Clone, Copy)]
pub struct KmeansParams<F: Real> {
    pub k: usize,
    pub max_iter: usize,
    /// Extra stop: quit once an iteration improves the objective by no more
    /// than this. Zero keeps only the exact assignment-stability stop.
    pub tol: F,
    pub seed: u64,
    pub restarts: usize,
    pub normalize: Normalize,
}

impl<F: Real> KmeansParams<F> {
    pub fn new(k: usize) -> Self {
        KmeansParams {
            k,
            max_iter: 100,
            tol: F::zero(),
            seed: 0,
            restarts: 10,
            normalize: Normalize::None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KmeansOutcome<F: Real> {
    /// Cluster index per point, aligned with `centroids`.
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<F>>,
    pub wcss: F,
    pub iterations: usize,
}

fn point_hash<F: Real>(seed: u64, round: u64, point: &[F]) -> u64 {
    let mut h = splitmix64(seed ^ splitmix64(round));
    for &c in point {
        h = splitmix64(h ^ c.to_f64().expect("finite coordinate").to_bits());
    }
    h
}

/// Maps a hash into (0, 1).
fn unit_from_hash(h: u64) -> f64 {
    ((h >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn dist2<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum()
}

/// Distance-squared-weighted seeding. Selection keys are `ln(u) / w` with
/// `u` hashed from point content, which realises an exponential race: the
/// winner is distributed as the usual weighted draw yet does not depend on
/// input order.
fn seed_centroids<F: Real>(points: &[Vec<F>], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let mut d2 = vec![f64::INFINITY; n];
    for round in 0..k {
        if let Some(&last) = chosen.last() {
            for i in 0..n {
                let d = dist2(&points[i], &points[last]).to_f64().unwrap();
                if d < d2[i] {
                    d2[i] = d;
                }
            }
        }
        let mut best: Option<(f64, f64, usize)> = None;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let u = unit_from_hash(point_hash(seed, round as u64, &points[i]));
            let key = if round == 0 {
                u
            } else if d2[i] > 0.0 {
                u.ln() / d2[i]
            } else {
                f64::NEG_INFINITY
            };
            // tie on key (duplicate content): keep the lowest index, which is
            // interchangeable with any other copy of the same point
            let candidate = (key, u, i);
            let better = match best {
                None => true,
                Some((bk, bu, _)) => key > bk || (key == bk && u > bu),
            };
            if better {
                best = Some(candidate);
            }
        }
        let (_, _, idx) = best.expect("fewer points than k was rejected earlier");
        taken[idx] = true;
        chosen.push(idx);
    }
    chosen
}

fn lloyd<F: Real>(
    points: &[Vec<F>],
    mut centroids: Vec<Vec<F>>,
    max_iter: usize,
    tol: F,
) -> KmeansOutcome<F> {
    let n = points.len();
    let k = centroids.len();
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; n];
    let mut wcss = F::infinity();
    let mut iterations = 0;
    let mut prev_reseeded = false;
    for _ in 0..max_iter {
        let mut new_wcss = F::zero();
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = (F::infinity(), 0usize);
            for (j, c) in centroids.iter().enumerate() {
                let d = dist2(p, c);
                if d < best.0 {
                    best = (d, j);
                }
            }
            if labels[i] != best.1 {
                labels[i] = best.1;
                changed = true;
            }
            new_wcss += best.0;
        }
        if !prev_reseeded {
            debug_assert!(
                new_wcss <= wcss * F::lit(1.0 + 1e-12) + F::lit(1e-9),
                "objective rose from {wcss} to {new_wcss}"
            );
        }
        let improvement = wcss - new_wcss;
        wcss = new_wcss;
        iterations += 1;

        let mut sums = vec![vec![F::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[labels[i]] += 1;
            for (s, &v) in sums[labels[i]].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut reseeded = false;
        let mut grabbed = vec![false; n];
        for j in 0..k {
            if counts[j] > 0 {
                let inv = F::one() / F::count(counts[j]);
                for (c, s) in centroids[j].iter_mut().zip(&sums[j]) {
                    *c = *s * inv;
                }
            } else {
                // park the empty centroid on the worst-served point
                let far = (0..n)
                    .filter(|&i| !grabbed[i])
                    .max_by(|&a, &b| {
                        dist2(&points[a], &centroids[labels[a]])
                            .partial_cmp(&dist2(&points[b], &centroids[labels[b]]))
                            .unwrap()
                            .then(b.cmp(&a))
                    })
                    .unwrap();
                grabbed[far] = true;
                centroids[j] = points[far].clone();
                reseeded = true;
            }
        }
        if !changed && !reseeded {
            break;
        }
        if !reseeded && improvement >= F::zero() && improvement <= tol && iterations > 1 {
            break;
        }
        prev_reseeded = reseeded;
    }
    KmeansOutcome {
        labels,
        centroids,
        wcss,
        iterations,
    }
}

/// Clusters rows into `k` groups, keeping the best of `restarts` seeded runs
/// (lowest objective, ties to the earliest restart).
pub fn kmeans<F: Real, P: AsRef<[F]> + Sync>(
    points: &[P],
    params: &KmeansParams<F>,
) -> Result<KmeansOutcome<F>, ClusterError> {
    let n = points.len();
    if n == 0 {
        return Err(ClusterError::EmptyInput);
    }
    if params.k == 0 || params.k > n {
        return Err(ClusterError::BadK(params.k, n));
    }
    let dim = points[0].as_ref().len();
    for (i, p) in points.iter().enumerate() {
        let row = p.as_ref();
        if row.len() != dim {
            return Err(ClusterError::RaggedInput(i, row.len(), dim));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ClusterError::NonFinite(i));
        }
    }
    let rows: Vec<Vec<F>> = points
        .iter()
        .map(|p| {
            let mut row = p.as_ref().to_vec();
            if params.normalize == Normalize::L2 {
                let norm = row.iter().map(|&v| v * v).sum::<F>().sqrt();
                if norm > F::zero() {
                    row.iter_mut().for_each(|v| *v /= norm);
                }
            }
            row
        })
        .collect();

    let restarts = params.restarts.max(1);
    let runs: Vec<KmeansOutcome<F>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let restart_seed = splitmix64(params.seed ^ splitmix64(r as u64 ^ 0xA076_1D64_78BD_642F));
            let init: Vec<Vec<F>> = seed_centroids(&rows, params.k, restart_seed)
                .into_iter()
                .map(|i| rows[i].clone())
                .collect();
            lloyd(&rows, init, params.max_iter, params.tol)
        })
        .collect();
    Ok(runs
        .into_iter()
        .min_by(|a, b| a.wcss.partial_cmp(&b.wcss).unwrap())
        .unwrap())
}
