//! Asynchronous label propagation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Partition};
use crate::scalar::Real;

pub const LPA_MAX_SWEEPS: usize = 1000;

#[derive(Debug, Clone)]
pub struct LpaOutcome {
    pub partition: Partition,
    pub sweeps: usize,
    /// False when the sweep cap was hit while labels were still changing.
    pub converged: bool,
}

/// Asynchronous label propagation with seeded visit order. A node is
/// relabelled only when its current label is not among the most frequent
/// labels of its neighbourhood; a relabelling that ties picks uniformly among
/// the tied labels. Stops when a full sweep changes nothing (every node then
/// holds a maximal neighbourhood label) or after `max_sweeps`.
pub fn lpa<F: Real>(graph: &Graph<F>, seed: u64, max_sweeps: usize) -> LpaOutcome {
    let n = graph.num_nodes();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        order.shuffle(&mut rng);
        let mut changed = false;
        for &node in &order {
            if graph.degree(node) == 0 {
                continue;
            }
            counts.clear();
            for &nbr in graph.neighbors(node) {
                *counts.entry(labels[nbr]).or_insert(0) += 1;
            }
            let max = counts.values().copied().max().expect("degree checked");
            if counts.get(&labels[node]) == Some(&max) {
                continue;
            }
            let mut tied: Vec<usize> = counts
                .iter()
                .filter(|&(_, &c)| c == max)
                .map(|(&l, _)| l)
                .collect();
            tied.sort_unstable();
            labels[node] = tied[rng.random_range(0..tied.len())];
            changed = true;
        }
        if !changed {
            converged = true;
            break;
        }
    }
    LpaOutcome {
        partition: Partition::from_labels(&labels),
        sweeps,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::bridged_triangles;
    use super::*;
    use crate::datasets::load_bundled;

    #[test]
    fn bridged_triangles_usually_split_in_two() {
        let g = bridged_triangles();
        let mut hits = 0;
        for seed in 0..100 {
            let out = lpa(&g, seed, LPA_MAX_SWEEPS);
            assert!(out.converged);
            if out.partition.num_communities() == 2 {
                hits += 1;
            }
        }
        assert!(hits >= 90, "two-community outcomes: {hits}/100");
    }

    #[test]
    fn complete_graph_converges_to_one_label() {
        let mut edges = Vec::new();
        for u in 0..8 {
            for v in (u + 1)..8 {
                edges.push((u, v));
            }
        }
        let g = Graph::<f64>::from_edges(8, &edges).unwrap();
        for seed in 0..10 {
            let out = lpa(&g, seed, LPA_MAX_SWEEPS);
            assert!(out.converged);
            assert_eq!(out.partition.num_communities(), 1, "seed {seed}");
        }
    }

    #[test]
    fn converged_labels_are_neighbourhood_maximal() {
        let ds = load_bundled::<f64>("karate").unwrap();
        let out = lpa(&ds.graph, 3, LPA_MAX_SWEEPS);
        assert!(out.converged);
        let p = &out.partition;
        for u in 0..ds.graph.num_nodes() {
            let mut counts = std::collections::HashMap::new();
            for &v in ds.graph.neighbors(u) {
                *counts.entry(p.label_of(v)).or_insert(0usize) += 1;
            }
            let max = counts.values().copied().max().unwrap();
            assert_eq!(counts.get(&p.label_of(u)), Some(&max), "node {u}");
        }
    }

    #[test]
    fn karate_modal_community_count_is_three() {
        let ds = load_bundled::<f64>("karate").unwrap();
        let mut counts = std::collections::HashMap::new();
        for seed in 0..50 {
            let out = lpa(&ds.graph, seed, LPA_MAX_SWEEPS);
            *counts.entry(out.partition.num_communities()).or_insert(0) += 1;
        }
        let modal = counts.iter().max_by_key(|&(_, c)| c).unwrap();
        assert_eq!(*modal.0, 3, "distribution: {counts:?}");
    }

    #[test]
    fn deterministic_per_seed() {
        let ds = load_bundled::<f64>("karate").unwrap();
        let a = lpa(&ds.graph, 11, LPA_MAX_SWEEPS);
        let b = lpa(&ds.graph, 11, LPA_MAX_SWEEPS);
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.sweeps, b.sweeps);
    }
}
